#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

"""Loop gain at the plant input and its stability margins.

The switching matrix delta is frozen, so the augmented controller is the
linear observer-based compensator with gain K + K_cbf.  Breaking the loop
at the plant input gives the m x m loop gain

    L_u(s) = K_t (sI - A_c)^-1 L (C_t (sI - A_t)^-1 B_t + D_t)

with A_c = A - B K_t - L C + L D K_t.  The (A_t, B_t, C_t, D_t) model is
the nominal plant or the plant with an unmodeled actuator.

Breaking at the plant input with the true state fed back instead gives
K_t (sI - A_t)^-1 B_t, the loop an observer with full loop transfer
recovery approaches.

Loop-at-a-time margins of channel i close every other channel:
l_i = L_ii - L_io (I + L_oo)^-1 L_oi.
"""

import math

import numpy as np
from oslo_log import log as logging
from scipy import linalg

from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.i18n import _

LOG = logging.getLogger(__name__)


def with_actuator(plant, omega_n, zeta, channels=None):
    """Route input channels through second order actuators.

    Each actuator adds states (p, p') with
    p'' = -2 zeta omega_n p' + omega_n^2 (u_cmd - p); the plant sees p in
    place of the commanded input.

    :param plant: The nominal plant.
    :type plant: Plant
    :param omega_n: Natural frequency, rad/s.
    :param zeta: Damping ratio.
    :param channels: Input indices to route, all by default.
    :returns: A Plant with 2 len(channels) extra states.
    """
    actuator = data_models.Actuator(omega_n, zeta)
    channels = list(range(plant.m)) if channels is None else list(channels)
    for channel in channels:
        if not 0 <= channel < plant.m:
            raise exceptions.InputError(
                fault_string=_("Actuator channel %d does not exist.") %
                channel)
    n, k = plant.n, len(channels)
    wn, wn2 = actuator.omega_n, actuator.omega_n ** 2
    A = np.zeros((n + 2 * k, n + 2 * k))
    A[:n, :n] = plant.A
    B = np.zeros((n + 2 * k, plant.m))
    B[:n] = plant.B
    C = np.zeros((plant.n_y, n + 2 * k))
    C[:, :n] = plant.C
    D = plant.D.copy()
    for index, channel in enumerate(channels):
        position = n + 2 * index
        rate = position + 1
        A[:n, position] = plant.B[:, channel]
        A[position, rate] = 1.0
        A[rate, position] = -wn2
        A[rate, rate] = -2.0 * actuator.zeta * wn
        B[:n, channel] = 0.0
        B[rate, channel] = wn2
        C[:, position] = plant.D[:, channel]
        D[:, channel] = 0.0
    C_lim = np.hstack([plant.C_lim, np.zeros((plant.m_lim, 2 * k))])
    B_dist = np.vstack([plant.B_dist, np.zeros((2 * k, plant.n_d))])
    return data_models.Plant(A=A, B=B, C=C, D=D, C_lim=C_lim, B_dist=B_dist)


def parse_delta(bits, m):
    """'10' -> diag(1, 0); the first character is the first constraint."""
    if len(bits) != m or any(bit not in '01' for bit in bits):
        raise exceptions.InputError(
            fault_string=_("Delta %(bits)s must be %(m)d binary digits.") %
            {'bits': bits, 'm': m})
    return np.diag([float(bit) for bit in bits])


def delta_bits(delta):
    return ''.join('1' if value else '0' for value in np.diag(delta))


def total_gain(gains, design=None, delta=None):
    """K + H_pi^-1 delta (H_x - H_pi K)."""
    K = gains.K
    if design is None or delta is None or not np.any(delta):
        return K.copy()
    return K + design.H_pi_inv @ delta @ (design.H_x - design.H_pi @ K)


class LoopTransfer():
    """Frequency response of the input loop gain for one delta."""

    def __init__(self, plant, gains, design=None, delta=None,
                 truth_plant=None, tol_pole=constants.TOL_POLE,
                 break_point=constants.BREAK_OBSERVER):
        if break_point not in constants.BREAK_POINTS:
            raise exceptions.InputError(
                fault_string=_("Unknown break point %s.") % break_point)
        self.plant = plant
        self.actuated = truth_plant is not None
        self.truth = truth_plant if self.actuated else plant
        self.delta = (np.zeros((plant.m, plant.m)) if delta is None
                      else np.asarray(delta, dtype=float))
        self.K_t = total_gain(gains, design, self.delta)
        L = gains.L
        self.A_c = (plant.A - plant.B @ self.K_t - L @ plant.C +
                    L @ plant.D @ self.K_t)
        self.L = L
        self.break_point = break_point
        self.tol_pole = tol_pole
        self._plant_poles = linalg.eigvals(self.truth.A)
        self._controller_poles = (
            linalg.eigvals(self.A_c)
            if break_point == constants.BREAK_OBSERVER else np.zeros(0))

    @property
    def m(self):
        return self.plant.m

    def _check_pole(self, s, omega):
        for poles in (self._plant_poles, self._controller_poles):
            if poles.size and np.min(np.abs(poles - s)) <= (
                    self.tol_pole * (1.0 + abs(s))):
                raise exceptions.PoleAtGridPoint(
                    frequency=omega,
                    fault_string=_("Frequency %g rad/s coincides with a "
                                   "pole.") % omega)

    def at(self, s):
        """Loop gain matrix at complex frequency s."""
        self._check_pole(s, abs(s))
        truth = self.truth
        try:
            if self.break_point == constants.BREAK_STATE_FEEDBACK:
                states = linalg.solve(s * np.eye(truth.n) - truth.A, truth.B)
                return self.K_t @ states[:self.plant.n]
            response = truth.C @ linalg.solve(
                s * np.eye(truth.n) - truth.A, truth.B) + truth.D
            controller = self.K_t @ linalg.solve(
                s * np.eye(self.plant.n) - self.A_c, self.L)
        except linalg.LinAlgError:
            raise exceptions.PoleAtGridPoint(frequency=abs(s))
        return controller @ response

    def __call__(self, omega):
        return self.at(1j * omega)

    def channel(self, index):
        """Scalar loop-at-a-time response of one input channel."""
        def response(omega):
            return loop_at_a_time(self(omega), index)
        return response


def loop_gain_at(s, delta, plant, gains, design=None):
    """L_u(s; delta) broken at the plant input.

    :raises PoleAtGridPoint: s sits on a plant or compensator pole.
    :returns: m x m complex matrix.
    """
    return LoopTransfer(plant, gains, design, delta).at(s)


def loop_at_a_time(Lm, index):
    m = Lm.shape[0]
    if m == 1:
        return complex(Lm[0, 0])
    others = [i for i in range(m) if i != index]
    L_oo = Lm[np.ix_(others, others)]
    L_io = Lm[index, others]
    L_oi = Lm[others, index]
    closed = linalg.solve(np.eye(m - 1) + L_oo, L_oi)
    return complex(Lm[index, index] - L_io @ closed)


def frequency_response(transfer, omega):
    """Evaluate ``transfer`` on a grid, dropping singular points.

    :returns: Tuple (kept frequencies, responses).
    """
    kept = []
    values = []
    for w in omega:
        try:
            values.append(transfer(w))
        except (exceptions.PoleAtGridPoint, linalg.LinAlgError):
            LOG.info('Skipping frequency %g rad/s: pole on the grid', w)
            continue
        kept.append(w)
    return np.asarray(kept), np.asarray(values)


def _wrap(angle):
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def _bisect(func, low, high, rel_tol=constants.BISECTION_REL_TOL):
    """Root of func in [low, high] in log frequency; func changes sign."""
    f_low = func(low)
    for _iteration in range(constants.BISECTION_MAX_ITER):
        if high - low <= rel_tol * low:
            break
        mid = math.sqrt(low * high)
        f_mid = func(mid)
        if (f_mid > 0.0) == (f_low > 0.0):
            low, f_low = mid, f_mid
        else:
            high = mid
    return math.sqrt(low * high)


def _phase_margin(phase):
    """Degrees from the phase to the nearest -180 deg (mod 360)."""
    return 180.0 - abs(math.degrees(_wrap(phase)))


def classical_margins(response, grid):
    """Gain and phase margins of a scalar loop.

    PM is the distance from the phase at the first 0 dB crossing to the
    nearest -180 deg (mod 360), so it lies in [0, 180].  GM is minus the
    gain at the first -180 deg (mod 360) crossing.  Crossings
    are refined by bisection on ``response``.  GM is infinite without a
    phase crossover; PM is NaN without a gain crossover.

    :param response: Callable returning the complex loop gain at omega.
    :param grid: The frequency grid.
    :type grid: FrequencyGrid
    :returns: Tuple (gm_db, pm_deg, phase_crossover, gain_crossover).
    """
    omega, values = frequency_response(response, grid.omega)
    if omega.size < 2:
        raise exceptions.InputError(
            fault_string=_("Too few valid frequency points."))
    magnitude = np.abs(values)
    phase = np.unwrap(np.angle(values))

    def unwrapped(w, k):
        return phase[k] + _wrap(np.angle(response(w)) - phase[k])

    gm_db, pm_deg = math.inf, math.nan
    phase_crossover, gain_crossover = math.nan, math.nan

    log_mag = np.log(np.maximum(magnitude, 1e-300))
    for k in range(omega.size - 1):
        if (log_mag[k] > 0.0) != (log_mag[k + 1] > 0.0):
            gain_crossover = _safe_bisect(
                lambda w: math.log(max(abs(response(w)), 1e-300)),
                omega[k], omega[k + 1])
            crossing_phase = _safe_phase(unwrapped, gain_crossover, k,
                                         phase)
            pm_deg = _phase_margin(crossing_phase)
            break

    branch = np.floor((phase + math.pi) / (2.0 * math.pi))
    for k in range(omega.size - 1):
        if branch[k] != branch[k + 1]:
            target = (max(branch[k], branch[k + 1]) * 2.0 - 1.0) * math.pi
            phase_crossover = _safe_bisect(
                lambda w, k=k: unwrapped(w, k) - target,
                omega[k], omega[k + 1])
            gain = abs(response(phase_crossover))
            gm_db = -20.0 * math.log10(max(gain, 1e-300))
            break
    else:
        tail = np.diff(phase[-max(3, omega.size // 20):])
        if not (np.all(tail <= 0.0) or np.all(tail >= 0.0)):
            LOG.warning('Phase is not monotone near the grid edge, an '
                        'infinite gain margin may be optimistic')

    return gm_db, pm_deg, phase_crossover, gain_crossover


def _safe_bisect(func, low, high):
    try:
        return _bisect(func, low, high)
    except exceptions.PoleAtGridPoint:
        return math.sqrt(low * high)


def _safe_phase(unwrapped, w, k, phase):
    try:
        return unwrapped(w, k)
    except exceptions.PoleAtGridPoint:
        return phase[k]


def disk_margins(transfer, grid,
                 cond_max=constants.DISK_INVERSE_COND_MAX):
    """Guaranteed simultaneous margins from return difference singular
    values.

    alpha = min over omega of min(sigma_min(I + L), sigma_min(I + L^-1));
    gains in [1/(1 + alpha), 1/(1 - alpha)] and phases up to
    2 asin(alpha / 2) are tolerated.

    :returns: A DiskMargin.
    """
    omega, values = frequency_response(transfer, grid.omega)
    alpha = math.inf
    for w, Lm in zip(omega, values):
        Lm = np.atleast_2d(Lm)
        identity = np.eye(Lm.shape[0])
        alpha = min(alpha, float(linalg.svdvals(identity + Lm)[-1]))
        singular = linalg.svdvals(Lm)
        if singular[0] >= cond_max * singular[-1]:
            LOG.debug('Singular loop gain at %g rad/s, skipping the '
                      'inverse branch', w)
            continue
        alpha = min(alpha, float(
            linalg.svdvals(identity + linalg.inv(Lm))[-1]))
    gm_low = 20.0 * math.log10(1.0 / (1.0 + alpha))
    gm_high = math.inf if alpha >= 1.0 else 20.0 * math.log10(
        1.0 / (1.0 - alpha))
    pm = 180.0 if alpha >= 2.0 else math.degrees(2.0 * math.asin(alpha / 2.0))
    return data_models.DiskMargin(alpha=alpha, gm_low_db=gm_low,
                                  gm_high_db=gm_high, pm_deg=pm)


def crossover_note(response, grid):
    """Which side of 0 dB a loop without a gain crossover stays on."""
    _omega, values = frequency_response(response, grid.omega)
    if values.size and np.all(np.abs(values) > 1.0):
        return constants.NOTE_ABOVE_UNITY
    return constants.NOTE_BELOW_UNITY


def transfer_margins(transfer, grid, channels=None):
    """Classical margins per channel and disk margins of one loop.

    A channel without a gain crossover keeps a NaN phase margin and
    carries a note saying whether its gain stays below or above 0 dB.
    """
    channels = list(range(transfer.m)) if channels is None else channels
    results = []
    for channel in channels:
        response = transfer.channel(channel)
        gm_db, pm_deg, w_pc, w_gc = classical_margins(response, grid)
        note = data_models.Unset
        if math.isnan(w_gc):
            note = crossover_note(response, grid)
            LOG.info('Channel %d, delta=%s: %s', channel,
                     delta_bits(transfer.delta), note)
        results.append(data_models.ChannelMargin(
            channel=channel, gm_db=gm_db, pm_deg=pm_deg,
            phase_crossover=w_pc, gain_crossover=w_gc, note=note))
    report = data_models.MarginReport(
        delta=delta_bits(transfer.delta), actuator=transfer.actuated,
        channels=results, disk=disk_margins(transfer, grid))
    LOG.debug('Margins for delta=%s actuator=%s: %s', report.delta,
              report.actuator,
              ', '.join('ch%d GM %.3g dB PM %.3g deg' % (
                  c.channel, c.gm_db, c.pm_deg) for c in results))
    return report


def margin_report(plant, gains, design, delta, grid, truth_plant=None,
                  channels=None, break_point=constants.BREAK_OBSERVER):
    """Classical margins per channel and disk margins for one delta."""
    transfer = LoopTransfer(plant, gains, design, delta, truth_plant,
                            break_point=break_point)
    return transfer_margins(transfer, grid, channels)


def bode_trace(transfer, grid, channels):
    """Rows (omega, |l_i| dB, phase_i deg, ...) with unwrapped phase."""
    columns = []
    omega = grid.omega
    for channel in channels:
        kept, values = frequency_response(transfer.channel(channel), omega)
        full = np.full(omega.size, np.nan, dtype=complex)
        full[np.isin(omega, kept)] = values
        columns.append(full)
    rows = []
    phases = [np.degrees(np.unwrap(np.angle(np.nan_to_num(col))))
              for col in columns]
    for index, w in enumerate(omega):
        row = [w]
        for col, ph in zip(columns, phases):
            value = col[index]
            row.append(20.0 * math.log10(max(abs(value), 1e-300))
                       if np.isfinite(value) else math.nan)
            row.append(ph[index] if np.isfinite(value) else math.nan)
        rows.append(row)
    return rows


def nyquist_trace(transfer, grid, channels):
    """Rows (omega, Re l_i, Im l_i, ...)."""
    rows = []
    for w in grid.omega:
        row = [w]
        for channel in channels:
            try:
                value = transfer.channel(channel)(w)
            except (exceptions.PoleAtGridPoint, linalg.LinAlgError):
                value = complex(math.nan, math.nan)
            row.extend([value.real, value.imag])
        rows.append(row)
    return rows


def default_deltas(m):
    """Every activity pattern, '00', '10', '01', '11' for m = 2."""
    return [''.join(reversed(format(code, '0%db' % m)))
            for code in range(2 ** m)]


def loop_transfers(plant, gains, design, analysis, actuator=None):
    """Loop transfers for every requested delta, nominal then actuated.

    :param analysis: Grid, delta patterns, channels and break point.
    :type analysis: AnalysisConfig
    :param actuator: Appended to the truth loop for a second pass.
    :type actuator: Actuator
    :raises InputError: A nonzero delta without a design.
    :returns: List of LoopTransfer.
    """
    deltas = analysis.deltas or default_deltas(plant.m_lim)
    truths = [None]
    if actuator:
        truths.append(with_actuator(
            plant, actuator.omega_n, actuator.zeta,
            actuator.channels or None))
    transfers = []
    for truth in truths:
        for bits in deltas:
            delta = parse_delta(bits, plant.m_lim)
            if np.any(delta) and not design:
                raise exceptions.InputError(
                    fault_string=_("Delta %s needs an augmentation "
                                   "design.") % bits)
            transfers.append(LoopTransfer(
                plant, gains, design or None, delta, truth,
                break_point=analysis.break_point))
    return transfers


def table_margins(plant, gains, design, analysis, actuator=None):
    """Margin reports of every loop from ``loop_transfers``."""
    channels = analysis.channels or list(range(plant.m))
    return [transfer_margins(transfer, analysis.grid, channels)
            for transfer in loop_transfers(plant, gains, design, analysis,
                                           actuator)]
