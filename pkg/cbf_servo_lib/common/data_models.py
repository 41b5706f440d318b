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

import math

import numpy as np

from cbf_servo_lib.common import constants
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.i18n import _


def _to_primitive(value):
    if isinstance(value, np.ndarray):
        if value.ndim == 0:
            return _to_primitive(value.item())
        return [_to_primitive(item) for item in value]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_to_primitive(item) for item in value]
    if isinstance(value, dict):
        return {key: _to_primitive(item) for key, item in value.items()}
    return value


class BaseDataModel():
    def to_dict(self, calling_classes=None, recurse=False,
                render_unsets=False, **kwargs):
        """Converts a data model to a dictionary of primitives."""
        calling_classes = calling_classes or []
        ret = {}
        for attr, value in self.__dict__.items():
            if attr.startswith('_') or not kwargs.get(attr, True):
                continue

            if recurse:
                if isinstance(value, list):
                    ret[attr] = []
                    for item in value:
                        if isinstance(item, BaseDataModel):
                            if type(self) not in calling_classes:
                                ret[attr].append(
                                    item.to_dict(calling_classes=(
                                        calling_classes + [type(self)]),
                                        recurse=True,
                                        render_unsets=render_unsets))
                            else:
                                ret[attr].append(None)
                        else:
                            ret[attr].append(_to_primitive(item))
                elif isinstance(value, BaseDataModel):
                    if type(self) not in calling_classes:
                        ret[attr] = value.to_dict(
                            recurse=recurse,
                            render_unsets=render_unsets,
                            calling_classes=calling_classes + [type(self)])
                    else:
                        ret[attr] = None
                elif isinstance(value, UnsetType):
                    if render_unsets:
                        ret[attr] = None
                    else:
                        continue
                else:
                    ret[attr] = _to_primitive(value)
            else:
                if (isinstance(value, (BaseDataModel, list)) or
                        isinstance(value, UnsetType)):
                    if render_unsets:
                        ret[attr] = None
                    else:
                        continue
                else:
                    ret[attr] = _to_primitive(value)

        return ret

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.to_dict(recurse=True) == other.to_dict(recurse=True)
        return False

    def __ne__(self, other):
        return not self.__eq__(other)

    @classmethod
    def from_dict(cls, dict):
        return cls(**dict)


class UnsetType():
    def __bool__(self):
        return False
    __nonzero__ = __bool__

    def __repr__(self):
        return 'Unset'


Unset = UnsetType()


def as_matrix(value, name, shape=None, dtype=float):
    """Validate and copy a two dimensional real matrix.

    :param value: Nested sequence or array.
    :param name: Matrix name used in error messages.
    :type name: string
    :param shape: Expected shape; ``None`` entries are not checked.
    :type shape: tuple
    :raises DimensionMismatch: Wrong rank or shape.
    :raises InputError: Non-finite entries.
    :returns: A new float ndarray.
    """
    try:
        matrix = np.array(value, dtype=dtype)
    except (TypeError, ValueError):
        raise exceptions.InputError(
            fault_string=_("Matrix %s is not numeric.") % name)
    if matrix.ndim != 2:
        raise exceptions.DimensionMismatch(
            matrix=name, expected=shape or '2-D', actual=matrix.shape)
    if shape is not None:
        for expected, actual in zip(shape, matrix.shape):
            if expected is not None and expected != actual:
                raise exceptions.DimensionMismatch(
                    matrix=name, expected=tuple(shape), actual=matrix.shape)
    if not np.all(np.isfinite(matrix)):
        raise exceptions.InputError(
            fault_string=_("Matrix %s has non-finite entries.") % name)
    return matrix


def as_vector(value, name, size=None):
    """Validate and copy a finite real vector."""
    try:
        vector = np.array(value, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise exceptions.InputError(
            fault_string=_("Vector %s is not numeric.") % name)
    if size is not None and vector.size != size:
        raise exceptions.DimensionMismatch(
            matrix=name, expected=(size,), actual=vector.shape)
    if not np.all(np.isfinite(vector)):
        raise exceptions.InputError(
            fault_string=_("Vector %s has non-finite entries.") % name)
    return vector


class Plant(BaseDataModel):
    """Continuous LTI model with limited and disturbance channels.

    x' = A x + B u + B_dist d, y = C x + D u, y_lim = C_lim x.
    """

    def __init__(self, A, B, C, D=Unset, C_lim=Unset, B_dist=Unset):
        self.A = as_matrix(A, 'A')
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise exceptions.DimensionMismatch(
                matrix='A', expected=(n, n), actual=self.A.shape)
        self.B = as_matrix(B, 'B', (n, None))
        self.C = as_matrix(C, 'C', (None, n))
        m = self.B.shape[1]
        n_y = self.C.shape[0]
        self.D = (np.zeros((n_y, m)) if D is Unset
                  else as_matrix(D, 'D', (n_y, m)))
        self.C_lim = (np.zeros((0, n)) if C_lim is Unset
                      else as_matrix(C_lim, 'C_lim', (None, n)))
        self.B_dist = (np.zeros((n, 0)) if B_dist is Unset
                       else as_matrix(B_dist, 'B_dist', (n, None)))

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def n_y(self):
        return self.C.shape[0]

    @property
    def m_lim(self):
        return self.C_lim.shape[0]

    @property
    def n_d(self):
        return self.B_dist.shape[1]


class EigenReport(BaseDataModel):
    def __init__(self, eigenvalues, max_real_part, hurwitz, marginal,
                 tol_hurwitz=constants.TOL_HURWITZ):
        self.eigenvalues = np.asarray(eigenvalues, dtype=complex)
        self.max_real_part = float(max_real_part)
        self.hurwitz = bool(hurwitz)
        self.marginal = bool(marginal)
        self.tol_hurwitz = float(tol_hurwitz)


class ConstraintSpec(BaseDataModel):
    """Box limits on the limited outputs and their CBF eigenvalues."""

    def __init__(self, y_min, y_max, lambdas):
        self.y_min = as_vector(y_min, 'y_min')
        self.y_max = as_vector(y_max, 'y_max', self.y_min.size)
        if not np.all(self.y_min < self.y_max):
            raise exceptions.InputError(
                fault_string=_("y_min must be strictly below y_max."))
        if len(lambdas) != self.y_min.size:
            raise exceptions.DimensionMismatch(
                matrix='lambdas', expected=(self.y_min.size,),
                actual=(len(lambdas),))
        self.lambdas = []
        for index, row in enumerate(lambdas):
            values = []
            for item in np.atleast_1d(row):
                if np.iscomplexobj(item) and np.imag(item) != 0:
                    raise exceptions.InputError(
                        fault_string=_("CBF eigenvalues of output %d must "
                                       "be real.") % index)
                value = float(np.real(item))
                if not math.isfinite(value) or value >= 0.0:
                    raise exceptions.InputError(
                        fault_string=_("CBF eigenvalues of output %d must "
                                       "be negative.") % index)
                values.append(value)
            if not values:
                raise exceptions.InputError(
                    fault_string=_("Output %d has no CBF eigenvalue.") % index)
            self.lambdas.append(values)

    @property
    def m(self):
        return self.y_min.size

    def alpha_star(self, index):
        """Slowest CBF rate of one output, min_j(-lambda_ij)."""
        return min(-value for value in self.lambdas[index])


class AugmentationDesign(BaseDataModel):
    def __init__(self, r, H_x, H_pi, H_pi_inv, alpha_pi,
                 condition_number=Unset):
        self.r = [int(value) for value in r]
        self.H_x = as_matrix(H_x, 'H_x')
        self.H_pi = as_matrix(H_pi, 'H_pi')
        self.H_pi_inv = as_matrix(H_pi_inv, 'H_pi_inv')
        self.alpha_pi = as_matrix(alpha_pi, 'alpha_pi')
        self.condition_number = condition_number


class CbfAbilityReport(BaseDataModel):
    def __init__(self, h_pi_nonsingular, constrained_eigs, cbf_able,
                 warnings=None):
        self.h_pi_nonsingular = bool(h_pi_nonsingular)
        self.constrained_eigs = constrained_eigs
        self.cbf_able = bool(cbf_able)
        self.warnings = list(warnings or [])


class SlackPair(BaseDataModel):
    def __init__(self, dH_min, dH_max):
        self.dH_min = np.asarray(dH_min, dtype=float)
        self.dH_max = np.asarray(dH_max, dtype=float)


class PwaForm(BaseDataModel):
    """Piecewise-affine view of the augmented control law.

    u_bl + pi = -(K + K_cbf) x_hat + F y_cmd_sel + modified_baseline u_exo
    """

    def __init__(self, delta, K_cbf, F, y_cmd_sel, modified_baseline):
        self.delta = np.asarray(delta, dtype=float)
        self.K_cbf = np.asarray(K_cbf, dtype=float)
        self.F = np.asarray(F, dtype=float)
        self.y_cmd_sel = np.asarray(y_cmd_sel, dtype=float)
        self.modified_baseline = np.asarray(modified_baseline, dtype=float)


class GainSet(BaseDataModel):
    def __init__(self, K, L, provenance=constants.PROVENANCE_GIVEN):
        if provenance not in constants.PROVENANCES:
            raise exceptions.InputError(
                fault_string=_("Unknown gain provenance %s.") % provenance)
        self.K = as_matrix(K, 'K')
        self.L = as_matrix(L, 'L')
        self.provenance = provenance


class AreProblem(BaseDataModel):
    """Weights of the algebraic Riccati equation A'P + PA - PBR^-1B'P + Q."""

    def __init__(self, A, B, Q, R):
        self.A = as_matrix(A, 'A')
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise exceptions.DimensionMismatch(
                matrix='A', expected=(n, n), actual=self.A.shape)
        self.B = as_matrix(B, 'B', (n, None))
        m = self.B.shape[1]
        self.Q = as_matrix(Q, 'Q', (n, n))
        self.R = as_matrix(R, 'R', (m, m))
        for name, weight in (('Q', self.Q), ('R', self.R)):
            scale = max(1.0, np.abs(weight).max())
            if np.abs(weight - weight.T).max() > (
                    constants.TOL_SYMMETRY * scale):
                raise exceptions.InputError(
                    fault_string=_("%s must be symmetric.") % name)
        try:
            np.linalg.cholesky(self.R)
        except np.linalg.LinAlgError:
            raise exceptions.InputError(
                fault_string=_("R must be positive definite."))


class PhysicalPlant(BaseDataModel):
    """Plant with regulated outputs, before the PI servo extension."""

    def __init__(self, A_p, B_p, C_p, C_p_reg, C_p_lim, D_p=Unset,
                 D_p_reg=Unset, B_dist=Unset):
        self.A_p = as_matrix(A_p, 'A_p')
        n_p = self.A_p.shape[0]
        if self.A_p.shape != (n_p, n_p):
            raise exceptions.DimensionMismatch(
                matrix='A_p', expected=(n_p, n_p), actual=self.A_p.shape)
        self.B_p = as_matrix(B_p, 'B_p', (n_p, None))
        m_u = self.B_p.shape[1]
        self.C_p = as_matrix(C_p, 'C_p', (None, n_p))
        self.C_p_reg = as_matrix(C_p_reg, 'C_p_reg', (m_u, n_p))
        self.C_p_lim = as_matrix(C_p_lim, 'C_p_lim', (None, n_p))
        self.D_p = (np.zeros((self.C_p.shape[0], m_u)) if D_p is Unset
                    else as_matrix(D_p, 'D_p', (self.C_p.shape[0], m_u)))
        self.D_p_reg = (np.zeros((m_u, m_u)) if D_p_reg is Unset
                        else as_matrix(D_p_reg, 'D_p_reg', (m_u, m_u)))
        self.B_dist = (np.zeros((n_p, 0)) if B_dist is Unset
                       else as_matrix(B_dist, 'B_dist', (n_p, None)))

    @property
    def n_p(self):
        return self.A_p.shape[0]

    @property
    def m_u(self):
        return self.B_p.shape[1]

    @property
    def n_z(self):
        return self.C_p_lim.shape[0]


class ExtendedSystem(BaseDataModel):
    def __init__(self, plant, K_ext, spec, command_matrix):
        self.plant = plant
        self.K_ext = as_matrix(K_ext, 'K_ext', (plant.m, plant.n))
        self.spec = spec
        self.command_matrix = as_matrix(command_matrix, 'command_matrix',
                                        (plant.m, None))


class Actuator(BaseDataModel):
    """Second order actuator appended to selected input channels."""

    def __init__(self, omega_n, zeta, channels=Unset):
        self.omega_n = float(omega_n)
        self.zeta = float(zeta)
        if not (self.omega_n > 0.0 and self.zeta > 0.0):
            raise exceptions.InputError(
                fault_string=_("Actuator omega_n and zeta must be "
                               "positive."))
        self.channels = (Unset if channels is Unset
                         else [int(channel) for channel in channels])


class CommandSchedule(BaseDataModel):
    """Exogenous command, zero before ``time`` and ``value`` afterwards."""

    def __init__(self, value, time=0.0):
        self.value = as_vector(value, 'command')
        self.time = float(time)

    def value_at(self, t):
        if t < self.time:
            return np.zeros_like(self.value)
        return self.value


class DisturbanceSpec(BaseDataModel):
    def __init__(self, kind=constants.DIST_NONE, params=None):
        if kind not in constants.DISTURBANCE_KINDS:
            raise exceptions.InputError(
                fault_string=_("Unknown disturbance profile %s.") % kind)
        self.kind = kind
        self.params = dict(params or {})


class FrequencyGrid(BaseDataModel):
    def __init__(self, count=constants.GRID_COUNT, low=constants.GRID_LOW,
                 high=constants.GRID_HIGH):
        self.count = int(count)
        self.low = float(low)
        self.high = float(high)
        if self.count < 2 or not 0.0 < self.low < self.high:
            raise exceptions.InputError(
                fault_string=_("Frequency grid needs at least two points "
                               "and 0 < low < high."))

    @property
    def omega(self):
        return np.logspace(math.log10(self.low), math.log10(self.high),
                           self.count)


class AnalysisConfig(BaseDataModel):
    def __init__(self, grid=Unset, deltas=Unset, channels=Unset,
                 sweep_mode=constants.SWEEP_DIAGONAL, sweep_grid=Unset,
                 break_point=constants.BREAK_OBSERVER):
        self.grid = FrequencyGrid() if grid is Unset else grid
        self.deltas = Unset if deltas is Unset else list(deltas)
        self.channels = (Unset if channels is Unset
                         else [int(channel) for channel in channels])
        if sweep_mode not in constants.SWEEP_MODES:
            raise exceptions.InputError(
                fault_string=_("Unknown sweep mode %s.") % sweep_mode)
        self.sweep_mode = sweep_mode
        self.sweep_grid = (Unset if sweep_grid is Unset
                           else [float(value) for value in sweep_grid])
        if break_point not in constants.BREAK_POINTS:
            raise exceptions.InputError(
                fault_string=_("Unknown break point %s.") % break_point)
        self.break_point = break_point


class Scenario(BaseDataModel):
    """Everything needed to simulate and analyse one closed loop."""

    def __init__(self, plant, gains, spec, x0, xhat0, name=Unset,
                 design=Unset, t_final=constants.DEFAULT_T_FINAL,
                 dt=constants.DEFAULT_DT, command=Unset,
                 command_matrix=Unset, disturbance=Unset,
                 augmentation_enabled=True, actuator=Unset,
                 actuator_in_sim=False, state_feedback=False,
                 analysis=Unset, base_dir=None):
        self.name = name
        self.plant = plant
        self.gains = gains
        self.spec = spec
        self.design = design
        self.x0 = as_vector(x0, 'x0', plant.n)
        self.xhat0 = as_vector(xhat0, 'xhat0', plant.n)
        self.t_final = float(t_final)
        self.dt = float(dt)
        if not self.dt > 0.0 or self.t_final < self.dt:
            raise exceptions.InputError(
                fault_string=_("Need dt > 0 and t_final >= dt."))
        self.command = command
        self.command_matrix = (
            Unset if command_matrix is Unset
            else as_matrix(command_matrix, 'command_matrix', (plant.m, None)))
        self.disturbance = (DisturbanceSpec() if disturbance is Unset
                            else disturbance)
        self.augmentation_enabled = bool(augmentation_enabled)
        self.actuator = actuator
        self.actuator_in_sim = bool(actuator_in_sim)
        self.state_feedback = bool(state_feedback)
        self.analysis = AnalysisConfig() if analysis is Unset else analysis
        self._base_dir = base_dir

    @property
    def base_dir(self):
        return self._base_dir

    @property
    def sample_count(self):
        return int(math.floor(self.t_final / self.dt + 1e-9)) + 1


class Trajectory(BaseDataModel):
    """Uniformly sampled closed-loop signals, one row per sample."""

    def __init__(self, time, x, x_hat, u_bl, pi, u, y, y_lim, delta, dH_min,
                 dH_max, disturbance, dt, scenario_hash=Unset):
        self.time = np.asarray(time, dtype=float)
        self.x = np.asarray(x, dtype=float)
        self.x_hat = np.asarray(x_hat, dtype=float)
        self.u_bl = np.asarray(u_bl, dtype=float)
        self.pi = np.asarray(pi, dtype=float)
        self.u = np.asarray(u, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.y_lim = np.asarray(y_lim, dtype=float)
        self.delta = np.asarray(delta, dtype=float)
        self.dH_min = np.asarray(dH_min, dtype=float)
        self.dH_max = np.asarray(dH_max, dtype=float)
        self.disturbance = np.asarray(disturbance, dtype=float)
        self.dt = float(dt)
        self.scenario_hash = scenario_hash

    @property
    def sample_count(self):
        return self.time.size


class ViolationRecord(BaseDataModel):
    def __init__(self, constraint, max_below=0.0, max_above=0.0,
                 first_time=None, last_time=None, duration=0.0):
        self.constraint = int(constraint)
        self.max_below = float(max_below)
        self.max_above = float(max_above)
        self.first_time = first_time
        self.last_time = last_time
        self.duration = float(duration)

    @property
    def max_violation(self):
        return max(self.max_below, self.max_above)


class ViolationReport(BaseDataModel):
    def __init__(self, records, t_start=0.0, tolerance=0.0):
        self.records = list(records)
        self.t_start = float(t_start)
        self.tolerance = float(tolerance)

    @property
    def empty(self):
        return all(record.first_time is None for record in self.records)


class BoundRecord(BaseDataModel):
    """Forward-invariance time bound of one constraint."""

    def __init__(self, constraint, alpha_star, lambda_max, rule_holds, k,
                 e0_norm, h_min_0, h_max_0, t_min, t_max):
        self.constraint = int(constraint)
        self.alpha_star = float(alpha_star)
        self.lambda_max = float(lambda_max)
        self.rule_holds = bool(rule_holds)
        self.k = float(k)
        self.e0_norm = float(e0_norm)
        self.h_min_0 = float(h_min_0)
        self.h_max_0 = float(h_max_0)
        self.t_min = float(t_min)
        self.t_max = float(t_max)

    @property
    def t_bound(self):
        return max(self.t_min, self.t_max)


class ChannelMargin(BaseDataModel):
    def __init__(self, channel, gm_db=math.inf, pm_deg=math.nan,
                 phase_crossover=math.nan, gain_crossover=math.nan,
                 note=Unset):
        self.channel = int(channel)
        self.gm_db = float(gm_db)
        self.pm_deg = float(pm_deg)
        self.phase_crossover = float(phase_crossover)
        self.gain_crossover = float(gain_crossover)
        self.note = note


class DiskMargin(BaseDataModel):
    def __init__(self, alpha, gm_low_db, gm_high_db, pm_deg):
        self.alpha = float(alpha)
        self.gm_low_db = float(gm_low_db)
        self.gm_high_db = float(gm_high_db)
        self.pm_deg = float(pm_deg)


class MarginReport(BaseDataModel):
    def __init__(self, delta, actuator, channels, disk):
        self.delta = str(delta)
        self.actuator = bool(actuator)
        self.channels = list(channels)
        self.disk = disk

    def channel(self, index):
        for margin in self.channels:
            if margin.channel == index:
                return margin
        raise exceptions.InputError(
            fault_string=_("Channel %d was not analysed.") % index)


class SweepPoint(BaseDataModel):
    def __init__(self, alphas, valid, reports=None, reason=Unset):
        self.alphas = [float(value) for value in alphas]
        self.valid = bool(valid)
        self.reports = list(reports or [])
        self.reason = reason


class ScenarioFile(BaseDataModel):
    """Parsed scenario text, section name to ordered key/value mapping."""

    def __init__(self, sections, path=Unset):
        self.sections = {name: dict(values)
                         for name, values in sections.items()}
        self.path = path

    def has(self, section):
        return section in self.sections

    def get(self, section, key, default=Unset):
        return self.sections.get(section, {}).get(key, default)


class RunManifest(BaseDataModel):
    def __init__(self, tool_version, scenario_hash, subcommand, files):
        self.tool_version = tool_version
        self.scenario_hash = scenario_hash
        self.subcommand = subcommand
        self.files = list(files)
