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

"""Closed-loop simulation and forward-invariance time bounds."""

import math

import numpy as np
from oslo_log import log as logging
from scipy import linalg

from cbf_servo_lib.analysis import margins
from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.design import augmentation
from cbf_servo_lib.design import cbf_design
from cbf_servo_lib.design import observer_baseline
from cbf_servo_lib.i18n import _
from cbf_servo_lib.lti import core
from cbf_servo_lib.sim import disturbance

LOG = logging.getLogger(__name__)


def truth_plant(scenario):
    """Plant integrated as the truth model of a scenario.

    The actuator, when simulated, is unmodeled: only the truth plant
    carries it while the observer and the design use ``scenario.plant``.
    """
    actuator = scenario.actuator
    if not (scenario.actuator_in_sim and actuator):
        return scenario.plant
    channels = None if actuator.channels is data_models.Unset else (
        actuator.channels)
    return margins.with_actuator(scenario.plant, actuator.omega_n,
                                 actuator.zeta, channels)


def _exogenous(scenario):
    m = scenario.plant.m
    command = scenario.command
    if not command:
        zero = np.zeros(m)
        return lambda t: zero
    E = scenario.command_matrix
    if E is data_models.Unset:
        if command.value.size != m:
            raise exceptions.InputError(
                fault_string=_("A command of size %(size)d needs a command "
                               "matrix for %(m)d inputs.") %
                {'size': command.value.size, 'm': m})
        E = np.eye(m)
    if E.shape[1] != command.value.size:
        raise exceptions.DimensionMismatch(
            matrix='command_matrix', expected=(m, command.value.size),
            actual=E.shape)
    return lambda t: E @ command.value_at(t)


def _warn_marginal(scenario):
    plant, design = scenario.plant, scenario.design
    eigs = core.eigen_report(cbf_design.constrained_matrix(plant, design))
    if eigs.marginal:
        LOG.warning('A - B H_pi^-1 H_x is marginally stable (max real part '
                    '%g); estimate errors may not decay on active '
                    'constraints', eigs.max_real_part)
    elif not eigs.hurwitz:
        LOG.warning('A - B H_pi^-1 H_x is unstable (max real part %g)',
                    eigs.max_real_part)


def simulate(scenario, scenario_hash=data_models.Unset):
    """Integrate plant, observer, baseline and augmentation with RK4.

    The augmentation is evaluated at every Runge-Kutta stage.  With
    ``state_feedback`` the controller uses the true state in place of the
    estimate.

    :param scenario: The scenario.
    :type scenario: Scenario
    :param scenario_hash: Recorded in the trajectory metadata.
    :raises InputError: Augmentation requested without a design.
    :raises NumericalBlowUp: The state became non-finite.
    :returns: A Trajectory with floor(t_final / dt) + 1 samples.
    """
    plant, gains, spec = scenario.plant, scenario.gains, scenario.spec
    design = scenario.design
    augment = scenario.augmentation_enabled
    if augment and not design:
        raise exceptions.InputError(
            fault_string=_("Augmentation is enabled but no design was "
                           "built."))
    if design:
        _warn_marginal(scenario)

    truth = truth_plant(scenario)
    n, n_t, m = plant.n, truth.n, plant.m
    profile = disturbance.build_profile(scenario.disturbance, scenario.dt,
                                        scenario.t_final, scenario.base_dir)
    exogenous = _exogenous(scenario)
    state_feedback = scenario.state_feedback
    m_lim = spec.m

    def control(t, x, x_hat):
        estimate = x[:n] if state_feedback else x_hat
        u_bl = -gains.K @ estimate + exogenous(t)
        if design:
            pi, slacks, active = augmentation.augmented_input(
                estimate, u_bl, design, spec)
        else:
            pi, slacks, active = np.zeros(m), None, np.zeros(m_lim)
        if not augment:
            pi = np.zeros(m)
        return estimate, u_bl, pi, slacks, active

    def disturbance_input(t):
        value = profile.value(t)
        return truth.B_dist @ np.full(truth.n_d, value), value

    def rhs(t, z):
        x, x_hat = z[:n_t], z[n_t:]
        _estimate, u_bl, pi, _slacks, _active = control(t, x, x_hat)
        u = u_bl + pi
        forcing, _value = disturbance_input(t)
        x_dot = truth.A @ x + truth.B @ u + forcing
        if state_feedback:
            return np.concatenate([x_dot, np.zeros(n)])
        y = truth.C @ x + truth.D @ u
        return np.concatenate(
            [x_dot, observer_baseline.observer_rhs(x_hat, u, y, plant,
                                                   gains.L)])

    count = scenario.sample_count
    dt = scenario.dt
    time = np.arange(count) * dt
    records = {key: [] for key in ('x', 'x_hat', 'u_bl', 'pi', 'u', 'y',
                                   'y_lim', 'delta', 'dH_min', 'dH_max',
                                   'disturbance')}
    x0 = np.concatenate([scenario.x0, np.zeros(n_t - n)])
    z = np.concatenate([x0, scenario.xhat0])
    zero_slack = np.zeros(m_lim)

    LOG.debug('Simulating %d samples, dt=%g s, augmentation %s',
              count, dt, 'on' if augment else 'off')
    for index, t in enumerate(time):
        x, x_hat = z[:n_t], z[n_t:]
        estimate, u_bl, pi, slacks, active = control(t, x, x_hat)
        u = u_bl + pi
        records['x'].append(x[:n])
        records['x_hat'].append(estimate)
        records['u_bl'].append(u_bl)
        records['pi'].append(pi)
        records['u'].append(u)
        records['y'].append(truth.C @ x + truth.D @ u)
        records['y_lim'].append(truth.C_lim @ x)
        records['delta'].append(active)
        records['dH_min'].append(slacks.dH_min if slacks else zero_slack)
        records['dH_max'].append(slacks.dH_max if slacks else zero_slack)
        records['disturbance'].append(profile.value(t))
        if index + 1 == count:
            break
        try:
            z = core.rk4_step(rhs, z, t, dt)
        except exceptions.NumericalBlowUp as e:
            LOG.error('Simulation diverged at t=%g s', e.time)
            raise

    return data_models.Trajectory(time=time, dt=dt,
                                  scenario_hash=scenario_hash, **records)


def violation_report(tr, spec, t_start=0.0, tolerance=0.0):
    """Per-output limit violations of a trajectory.

    :param tr: The trajectory.
    :type tr: Trajectory
    :param spec: The limits.
    :type spec: ConstraintSpec
    :param t_start: Samples before this time are ignored.
    :param tolerance: Excursions up to this size are not violations.
    :returns: A ViolationReport.
    """
    window = tr.time >= t_start - 1e-12
    time = tr.time[window]
    records = []
    for index in range(spec.m):
        y = tr.y_lim[window, index]
        below = spec.y_min[index] - y
        above = y - spec.y_max[index]
        violated = np.maximum(below, above) > tolerance
        record = data_models.ViolationRecord(
            constraint=index,
            max_below=max(0.0, float(np.max(below, initial=-np.inf))),
            max_above=max(0.0, float(np.max(above, initial=-np.inf))))
        if np.any(violated):
            hits = time[violated]
            record.first_time = float(hits[0])
            record.last_time = float(hits[-1])
            record.duration = float(hits.size * tr.dt)
            LOG.info('Constraint %d violated between %g s and %g s, max '
                     '%g', index, hits[0], hits[-1], record.max_violation)
        records.append(record)
    return data_models.ViolationReport(records=records, t_start=t_start,
                                       tolerance=tolerance)


def _envelope_times(eigs):
    decay = eigs.max_real_part
    horizon = constants.ENVELOPE_HORIZON / abs(decay)
    count = constants.ENVELOPE_MIN_POINTS
    frequency = float(np.max(np.abs(eigs.eigenvalues.imag)))
    if frequency > 0.0:
        # sixteen samples per half period of the fastest oscillation
        count = max(count, int(math.ceil(
            16.0 * horizon * frequency / math.pi)) + 1)
    return np.union1d(
        np.linspace(0.0, horizon, count),
        np.logspace(math.log10(horizon * 1e-4), math.log10(horizon),
                    constants.ENVELOPE_MIN_POINTS))


def envelope_constant(plant, L, c_lim_row, alpha_star):
    """Envelope k of the estimation-error term of one constraint.

    k = 1.1 sup_t |c (A + alpha* I) e^{(A - L C) t}| e^{-lambda_max t},
    sampled up to 10 / |lambda_max| on a logarithmic grid merged with a
    uniform grid that resolves the fastest observer oscillation.

    :raises NotHurwitz: A - L C is not Hurwitz.
    :returns: A positive float, zero only for a zero row.
    """
    L = np.asarray(L, dtype=float)
    observer = plant.A - L @ plant.C
    eigs = core.eigen_report(observer)
    if not eigs.hurwitz:
        raise exceptions.NotHurwitz(
            max_real_part=eigs.max_real_part,
            fault_string=_("The observer A - L C is not Hurwitz."))
    decay = eigs.max_real_part
    row = np.asarray(c_lim_row, dtype=float) @ (
        plant.A + alpha_star * np.eye(plant.n))
    peak = max(float(linalg.norm(row @ linalg.expm(observer * t))) *
               math.exp(-decay * t) for t in _envelope_times(eigs))
    return constants.ENVELOPE_SAFETY * peak


def invariance_time(h_0, e0_norm, alpha_star, lambda_max, k):
    """Time after which a constraint side is guaranteed to hold.

    t = ln(|s| |h_0| / (k |e_0|)) / s with s = lambda_max + alpha*,
    clamped at zero.

    :param h_0: Constraint value at t = 0, non-positive.
    :param e0_norm: Norm of the initial estimation error.
    :raises ParameterRuleError: lambda_max + alpha* >= 0.
    :raises InputError: h_0 > 0.
    :returns: Time in seconds, infinite when h_0 = 0 with e_0 != 0.
    """
    rate = lambda_max + alpha_star
    if rate >= 0.0:
        raise exceptions.ParameterRuleError(
            fault_string=_("alpha* = %(alpha)g is not below the observer "
                           "decay rate %(decay)g.") %
            {'alpha': alpha_star, 'decay': -lambda_max})
    if h_0 > 0.0:
        raise exceptions.InputError(
            fault_string=_("The initial state violates the constraint "
                           "(h = %g).") % h_0)
    if e0_norm == 0.0 or k == 0.0:
        return 0.0
    if h_0 == 0.0:
        return math.inf
    return max(0.0, math.log(abs(rate) * abs(h_0) / (k * e0_norm)) / rate)


def theorem_bounds(scenario):
    """Envelope constants and invariance times of every constraint.

    Rows whose parameter rule fails get NaN k and times; a side already
    violated at t = 0 gets an infinite time.

    :returns: List of BoundRecord, one per limited output.
    """
    plant, spec = scenario.plant, scenario.spec
    L = scenario.gains.L
    eigs = core.eigen_report(plant.A - L @ plant.C)
    lambda_max = eigs.max_real_part
    y_lim_0 = plant.C_lim @ scenario.x0
    e0_norm = (0.0 if scenario.state_feedback
               else float(linalg.norm(scenario.x0 - scenario.xhat0)))

    records = []
    for index in range(spec.m):
        alpha_star = spec.alpha_star(index)
        h_min_0 = float(spec.y_min[index] - y_lim_0[index])
        h_max_0 = float(y_lim_0[index] - spec.y_max[index])
        if scenario.state_feedback:
            rule_holds, k = True, math.nan
            times = [0.0 if h <= 0.0 else math.inf
                     for h in (h_min_0, h_max_0)]
        else:
            rule_holds = eigs.hurwitz and alpha_star < abs(lambda_max)
            if rule_holds:
                k = envelope_constant(plant, L, plant.C_lim[index],
                                      alpha_star)
                times = [math.inf if h > 0.0 else invariance_time(
                    h, e0_norm, alpha_star, lambda_max, k)
                    for h in (h_min_0, h_max_0)]
            else:
                LOG.warning('Constraint %d: alpha* %g is not below the '
                            'observer decay rate %g', index, alpha_star,
                            abs(lambda_max))
                k = math.nan
                times = [math.nan, math.nan]
        records.append(data_models.BoundRecord(
            constraint=index, alpha_star=alpha_star, lambda_max=lambda_max,
            rule_holds=rule_holds, k=k, e0_norm=e0_norm, h_min_0=h_min_0,
            h_max_0=h_max_0, t_min=times[0], t_max=times[1]))
    return records
