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

import numpy as np
from oslo_log import log as logging
from scipy import linalg

from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.i18n import _
from cbf_servo_lib.lti import core

LOG = logging.getLogger(__name__)


def _require_square_limits(plant):
    if plant.m_lim != plant.m:
        raise exceptions.DimensionMismatch(
            matrix='C_lim', expected=(plant.m, plant.n),
            actual=plant.C_lim.shape)


def relative_degrees(plant, tol_zero=constants.TOL_ZERO):
    """Relative degree of every limited output.

    r_i is the smallest k >= 1 for which the Markov parameter
    C_lim_i A^(k-1) B is nonzero relative to
    |C_lim_i| |A|^(k-1) |B|.

    :param plant: Plant with as many limited outputs as inputs.
    :type plant: Plant
    :param tol_zero: Relative threshold of the Markov parameter test.
    :type tol_zero: float
    :raises DimensionMismatch: m_lim differs from m.
    :raises IllDefinedRelativeDegree: No k <= n qualifies for an output.
    :returns: List of relative degrees.
    """
    _require_square_limits(plant)
    norm_a = linalg.norm(plant.A, 2)
    norm_b = linalg.norm(plant.B, 2)
    degrees = []
    for index, row in enumerate(plant.C_lim):
        norm_row = linalg.norm(row)
        markov_row = row.copy()
        found = None
        for k in range(1, plant.n + 1):
            markov = markov_row @ plant.B
            threshold = tol_zero * norm_row * norm_a ** (k - 1) * norm_b
            if linalg.norm(markov) > threshold:
                found = k
                break
            markov_row = markov_row @ plant.A
        if found is None:
            raise exceptions.IllDefinedRelativeDegree(output_index=index)
        degrees.append(found)
    return degrees


def build_design(plant, spec, tol_zero=constants.TOL_ZERO,
                 cond_max=constants.HPI_COND_MAX):
    """Sensitivity matrices of the modified constraints.

    Row i of H_x is C_lim_i prod_j (A - lambda_ij I), row i of H_pi is
    C_lim_i A^(r_i - 1) B and alpha_pi is diag(prod_j -lambda_ij).

    :param plant: The plant.
    :type plant: Plant
    :param spec: Limits and CBF eigenvalues, r_i eigenvalues per output.
    :type spec: ConstraintSpec
    :raises InputError: Eigenvalue count differs from the relative degree.
    :raises SingularSensitivity: H_pi is singular.
    :returns: An AugmentationDesign.
    """
    degrees = relative_degrees(plant, tol_zero)
    if spec.m != plant.m_lim:
        raise exceptions.DimensionMismatch(
            matrix='y_min', expected=(plant.m_lim,), actual=(spec.m,))
    n = plant.n
    identity = np.eye(n)
    H_x = np.zeros((plant.m_lim, n))
    H_pi = np.zeros((plant.m_lim, plant.m))
    alphas = np.zeros(plant.m_lim)
    for index, (row, degree) in enumerate(zip(plant.C_lim, degrees)):
        lambdas = spec.lambdas[index]
        if len(lambdas) != degree:
            raise exceptions.InputError(
                fault_string=_("Output %(index)d has relative degree "
                               "%(degree)d but %(count)d CBF eigenvalues.") %
                {'index': index, 'degree': degree, 'count': len(lambdas)})
        filtered = row.copy()
        for value in lambdas:
            filtered = filtered @ (plant.A - value * identity)
        H_x[index] = filtered
        H_pi[index] = row @ np.linalg.matrix_power(plant.A, degree - 1) @ (
            plant.B)
        alphas[index] = np.prod([-value for value in lambdas])

    condition_number = float(np.linalg.cond(H_pi))
    LOG.debug('H_pi condition number %g', condition_number)
    if not np.isfinite(condition_number) or condition_number > cond_max:
        raise exceptions.SingularSensitivity(
            condition_number=condition_number)
    return data_models.AugmentationDesign(
        r=degrees, H_x=H_x, H_pi=H_pi, H_pi_inv=linalg.inv(H_pi),
        alpha_pi=np.diag(alphas), condition_number=condition_number)


def constrained_matrix(plant, design):
    """A - B H_pi^-1 H_x, independent of the baseline gain."""
    return plant.A - plant.B @ design.H_pi_inv @ design.H_x


def check_cbf_able(plant, spec, tol_hurwitz=constants.TOL_HURWITZ):
    """Report whether the plant is CBF-able for the given eigenvalues.

    Design failures, including eigenvalue lists that do not match the
    relative degrees, are recorded in the report instead of raised.

    :returns: A CbfAbilityReport.
    """
    warnings = []
    try:
        design = build_design(plant, spec)
    except (exceptions.InputError,
            exceptions.IllDefinedRelativeDegree,
            exceptions.SingularSensitivity) as e:
        warnings.append(str(e))
        LOG.warning('Design failed: %s', e)
        return data_models.CbfAbilityReport(
            h_pi_nonsingular=False, constrained_eigs=None, cbf_able=False,
            warnings=warnings)

    eigs = core.eigen_report(constrained_matrix(plant, design), tol_hurwitz)
    if eigs.marginal:
        warnings.append(
            'marginal mode: A - B H_pi^-1 H_x has an eigenvalue with real '
            'part %.3g' % eigs.max_real_part)
    elif not eigs.hurwitz:
        warnings.append(
            'unstable mode: A - B H_pi^-1 H_x has an eigenvalue with real '
            'part %.3g' % eigs.max_real_part)
    for warning in warnings:
        LOG.warning('Not CBF-able, %s', warning)
    return data_models.CbfAbilityReport(
        h_pi_nonsingular=True, constrained_eigs=eigs, cbf_able=eigs.hurwitz,
        warnings=warnings)


def check_parameter_rule(spec, observer_eigs):
    """Per output, is the CBF rate alpha* slower than the observer decay?

    :param spec: The constraint specification.
    :type spec: ConstraintSpec
    :param observer_eigs: Spectrum of A - L C.
    :type observer_eigs: EigenReport
    :raises NotHurwitz: The observer does not converge.
    :returns: List of booleans, one per limited output.
    """
    if not observer_eigs.hurwitz:
        raise exceptions.NotHurwitz(
            max_real_part=observer_eigs.max_real_part,
            fault_string=_("The observer A - L C is not Hurwitz."))
    decay = abs(observer_eigs.max_real_part)
    return [spec.alpha_star(index) < decay for index in range(spec.m)]
