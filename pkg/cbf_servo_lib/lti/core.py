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

"""Linear algebra contracts shared by the design and simulation code."""

import numpy as np
from oslo_log import log as logging
from scipy import linalg

from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.i18n import _

LOG = logging.getLogger(__name__)


def _square(M, name):
    matrix = data_models.as_matrix(M, name)
    if matrix.shape[0] != matrix.shape[1]:
        raise exceptions.DimensionMismatch(
            matrix=name, expected=(matrix.shape[0], matrix.shape[0]),
            actual=matrix.shape)
    return matrix


def eigen_report(M, tol_hurwitz=constants.TOL_HURWITZ):
    """Spectrum of a real square matrix.

    Eigenvalues are sorted by real part, then imaginary part.

    :param M: Real square matrix.
    :param tol_hurwitz: Real parts within this distance of zero count as
        marginal.
    :type tol_hurwitz: float
    :raises InputError: Non-square or non-finite matrix.
    :returns: An EigenReport.
    """
    matrix = _square(M, 'M')
    eigenvalues = linalg.eigvals(matrix)
    eigenvalues = eigenvalues[np.lexsort((eigenvalues.imag,
                                          eigenvalues.real))]
    max_real_part = float(np.max(eigenvalues.real))
    hurwitz = max_real_part < -tol_hurwitz
    marginal = not hurwitz and max_real_part <= tol_hurwitz
    return data_models.EigenReport(
        eigenvalues=eigenvalues, max_real_part=max_real_part,
        hurwitz=hurwitz, marginal=marginal, tol_hurwitz=tol_hurwitz)


def numerical_rank(M, tol_rank=constants.TOL_RANK):
    singular_values = linalg.svdvals(M)
    if singular_values.size == 0 or singular_values[0] == 0.0:
        return 0
    return int(np.sum(singular_values > tol_rank * singular_values[0]))


def pbh_check(plant, tol_rank=constants.TOL_RANK,
              tol_hurwitz=constants.TOL_HURWITZ):
    """Popov-Belevitch-Hautus stabilizability and observability tests.

    :param plant: The plant to test.
    :type plant: Plant
    :returns: Tuple (stabilizable, observable).
    """
    n = plant.n
    identity = np.eye(n)
    stabilizable = True
    observable = True
    for eigenvalue in linalg.eigvals(plant.A):
        shifted = eigenvalue * identity - plant.A
        if eigenvalue.real >= -tol_hurwitz:
            if numerical_rank(np.hstack([shifted, plant.B]),
                              tol_rank) < n:
                stabilizable = False
        if numerical_rank(np.hstack([eigenvalue * identity - plant.A.T,
                                     plant.C.T]), tol_rank) < n:
            observable = False
    LOG.debug('PBH test: stabilizable=%s observable=%s', stabilizable,
              observable)
    return stabilizable, observable


def _finite_stage(value, t):
    stage = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(stage)):
        raise exceptions.NumericalBlowUp(time=t)
    return stage


def rk4_step(f, x, t, h):
    """One classical fourth order Runge-Kutta step of x' = f(t, x).

    :param f: Vector field called as ``f(t, x)``.
    :param x: State at ``t``.
    :param t: Time, s.
    :param h: Step size, s.
    :raises InputError: Non-positive step.
    :raises NumericalBlowUp: A stage or the result is not finite.
    :returns: State at ``t + h``.
    """
    if not h > 0.0:
        raise exceptions.InputError(
            fault_string=_("Step size must be positive."))
    x = np.asarray(x, dtype=float)
    half = 0.5 * h
    k1 = _finite_stage(f(t, x), t)
    k2 = _finite_stage(f(t + half, x + half * k1), t)
    k3 = _finite_stage(f(t + half, x + half * k2), t)
    k4 = _finite_stage(f(t + h, x + h * k3), t)
    return _finite_stage(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t)


def expm_action(M, v, t):
    """e^{M t} v by scaling and squaring."""
    return linalg.expm(np.asarray(M, dtype=float) * t) @ np.asarray(v)


def solve_linear(M, b, name='M', cond_max=constants.HPI_COND_MAX):
    """Dense solve of M x = b rejecting singular or ill-conditioned M."""
    matrix = _square(M, name)
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > cond_max:
        raise exceptions.InputError(
            fault_string=_("Matrix %(name)s is singular (condition number "
                           "%(cond)g).") % {'name': name, 'cond': cond})
    return linalg.solve(matrix, b)
