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
from scipy import signal

from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.design import cbf_design
from cbf_servo_lib.i18n import _
from cbf_servo_lib.lti import core

LOG = logging.getLogger(__name__)


def care_residual(p, P):
    """Frobenius norm of A'P + PA - P B R^-1 B' P + Q."""
    gain_term = P @ p.B @ linalg.solve(p.R, p.B.T @ P)
    residual = p.A.T @ P + P @ p.A - gain_term + p.Q
    return float(linalg.norm(residual))


def _initial_gain(p):
    spectrum = linalg.eigvals(p.A)
    if np.max(spectrum.real) < -constants.TOL_HURWITZ:
        return np.zeros((p.B.shape[1], p.A.shape[0]))
    shift = 1.0 + np.max(np.abs(spectrum.real))
    poles = [-shift * (1.0 + 0.1 * k) for k in range(p.A.shape[0])]
    return signal.place_poles(p.A, p.B, poles).gain_matrix


def _newton_kleinman(p, tol, max_iter):
    K = _initial_gain(p)
    scale = linalg.norm(p.Q)
    P = None
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        A_k = p.A - p.B @ K
        P = linalg.solve_continuous_lyapunov(
            A_k.T, -(p.Q + K.T @ p.R @ K))
        P = 0.5 * (P + P.T)
        K = linalg.solve(p.R, p.B.T @ P)
        previous = residual
        residual = care_residual(p, P)
        LOG.debug('Newton-Kleinman iteration %d residual %g', iteration,
                  residual)
        if residual <= tol * scale:
            break
        if residual >= previous and iteration > 2:
            break
    return P, residual, iteration


def _stabilizing(p, P):
    K = linalg.solve(p.R, p.B.T @ P)
    return np.max(linalg.eigvals(p.A - p.B @ K).real) < 0.0


def care_solve(p, tol=constants.CARE_TOL, max_iter=constants.CARE_MAX_ITER):
    """Stabilizing solution of the continuous algebraic Riccati equation.

    Newton-Kleinman iteration from a pole-placement initial gain, falling
    back to the Hamiltonian Schur method of scipy when the iteration cannot
    start or stalls.

    :param p: The Riccati problem.
    :type p: AreProblem
    :param tol: Residual tolerance relative to the norm of Q.
    :type tol: float
    :raises ConvergenceError: No stabilizing solution met the tolerance.
    :returns: Symmetric positive semi-definite P.
    """
    scale = linalg.norm(p.Q)
    P, residual, iterations = None, np.inf, 0
    try:
        P, residual, iterations = _newton_kleinman(p, tol, max_iter)
    except (ValueError, linalg.LinAlgError) as e:
        LOG.debug('Newton-Kleinman could not start: %s', e)

    if P is None or residual > tol * scale or not _stabilizing(p, P):
        try:
            P = linalg.solve_continuous_are(p.A, p.B, p.Q, p.R)
            P = 0.5 * (P + P.T)
            residual = care_residual(p, P)
        except (ValueError, linalg.LinAlgError) as e:
            raise exceptions.ConvergenceError(
                iterations=iterations, residual=residual,
                fault_string=_("Riccati solve failed: %s") % e)

    if residual > tol * scale or not _stabilizing(p, P):
        raise exceptions.ConvergenceError(
            iterations=iterations, residual=residual,
            fault_string=_("No stabilizing Riccati solution within "
                           "tolerance (residual %g).") % residual)
    return P


def lqr_gain(p):
    """K = R^-1 B' P for the regulator problem."""
    P = care_solve(p)
    return linalg.solve(p.R, p.B.T @ P)


def dual_problem(A, C, Q_o, R_o):
    return data_models.AreProblem(A=np.asarray(A).T, B=np.asarray(C).T,
                                  Q=Q_o, R=R_o)


def observer_gain(A, C, Q_o, R_o):
    """Observer gain L from the regulator problem on (A', C')."""
    return lqr_gain(dual_problem(A, C, Q_o, R_o)).T


def place_observer(A, C, poles):
    """Observer gain L assigning the spectrum of A - L C.

    Complex poles must come in conjugate pairs.

    :param A: State matrix.
    :param C: Measurement matrix.
    :param poles: Desired eigenvalues of A - L C.
    :raises InputError: The poles cannot be assigned.
    :returns: L, n x n_y.
    """
    A = np.asarray(A, dtype=float)
    C = np.asarray(C, dtype=float)
    try:
        result = signal.place_poles(A.T, C.T, np.asarray(poles))
    except ValueError as e:
        raise exceptions.InputError(
            fault_string=_("Observer poles cannot be placed: %s") % e)
    return result.gain_matrix.T


def make_gain_set(plant, K, L, provenance=constants.PROVENANCE_GIVEN,
                  tol_hurwitz=constants.TOL_HURWITZ, validate_observer=True):
    """Validate baseline and observer gains against a plant.

    :raises DimensionMismatch: K is not m x n or L is not n x n_y.
    :raises NotHurwitz: A - L C has an eigenvalue in the right half plane.
    :returns: A GainSet.
    """
    K = data_models.as_matrix(K, 'K', (plant.m, plant.n))
    L = data_models.as_matrix(L, 'L', (plant.n, plant.n_y))
    if validate_observer:
        eigs = core.eigen_report(plant.A - L @ plant.C, tol_hurwitz)
        if eigs.marginal:
            LOG.warning('Observer A - L C is marginally stable, max real '
                        'part %g', eigs.max_real_part)
        elif not eigs.hurwitz:
            raise exceptions.NotHurwitz(
                max_real_part=eigs.max_real_part,
                fault_string=_("The observer A - L C is not Hurwitz (max "
                               "real part %g).") % eigs.max_real_part)
    return data_models.GainSet(K=K, L=L, provenance=provenance)


def observer_rhs(x_hat, u, y, plant, L):
    """x_hat' = A x_hat + B u + L (y - C x_hat - D u)."""
    y_hat = plant.C @ x_hat + plant.D @ u
    return plant.A @ x_hat + plant.B @ u + L @ (y - y_hat)


def baseline_closed_loop(plant, gains):
    """Closed loop in (x, e_est) coordinates, block upper triangular."""
    n = plant.n
    return np.block([
        [plant.A - plant.B @ gains.K, plant.B @ gains.K],
        [np.zeros((n, n)), plant.A - gains.L @ plant.C]])


def constrained_closed_loop(plant, design, gains):
    """Closed loop with every constraint active.

    :returns: Tuple (matrix, input matrix) driven by the bounded signal
        H_x x_hat + H_pi u.
    """
    n = plant.n
    feedback = plant.B @ design.H_pi_inv @ design.H_x
    matrix = np.block([
        [cbf_design.constrained_matrix(plant, design), feedback],
        [np.zeros((n, n)), plant.A - gains.L @ plant.C]])
    input_matrix = np.vstack([plant.B @ design.H_pi_inv,
                              np.zeros((n, design.H_pi.shape[0]))])
    return matrix, input_matrix
