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

"""Closed-form min-norm control augmentation and its piecewise view.

The modified constraints read

    alpha_pi y_min <= H_x x_hat + H_pi (u_bl + pi) <= alpha_pi y_max

and pi is the smallest correction, in the H_pi' H_pi weighted norm, that
satisfies them.  Branch conditions use a strict ``>``: at zero slack the
inactive branch is taken.
"""

import itertools

import numpy as np
from scipy import linalg

from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.i18n import _


def slack(x_hat, u_bl, design, spec):
    """Evaluate the constraint slacks at the state estimate.

    dH_min = -H_x x_hat - H_pi u_bl + alpha_pi y_min
    dH_max = H_x x_hat + H_pi u_bl - alpha_pi y_max

    :returns: A SlackPair; a positive entry marks an active constraint.
    """
    h = design.H_x @ x_hat + design.H_pi @ u_bl
    alpha = np.diag(design.alpha_pi)
    return data_models.SlackPair(dH_min=alpha * spec.y_min - h,
                                 dH_max=h - alpha * spec.y_max)


def _correction(slacks):
    return (np.maximum(0.0, slacks.dH_min) -
            np.maximum(0.0, slacks.dH_max))


def pi_from_estimate(x_hat, u_bl, design, spec):
    """Min-norm augmentation pi(x_hat) in closed form."""
    return design.H_pi_inv @ _correction(slack(x_hat, u_bl, design, spec))


def _active(slacks):
    return (slacks.dH_min > 0.0) | (slacks.dH_max > 0.0)


def switching_delta(x_hat, u_bl, design, spec):
    """Diagonal 0/1 matrix of the active constraints."""
    return np.diag(_active(slack(x_hat, u_bl, design, spec)).astype(float))


def augmented_input(x_hat, u_bl, design, spec):
    """u_bl + pi together with the slacks and delta used to compute it."""
    slacks = slack(x_hat, u_bl, design, spec)
    pi = design.H_pi_inv @ _correction(slacks)
    return pi, slacks, _active(slacks).astype(float)


def pwa_form(x_hat, K, design, spec, u_exo=None):
    """Piecewise-affine gains valid in the region containing x_hat.

    With u_bl = -K x_hat + u_exo the total input equals
    -(K + K_cbf) x_hat + F y_cmd_sel + modified_baseline u_exo, where
    K_cbf = H_pi^-1 delta (H_x - H_pi K), F = H_pi^-1 delta alpha_pi and
    modified_baseline = I - H_pi^-1 delta H_pi.

    :param x_hat: State estimate.
    :param K: Baseline feedback gain.
    :param design: The augmentation design.
    :type design: AugmentationDesign
    :param spec: Limits.
    :type spec: ConstraintSpec
    :param u_exo: Exogenous part of the baseline input, zero by default.
    :returns: A PwaForm.
    """
    m = design.H_pi.shape[0]
    u_exo = np.zeros(m) if u_exo is None else np.asarray(u_exo, dtype=float)
    u_bl = -K @ x_hat + u_exo
    slacks = slack(x_hat, u_bl, design, spec)
    delta = np.diag(_active(slacks).astype(float))
    y_cmd_sel = np.where(slacks.dH_min > 0.0, spec.y_min,
                         np.where(slacks.dH_max > 0.0, spec.y_max, 0.0))
    K_cbf = design.H_pi_inv @ delta @ (design.H_x - design.H_pi @ K)
    F = design.H_pi_inv @ delta @ design.alpha_pi
    modified_baseline = np.eye(m) - design.H_pi_inv @ delta @ design.H_pi
    return data_models.PwaForm(delta=delta, K_cbf=K_cbf, F=F,
                               y_cmd_sel=y_cmd_sel,
                               modified_baseline=modified_baseline)


def qp_oracle(x_hat, u_bl, design, spec,
              tol=constants.QP_FEASIBILITY_TOL):
    """Solve the augmentation QP by enumerating active sets.

    minimize pi' R pi with R = H_pi' H_pi subject to G pi <= h, where the
    2m rows of G are -H_pi (lower limits) and H_pi (upper limits).  Every
    active set with at most one side per constraint is tried, smallest
    first, and the feasible KKT point of least cost is returned.

    :raises QpInfeasible: No KKT point was found.
    :returns: The augmentation vector.
    """
    m = design.H_pi.shape[1]
    slacks = slack(x_hat, u_bl, design, spec)
    R = design.H_pi.T @ design.H_pi
    G = np.vstack([-design.H_pi, design.H_pi])
    h = np.concatenate([-slacks.dH_min, -slacks.dH_max])
    rows = design.H_pi.shape[0]

    best = None
    best_cost = np.inf
    for size in range(rows + 1):
        for active in itertools.combinations(range(2 * rows), size):
            if any(index + rows in active for index in active):
                continue
            G_s = G[list(active)]
            kkt = np.block([[2.0 * R, G_s.T],
                            [G_s, np.zeros((size, size))]])
            rhs = np.concatenate([np.zeros(m), h[list(active)]])
            try:
                solution = linalg.solve(kkt, rhs)
            except linalg.LinAlgError:
                continue
            pi = solution[:m]
            multipliers = solution[m:]
            if np.any(G @ pi > h + tol * (1.0 + np.abs(h))):
                continue
            if np.any(multipliers < -tol):
                continue
            cost = float(pi @ R @ pi)
            if best is None or cost < best_cost - tol * (1.0 + best_cost):
                best = pi
                best_cost = cost
    if best is None:
        raise exceptions.QpInfeasible(
            fault_string=_("No feasible active set for the augmentation "
                           "QP."))
    return best
