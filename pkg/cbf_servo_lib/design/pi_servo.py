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

"""PI servo extension of a physical plant.

The extended state is [e_yI; x_p] and the extended input [v; w], where v
is the anti-windup channel feeding the integrator and w the correction on
the physical input.  The limited outputs are [u_bl; z_lim], so limiting
the first block bounds the baseline control command.
"""

import numpy as np

from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.i18n import _


def _limits(limits, size, name):
    lower = data_models.as_vector(limits[0], name + '_min', size)
    upper = data_models.as_vector(limits[1], name + '_max', size)
    if not np.all(lower < upper):
        raise exceptions.InputError(
            fault_string=_("%s limits need min < max.") % name)
    return lower, upper


def baseline_gain_matrix(K_I, K_P):
    """[[0, 0], [K_I, K_P]]: the v channel has no baseline feedback."""
    m_u = K_I.shape[0]
    top = np.zeros((m_u, m_u + K_P.shape[1]))
    return np.vstack([top, np.hstack([K_I, K_P])])


def command_matrix(m_u):
    """E with E y_cmd = [-y_cmd; 0]."""
    return np.vstack([-np.eye(m_u), np.zeros((m_u, m_u))])


def extend_system(pp, K_I, K_P, u_limits, z_limits, lambdas):
    """Assemble the extended plant, baseline gain and constraint spec.

    :param pp: The physical plant.
    :type pp: PhysicalPlant
    :param K_I: Integral gain, m_u x m_u.
    :param K_P: State gain, m_u x n_p.
    :param u_limits: (u_min, u_max) of the physical input.
    :param z_limits: (z_min, z_max) of the limited physical outputs.
    :param lambdas: CBF eigenvalues, the input row first.
    :raises DimensionMismatch: Gains or limits do not fit the plant.
    :returns: An ExtendedSystem.
    """
    n_p, m_u, n_z = pp.n_p, pp.m_u, pp.n_z
    K_I = data_models.as_matrix(K_I, 'K_I', (m_u, m_u))
    K_P = data_models.as_matrix(K_P, 'K_P', (m_u, n_p))
    u_min, u_max = _limits(u_limits, m_u, 'u')
    z_min, z_max = _limits(z_limits, n_z, 'z')
    n_y = pp.C_p.shape[0]

    A = np.block([[np.zeros((m_u, m_u)), pp.C_p_reg],
                  [np.zeros((n_p, m_u)), pp.A_p]])
    B = np.block([[np.eye(m_u), pp.D_p_reg],
                  [np.zeros((n_p, m_u)), pp.B_p]])
    C = np.block([[np.eye(m_u), np.zeros((m_u, n_p))],
                  [np.zeros((n_y, m_u)), pp.C_p]])
    D = np.block([[np.zeros((m_u, 2 * m_u))],
                  [np.zeros((n_y, m_u)), pp.D_p]])
    C_lim = np.block([[-K_I, -K_P],
                      [np.zeros((n_z, m_u)), pp.C_p_lim]])
    B_dist = np.vstack([np.zeros((m_u, pp.B_dist.shape[1])), pp.B_dist])

    plant = data_models.Plant(A=A, B=B, C=C, D=D, C_lim=C_lim,
                              B_dist=B_dist)
    spec = data_models.ConstraintSpec(
        y_min=np.concatenate([u_min, z_min]),
        y_max=np.concatenate([u_max, z_max]), lambdas=lambdas)
    return data_models.ExtendedSystem(
        plant=plant, K_ext=baseline_gain_matrix(K_I, K_P), spec=spec,
        command_matrix=command_matrix(m_u))


def command_injection(system, y_cmd):
    """Exogenous baseline input [-y_cmd; 0] of the extended system."""
    m_u = system.command_matrix.shape[1]
    return system.command_matrix @ data_models.as_vector(y_cmd, 'y_cmd', m_u)


def physical_input(system, u):
    """Physical input w out of a stacked extended input [v; w]."""
    m_u = system.command_matrix.shape[1]
    return np.asarray(u)[..., m_u:]
