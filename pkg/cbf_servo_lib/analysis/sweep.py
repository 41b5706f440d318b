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

import itertools

import numpy as np
from oslo_log import log as logging

from cbf_servo_lib.analysis import margins
from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.design import cbf_design
from cbf_servo_lib.i18n import _

LOG = logging.getLogger(__name__)


def alpha_values(low, high, step):
    """Inclusive arithmetic grid low, low + step, ..., high."""
    if not (0.0 < low <= high and step > 0.0):
        raise exceptions.InputError(
            fault_string=_("Sweep grid needs 0 < low <= high and a positive "
                           "step."))
    count = int(np.floor((high - low) / step + 1e-9)) + 1
    return [round(low + index * step, 12) for index in range(count)]


def lambdas_for(alphas, degrees):
    """Repeated real CBF eigenvalue -alpha_i, r_i times per output."""
    return [[-alpha] * degree for alpha, degree in zip(alphas, degrees)]


def sweep_points(values, m, mode=constants.SWEEP_DIAGONAL):
    if mode == constants.SWEEP_DIAGONAL:
        return [[value] * m for value in values]
    return [list(point) for point in itertools.product(values, repeat=m)]


def sweep(scenario, values=None, mode=None, actuator=True):
    """Margins over a grid of CBF rates, the design rebuilt per point.

    A point where the design fails is marked invalid and the sweep goes
    on.  Points are returned in grid order.

    :param scenario: Supplies plant, gains, limits and analysis settings.
    :type scenario: Scenario
    :param values: Alpha values, defaults to the scenario sweep grid.
    :param mode: ``diagonal`` or ``grid``.
    :param actuator: Include the actuated loop when the scenario has one.
    :returns: List of SweepPoint.
    """
    plant, spec = scenario.plant, scenario.spec
    analysis = scenario.analysis
    mode = mode or analysis.sweep_mode
    if values is None:
        if not analysis.sweep_grid:
            raise exceptions.InputError(
                fault_string=_("The scenario has no sweep grid."))
        values = alpha_values(*analysis.sweep_grid)
    degrees = cbf_design.relative_degrees(plant)

    points = []
    for alphas in sweep_points(values, spec.m, mode):
        point_spec = data_models.ConstraintSpec(
            y_min=spec.y_min, y_max=spec.y_max,
            lambdas=lambdas_for(alphas, degrees))
        try:
            design = cbf_design.build_design(plant, point_spec)
            reports = margins.table_margins(
                plant, scenario.gains, design, analysis,
                scenario.actuator if actuator else None)
        except (exceptions.SingularSensitivity,
                exceptions.IllDefinedRelativeDegree,
                exceptions.InputError) as e:
            LOG.warning('Sweep point alpha=%s is invalid: %s', alphas, e)
            points.append(data_models.SweepPoint(
                alphas=alphas, valid=False, reason=str(e)))
            continue
        points.append(data_models.SweepPoint(alphas=alphas, valid=True,
                                             reports=reports))
    return points
