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
from unittest import mock

from cbf_servo_lib.analysis import sweep
from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.design import cbf_design
from cbf_servo_lib.tests.unit import base


class TestSweepGrid(base.TestCase):

    def test_alpha_values(self):
        self.assertEqual([0.5, 0.75, 1.0, 1.25, 1.5],
                         sweep.alpha_values(0.5, 1.5, 0.25))
        self.assertEqual([2.0], sweep.alpha_values(2.0, 2.0, 0.5))

    def test_alpha_values_invalid(self):
        self.assertRaises(exceptions.InputError, sweep.alpha_values,
                          0.0, 1.0, 0.5)
        self.assertRaises(exceptions.InputError, sweep.alpha_values,
                          2.0, 1.0, 0.5)
        self.assertRaises(exceptions.InputError, sweep.alpha_values,
                          1.0, 2.0, 0.0)

    def test_lambdas_for(self):
        self.assertEqual([[-1.0], [-2.0, -2.0]],
                         sweep.lambdas_for([1.0, 2.0], [1, 2]))

    def test_sweep_points(self):
        self.assertEqual([[1.0, 1.0], [2.0, 2.0]],
                         sweep.sweep_points([1.0, 2.0], 2))
        self.assertEqual([[1.0, 1.0], [1.0, 2.0], [2.0, 1.0], [2.0, 2.0]],
                         sweep.sweep_points([1.0, 2.0], 2,
                                            constants.SWEEP_GRID))


class TestSweep(base.TestCase):

    def setUp(self):
        super().setUp()
        self.scenario = self.double_integrator()
        self.scenario.analysis.grid = data_models.FrequencyGrid(200, 1e-3,
                                                                 1e3)

    def test_sweep(self):
        points = sweep.sweep(self.scenario, values=[0.5, 1.0])

        self.assertEqual([[0.5], [1.0]], [point.alphas for point in points])
        for point in points:
            self.assertTrue(point.valid)
            self.assertEqual(['0', '1'],
                             [report.delta for report in point.reports])

    def test_default_grid(self):
        points = sweep.sweep(self.scenario)

        self.assertEqual(11, len(points))
        self.assertEqual([0.5], points[0].alphas)
        self.assertEqual([3.0], points[-1].alphas)

    def test_no_grid(self):
        self.scenario.analysis.sweep_grid = data_models.Unset

        self.assertRaises(exceptions.InputError, sweep.sweep, self.scenario)

    @mock.patch.object(cbf_design, 'build_design')
    def test_invalid_point(self, mock_build):
        design = self.scenario.design
        mock_build.side_effect = [
            exceptions.SingularSensitivity(condition_number=1e15), design]

        points = sweep.sweep(self.scenario, values=[0.5, 1.0])

        self.assertFalse(points[0].valid)
        self.assertIn('1e+15', points[0].reason)
        self.assertEqual([], points[0].reports)
        self.assertTrue(points[1].valid)


class TestSweepFlight(base.TestCase):

    def setUp(self):
        super().setUp()
        self.scenario = self.flight()
        analysis = self.scenario.analysis
        analysis.grid = data_models.FrequencyGrid(400, 1e-3, 1e4)
        analysis.deltas = ['10', '01']

    def _margins(self, point):
        return {report.delta: report.channel(1) for report in point.reports}

    def test_diagonal_sweep(self):
        # (GM dB, PM deg) of the elevator channel per delta
        expected = [
            {'10': (11.74, 77.15), '01': (math.inf, 156.51)},
            {'10': (11.76, 85.42), '01': (17.79, 55.26)},
            {'10': (11.88, 124.78), '01': (5.89, 42.11)},
            {'10': (12.05, math.nan), '01': (3.78, 31.02)},
        ]

        points = sweep.sweep(self.scenario, values=[1.75, 2.0, 3.0, 4.0],
                             actuator=False)

        self.assertEqual([[1.75, 1.75], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]],
                         [point.alphas for point in points])
        for point, values in zip(points, expected):
            self.assertTrue(point.valid)
            found = self._margins(point)
            for delta, (gm_db, pm_deg) in values.items():
                margin = found[delta]
                if math.isinf(gm_db):
                    self.assertEqual(math.inf, margin.gm_db)
                else:
                    self.assertAlmostEqual(gm_db, margin.gm_db, delta=0.05)
                if math.isnan(pm_deg):
                    self.assertTrue(math.isnan(margin.pm_deg))
                else:
                    self.assertAlmostEqual(pm_deg, margin.pm_deg,
                                           delta=0.25)

    def test_aoa_margins_drop(self):
        before, after = sweep.sweep(self.scenario, values=[1.75, 2.0],
                                    actuator=False)

        aoa_before = self._margins(before)['01']
        aoa_after = self._margins(after)['01']
        self.assertGreater(aoa_before.pm_deg - aoa_after.pm_deg, 90.0)
        self.assertEqual(math.inf, aoa_before.gm_db)
        self.assertLess(aoa_after.gm_db, 20.0)

    def test_no_gain_crossover_noted(self):
        point, = sweep.sweep(self.scenario, values=[4.0], actuator=False)

        margin = self._margins(point)['10']
        self.assertTrue(math.isnan(margin.gain_crossover))
        self.assertEqual(constants.NOTE_BELOW_UNITY, margin.note)
        self.assertIs(data_models.Unset, self._margins(point)['01'].note)
