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
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.tests.unit import base


class TestDataModels(base.TestCase):

    def setUp(self):
        super().setUp()

        self.ref_plant = data_models.Plant(
            A=[[0.0, 1.0], [0.0, 0.0]], B=[[0.0], [1.0]], C=[[1.0, 0.0]],
            C_lim=[[0.0, 1.0]])

        self.ref_spec = data_models.ConstraintSpec(
            y_min=[-1.0], y_max=[1.0], lambdas=[[-0.9]])

        self.ref_margin = data_models.ChannelMargin(
            channel=0, gm_db=6.0, pm_deg=45.0, phase_crossover=2.0,
            gain_crossover=1.0)

        self.ref_report = data_models.MarginReport(
            delta='0', actuator=False, channels=[self.ref_margin],
            disk=data_models.DiskMargin(0.5, -4.4, 3.5, 28.1))

        self.ref_report_dict = {
            'delta': '0',
            'actuator': False,
            'channels': [{'channel': 0, 'gm_db': 6.0, 'pm_deg': 45.0,
                          'phase_crossover': 2.0, 'gain_crossover': 1.0}],
            'disk': {'alpha': 0.5, 'gm_low_db': -4.4, 'gm_high_db': 3.5,
                     'pm_deg': 28.1}}

    def test_Plant(self):
        self.assertEqual(2, self.ref_plant.n)
        self.assertEqual(1, self.ref_plant.m)
        self.assertEqual(1, self.ref_plant.n_y)
        self.assertEqual(1, self.ref_plant.m_lim)
        self.assertEqual(0, self.ref_plant.n_d)
        self.assertAllClose(np.zeros((1, 1)), self.ref_plant.D)
        self.assertEqual((2, 0), self.ref_plant.B_dist.shape)

    def test_Plant_bad_shape(self):
        self.assertRaises(exceptions.DimensionMismatch, data_models.Plant,
                          A=[[0.0, 1.0]], B=[[1.0]], C=[[1.0, 0.0]])
        self.assertRaises(exceptions.DimensionMismatch, data_models.Plant,
                          A=[[0.0, 1.0], [0.0, 0.0]], B=[[1.0]],
                          C=[[1.0, 0.0]])
        self.assertRaises(exceptions.DimensionMismatch, data_models.Plant,
                          A=[[0.0, 1.0], [0.0, 0.0]], B=[[0.0], [1.0]],
                          C=[[1.0, 0.0]], D=[[1.0, 1.0]])

    def test_Plant_non_finite(self):
        self.assertRaises(exceptions.InputError, data_models.Plant,
                          A=[[math.nan]], B=[[1.0]], C=[[1.0]])

    def test_ConstraintSpec(self):
        spec = data_models.ConstraintSpec(
            y_min=[-1.0, -2.0], y_max=[1.0, 2.0],
            lambdas=[[-2.0, -3.0], [-1.5]])

        self.assertEqual(2, spec.m)
        self.assertEqual(2.0, spec.alpha_star(0))
        self.assertEqual(1.5, spec.alpha_star(1))
        self.assertEqual([[-2.0, -3.0], [-1.5]], spec.lambdas)

    def test_ConstraintSpec_invalid(self):
        self.assertRaises(exceptions.InputError, data_models.ConstraintSpec,
                          y_min=[1.0], y_max=[1.0], lambdas=[[-1.0]])
        self.assertRaises(exceptions.InputError, data_models.ConstraintSpec,
                          y_min=[-1.0], y_max=[1.0], lambdas=[[0.5]])
        self.assertRaises(exceptions.InputError, data_models.ConstraintSpec,
                          y_min=[-1.0], y_max=[1.0], lambdas=[[-1 + 1j]])
        self.assertRaises(exceptions.DimensionMismatch,
                          data_models.ConstraintSpec, y_min=[-1.0],
                          y_max=[1.0], lambdas=[[-1.0], [-2.0]])

    def test_GainSet_provenance(self):
        gains = data_models.GainSet(K=[[1.0, 2.0]], L=[[1.0], [1.0]],
                                    provenance=constants.PROVENANCE_LQR)

        self.assertEqual(constants.PROVENANCE_LQR, gains.provenance)
        self.assertRaises(exceptions.InputError, data_models.GainSet,
                          K=[[1.0]], L=[[1.0]], provenance='guessed')

    def test_AreProblem_validation(self):
        self.assertRaises(exceptions.InputError, data_models.AreProblem,
                          A=[[0.0, 1.0], [0.0, 0.0]], B=[[0.0], [1.0]],
                          Q=[[1.0, 1.0], [0.0, 1.0]], R=[[1.0]])
        self.assertRaises(exceptions.InputError, data_models.AreProblem,
                          A=[[0.0, 1.0], [0.0, 0.0]], B=[[0.0], [1.0]],
                          Q=np.eye(2), R=[[-1.0]])

    def test_MarginReport_to_dict(self):
        self.assertEqual(self.ref_report_dict,
                         self.ref_report.to_dict(recurse=True))

    def test_MarginReport_to_dict_no_recurse(self):
        report_dict = self.ref_report.to_dict()

        self.assertNotIn('channels', report_dict)
        self.assertNotIn('disk', report_dict)
        self.assertEqual('0', report_dict['delta'])

    def test_MarginReport_channel(self):
        self.assertIs(self.ref_margin, self.ref_report.channel(0))
        self.assertRaises(exceptions.InputError, self.ref_report.channel, 3)

    def test_equality(self):
        same = data_models.ChannelMargin(
            channel=0, gm_db=6.0, pm_deg=45.0, phase_crossover=2.0,
            gain_crossover=1.0)
        other = data_models.ChannelMargin(channel=1)

        self.assertEqual(self.ref_margin, same)
        self.assertNotEqual(self.ref_margin, other)
        self.assertNotEqual(self.ref_margin, self.ref_report)

    def test_from_dict(self):
        margin = data_models.ChannelMargin.from_dict(
            self.ref_report_dict['channels'][0])

        self.assertEqual(self.ref_margin, margin)

    def test_to_dict_ndarray(self):
        record = data_models.EigenReport(
            eigenvalues=[-1.0 + 2.0j, -1.0 - 2.0j], max_real_part=-1.0,
            hurwitz=True, marginal=False)

        record_dict = record.to_dict()

        self.assertEqual([[-1.0, 2.0], [-1.0, -2.0]],
                         record_dict['eigenvalues'])
        self.assertTrue(record_dict['hurwitz'])

    def test_Unset(self):
        spec = data_models.DisturbanceSpec()
        scenario = data_models.Scenario(
            plant=self.ref_plant,
            gains=data_models.GainSet(K=[[0.0, 0.0]], L=[[1.0], [1.0]]),
            spec=self.ref_spec, x0=[0.0, 0.0], xhat0=[0.0, 0.0])

        self.assertFalse(data_models.Unset)
        self.assertEqual('Unset', repr(data_models.Unset))
        self.assertEqual(constants.DIST_NONE, spec.kind)
        self.assertNotIn('name', scenario.to_dict())
        self.assertIsNone(scenario.to_dict(render_unsets=True)['name'])

    def test_Scenario_sample_count(self):
        scenario = data_models.Scenario(
            plant=self.ref_plant,
            gains=data_models.GainSet(K=[[0.0, 0.0]], L=[[1.0], [1.0]]),
            spec=self.ref_spec, x0=[0.0, 0.0], xhat0=[0.0, 0.0],
            t_final=1.0, dt=0.1)

        self.assertEqual(11, scenario.sample_count)
        self.assertIsInstance(scenario.analysis, data_models.AnalysisConfig)
        self.assertRaises(exceptions.DimensionMismatch, data_models.Scenario,
                          plant=self.ref_plant, gains=scenario.gains,
                          spec=self.ref_spec, x0=[0.0], xhat0=[0.0, 0.0])
        self.assertRaises(exceptions.InputError, data_models.Scenario,
                          plant=self.ref_plant, gains=scenario.gains,
                          spec=self.ref_spec, x0=[0.0, 0.0],
                          xhat0=[0.0, 0.0], dt=0.0)

    def test_CommandSchedule(self):
        command = data_models.CommandSchedule([2.0], time=1.0)

        self.assertAllClose([0.0], command.value_at(0.5))
        self.assertAllClose([2.0], command.value_at(1.0))

    def test_FrequencyGrid(self):
        grid = data_models.FrequencyGrid(5, 0.01, 100.0)

        self.assertAllClose([0.01, 0.1, 1.0, 10.0, 100.0], grid.omega)
        self.assertRaises(exceptions.InputError, data_models.FrequencyGrid,
                          1, 0.01, 100.0)
        self.assertRaises(exceptions.InputError, data_models.FrequencyGrid,
                          10, 10.0, 1.0)

    def test_BoundRecord_t_bound(self):
        record = data_models.BoundRecord(
            constraint=0, alpha_star=1.5, lambda_max=-3.0, rule_holds=True,
            k=1.2, e0_norm=0.1, h_min_0=-1.0, h_max_0=-2.0, t_min=0.25,
            t_max=0.5)

        self.assertEqual(0.5, record.t_bound)

    def test_ViolationReport_empty(self):
        clean = data_models.ViolationReport(
            [data_models.ViolationRecord(0)])
        dirty = data_models.ViolationReport(
            [data_models.ViolationRecord(0, max_above=0.1, first_time=1.0,
                                         last_time=1.2, duration=0.2)])

        self.assertTrue(clean.empty)
        self.assertFalse(dirty.empty)
        self.assertEqual(0.1, dirty.records[0].max_violation)

    def test_Actuator(self):
        self.assertRaises(exceptions.InputError, data_models.Actuator,
                          omega_n=-70.0, zeta=0.7)
        actuator = data_models.Actuator(70.0, 0.7, channels=[1])

        self.assertEqual([1], actuator.channels)

    def test_DisturbanceSpec_unknown(self):
        self.assertRaises(exceptions.InputError, data_models.DisturbanceSpec,
                          kind='sawtooth')

    def test_AnalysisConfig_unknown_sweep_mode(self):
        self.assertRaises(exceptions.InputError, data_models.AnalysisConfig,
                          sweep_mode='random')
