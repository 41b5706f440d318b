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
import os

import fixtures
import numpy as np

from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.sim import disturbance
from cbf_servo_lib.tests.unit import base


class TestProfiles(base.TestCase):

    def test_none(self):
        profile = disturbance.build_profile(data_models.DisturbanceSpec(),
                                            0.01, 1.0)

        self.assertEqual(0.0, profile.value(0.5))
        self.assertEqual(constants.DIST_NONE, profile.kind)

    def test_step(self):
        profile = disturbance.build_profile(
            data_models.DisturbanceSpec(constants.DIST_STEP,
                                        {'t0': 1.0, 'amplitude': 0.2}),
            0.01, 5.0)

        self.assertEqual(0.0, profile.value(0.999))
        self.assertEqual(0.2, profile.value(1.0))
        self.assertEqual(0.2, profile.value(4.0))

    def test_one_minus_cos(self):
        profile = disturbance.OneMinusCosProfile(t0=1.0, duration=2.0,
                                                 amplitude=0.03)

        self.assertEqual(0.0, profile.value(0.5))
        self.assertAlmostEqual(0.0, profile.value(1.0))
        self.assertAlmostEqual(0.03, profile.value(2.0))
        self.assertAlmostEqual(0.015, profile.value(1.5))
        self.assertEqual(0.0, profile.value(3.5))

    def test_one_minus_cos_duration(self):
        self.assertRaises(exceptions.InputError,
                          disturbance.OneMinusCosProfile, 0.0, 0.0, 1.0)

    def test_missing_parameter(self):
        spec = data_models.DisturbanceSpec(constants.DIST_STEP,
                                           {'amplitude': 0.2})

        self.assertRaises(exceptions.InputError, disturbance.build_profile,
                          spec, 0.01, 1.0)


class TestNoise(base.TestCase):

    def test_lcg_uniform(self):
        samples = disturbance.lcg_uniform(0, 1000)

        self.assertAlmostEqual(constants.LCG_INCREMENT / 2.0 ** 64,
                               samples[0], places=12)
        self.assertTrue(np.all(samples >= 0.0))
        self.assertTrue(np.all(samples < 1.0))
        self.assertAlmostEqual(0.5, float(np.mean(samples)), delta=0.05)

    def test_lcg_deterministic(self):
        self.assertAllClose(disturbance.lcg_uniform(42, 10),
                            disturbance.lcg_uniform(42, 10), rtol=0.0)
        self.assertFalse(np.array_equal(disturbance.lcg_uniform(42, 10),
                                        disturbance.lcg_uniform(43, 10)))

    def test_filtered_noise_rms(self):
        profile = disturbance.FilteredNoiseProfile(
            seed=7, bandwidth=2.0, rms=0.01, dt=0.01, t_final=400.0)

        rms = math.sqrt(float(np.mean(profile.values ** 2)))
        self.assertAlmostEqual(0.01, rms, delta=0.0015)

    def test_filtered_noise_interpolates(self):
        profile = disturbance.FilteredNoiseProfile(
            seed=1, bandwidth=2.0, rms=0.01, dt=0.1, t_final=1.0)

        midpoint = 0.5 * (profile.values[3] + profile.values[4])
        self.assertAlmostEqual(midpoint, profile.value(0.35))
        self.assertEqual(12, profile.values.size)

    def test_filtered_noise_invalid(self):
        self.assertRaises(exceptions.InputError,
                          disturbance.FilteredNoiseProfile, 1, 0.0, 0.01,
                          0.01, 1.0)


class TestCsvProfile(base.TestCase):

    def setUp(self):
        super().setUp()
        self.directory = self.useFixture(fixtures.TempDir()).path

    def _write(self, name, text):
        path = os.path.join(self.directory, name)
        with open(path, 'w') as handle:
            handle.write(text)
        return path

    def test_table(self):
        path = self._write('gust.csv', '# gust\ntime_s,value\n0,0\n1,0.02\n'
                                       '2,-0.01\n')

        profile = disturbance.CsvProfile(path)

        self.assertAlmostEqual(0.01, profile.value(0.5))
        self.assertAlmostEqual(0.005, profile.value(1.5))
        self.assertAlmostEqual(-0.01, profile.value(10.0))
        self.assertAlmostEqual(0.0, profile.value(-1.0))

    def test_relative_path(self):
        self._write('gust.csv', 'time_s,value\n0,0.1\n1,0.1\n')
        spec = data_models.DisturbanceSpec(constants.DIST_CSV,
                                           {'path': 'gust.csv'})

        profile = disturbance.build_profile(spec, 0.01, 1.0,
                                            base_dir=self.directory)

        self.assertAlmostEqual(0.1, profile.value(0.3))

    def test_bad_header(self):
        path = self._write('gust.csv', 't,v\n0,0\n')

        self.assertRaises(exceptions.InputError, disturbance.CsvProfile,
                          path)

    def test_not_increasing(self):
        path = self._write('gust.csv', 'time_s,value\n0,0\n0,1\n')

        self.assertRaises(exceptions.InputError, disturbance.CsvProfile,
                          path)

    def test_non_numeric(self):
        path = self._write('gust.csv', 'time_s,value\n0,abc\n')

        self.assertRaises(exceptions.InputError, disturbance.CsvProfile,
                          path)

    def test_missing_file(self):
        self.assertRaises(exceptions.InputError, disturbance.CsvProfile,
                          os.path.join(self.directory, 'missing.csv'))
