# Copyright 2010-2011 OpenStack Foundation
# Copyright (c) 2013 Hewlett-Packard Development Company, L.P.
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may
# not use this file except in compliance with the License. You may obtain
# a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations
# under the License.
import os
from unittest import mock

import numpy as np
from oslotest import base

from cbf_servo_lib.cli import scenario_file

DATA_DIR = os.path.join(os.path.dirname(__file__), '..', '..', 'data')


def data_path(name):
    return os.path.abspath(os.path.join(DATA_DIR, name))


class TestCase(base.BaseTestCase):
    """Test case base class for all unit tests."""

    def setUp(self):
        super().setUp()
        self.addCleanup(mock.patch.stopall)

    def assertAllClose(self, expected, actual, rtol=1e-7, atol=0.0):
        np.testing.assert_allclose(actual, expected, rtol=rtol, atol=atol)

    def load_scenario(self, name, with_design=True):
        return scenario_file.parse_scenario(data_path(name), with_design)

    def flight(self, with_design=True):
        return self.load_scenario('flight.scn', with_design)

    def double_integrator(self, with_design=True):
        return self.load_scenario('double_integrator.scn', with_design)
