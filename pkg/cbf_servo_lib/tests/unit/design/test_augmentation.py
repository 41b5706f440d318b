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
from scipy import linalg

from cbf_servo_lib.common import data_models
from cbf_servo_lib.design import augmentation
from cbf_servo_lib.design import cbf_design
from cbf_servo_lib.tests.unit import base


class TestAugmentation(base.TestCase):

    def setUp(self):
        super().setUp()
        plant = data_models.Plant(A=[[0.0, 1.0], [0.0, 0.0]],
                                  B=[[0.0], [1.0]], C=[[1.0, 0.0]],
                                  C_lim=[[0.0, 1.0]])
        self.spec = data_models.ConstraintSpec([-1.0], [1.0], [[-1.0]])
        self.design = cbf_design.build_design(plant, self.spec)
        self.x_hat = np.array([0.0, -0.9])
        self.u_bl = np.array([-1.0])

        self.scenario = self.flight()
        self.rng = np.random.default_rng(20)

    def _flight_sample(self):
        scenario = self.scenario
        x_hat = self.rng.normal(scale=0.2, size=scenario.plant.n)
        u_bl = (-scenario.gains.K @ x_hat +
                self.rng.normal(scale=0.2, size=scenario.plant.m))
        return x_hat, u_bl

    def test_slack(self):
        slacks = augmentation.slack(self.x_hat, self.u_bl, self.design,
                                    self.spec)

        self.assertAllClose([0.9], slacks.dH_min)
        self.assertAllClose([-2.9], slacks.dH_max)

    def test_slack_origin(self):
        slacks = augmentation.slack(np.zeros(2), np.zeros(1), self.design,
                                    self.spec)

        self.assertAllClose([-1.0], slacks.dH_min)
        self.assertAllClose([-1.0], slacks.dH_max)

    def test_slack_sum_identity(self):
        for _ in range(1000):
            x_hat = self.rng.normal(size=2)
            u_bl = self.rng.normal(size=1)

            slacks = augmentation.slack(x_hat, u_bl, self.design, self.spec)

            # dH_min + dH_max = alpha_pi (y_min - y_max) < 0
            self.assertAllClose([-2.0], slacks.dH_min + slacks.dH_max,
                                atol=1e-12)

    def test_pi_inactive(self):
        pi = augmentation.pi_from_estimate(np.zeros(2), np.zeros(1),
                                           self.design, self.spec)

        self.assertAllClose([0.0], pi)
        self.assertAllClose(
            np.zeros((1, 1)),
            augmentation.switching_delta(np.zeros(2), np.zeros(1),
                                         self.design, self.spec))

    def test_pi_min_active(self):
        pi = augmentation.pi_from_estimate(self.x_hat, self.u_bl,
                                           self.design, self.spec)

        self.assertAllClose([0.9], pi)
        u = self.u_bl + pi
        self.assertAllClose([-0.1], u)
        self.assertAllClose([-1.0], self.design.H_x @ self.x_hat +
                            self.design.H_pi @ u)
        self.assertAllClose(
            np.eye(1), augmentation.switching_delta(
                self.x_hat, self.u_bl, self.design, self.spec))

    def test_augmented_input(self):
        pi, slacks, delta = augmentation.augmented_input(
            self.x_hat, self.u_bl, self.design, self.spec)

        self.assertAllClose([0.9], pi)
        self.assertAllClose([0.9], slacks.dH_min)
        self.assertAllClose([1.0], delta)

    def test_zero_slack_takes_inactive_branch(self):
        x_hat = np.array([0.0, -1.0])

        delta = augmentation.switching_delta(x_hat, np.zeros(1),
                                             self.design, self.spec)

        self.assertAllClose(np.zeros((1, 1)), delta)

    def test_boundary_enforced(self):
        design = self.scenario.design
        spec = self.scenario.spec
        alpha = np.diag(design.alpha_pi)
        for _ in range(500):
            x_hat, u_bl = self._flight_sample()

            pi, slacks, delta = augmentation.augmented_input(
                x_hat, u_bl, design, spec)

            value = design.H_x @ x_hat + design.H_pi @ (u_bl + pi)
            scale = 1e-9 * (1.0 + np.abs(value))
            self.assertTrue(np.all(value >= alpha * spec.y_min - scale))
            self.assertTrue(np.all(value <= alpha * spec.y_max + scale))
            self.assertFalse(np.any((slacks.dH_min > 0.0) &
                                    (slacks.dH_max > 0.0)))
            if not delta.any():
                self.assertAllClose(np.zeros(2), pi)

    def test_qp_oracle_double_integrator(self):
        self.assertAllClose([0.9], augmentation.qp_oracle(
            self.x_hat, self.u_bl, self.design, self.spec))
        self.assertAllClose([0.0], augmentation.qp_oracle(
            np.zeros(2), np.zeros(1), self.design, self.spec), atol=1e-12)

        worst = 0.0
        for _ in range(500):
            x_hat = self.rng.normal(scale=2.0, size=2)
            u_bl = self.rng.normal(scale=2.0, size=1)

            closed_form = augmentation.pi_from_estimate(
                x_hat, u_bl, self.design, self.spec)
            oracle = augmentation.qp_oracle(x_hat, u_bl, self.design,
                                            self.spec)
            worst = max(worst, np.max(np.abs(closed_form - oracle)))

        self.assertLess(worst, 1e-8)

    def test_qp_oracle_flight(self):
        design = self.scenario.design
        spec = self.scenario.spec
        worst = 0.0
        active = 0
        for _ in range(500):
            x_hat, u_bl = self._flight_sample()

            closed_form = augmentation.pi_from_estimate(x_hat, u_bl, design,
                                                        spec)
            oracle = augmentation.qp_oracle(x_hat, u_bl, design, spec)
            worst = max(worst, np.max(np.abs(closed_form - oracle)))
            if np.any(closed_form != 0.0):
                active += 1

        self.assertLess(worst, 1e-8)
        self.assertGreater(active, 0)

    def test_continuity(self):
        design = self.scenario.design
        spec = self.scenario.spec
        K = self.scenario.gains.K
        bound = linalg.norm(design.H_pi_inv, 2) * (
            linalg.norm(design.H_x, 2) +
            linalg.norm(design.H_pi, 2) * linalg.norm(K, 2))
        for _ in range(100):
            x_hat = self.rng.normal(scale=0.2, size=self.scenario.plant.n)
            direction = self.rng.normal(size=x_hat.size)
            direction /= linalg.norm(direction)
            epsilon = 1e-4

            first = augmentation.pi_from_estimate(x_hat, -K @ x_hat,
                                                  design, spec)
            moved = x_hat + epsilon * direction
            second = augmentation.pi_from_estimate(moved, -K @ moved,
                                                   design, spec)

            self.assertLessEqual(linalg.norm(second - first),
                                 bound * epsilon * (1.0 + 1e-9))


class TestPwaForm(base.TestCase):

    def setUp(self):
        super().setUp()
        self.scenario = self.flight()
        self.design = self.scenario.design
        self.spec = self.scenario.spec
        self.K = self.scenario.gains.K

    def _total(self, form, x_hat, u_exo):
        return (-(self.K + form.K_cbf) @ x_hat + form.F @ form.y_cmd_sel +
                form.modified_baseline @ u_exo)

    def test_inactive_is_baseline(self):
        x_hat = np.zeros(3)

        form = augmentation.pwa_form(x_hat, self.K, self.design, self.spec)

        self.assertAllClose(np.zeros((2, 2)), form.delta)
        self.assertAllClose(np.zeros((2, 3)), form.K_cbf)
        self.assertAllClose(np.eye(2), form.modified_baseline)
        self.assertAllClose(-self.K @ x_hat,
                            self._total(form, x_hat, np.zeros(2)))

    def test_reconstruction(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            x_hat = rng.normal(scale=0.2, size=3)
            u_exo = rng.normal(scale=0.05, size=2)
            u_bl = -self.K @ x_hat + u_exo

            form = augmentation.pwa_form(x_hat, self.K, self.design,
                                         self.spec, u_exo=u_exo)
            pi = augmentation.pi_from_estimate(x_hat, u_bl, self.design,
                                               self.spec)

            self.assertAllClose(u_bl + pi, self._total(form, x_hat, u_exo),
                                rtol=0.0, atol=1e-12)

    def test_elevator_row_active(self):
        # Find a state where only the elevator row binds.
        x_hat = None
        rng = np.random.default_rng(11)
        for _ in range(1000):
            candidate = rng.normal(scale=0.3, size=3)
            form = augmentation.pwa_form(candidate, self.K, self.design,
                                         self.spec)
            if np.array_equal(np.diag(form.delta), [1.0, 0.0]):
                x_hat = candidate
                break
        self.assertIsNotNone(x_hat)

        self.assertAllClose(
            np.zeros(3),
            (self.design.H_pi @ form.K_cbf)[1],
            atol=1e-12)
        expected = self.design.H_pi_inv @ np.diag([1.0, 0.0]) @ (
            self.design.H_x - self.design.H_pi @ self.K)
        self.assertAllClose(expected, form.K_cbf, atol=1e-12)

    def test_double_integrator(self):
        plant = data_models.Plant(A=[[0.0, 1.0], [0.0, 0.0]],
                                  B=[[0.0], [1.0]], C=[[1.0, 0.0]],
                                  C_lim=[[0.0, 1.0]])
        spec = data_models.ConstraintSpec([-1.0], [1.0], [[-1.0]])
        design = cbf_design.build_design(plant, spec)
        K = np.zeros((1, 2))
        x_hat = np.array([0.0, -0.9])
        u_exo = np.array([-1.0])

        form = augmentation.pwa_form(x_hat, K, design, spec, u_exo=u_exo)
        pi = (-form.K_cbf @ x_hat + form.F @ form.y_cmd_sel +
              (form.modified_baseline - np.eye(1)) @ u_exo)

        self.assertAllClose([-1.0], form.y_cmd_sel)
        self.assertAllClose(
            augmentation.pi_from_estimate(x_hat, u_exo, design, spec), pi,
            rtol=0.0, atol=1e-12)
