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

"""Scalar disturbance profiles entering through B_dist.

Every profile is a deterministic function of time, so all four RK4 stages
of a step see consistent values.
"""

import csv
import math
import os

import numpy as np
from oslo_log import log as logging

from cbf_servo_lib.common import constants
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.i18n import _

LOG = logging.getLogger(__name__)


class DisturbanceProfile():
    kind = constants.DIST_NONE

    def value(self, t):
        return 0.0


class StepProfile(DisturbanceProfile):
    kind = constants.DIST_STEP

    def __init__(self, t0, amplitude):
        self.t0 = float(t0)
        self.amplitude = float(amplitude)

    def value(self, t):
        return self.amplitude if t >= self.t0 else 0.0


class OneMinusCosProfile(DisturbanceProfile):
    """Discrete gust, amplitude/2 (1 - cos(2 pi (t - t0) / duration))."""
    kind = constants.DIST_ONE_MINUS_COS

    def __init__(self, t0, duration, amplitude):
        self.t0 = float(t0)
        self.duration = float(duration)
        self.amplitude = float(amplitude)
        if not self.duration > 0.0:
            raise exceptions.InputError(
                fault_string=_("Gust duration must be positive."))

    def value(self, t):
        phase = (t - self.t0) / self.duration
        if phase < 0.0 or phase > 1.0:
            return 0.0
        return 0.5 * self.amplitude * (1.0 - math.cos(2.0 * math.pi * phase))


def lcg_uniform(seed, count):
    """Uniform samples in [0, 1) from the 64-bit MMIX generator.

    state <- (6364136223846793005 state + 1442695040888963407) mod 2^64;
    each sample uses the top 53 bits of the new state.
    """
    state = int(seed) % constants.LCG_MODULUS
    samples = np.empty(count)
    for index in range(count):
        state = (constants.LCG_MULTIPLIER * state +
                 constants.LCG_INCREMENT) % constants.LCG_MODULUS
        samples[index] = (state >> 11) / float(2 ** 53)
    return samples


class _SampledProfile(DisturbanceProfile):
    def __init__(self, times, values):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)

    def value(self, t):
        return float(np.interp(t, self.times, self.values))


class FilteredNoiseProfile(_SampledProfile):
    """Unit-variance white noise through a first order low-pass.

    s[k+1] = a s[k] + b w[k], a = exp(-bandwidth dt),
    b = rms sqrt(1 - a^2), so the stationary RMS equals ``rms``.  Samples
    are linearly interpolated between grid points.
    """
    kind = constants.DIST_FILTERED_NOISE

    def __init__(self, seed, bandwidth, rms, dt, t_final):
        if not (bandwidth > 0.0 and rms >= 0.0):
            raise exceptions.InputError(
                fault_string=_("Noise bandwidth must be positive and rms "
                               "non-negative."))
        count = int(math.floor(t_final / dt + 1e-9)) + 2
        white = math.sqrt(12.0) * (lcg_uniform(seed, count) - 0.5)
        a = math.exp(-bandwidth * dt)
        b = rms * math.sqrt(1.0 - a * a)
        values = np.empty(count)
        values[0] = rms * white[0]
        for index in range(1, count):
            values[index] = a * values[index - 1] + b * white[index]
        super().__init__(np.arange(count) * dt, values)


class CsvProfile(_SampledProfile):
    """Two column ``time_s,value`` table, held constant past its ends."""
    kind = constants.DIST_CSV

    def __init__(self, path):
        try:
            with open(path, newline='') as handle:
                rows = [row for row in csv.reader(handle)
                        if row and not row[0].startswith('#')]
        except OSError as e:
            raise exceptions.InputError(
                fault_string=_("Cannot read disturbance file %(path)s: "
                               "%(error)s") % {'path': path, 'error': e})
        header = tuple(cell.strip() for cell in rows[0]) if rows else ()
        if header != constants.DISTURBANCE_CSV_HEADER:
            raise exceptions.InputError(
                fault_string=_("Disturbance file %s needs the header "
                               "time_s,value.") % path)
        try:
            table = np.array([[float(cell) for cell in row]
                              for row in rows[1:]])
        except ValueError:
            raise exceptions.InputError(
                fault_string=_("Disturbance file %s has non-numeric "
                               "cells.") % path)
        if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] != 2:
            raise exceptions.InputError(
                fault_string=_("Disturbance file %s needs two columns.") %
                path)
        if np.any(np.diff(table[:, 0]) <= 0.0):
            raise exceptions.InputError(
                fault_string=_("Disturbance file %s time column must be "
                               "strictly increasing.") % path)
        super().__init__(table[:, 0], table[:, 1])


def build_profile(spec, dt, t_final, base_dir=None):
    """Instantiate the profile described by a DisturbanceSpec."""
    params = spec.params
    try:
        if spec.kind == constants.DIST_NONE:
            return DisturbanceProfile()
        if spec.kind == constants.DIST_STEP:
            return StepProfile(params['t0'], params['amplitude'])
        if spec.kind == constants.DIST_ONE_MINUS_COS:
            return OneMinusCosProfile(params['t0'], params['duration'],
                                      params['amplitude'])
        if spec.kind == constants.DIST_FILTERED_NOISE:
            return FilteredNoiseProfile(int(params['seed']),
                                        float(params['bandwidth']),
                                        float(params['rms']), dt, t_final)
        path = params['path']
    except KeyError as e:
        raise exceptions.InputError(
            fault_string=_("Disturbance %(kind)s is missing parameter "
                           "%(param)s.") % {'kind': spec.kind, 'param': e})
    if base_dir and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    LOG.debug('Reading disturbance table %s', path)
    return CsvProfile(path)
