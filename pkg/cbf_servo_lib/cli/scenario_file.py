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

"""Scenario files.

A scenario is INI-structured text.  Matrices declare their dimensions and
list bracketed rows, optionally continued on indented lines::

    [plant]
    A = 2x2 [0, 1]
            [0, 0]
    B = 2x1 [0] [1]

    [limits]
    y_min = [-8, -5] unit=deg

Vectors and matrices may carry ``unit=deg`` or ``unit=si``; degrees are
converted to radians when the file is read and limit vectors must be
tagged.  Unknown sections or keys are rejected.
"""

import hashlib
import math
import os
import re

import numpy as np
from oslo_config import iniparser
from oslo_log import log as logging
from oslo_utils import strutils

from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.design import cbf_design
from cbf_servo_lib.design import observer_baseline
from cbf_servo_lib.design import pi_servo
from cbf_servo_lib.i18n import _

LOG = logging.getLogger(__name__)

MATRIX = 'matrix'
VECTOR = 'vector'
LIMIT = 'limit'
GROUPS = 'groups'
REAL = 'real'
REALS = 'reals'
INTS = 'ints'
WORDS = 'words'
TEXT = 'text'
BOOL = 'bool'
DISTURBANCE = 'disturbance'
POLES = 'poles'

SCHEMA = {
    'plant': {'A': MATRIX, 'B': MATRIX, 'C': MATRIX, 'D': MATRIX,
              'C_lim': MATRIX, 'B_dist': MATRIX},
    'pi_servo': {'A_p': MATRIX, 'B_p': MATRIX, 'C_p': MATRIX, 'D_p': MATRIX,
                 'C_p_reg': MATRIX, 'D_p_reg': MATRIX, 'C_p_lim': MATRIX,
                 'B_dist': MATRIX, 'K_I': MATRIX, 'K_P': MATRIX},
    'limits': {'y_min': LIMIT, 'y_max': LIMIT, 'u_min': LIMIT,
               'u_max': LIMIT, 'z_min': LIMIT, 'z_max': LIMIT},
    'cbf': {'lambdas': GROUPS},
    'baseline': {'mode': TEXT, 'K': MATRIX, 'Q': MATRIX, 'R': MATRIX},
    'observer': {'mode': TEXT, 'L': MATRIX, 'Q': MATRIX, 'R': MATRIX,
                 'poles': POLES},
    'sim': {'name': TEXT, 't_final': REAL, 'dt': REAL, 'x0': VECTOR,
            'xhat0': VECTOR, 'command': VECTOR, 'command_time': REAL,
            'command_matrix': MATRIX, 'disturbance': DISTURBANCE,
            'augmentation': BOOL},
    'actuator': {'omega_n': REAL, 'zeta': REAL, 'channels': INTS,
                 'simulate': BOOL},
    'analysis': {'grid': REALS, 'deltas': WORDS, 'channels': INTS,
                 'sweep_mode': TEXT, 'sweep_grid': REALS,
                 'break_point': TEXT},
}

REQUIRED_SECTIONS = ('limits', 'cbf', 'observer', 'sim')

_DIMENSIONS_RE = re.compile(r'^\s*(\d+)\s*x\s*(\d+)\b(.*)$', re.S)
_UNIT_RE = re.compile(r'\bunit\s*=\s*(\S+)\s*$')
_GROUP_RE = re.compile(r'\[([^\[\]]*)\]')
_SEPARATOR_RE = re.compile(r'[\s,]+')


class _BadValue(Exception):
    def __init__(self, message, token=None):
        super().__init__(message)
        self.message = message
        self.token = token


def _tokens(text):
    return [token for token in _SEPARATOR_RE.split(text.strip()) if token]


def _number(token):
    try:
        return float(token)
    except ValueError:
        raise _BadValue(_("%s is not a number") % token, token)


def _split_unit(text):
    match = _UNIT_RE.search(text)
    if not match:
        return text, None
    unit = match.group(1)
    if unit not in constants.UNITS:
        raise _BadValue(_("unknown unit %s") % unit, unit)
    return text[:match.start()], unit


def _scale(unit):
    return math.pi / 180.0 if unit == constants.UNIT_DEG else 1.0


def _groups(text):
    remainder = _GROUP_RE.sub(' ', text).strip()
    if remainder:
        token = remainder.split()[0]
        raise _BadValue(_("unexpected text %s outside brackets") % token,
                        token)
    return [[_number(token) for token in _tokens(group)]
            for group in _GROUP_RE.findall(text)]


def _matrix(key, text):
    body, unit = _split_unit(text)
    match = _DIMENSIONS_RE.match(body)
    if not match:
        raise _BadValue(_("matrix %s must declare its dimensions as "
                          "RxC") % key, (body.split() or [None])[0])
    rows, cols = int(match.group(1)), int(match.group(2))
    values = _groups(match.group(3))
    actual = (len(values), max([len(row) for row in values] or [0]))
    if len(values) != rows or any(len(row) != cols for row in values):
        raise exceptions.DimensionMismatch(
            matrix=key, expected=(rows, cols), actual=actual)
    return np.array(values, dtype=float).reshape(rows, cols) * _scale(unit)


def _vector(key, text, need_unit=False):
    body, unit = _split_unit(text)
    if need_unit and unit is None:
        raise _BadValue(_("limit %s needs a unit tag (unit=si or "
                          "unit=deg)") % key)
    values = _groups(body)
    if len(values) != 1:
        raise _BadValue(_("%s must be a single bracketed vector") % key)
    return np.array(values[0], dtype=float) * _scale(unit)


def _lambdas(key, text):
    values = _groups(text)
    if not values or not all(values):
        raise _BadValue(_("%s needs one non-empty bracket per output") % key)
    return values


def _bool(key, text):
    try:
        return strutils.bool_from_string(text, strict=True)
    except ValueError:
        raise _BadValue(_("%(key)s is not a boolean: %(text)s") %
                        {'key': key, 'text': text}, text)


def _text(key, text):
    if not text.strip():
        raise _BadValue(_("%s is empty") % key)
    return text.strip()


def _disturbance(key, text):
    words = text.split()
    if not words:
        raise _BadValue(_("%s is empty") % key)
    params = {}
    for word in words[1:]:
        name, sep, value = word.partition('=')
        if not sep or not name:
            raise _BadValue(_("disturbance parameter %s is not "
                              "name=value") % word, word)
        if name == 'path':
            params[name] = value
        elif name == 'seed':
            try:
                params[name] = int(value)
            except ValueError:
                raise _BadValue(_("seed %s is not an integer") % value,
                                value)
        else:
            params[name] = _number(value)
    try:
        return data_models.DisturbanceSpec(kind=words[0], params=params)
    except exceptions.InputError as e:
        raise _BadValue(e.fault_string, words[0])


def _poles(key, text):
    values = []
    for token in _tokens(text):
        try:
            values.append(complex(token))
        except ValueError:
            raise _BadValue(_("%s is not a complex number") % token, token)
    if not values:
        raise _BadValue(_("%s is empty") % key)
    return values


def _ints(key, text):
    values = []
    for token in _tokens(text):
        try:
            values.append(int(token))
        except ValueError:
            raise _BadValue(_("%s is not an integer") % token, token)
    return values


_CONVERTERS = {
    MATRIX: _matrix,
    VECTOR: _vector,
    LIMIT: lambda key, text: _vector(key, text, need_unit=True),
    GROUPS: _lambdas,
    REAL: lambda key, text: _number(text.strip()),
    REALS: lambda key, text: [_number(token) for token in _tokens(text)],
    INTS: _ints,
    WORDS: lambda key, text: _tokens(text),
    TEXT: _text,
    BOOL: _bool,
    DISTURBANCE: _disturbance,
    POLES: _poles,
}


class ScenarioParser(iniparser.BaseParser):
    """Collects typed values section by section."""

    def __init__(self):
        super().__init__()
        self.sections = {}
        self.section = None
        self._key_lineno = 0
        self._key_line = ''

    def _fail(self, message, lineno, line, token=None):
        column = line.find(token) + 1 if token else 0
        if column <= 0:
            column = line.find('=') + 2 if '=' in line else 1
        raise exceptions.ScenarioParseError(
            lineno=lineno, column=column, line=line, fault_string=message)

    def parse(self, lineiter):
        try:
            super().parse(lineiter)
        except iniparser.ParseError as e:
            self._fail(e.msg, e.lineno, e.line)
        return self.sections

    def _split_key_value(self, line):
        self._key_lineno = self.lineno
        self._key_line = line
        return super()._split_key_value(line)

    def new_section(self, section):
        if section not in SCHEMA:
            self._fail(_("unknown section [%s]") % section, self.lineno,
                       '[%s]' % section, section)
        if section in self.sections:
            self._fail(_("duplicate section [%s]") % section, self.lineno,
                       '[%s]' % section, section)
        self.section = section
        self.sections[section] = {}

    def assignment(self, key, value):
        line, lineno = self._key_line, self._key_lineno
        if self.section is None:
            self._fail(_("%s is outside of any section") % key, lineno,
                       line, key)
        schema = SCHEMA[self.section]
        if key not in schema:
            self._fail(_("unknown key %(key)s in [%(section)s]") %
                       {'key': key, 'section': self.section}, lineno, line,
                       key)
        values = self.sections[self.section]
        if key in values:
            self._fail(_("duplicate key %s") % key, lineno, line, key)
        try:
            values[key] = _CONVERTERS[schema[key]](key, ' '.join(value))
        except _BadValue as e:
            self._fail(e.message, lineno, line, e.token)


def read_scenario_file(lines, path=data_models.Unset):
    """Parse scenario text into a ScenarioFile.

    :param lines: Iterable of text lines.
    :raises ScenarioParseError: Malformed text, with line and column.
    :raises DimensionMismatch: A matrix disagrees with its declared shape.
    """
    return data_models.ScenarioFile(ScenarioParser().parse(lines), path)


def _required(scenario_file, section, key):
    value = scenario_file.get(section, key)
    if value is data_models.Unset:
        raise exceptions.InputError(
            fault_string=_("[%(section)s] needs %(key)s.") %
            {'section': section, 'key': key})
    return value


def _optional(scenario_file, section, keys):
    return {key: scenario_file.get(section, key) for key in keys
            if scenario_file.get(section, key) is not data_models.Unset}


def _baseline(scenario_file, plant):
    if not scenario_file.has('baseline'):
        raise exceptions.InputError(
            fault_string=_("A [plant] scenario needs a [baseline] "
                           "section."))
    mode = scenario_file.get('baseline', 'mode', constants.OBSERVER_GIVEN)
    if mode not in constants.BASELINE_MODES:
        raise exceptions.InputError(
            fault_string=_("Unknown baseline mode %s.") % mode)
    if mode == constants.OBSERVER_GIVEN:
        return _required(scenario_file, 'baseline', 'K'), False
    problem = data_models.AreProblem(
        A=plant.A, B=plant.B, Q=_required(scenario_file, 'baseline', 'Q'),
        R=_required(scenario_file, 'baseline', 'R'))
    return observer_baseline.lqr_gain(problem), True


def _observer(scenario_file, plant):
    """Observer gain, its provenance and whether estimation is bypassed."""
    mode = scenario_file.get('observer', 'mode', constants.OBSERVER_GIVEN)
    if mode not in constants.OBSERVER_MODES:
        raise exceptions.InputError(
            fault_string=_("Unknown observer mode %s.") % mode)
    if mode == constants.OBSERVER_LQR:
        L = observer_baseline.observer_gain(
            plant.A, plant.C, _required(scenario_file, 'observer', 'Q'),
            _required(scenario_file, 'observer', 'R'))
        return L, constants.PROVENANCE_LQR, False
    if mode == constants.OBSERVER_PLACE:
        L = observer_baseline.place_observer(
            plant.A, plant.C, _required(scenario_file, 'observer', 'poles'))
        return L, constants.PROVENANCE_PLACED, False
    if mode == constants.OBSERVER_STATE_FEEDBACK:
        L = scenario_file.get('observer', 'L', np.zeros((plant.n,
                                                         plant.n_y)))
        return L, constants.PROVENANCE_GIVEN, True
    return (_required(scenario_file, 'observer', 'L'),
            constants.PROVENANCE_GIVEN, False)


def _analysis(scenario_file, state_feedback=False):
    options = {}
    if state_feedback:
        options['break_point'] = constants.BREAK_STATE_FEEDBACK
    grid = scenario_file.get('analysis', 'grid')
    if grid is not data_models.Unset:
        if len(grid) != 3:
            raise exceptions.InputError(
                fault_string=_("grid is count, low, high."))
        options['grid'] = data_models.FrequencyGrid(int(grid[0]), grid[1],
                                                    grid[2])
    sweep_grid = scenario_file.get('analysis', 'sweep_grid')
    if sweep_grid is not data_models.Unset and len(sweep_grid) != 3:
        raise exceptions.InputError(
            fault_string=_("sweep_grid is low, high, step."))
    options.update(_optional(scenario_file, 'analysis',
                             ('deltas', 'channels', 'sweep_mode',
                              'sweep_grid', 'break_point')))
    return data_models.AnalysisConfig(**options)


def build_scenario(scenario_file, with_design=True):
    """Validate a ScenarioFile and assemble the Scenario it describes.

    :param with_design: Build the augmentation design; design failures
        then propagate.
    :raises InputError: Missing or inconsistent content.
    :returns: A Scenario in SI units.
    """
    if scenario_file.has('plant') == scenario_file.has('pi_servo'):
        raise exceptions.InputError(
            fault_string=_("A scenario needs exactly one of [plant] and "
                           "[pi_servo]."))
    for section in REQUIRED_SECTIONS:
        if not scenario_file.has(section):
            raise exceptions.InputError(
                fault_string=_("Missing section [%s].") % section)

    lambdas = _required(scenario_file, 'cbf', 'lambdas')
    command_matrix = scenario_file.get('sim', 'command_matrix')
    if scenario_file.has('pi_servo'):
        if scenario_file.has('baseline'):
            raise exceptions.InputError(
                fault_string=_("[baseline] does not apply to a [pi_servo] "
                               "scenario, K_I and K_P are the baseline."))
        servo = dict(scenario_file.sections['pi_servo'])
        K_I = _required(scenario_file, 'pi_servo', 'K_I')
        K_P = _required(scenario_file, 'pi_servo', 'K_P')
        servo.pop('K_I')
        servo.pop('K_P')
        for key in ('A_p', 'B_p', 'C_p', 'C_p_reg', 'C_p_lim'):
            _required(scenario_file, 'pi_servo', key)
        system = pi_servo.extend_system(
            data_models.PhysicalPlant(**servo), K_I, K_P,
            (_required(scenario_file, 'limits', 'u_min'),
             _required(scenario_file, 'limits', 'u_max')),
            (_required(scenario_file, 'limits', 'z_min'),
             _required(scenario_file, 'limits', 'z_max')),
            lambdas)
        plant, spec, K, designed = (system.plant, system.spec, system.K_ext,
                                    False)
        if command_matrix is data_models.Unset:
            command_matrix = system.command_matrix
    else:
        for key in ('A', 'B', 'C'):
            _required(scenario_file, 'plant', key)
        plant = data_models.Plant(**scenario_file.sections['plant'])
        spec = data_models.ConstraintSpec(
            y_min=_required(scenario_file, 'limits', 'y_min'),
            y_max=_required(scenario_file, 'limits', 'y_max'),
            lambdas=lambdas)
        K, designed = _baseline(scenario_file, plant)

    L, provenance, state_feedback = _observer(scenario_file, plant)
    if designed:
        provenance = constants.PROVENANCE_LQR
    gains = observer_baseline.make_gain_set(
        plant, K, L, provenance, validate_observer=not state_feedback)
    design = (cbf_design.build_design(plant, spec) if with_design
              else data_models.Unset)

    sim = scenario_file.sections['sim']
    command = data_models.Unset
    if 'command' in sim:
        command = data_models.CommandSchedule(sim['command'],
                                              sim.get('command_time', 0.0))
    actuator, actuator_in_sim = data_models.Unset, False
    if scenario_file.has('actuator'):
        actuator = data_models.Actuator(
            _required(scenario_file, 'actuator', 'omega_n'),
            _required(scenario_file, 'actuator', 'zeta'),
            scenario_file.get('actuator', 'channels'))
        actuator_in_sim = scenario_file.get('actuator', 'simulate', False)

    path = scenario_file.path
    return data_models.Scenario(
        plant=plant, gains=gains, spec=spec,
        x0=sim.get('x0', np.zeros(plant.n)),
        xhat0=sim.get('xhat0', np.zeros(plant.n)),
        name=sim.get('name', data_models.Unset), design=design,
        t_final=sim.get('t_final', constants.DEFAULT_T_FINAL),
        dt=sim.get('dt', constants.DEFAULT_DT), command=command,
        command_matrix=command_matrix,
        disturbance=sim.get('disturbance', data_models.Unset),
        augmentation_enabled=sim.get('augmentation', True),
        actuator=actuator, actuator_in_sim=actuator_in_sim,
        state_feedback=state_feedback,
        analysis=_analysis(scenario_file, state_feedback),
        base_dir=os.path.dirname(os.path.abspath(path)) if path else None)


def parse_scenario(path, with_design=True):
    """Read, validate and assemble a scenario file.

    :raises InputError: Unreadable, malformed or inconsistent file.
    :returns: A Scenario.
    """
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as e:
        raise exceptions.InputError(
            fault_string=_("Cannot read scenario %(path)s: %(error)s") %
            {'path': path, 'error': e})
    LOG.debug('Parsing scenario %s', path)
    return build_scenario(read_scenario_file(lines, path), with_design)


def _float(value):
    return repr(float(value))


def _row(values):
    return '[%s]' % ', '.join(_float(value) for value in values)


def _format_matrix(M):
    rows = M.shape[0]
    return '%dx%d %s' % (rows, M.shape[1], ' '.join(_row(row) for row in M))


def _format_vector(v, limit=False):
    return _row(v) + (' unit=si' if limit else '')


def serialize_scenario(scenario):
    """Canonical text of a scenario.

    Values are written in SI units with round-trip float precision, a PI
    servo as its extended plant and synthesized gains as given gains, so
    that reading the text back reproduces the scenario.
    """
    plant, spec, gains = scenario.plant, scenario.spec, scenario.gains
    out = ['[plant]']
    for name in ('A', 'B', 'C', 'D', 'C_lim', 'B_dist'):
        M = getattr(plant, name)
        if M.size:
            out.append('%s = %s' % (name, _format_matrix(M)))
    out += ['', '[limits]',
            'y_min = %s' % _format_vector(spec.y_min, True),
            'y_max = %s' % _format_vector(spec.y_max, True),
            '', '[cbf]',
            'lambdas = %s' % ' '.join(_row(row) for row in spec.lambdas),
            '', '[baseline]', 'mode = %s' % constants.OBSERVER_GIVEN,
            'K = %s' % _format_matrix(gains.K),
            '', '[observer]',
            'mode = %s' % (constants.OBSERVER_STATE_FEEDBACK
                           if scenario.state_feedback
                           else constants.OBSERVER_GIVEN),
            'L = %s' % _format_matrix(gains.L),
            '', '[sim]']
    if scenario.name:
        out.append('name = %s' % scenario.name)
    out += ['t_final = %s' % _float(scenario.t_final),
            'dt = %s' % _float(scenario.dt),
            'x0 = %s' % _format_vector(scenario.x0),
            'xhat0 = %s' % _format_vector(scenario.xhat0)]
    if scenario.command:
        out += ['command = %s' % _format_vector(scenario.command.value),
                'command_time = %s' % _float(scenario.command.time)]
    if scenario.command_matrix is not data_models.Unset:
        out.append('command_matrix = %s' %
                   _format_matrix(scenario.command_matrix))
    dist = scenario.disturbance
    if dist.kind != constants.DIST_NONE:
        params = ' '.join(
            '%s=%s' % (key, _float(value) if isinstance(value, float)
                       else value)
            for key, value in sorted(dist.params.items()))
        out.append(('disturbance = %s %s' % (dist.kind, params)).rstrip())
    out.append('augmentation = %s' %
               ('true' if scenario.augmentation_enabled else 'false'))

    actuator = scenario.actuator
    if actuator:
        out += ['', '[actuator]', 'omega_n = %s' % _float(actuator.omega_n),
                'zeta = %s' % _float(actuator.zeta)]
        if actuator.channels is not data_models.Unset:
            out.append('channels = %s' % ' '.join(
                str(channel) for channel in actuator.channels))
        out.append('simulate = %s' %
                   ('true' if scenario.actuator_in_sim else 'false'))

    analysis = scenario.analysis
    grid = analysis.grid
    out += ['', '[analysis]',
            'grid = %d, %s, %s' % (grid.count, _float(grid.low),
                                   _float(grid.high))]
    if analysis.deltas is not data_models.Unset:
        out.append('deltas = %s' % ' '.join(analysis.deltas))
    if analysis.channels is not data_models.Unset:
        out.append('channels = %s' % ' '.join(
            str(channel) for channel in analysis.channels))
    out.append('sweep_mode = %s' % analysis.sweep_mode)
    out.append('break_point = %s' % analysis.break_point)
    if analysis.sweep_grid is not data_models.Unset:
        out.append('sweep_grid = %s' % ', '.join(
            _float(value) for value in analysis.sweep_grid))
    return '\n'.join(out) + '\n'


def scenario_hash(scenario):
    """sha256 of the canonical scenario text."""
    text = serialize_scenario(scenario)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()
