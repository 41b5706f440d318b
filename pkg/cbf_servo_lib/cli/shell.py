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

"""The ``cbf-servo`` command.

    cbf-servo check|design|simulate|margins|sweep|bound SCENARIO [--out DIR]

Exit status is 0 on success, 1 on invalid input, 2 when ``check`` finds
the design not CBF-able or the parameter rule violated and 3 on a
numerical failure.
"""

import sys

from oslo_config import cfg
from oslo_log import log as logging
from oslo_serialization import jsonutils

from cbf_servo_lib.analysis import margins
from cbf_servo_lib.analysis import sweep
from cbf_servo_lib.cli import output
from cbf_servo_lib.cli import scenario_file
from cbf_servo_lib.common import constants
from cbf_servo_lib.common import data_models
from cbf_servo_lib.common import exceptions
from cbf_servo_lib.design import cbf_design
from cbf_servo_lib.i18n import _
from cbf_servo_lib.lti import core
from cbf_servo_lib.sim import engine
from cbf_servo_lib import version

LOG = logging.getLogger(__name__)

_HELP = {
    constants.CHECK: 'Report CBF-ability, the parameter rule and PBH tests.',
    constants.DESIGN: 'Write H_x, H_pi, alpha_pi and relative degrees.',
    constants.SIMULATE: 'Simulate the closed loop and report violations.',
    constants.MARGINS: 'Margins and loop traces at the input breakpoint.',
    constants.SWEEP: 'Margins over a grid of CBF rates.',
    constants.BOUND: 'Envelope constants and invariance times.',
}


def add_command_parsers(subparsers):
    for name in constants.SUBCOMMANDS:
        parser = subparsers.add_parser(name, help=_HELP[name])
        parser.add_argument('scenario', help='Scenario file.')
        parser.add_argument('--out', default=constants.DEFAULT_OUT_DIR,
                            help='Output directory.')
        parser.set_defaults(no_augmentation=False, delta=None, grid=None)
        if name == constants.SIMULATE:
            parser.add_argument('--no-augmentation', action='store_true',
                                help='Simulate the baseline loop only.')
        if name in (constants.MARGINS, constants.SWEEP):
            parser.add_argument('--delta', action='append',
                                help='Active constraint pattern such as 10; '
                                     'may be repeated.')
            parser.add_argument('--grid',
                                help='Frequency grid as count,low,high.')


command_opt = cfg.SubCommandOpt('command', title='Commands',
                                help='Available commands',
                                handler=add_command_parsers)


def parse_grid(text):
    parts = text.split(',')
    try:
        count, low, high = int(parts[0]), float(parts[1]), float(parts[2])
    except (IndexError, ValueError):
        raise exceptions.InputError(
            fault_string=_("--grid takes count,low,high, got %s.") % text)
    if len(parts) != 3:
        raise exceptions.InputError(
            fault_string=_("--grid takes count,low,high, got %s.") % text)
    return data_models.FrequencyGrid(count, low, high)


def apply_options(scenario, options):
    """Fold command line overrides into the scenario before hashing."""
    if options.get('no_augmentation'):
        scenario.augmentation_enabled = False
    if options.get('delta'):
        for bits in options['delta']:
            margins.parse_delta(bits, scenario.spec.m)
        scenario.analysis.deltas = list(options['delta'])
    if options.get('grid'):
        scenario.analysis.grid = parse_grid(options['grid'])
    return scenario


def _indexed(prefix, count):
    return ['%s%d' % (prefix, index) for index in range(count)]


def do_check(scenario, writer):
    plant, spec = scenario.plant, scenario.spec
    report = cbf_design.check_cbf_able(plant, spec)
    observer = core.eigen_report(plant.A - scenario.gains.L @ plant.C)
    if scenario.state_feedback:
        rule = [True] * spec.m
    else:
        try:
            rule = cbf_design.check_parameter_rule(spec, observer)
        except exceptions.NotHurwitz as e:
            LOG.warning('Parameter rule not evaluated: %s', e)
            rule = [False] * spec.m
    stabilizable, observable = core.pbh_check(plant)
    payload = {
        'cbf_ability': report.to_dict(recurse=True),
        'observer_eigs': observer.to_dict(recurse=True),
        'parameter_rule': [bool(holds) for holds in rule],
        'stabilizable': bool(stabilizable),
        'observable': bool(observable),
    }
    writer.write_json(constants.CHECK_FILE, payload)
    print(jsonutils.dumps(payload, sort_keys=True, indent=2))
    if report.cbf_able and all(rule):
        return constants.EXIT_OK
    LOG.warning('Check failed: cbf_able=%s parameter rule=%s',
                report.cbf_able, rule)
    return constants.EXIT_CHECK_FAILED


def do_design(scenario, writer):
    design = cbf_design.build_design(scenario.plant, scenario.spec)
    rows = [('r', index, 0, degree) for index, degree in enumerate(design.r)]
    for name in ('H_x', 'H_pi', 'alpha_pi', 'H_pi_inv'):
        matrix = getattr(design, name)
        rows += [(name, i, j, float(matrix[i, j]))
                 for i in range(matrix.shape[0])
                 for j in range(matrix.shape[1])]
    rows.append(('condition_number', 0, 0, design.condition_number))
    writer.write_csv(constants.DESIGN_FILE, constants.DESIGN_COLUMNS, rows)
    return constants.EXIT_OK


def _attach_design(scenario):
    try:
        scenario.design = cbf_design.build_design(scenario.plant,
                                                  scenario.spec)
    except (exceptions.SingularSensitivity,
            exceptions.IllDefinedRelativeDegree, exceptions.InputError) as e:
        if scenario.augmentation_enabled:
            raise
        LOG.info('Baseline run without slacks: %s', e)


def trajectory_columns(tr):
    n, m, m_lim = tr.x.shape[1], tr.u.shape[1], tr.y_lim.shape[1]
    return (['t'] + _indexed('x', n) + _indexed('xhat', n) +
            _indexed('u', m) + _indexed('pi', m) + _indexed('y_lim', m_lim) +
            _indexed('delta', tr.delta.shape[1]) + _indexed('u_bl', m) +
            _indexed('dH_min', m_lim) + _indexed('dH_max', m_lim) +
            ['disturbance'])


def trajectory_rows(tr):
    for index, t in enumerate(tr.time):
        yield ([float(t)] + [float(v) for v in tr.x[index]] +
               [float(v) for v in tr.x_hat[index]] +
               [float(v) for v in tr.u[index]] +
               [float(v) for v in tr.pi[index]] +
               [float(v) for v in tr.y_lim[index]] +
               [int(v) for v in tr.delta[index]] +
               [float(v) for v in tr.u_bl[index]] +
               [float(v) for v in tr.dH_min[index]] +
               [float(v) for v in tr.dH_max[index]] +
               [float(tr.disturbance[index])])


def violation_rows(report):
    for record in report.records:
        yield (record.constraint, record.max_below, record.max_above,
               record.max_violation, record.first_time, record.last_time,
               record.duration)


def do_simulate(scenario, writer):
    _attach_design(scenario)
    tr = engine.simulate(scenario, writer.scenario_hash)
    report = engine.violation_report(tr, scenario.spec)
    writer.write_csv(constants.TRAJECTORY_FILE, trajectory_columns(tr),
                     trajectory_rows(tr))
    writer.write_csv(constants.VIOLATIONS_FILE, constants.VIOLATION_COLUMNS,
                     violation_rows(report))
    return constants.EXIT_OK


def margin_rows(report):
    disk = report.disk
    for margin in report.channels:
        yield (report.delta, report.actuator, margin.channel, margin.gm_db,
               margin.pm_deg, margin.phase_crossover, margin.gain_crossover,
               disk.alpha, disk.gm_low_db, disk.gm_high_db, disk.pm_deg,
               margin.note)


def do_margins(scenario, writer):
    plant, analysis = scenario.plant, scenario.analysis
    design = cbf_design.build_design(plant, scenario.spec)
    channels = analysis.channels or list(range(plant.m))
    transfers = margins.loop_transfers(plant, scenario.gains, design,
                                       analysis, scenario.actuator)
    rows, bode, nyquist = [], [], []
    for transfer in transfers:
        report = margins.transfer_margins(transfer, analysis.grid, channels)
        rows.extend(margin_rows(report))
        prefix = [report.delta, report.actuator]
        bode += [prefix + row for row in margins.bode_trace(
            transfer, analysis.grid, channels)]
        nyquist += [prefix + row for row in margins.nyquist_trace(
            transfer, analysis.grid, channels)]
    writer.write_csv(constants.MARGINS_FILE, constants.MARGIN_COLUMNS, rows)
    bode_columns = ['delta', 'actuator', 'omega']
    nyquist_columns = ['delta', 'actuator', 'omega']
    for channel in channels:
        bode_columns += ['mag_db%d' % channel, 'phase_deg%d' % channel]
        nyquist_columns += ['re%d' % channel, 'im%d' % channel]
    writer.write_csv(constants.BODE_FILE, bode_columns, bode)
    writer.write_csv(constants.NYQUIST_FILE, nyquist_columns, nyquist)
    return constants.EXIT_OK


def do_sweep(scenario, writer):
    points = sweep.sweep(scenario)
    m = scenario.spec.m
    columns = (_indexed('alpha', m) + ['valid'] +
               list(constants.MARGIN_COLUMNS) + ['reason'])
    rows = []
    for point in points:
        if not point.valid:
            rows.append(point.alphas + [False] +
                        [None] * len(constants.MARGIN_COLUMNS) +
                        [point.reason])
            continue
        for report in point.reports:
            rows += [point.alphas + [True] + list(row) + [None]
                     for row in margin_rows(report)]
    writer.write_csv(constants.SWEEP_FILE, columns, rows)
    return constants.EXIT_OK


def do_bound(scenario, writer):
    rows = [(record.constraint, record.alpha_star, record.lambda_max,
             record.rule_holds, record.k, record.e0_norm, record.h_min_0,
             record.h_max_0, record.t_min, record.t_max, record.t_bound)
            for record in engine.theorem_bounds(scenario)]
    writer.write_csv(constants.BOUND_FILE, constants.BOUND_COLUMNS, rows)
    return constants.EXIT_OK


_HANDLERS = {
    constants.CHECK: do_check,
    constants.DESIGN: do_design,
    constants.SIMULATE: do_simulate,
    constants.MARGINS: do_margins,
    constants.SWEEP: do_sweep,
    constants.BOUND: do_bound,
}


def run(subcommand, scenario_path, out_dir, options=None):
    """Run one subcommand and write its files.

    :param subcommand: One of constants.SUBCOMMANDS.
    :param scenario_path: Scenario file.
    :param out_dir: Output directory.
    :param options: Overrides: no_augmentation, delta, grid.
    :returns: The exit status.
    """
    if subcommand not in _HANDLERS:
        LOG.error('Unknown subcommand %s', subcommand)
        return constants.EXIT_INPUT_ERROR
    try:
        scenario = scenario_file.parse_scenario(scenario_path,
                                                with_design=False)
        apply_options(scenario, options or {})
        writer = output.OutputWriter(out_dir,
                                     scenario_file.scenario_hash(scenario),
                                     subcommand)
        status = _HANDLERS[subcommand](scenario, writer)
        writer.write_manifest()
    except exceptions.InputError as e:
        LOG.error('Invalid input: %s', e)
        return constants.EXIT_INPUT_ERROR
    except (exceptions.NumericalBlowUp, exceptions.ConvergenceError) as e:
        LOG.error('Numerical failure: %s', e)
        return constants.EXIT_NUMERICAL
    except exceptions.CbfServoError as e:
        LOG.error('%s failed: %s', subcommand, e)
        return constants.EXIT_INPUT_ERROR
    except OSError as e:
        LOG.error('Cannot write output: %s', e)
        return constants.EXIT_INPUT_ERROR
    return status


def main(argv=None):
    conf = cfg.ConfigOpts()
    conf.register_cli_opt(command_opt)
    logging.register_options(conf)
    conf(sys.argv[1:] if argv is None else argv, project=constants.PROJECT,
         version=version.version_string_with_package(),
         default_config_files=[])
    logging.setup(conf, constants.PROJECT)
    command = conf.command
    options = {'no_augmentation': command.no_augmentation,
               'delta': command.delta, 'grid': command.grid}
    return run(command.name, command.scenario, command.out, options)
