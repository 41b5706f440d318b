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

"""
cbf-servo-lib flake8 checks.

 - Generic style belongs in the 'hacking' package; only rules about how this
   library logs, raises and does numerics live here.
 - Codes are C3xx, allocated in order.  Keep the functions sorted by code,
   list each rule in HACKING.rst and register it under
   [flake8:local-plugins] in tox.ini.
 - Every rule gets a case in cbf_servo_lib/tests/unit/hacking/test_checks.py.
"""

import re

from hacking import core

LOG_LEVELS = ('critical', 'debug', 'error', 'exception', 'info', 'warning')
TRANSLATION_HINTS = ('_', '_LC', '_LE', '_LI', '_LW')

translated_log_re = re.compile(
    r'LOG\.(?:%s)\(\s*(?:%s)\(' % ('|'.join(LOG_LEVELS),
                                   '|'.join(TRANSLATION_HINTS)))
raise_literal_re = re.compile(r'raise\s+[\w.]*\(\s*([\'"])')
logging_import_re = re.compile(r'(?:import|from)\s+[(]?logging\b')
numpy_matrix_re = re.compile(r'\b(?:np|numpy)\.(?:mat|matrix|asmatrix)\(')
numpy_inv_re = re.compile(r'\b(?:np|numpy)\.linalg\.inv\(')
print_re = re.compile(r'^\s*print\(')
degrees_in_re = re.compile(
    r'\b(?:np|numpy|math)\.(?:radians|deg2rad)\(|\bpi\s*/\s*180\b')


def _is_test(filename):
    return '/tests/' in filename


def _is_console(filename):
    return _is_test(filename) or '/cli/' in filename


@core.flake8ext
def no_log_warn(logical_line):
    """C339 - LOG.warn is deprecated."""
    if logical_line.startswith('LOG.warn('):
        yield 0, 'C339: Use LOG.warning() rather than LOG.warn()'


@core.flake8ext
def no_translate_logs(logical_line, filename):
    """C341 - Log messages stay in English.

    Tests are exempt.
    """
    if _is_test(filename):
        return
    match = translated_log_re.search(logical_line)
    if match:
        yield match.start(), 'C341: Log messages should not be translated'


@core.flake8ext
def check_raised_localized_exceptions(logical_line, filename):
    """C342 - A message passed straight to raise must go through _().

    :param logical_line: The logical line to check.
    :param filename: The file name where the logical line exists.
    """
    if _is_test(filename):
        return
    match = raise_literal_re.match(logical_line.strip())
    if match:
        yield (logical_line.index(match.group(1)),
               'C342: Untranslated exception message')


@core.flake8ext
def check_no_logging_imports(logical_line):
    """C348 - Loggers come from oslo_log."""
    match = logging_import_re.match(logical_line)
    if match:
        yield (logical_line.index('logging'),
               'C348: Usage of Python logging module not allowed, use '
               'oslo_log')


@core.flake8ext
def check_no_numpy_matrix(logical_line):
    """C350 - Matrices are 2-D ndarrays multiplied with @."""
    match = numpy_matrix_re.search(logical_line)
    if match:
        yield match.start(), 'C350: Use 2-D ndarrays instead of numpy.matrix'


@core.flake8ext
def check_no_numpy_inv(logical_line):
    """C351 - Inverses and solves go through scipy.linalg."""
    match = numpy_inv_re.search(logical_line)
    if match:
        yield (match.start(),
               'C351: Use scipy.linalg.solve or scipy.linalg.inv instead of '
               'numpy.linalg.inv')


@core.flake8ext
def check_no_print_in_library(logical_line, filename):
    """C352 - Library modules log, only the CLI prints."""
    if _is_console(filename):
        return
    if print_re.match(logical_line):
        yield 0, 'C352: Use LOG instead of print outside the CLI'


@core.flake8ext
def check_no_degree_input(logical_line, filename):
    """C353 - Degrees are converted only where scenario files are read.

    The library works in SI units throughout.

    :param logical_line: The logical line to check.
    :param filename: The file name where the logical line exists.
    """
    if _is_console(filename):
        return
    match = degrees_in_re.search(logical_line)
    if match:
        yield (match.start(),
               'C353: Convert degrees with unit=deg in the scenario file, '
               'not in library code')
