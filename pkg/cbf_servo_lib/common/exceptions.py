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

from cbf_servo_lib.i18n import _


class CbfServoError(Exception):
    """Catch all exception raised by the library.

    :param fault_string: String describing the fault.
    :type fault_string: string
    """
    fault_string = _("An unknown error occurred.")

    def __init__(self, *args, **kwargs):
        self.fault_string = kwargs.pop('fault_string', self.fault_string)
        super().__init__(self.fault_string, *args, **kwargs)


class InputError(CbfServoError):
    """A model, scenario or argument failed validation."""
    fault_string = _("Invalid input.")


class DimensionMismatch(InputError):
    """Exception raised when a matrix does not have the expected shape.

    :param matrix: Name of the offending matrix.
    :type matrix: string
    :param expected: The expected shape.
    :type expected: tuple
    :param actual: The shape found.
    :type actual: tuple
    """
    fault_string = _("Matrix dimensions are inconsistent.")

    def __init__(self, *args, **kwargs):
        self.matrix = kwargs.pop('matrix', None)
        self.expected = kwargs.pop('expected', None)
        self.actual = kwargs.pop('actual', None)
        if 'fault_string' not in kwargs and self.matrix is not None:
            kwargs['fault_string'] = _(
                "Matrix %(matrix)s has shape %(actual)s, expected "
                "%(expected)s.") % {'matrix': self.matrix,
                                    'actual': self.actual,
                                    'expected': self.expected}
        super().__init__(*args, **kwargs)


class ScenarioParseError(InputError):
    """Exception raised when a scenario file cannot be parsed.

    :param lineno: One based line number of the fault.
    :type lineno: int
    :param column: One based column of the fault.
    :type column: int
    :param line: The offending line.
    :type line: string
    """
    fault_string = _("The scenario file could not be parsed.")

    def __init__(self, *args, **kwargs):
        self.lineno = kwargs.pop('lineno', None)
        self.column = kwargs.pop('column', None)
        self.line = kwargs.pop('line', None)
        super().__init__(*args, **kwargs)

    def __str__(self):
        if self.lineno is None:
            return self.fault_string
        return _("line %(lineno)s, column %(column)s: %(fault)s") % {
            'lineno': self.lineno, 'column': self.column or 1,
            'fault': self.fault_string}


class IllDefinedRelativeDegree(CbfServoError):
    """No Markov parameter of a limited output is structurally nonzero.

    :param output_index: Zero based index of the limited output.
    :type output_index: int
    """
    fault_string = _("Ill-defined relative degree.")

    def __init__(self, *args, **kwargs):
        self.output_index = kwargs.pop('output_index', None)
        if 'fault_string' not in kwargs and self.output_index is not None:
            kwargs['fault_string'] = _(
                "Limited output %d has an ill-defined relative degree."
            ) % self.output_index
        super().__init__(*args, **kwargs)


class SingularSensitivity(CbfServoError):
    """The control sensitivity matrix H_pi is singular.

    :param condition_number: Condition number of H_pi.
    :type condition_number: float
    """
    fault_string = _("H_pi singular.")

    def __init__(self, *args, **kwargs):
        self.condition_number = kwargs.pop('condition_number', None)
        if ('fault_string' not in kwargs and
                self.condition_number is not None):
            kwargs['fault_string'] = _(
                "H_pi singular (condition number %g).") % (
                    self.condition_number)
        super().__init__(*args, **kwargs)


class NotHurwitz(CbfServoError):
    """A matrix required to be Hurwitz has a non-negative eigenvalue.

    :param max_real_part: Largest real part of the spectrum.
    :type max_real_part: float
    """
    fault_string = _("Matrix is not Hurwitz.")

    def __init__(self, *args, **kwargs):
        self.max_real_part = kwargs.pop('max_real_part', None)
        super().__init__(*args, **kwargs)


class ParameterRuleError(CbfServoError):
    """CBF rate is not slower than the slowest observer dynamics."""
    fault_string = _("The CBF rate must be smaller than the observer decay "
                     "rate.")


class ConvergenceError(CbfServoError):
    """An iterative solver did not reach its tolerance.

    :param iterations: Iterations spent.
    :type iterations: int
    :param residual: Last residual norm.
    :type residual: float
    """
    fault_string = _("The solver did not converge.")

    def __init__(self, *args, **kwargs):
        self.iterations = kwargs.pop('iterations', None)
        self.residual = kwargs.pop('residual', None)
        super().__init__(*args, **kwargs)


class QpInfeasible(CbfServoError):
    """Active-set enumeration found no KKT point."""
    fault_string = _("No feasible KKT point exists for the augmentation QP.")


class NumericalBlowUp(CbfServoError):
    """Integration produced a non-finite value.

    :param time: Simulation time of the failing step, s.
    :type time: float
    """
    fault_string = _("Numerical blow-up.")

    def __init__(self, *args, **kwargs):
        self.time = kwargs.pop('time', None)
        if 'fault_string' not in kwargs and self.time is not None:
            kwargs['fault_string'] = _(
                "Numerical blow-up at t = %g s.") % self.time
        super().__init__(*args, **kwargs)


class PoleAtGridPoint(CbfServoError):
    """A frequency point coincides with an open-loop pole.

    :param frequency: Frequency of the grid point, rad/s.
    :type frequency: float
    """
    fault_string = _("Frequency point coincides with a pole.")

    def __init__(self, *args, **kwargs):
        self.frequency = kwargs.pop('frequency', None)
        super().__init__(*args, **kwargs)
