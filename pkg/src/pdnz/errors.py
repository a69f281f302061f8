"""Exception hierarchy shared across the package."""


class PdnError(Exception):
    """Base class for all package errors."""


class NumericalError(PdnError):
    """Base class for runtime numerical failures (CLI exit code 3)."""


class IdenticallyZeroDenominator(NumericalError):
    """A rational-function operation produced the zero polynomial as denominator."""


class EvaluationSingular(NumericalError):
    """Rational-function denominator vanished at the evaluation frequency."""

    def __init__(self, freq_hz):
        super().__init__(f"denominator numerically zero at {freq_hz:g} Hz")
        self.freq_hz = freq_hz


class SingularSystem(NumericalError):
    """Nodal admittance matrix had no usable pivot."""

    def __init__(self, freq_hz):
        super().__init__(f"singular admittance matrix at {freq_hz:g} Hz")
        self.freq_hz = freq_hz


class NoConvergence(NumericalError):
    """Root iteration did not converge; diagnostics attached."""

    def __init__(self, iterations, last_step, roots, residuals):
        super().__init__(
            f"root finder did not converge after {iterations} iterations "
            f"(last relative step {last_step:.3e})")
        self.iterations = iterations
        self.last_step = last_step
        self.roots = roots
        self.residuals = residuals


class Disconnected(PdnError):
    """Netlist has nodes with no path to ground."""


class BadRange(PdnError):
    """Invalid frequency-grid specification."""


class TooFewPoints(PdnError):
    """Peak detection needs at least five grid points."""


class TooManyBranches(PdnError):
    """A system supports at most eight extra parallel branches."""


class UnknownParam(PdnError):
    """Parameter path does not name an existing branch field."""


class ParseError(PdnError):
    """Config text could not be parsed (CLI exit code 2)."""

    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{reason}")
