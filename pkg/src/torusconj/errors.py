"""Exception hierarchy.

Everything numerical derives from ``NumericalError`` so callers (the CLI in
particular) can tell a software failure apart from an obstruction, which is
an expected mathematical outcome and derives from ``ObstructionError``.
"""


class TorusConjError(Exception):
    pass


class NumericalError(TorusConjError):
    pass


class RationalRotationError(NumericalError, ValueError):
    """The rotation number is rational (or indistinguishable from one)."""


class InsufficientSamplingError(NumericalError):
    """Consecutive loop samples are too far apart to lift unambiguously."""


class ReturnTimeCapError(NumericalError):
    pass


class SmallDenominatorError(NumericalError):
    """A Fourier mode hits a near-resonance ``|1 - exp(2 pi i m theta)|``."""

    def __init__(self, mode, denominator, threshold):
        self.mode = mode
        self.denominator = denominator
        self.threshold = threshold
        super().__init__(
            f"small denominator at mode {mode}: |1 - e^(2 pi i m theta)| = "
            f"{denominator:.3e} <= {threshold:.1e}"
        )


class SubdivisionError(NumericalError):
    pass


class TruncationError(NumericalError):
    def __init__(self, message, needed_degree=None):
        self.needed_degree = needed_degree
        super().__init__(message)


class CertificationError(NumericalError):
    pass


class NotInV1Error(TorusConjError, ValueError):
    """f1 - f2 is not a lattice constant plus a trigonometric polynomial."""


class ObstructionError(TorusConjError):
    """The requested conjugacy cannot exist; carries the obstruction report."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)
