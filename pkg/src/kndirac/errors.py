"""Exception hierarchy shared by all kndirac modules."""


class KNDiracError(Exception):
    """Base class for every error raised by this package."""


class KappaTooSmall(KNDiracError, ValueError):
    pass


class NegativeDiscriminant(KNDiracError, ValueError):
    pass


class MeshTooCoarse(KNDiracError, ValueError):
    pass


class EvaluationAtNode(KNDiracError, ValueError):
    pass


class QuadratureNonConvergence(KNDiracError, RuntimeError):
    pass


class OracleScaleExceeded(KNDiracError, ValueError):
    pass


class SolverBreakdown(KNDiracError, RuntimeError):
    pass


class NoConvergence(KNDiracError, RuntimeError):
    pass


class UnpairedPoint(KNDiracError, RuntimeError):
    pass


class EmptySpectrum(KNDiracError, ValueError):
    pass


class DegenerateSegment(KNDiracError, ValueError):
    pass


class DiskViolation(KNDiracError, ValueError):
    pass


class ParseError(KNDiracError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
