"""Exception types raised across the package.

Every domain error derives from :class:`MatMechError`, which the CLI maps to
exit code 1.
"""


class MatMechError(ValueError):
    pass


class RankDeficient(MatMechError):
    pass


class DimensionMismatch(MatMechError):
    pass


class NotSymmetric(MatMechError):
    pass


class NotPositiveDefinite(MatMechError):
    pass


class NonPositiveScale(MatMechError):
    pass


class NotPowerOfTwo(MatMechError):
    pass


class DomainTooLarge(MatMechError):
    pass


class MissingDelta(MatMechError):
    pass


class EpsilonTooLarge(MatMechError):
    pass


class IllConditioned(MatMechError):
    pass


class MatrixFormatError(MatMechError):
    pass


class NonConvergenceWarning(UserWarning):
    """Optimizer hit ``max_iters`` before the tolerance was met."""
