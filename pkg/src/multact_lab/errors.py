"""Exception types raised across the library.

Everything inherits from :class:`MultactError` (itself a ``ValueError``) so
callers can catch broadly or precisely.
"""


class MultactError(ValueError):
    """Base class for all library errors."""


class LimitTooLargeError(MultactError):
    """An input exceeds a documented size guard."""


class InvalidProgressionError(MultactError):
    """The progression Q*n + b leaves the positive integers."""


class EnumerationTooLargeError(MultactError):
    """A set is too large to enumerate; use the sampler instead."""


class NonUnimodularDivisorError(MultactError):
    """Rational evaluation hit a denominator prime with |f(p)| < 1."""


class EmptyRestrictionError(MultactError):
    """A restricted mean had no contributing indices."""


class TrivialFormError(MultactError):
    """A linear form with both coefficients zero was supplied."""


class DegenerateSubstitutionError(MultactError):
    """A substitution collapsed a linear form to zero or broke a constraint."""


class SingularMatrixError(MultactError):
    """A 2x2 integer matrix with zero determinant was supplied."""


class EmptyAfterExclusionError(MultactError):
    """All factors were excluded; the power-form order is undefined."""


class EquationHypothesisError(MultactError):
    """Quadratic-equation coefficients violate the standing relation a+b=d."""


class InvalidShiftError(MultactError):
    """The shift parameter does not make all family coefficients nonnegative."""


class NoncommutingGeneratorsError(MultactError):
    """Two supplied generator permutations do not commute."""


class NonInvertibleArgumentError(MultactError):
    """A dilation was applied at an argument sharing a factor with the modulus."""


class UnsupportedActionError(MultactError):
    """The operation is not defined for this kind of action."""


class InvalidPartitionError(MultactError):
    """Cells do not partition the space."""


class SpaceMismatchError(MultactError):
    """Observables or actions live on different spaces."""


class AllPointsExcludedError(MultactError):
    """Every grid point was excluded; the average is undefined."""


class ZeroMeasureError(MultactError):
    """The base set has measure zero."""


class DegenerateRangeError(MultactError):
    """Index truncation produced an empty sub-box."""


class CostGuardError(MultactError):
    """The requested computation exceeds a documented cost guard."""


class UndefinedEvaluationError(MultactError):
    """A factor with negative exponent vanished at the evaluation point."""


class SchemaError(MultactError):
    """An experiment configuration failed schema validation."""
