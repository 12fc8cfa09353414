"""Exception types raised by optsplit."""

import numpy as np


class DimensionError(ValueError):
    """Operands disagree on the size of a named axis."""


class SingularMatrixError(np.linalg.LinAlgError):
    """A matrix that must be inverted failed to factorize."""


class InsufficientHistoryError(ValueError):
    """Too few usable residuals to estimate a convergence rate."""


class ComparisonError(ValueError):
    """Two splittings do not satisfy the hypothesis needed to order their rates."""
