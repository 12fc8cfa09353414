"""Dense LU factorization reused across right-hand sides."""

import warnings
from time import perf_counter

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import SingularMatrixError


class LUFactor:
    """Partial-pivoting LU of a square matrix, factorized once.

    ``seconds`` holds the wall time spent in the factorization.
    """

    def __init__(self, matrix, label="matrix"):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"{label} must be square, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise SingularMatrixError(f"{label} has non-finite entries")
        self.label = label
        self.n = matrix.shape[0]
        start = perf_counter()
        with warnings.catch_warnings():
            # Singularity is detected from the pivots below.
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(matrix, check_finite=False)
        self.seconds = perf_counter() - start
        pivots = np.abs(np.diag(lu))
        scale = max(pivots.max(initial=0.0), np.abs(matrix).max(initial=0.0))
        if scale == 0.0 or pivots.min() <= self.n * np.finfo(float).eps * scale:
            raise SingularMatrixError(f"{label} is singular to working precision")
        self._lu = (lu, piv)

    def solve(self, rhs):
        return lu_solve(self._lu, rhs, check_finite=False)

    def inverse(self):
        return self.solve(np.eye(self.n))
