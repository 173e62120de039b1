"""
Stability metrics of a computed QR factorization.

All products are accumulated in double-double and rounded to double only
before the 2-norm, so the measurement error stays far below the O(eps_double)
quantities being measured.
"""

import numpy as np
from dataclasses import dataclass

from numerics.double_double import DoubleDouble
from numerics.linalg import all_finite, cond2, matmul, two_norm
from numerics.precision import PrecisionId, cast
from orthogonalization.base import BlockMatrix

_DD = PrecisionId.DOUBLE_DOUBLE


@dataclass
class StabilityReport:
    """
    The three quality measures of one run, plus the condition number of its input.

    Parameters:
    - loo: float
        ||I - Q^T Q||_2
    - rel_residual: float
        ||QR - X||_2 / ||X||_2
    - rel_chol_residual: float
        ||X^T X - R^T R||_2 / ||X||_2^2
    - kappa: float
        cond2(X)
    """

    loo: float
    rel_residual: float
    rel_chol_residual: float
    kappa: float

    def is_finite(self):
        return bool(np.all(np.isfinite([self.loo, self.rel_residual, self.rel_chol_residual])))


def _as_matrix(X):
    return X.data if isinstance(X, BlockMatrix) else X


def _norm_or_nan(E):
    E = cast(E, PrecisionId.DOUBLE)
    if not np.all(np.isfinite(E)):
        return float("nan")
    return two_norm(E)


def loss_of_orthogonality(Q):
    """
    Loss of orthogonality ||I - Q^T Q||_2.

    Parameters:
    - Q: np.ndarray or DoubleDouble (m x n)

    Returns:
    - float, NaN when Q has non-finite entries
    """
    if not all_finite(Q):
        return float("nan")
    n = Q.shape[1]
    E = DoubleDouble.eye(n) - matmul(Q, Q, _DD, transpose_a=True)
    return _norm_or_nan(E)


def rel_residual(Q, R, X):
    """
    Relative residual ||QR - X||_2 / ||X||_2.

    Parameters:
    - Q: m x n basis
    - R: n x n triangular factor
    - X: BlockMatrix or m x n matrix the factors approximate

    Returns:
    - float, NaN when any factor is non-finite
    """
    X = _as_matrix(X)
    if not (all_finite(Q) and all_finite(R)):
        return float("nan")
    E = matmul(Q, R, _DD) - cast(X, _DD)
    norm_x = two_norm(X)
    with np.errstate(all="ignore"):
        return float(np.float64(_norm_or_nan(E)) / norm_x)


def rel_chol_residual(R, X):
    """
    Relative Cholesky residual ||X^T X - R^T R||_2 / ||X||_2^2.

    Parameters:
    - R: n x n triangular factor
    - X: BlockMatrix or m x n matrix

    Returns:
    - float, NaN when R is non-finite
    """
    X = _as_matrix(X)
    if not all_finite(R):
        return float("nan")
    E = matmul(X, X, _DD, transpose_a=True) - matmul(R, R, _DD, transpose_a=True)
    norm_x = two_norm(X)
    with np.errstate(all="ignore"):
        return float(np.float64(_norm_or_nan(E)) / (norm_x * norm_x))


def compute_stability_report(Q, R, X, kappa=None):
    """
    Evaluates all three metrics of one factorization.

    Parameters:
    - Q, R: computed factors
    - X: BlockMatrix or matrix that was factored
    - kappa: float or None
        Condition number of X if already known (measured otherwise).

    Returns:
    - StabilityReport
    """
    X = _as_matrix(X)
    if kappa is None:
        kappa = cond2(X)
    return StabilityReport(
        loo=loss_of_orthogonality(Q),
        rel_residual=rel_residual(Q, R, X),
        rel_chol_residual=rel_chol_residual(R, X),
        kappa=float(kappa),
    )
