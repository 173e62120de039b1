"""
Dense kernels parameterized by precision.

Every kernel converts its operands to the requested precision, performs all
arithmetic there and returns a result in that precision's representation
(float32/float64 ndarray, or DoubleDouble). None of the kernels halt on a
numerical breakdown: NaN and Inf flow through to the caller.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from numerics.double_double import DoubleDouble, dd_matmul
from numerics.precision import PrecisionId, cast

_EPS_DOUBLE = 2.0 ** -53
_JACOBI_MAX_SWEEPS = 60


class DimensionMismatchError(ValueError):
    """Raised when operand shapes violate a kernel's contract."""


class NonFiniteMatrixError(ValueError):
    """Raised when a norm or singular values are requested for a non-finite matrix."""


@dataclass
class QRFactors:
    """
    Orthonormal factor Q and upper-triangular factor R with X ~ QR.

    Both factors are stored in the precision the producing routine returns in.
    """

    Q: object
    R: object

    def has_nan(self):
        return not (all_finite(self.Q) and all_finite(self.R))


def all_finite(x):
    if isinstance(x, DoubleDouble):
        return bool(np.all(x.isfinite()))
    return bool(np.all(np.isfinite(x)))


def zeros(shape, precision):
    """Zero matrix in the representation of a precision."""
    precision = PrecisionId.from_name(precision)
    if precision is PrecisionId.DOUBLE_DOUBLE:
        return DoubleDouble.zeros(shape)
    return np.zeros(shape, dtype=precision.dtype, order="F")


def _sqrt(x):
    if isinstance(x, DoubleDouble):
        return x.sqrt()
    return np.sqrt(x)


def _product(a, b):
    if isinstance(a, DoubleDouble):
        return dd_matmul(a, b)
    return a @ b


def _require_2d(name, a):
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatchError(f"{name} must be a non-empty 2-D matrix, got shape {a.shape}")


def matmul(A, B, precision=PrecisionId.DOUBLE, transpose_a=False):
    """
    Matrix product op(A) @ B with all arithmetic in one precision.

    Parameters:
    - A, B: np.ndarray or DoubleDouble
    - precision: PrecisionId or str
    - transpose_a: bool
        Use A^T instead of A (the Gram and projection products of the
        Gram-Schmidt loops are all of this form).

    Returns:
    - matrix in the representation of `precision`
    """
    a = cast(A, precision)
    b = cast(B, precision)
    _require_2d("A", a)
    _require_2d("B", b)
    if transpose_a:
        a = a.T
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(f"Cannot multiply {a.shape} by {b.shape}")

    with np.errstate(all="ignore"):
        return _product(a, b)


def cholesky_nonstop(A, precision=PrecisionId.DOUBLE):
    """
    Right-looking Cholesky factorization that never halts.

    Only the upper triangle of A is read. A non-positive or NaN pivot still
    goes through the square root, so the factor fills with NaN instead of the
    call raising.

    Parameters:
    - A: symmetric matrix (np.ndarray or DoubleDouble)
    - precision: PrecisionId or str

    Returns:
    - upper-triangular R with R^T R ~ A
    """
    a = cast(A, precision)
    _require_2d("A", a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionMismatchError(f"Cholesky needs a square matrix, got {a.shape}")

    R = zeros((n, n), precision)
    with np.errstate(all="ignore"):
        for k in range(n):
            rkk = _sqrt(a[k, k])
            R[k, k] = rkk
            if k + 1 < n:
                row = a[k, k + 1:] / rkk
                R[k, k + 1:] = row
                a[k + 1:, k + 1:] = a[k + 1:, k + 1:] - row[:, None] * row[None, :]
    return R


def cholesky_halting(A, precision=PrecisionId.DOUBLE):
    """
    LAPACK Cholesky factorization that stops at the first bad pivot.

    A breakdown discards the partial factor: the result is all NaN, so it is
    recorded the same way as a non-halting breakdown.

    Parameters:
    - A: symmetric matrix (np.ndarray or DoubleDouble)
    - precision: PrecisionId or str

    Returns:
    - upper-triangular R with R^T R ~ A, or an all-NaN matrix
    """
    precision = PrecisionId.from_name(precision)
    if precision is PrecisionId.DOUBLE_DOUBLE:
        # No LAPACK in double-double; emulate the halt on top of the sweep
        R = cholesky_nonstop(A, precision)
        return R if all_finite(R) else DoubleDouble(np.full(R.shape, np.nan))

    a = cast(A, precision)
    _require_2d("A", a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"Cholesky needs a square matrix, got {a.shape}")
    try:
        return scipy.linalg.cholesky(a, lower=False, check_finite=False)
    except scipy.linalg.LinAlgError:
        return np.full(a.shape, np.nan, dtype=precision.dtype)


CHOLESKY_VARIANTS = {
    "nonstop": cholesky_nonstop,
    "lapack": cholesky_halting,
}


class UnknownCholeskyError(ValueError):
    """Raised for a Cholesky variant that is not registered."""


def cholesky(A, precision=PrecisionId.DOUBLE, variant="nonstop"):
    """
    Cholesky factor of A with a selectable breakdown behavior.

    Parameters:
    - A: symmetric matrix
    - precision: PrecisionId or str
    - variant: str
        "nonstop" keeps going through bad pivots, "lapack" halts.

    Returns:
    - upper-triangular R
    """
    if variant not in CHOLESKY_VARIANTS:
        raise UnknownCholeskyError(
            f"Unknown Cholesky variant '{variant}' (expected one of: {', '.join(CHOLESKY_VARIANTS)})"
        )
    return CHOLESKY_VARIANTS[variant](A, precision)


def tri_solve_right(V, R, precision=PrecisionId.DOUBLE):
    """
    Solves Q R = V for Q with R upper triangular (Q = V R^{-1}).

    Column j of Q only depends on columns 0..j of V, so the solve sweeps the
    columns left to right. A zero on the diagonal of R yields Inf/NaN entries.
    """
    v = cast(V, precision)
    r = cast(R, precision)
    _require_2d("V", v)
    m, s = v.shape
    if r.shape != (s, s):
        raise DimensionMismatchError(f"R must be {s}x{s} to solve against V of shape {v.shape}, got {r.shape}")

    Q = zeros((m, s), precision)
    with np.errstate(all="ignore"):
        for j in range(s):
            col = v[:, j:j + 1]
            if j:
                col = col - _product(Q[:, :j], r[:j, j:j + 1])
            Q[:, j:j + 1] = col / r[j, j]
    return Q


def _householder_vector(x):
    # Reflector mapping x onto +||x|| e_1 (works on any array type with +,-,*,/,sqrt)
    xhead = x[0]
    xtail = x[1:]
    v = x.copy()
    v[0] = 1.0

    sigma = _product(xtail[None, :], xtail[:, None])[0, 0] if len(xtail) else xhead * 0.0
    if float(np.asarray(_lead(sigma))) == 0.0:
        return v, xhead * 0.0

    mu = _sqrt(xhead * xhead + sigma)
    if float(np.asarray(_lead(xhead))) <= 0.0:
        vhead = xhead - mu
    else:
        vhead = -sigma / (xhead + mu)
    vhead2 = vhead * vhead
    beta = 2.0 * vhead2 / (sigma + vhead2)
    v[1:] = xtail / vhead
    return v, beta


def _lead(x):
    return x.hi if isinstance(x, DoubleDouble) else x


def _householder_qr_dd(a):
    m, n = a.shape
    a = a.copy()
    reflectors = []
    with np.errstate(all="ignore"):
        for j in range(n):
            v, beta = _householder_vector(a[j:, j])
            w = _product(v[None, :], a[j:, j:]) * beta
            a[j:, j:] = a[j:, j:] - v[:, None] * w
            reflectors.append((v, beta))

        R = a[:n, :n].copy()
        for i in range(1, n):
            R[i, :i] = 0.0

        Q = DoubleDouble.zeros((m, n))
        for i in range(n):
            Q[i, i] = 1.0
        for j in reversed(range(n)):
            v, beta = reflectors[j]
            w = _product(v[None, :], Q[j:, :]) * beta
            Q[j:, :] = Q[j:, :] - v[:, None] * w
    return Q, R


def householder_qr(X, precision=PrecisionId.DOUBLE):
    """
    Economy Householder QR with a nonnegative diagonal in R.

    Native precisions go through LAPACK (scipy keeps float32 in single);
    double_double uses a plain reflector loop on DoubleDouble arrays.

    Parameters:
    - X: m x n matrix with m >= n
    - precision: PrecisionId or str

    Returns:
    - QRFactors with Q (m x n) and R (n x n)
    """
    precision = PrecisionId.from_name(precision)
    x = cast(X, precision)
    _require_2d("X", x)
    m, n = x.shape
    if m < n:
        raise DimensionMismatchError(f"Householder QR needs m >= n, got {x.shape}")

    if precision is PrecisionId.DOUBLE_DOUBLE:
        Q, R = _householder_qr_dd(x)
        flip = np.where(R.hi.diagonal() < 0, -1.0, 1.0)
        Q = DoubleDouble(Q.hi * flip[None, :], Q.lo * flip[None, :])
        R = DoubleDouble(R.hi * flip[:, None], R.lo * flip[:, None])
        return QRFactors(Q, R)

    with np.errstate(all="ignore"):
        Q, R = scipy.linalg.qr(x, mode="economic", check_finite=False)
    # Flip reflector signs so the diagonal of R is nonnegative
    flip = np.where(np.diagonal(R) < 0, -1, 1).astype(x.dtype)
    Q = np.asfortranarray(Q * flip[None, :])
    R = np.triu(R * flip[:, None])
    return QRFactors(Q, R)


def _round_robin(n):
    # Tournament schedule: every column pair meets exactly once per sweep, n/2 disjoint pairs per round
    players = list(range(n + (n % 2)))
    count = len(players)
    rounds = []
    for _ in range(count - 1):
        pairs = [(players[i], players[count - 1 - i]) for i in range(count // 2)]
        pairs = [(p, q) for p, q in pairs if p < n and q < n]
        if pairs:
            rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _one_sided_jacobi(a):
    u = np.array(a, dtype=np.float64, order="F", copy=True)
    n = u.shape[1]
    if n == 1:
        return np.linalg.norm(u, axis=0)

    tol = n * _EPS_DOUBLE
    rounds = _round_robin(n)
    with np.errstate(all="ignore"):
        for _ in range(_JACOBI_MAX_SWEEPS):
            rotated = False
            for p, q in rounds:
                up, uq = u[:, p], u[:, q]
                alpha = np.einsum("ij,ij->j", up, up)
                beta = np.einsum("ij,ij->j", uq, uq)
                gamma = np.einsum("ij,ij->j", up, uq)
                active = np.abs(gamma) > tol * np.sqrt(alpha * beta)
                if not active.any():
                    continue
                rotated = True
                safe_gamma = np.where(active, gamma, 1.0)
                zeta = (beta - alpha) / (2.0 * safe_gamma)
                t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                c = np.where(active, c, 1.0)
                s = np.where(active, s, 0.0)
                u[:, p] = c * up - s * uq
                u[:, q] = s * up + c * uq
            if not rotated:
                break
    return np.linalg.norm(u, axis=0)


def singular_values(A):
    """
    Singular values in descending order, computed in double.

    Tall inputs are first reduced by column-pivoted QR, then the triangular
    factor is diagonalized by one-sided Jacobi rotations, which keeps high
    relative accuracy for the small singular values of graded matrices.

    Parameters:
    - A: np.ndarray or DoubleDouble (rounded to double)

    Returns:
    - np.ndarray of length min(m, n)
    """
    a = cast(A, PrecisionId.DOUBLE)
    _require_2d("A", a)
    if not np.all(np.isfinite(a)):
        raise NonFiniteMatrixError("Norm undefined: matrix has non-finite entries")

    m, n = a.shape
    if m < n:
        a = a.T
        m, n = n, m
    if m > n:
        r = scipy.linalg.qr(a, mode="r", pivoting=True, check_finite=False)[0]
        a = np.triu(r[:n, :n])

    return np.sort(_one_sided_jacobi(a))[::-1]


def two_norm(A):
    """Induced 2-norm (largest singular value)."""
    return float(singular_values(A)[0])


def cond2(A):
    """2-norm condition number; +inf when the smallest singular value is zero."""
    sv = singular_values(A)
    if sv[-1] == 0.0:
        return float("inf")
    return float(sv[0] / sv[-1])


def triu(A):
    """Upper triangle of a matrix in any representation."""
    if isinstance(A, DoubleDouble):
        return DoubleDouble(np.triu(A.hi), np.triu(A.lo))
    return np.triu(A)
