"""
Double-double arithmetic on numpy arrays.

A value is stored as the unevaluated sum hi + lo of two float64 arrays with
|lo| <= ulp(hi)/2. Scalars are simply 0-d instances, so the same class serves
as the extended scalar and as the high-precision matrix storage used by the
mixed-precision kernels.
"""

import numpy as np

_SPLITTER = 134217729.0  # 2^27 + 1

# Inner-dimension chunks are sized so the (chunk, rows, cols) product tensor stays small
_MATMUL_CHUNK_ELEMENTS = 2_000_000


def two_sum(a, b):
    """Error-free sum: s + err == a + b exactly."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    """Error-free sum assuming |a| >= |b|."""
    s = a + b
    err = b - (s - a)
    return s, err


def split(a):
    """Dekker split into two halves of at most 26 significant bits each."""
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Error-free product: p + err == a * b exactly (barring overflow)."""
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _finish(hi, lo, leading):
    # Non-finite leading terms win: inf stays inf, NaN stays NaN.
    bad = ~np.isfinite(leading)
    if np.any(bad):
        hi = np.where(bad, leading, hi)
        lo = np.where(bad, np.where(np.isnan(leading), np.nan, 0.0), lo)
    return hi, lo


class DoubleDouble:
    """
    Array of double-double numbers.

    Parameters:
    - hi: array-like of float64
        Leading parts.
    - lo: array-like of float64 or None
        Trailing parts (zeros when omitted).
    """

    __slots__ = ("hi", "lo")
    __array_ufunc__ = None  # make numpy defer to the reflected operators

    def __init__(self, hi, lo=None):
        self.hi = np.asarray(hi, dtype=np.float64)
        if lo is None:
            self.lo = np.zeros_like(self.hi)
        else:
            self.lo = np.asarray(lo, dtype=np.float64)
            if self.lo.shape != self.hi.shape:
                self.hi, self.lo = np.broadcast_arrays(self.hi, self.lo)
                self.hi, self.lo = self.hi.copy(), self.lo.copy()

    # --- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, shape):
        return cls(np.zeros(shape), np.zeros(shape))

    @classmethod
    def eye(cls, n):
        return cls(np.eye(n), np.zeros((n, n)))

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        return cls(np.asarray(value, dtype=np.float64))

    def copy(self):
        return DoubleDouble(self.hi.copy(), self.lo.copy())

    def to_float64(self):
        """Rounds to the nearest float64 (hi + lo is a single correctly rounded addition)."""
        with np.errstate(invalid="ignore", over="ignore"):
            return self.hi + self.lo

    # --- array protocol -----------------------------------------------------

    @property
    def shape(self):
        return self.hi.shape

    @property
    def ndim(self):
        return self.hi.ndim

    @property
    def size(self):
        return self.hi.size

    @property
    def T(self):
        return DoubleDouble(self.hi.T, self.lo.T)

    def __len__(self):
        return len(self.hi)

    def __getitem__(self, key):
        return DoubleDouble(self.hi[key], self.lo[key])

    def __setitem__(self, key, value):
        value = DoubleDouble.coerce(value)
        self.hi[key] = value.hi
        self.lo[key] = value.lo

    def isfinite(self):
        return np.isfinite(self.hi) & np.isfinite(self.lo)

    def __repr__(self):
        return f"DoubleDouble(hi={self.hi!r}, lo={self.lo!r})"

    # --- arithmetic ---------------------------------------------------------

    def __neg__(self):
        return DoubleDouble(-self.hi, -self.lo)

    def __add__(self, other):
        other = DoubleDouble.coerce(other)
        with np.errstate(all="ignore"):
            s, e = two_sum(self.hi, other.hi)
            t, f = two_sum(self.lo, other.lo)
            e = e + t
            s, e = quick_two_sum(s, e)
            e = e + f
            hi, lo = quick_two_sum(s, e)
            hi, lo = _finish(hi, lo, self.hi + other.hi)
        return DoubleDouble(hi, lo)

    def __radd__(self, other):
        return DoubleDouble.coerce(other) + self

    def __sub__(self, other):
        return self + (-DoubleDouble.coerce(other))

    def __rsub__(self, other):
        return DoubleDouble.coerce(other) - self

    def __mul__(self, other):
        other = DoubleDouble.coerce(other)
        with np.errstate(all="ignore"):
            p, e = two_prod(self.hi, other.hi)
            e = e + (self.hi * other.lo + self.lo * other.hi)
            hi, lo = quick_two_sum(p, e)
            hi, lo = _finish(hi, lo, self.hi * other.hi)
        return DoubleDouble(hi, lo)

    def __rmul__(self, other):
        return DoubleDouble.coerce(other) * self

    def __truediv__(self, other):
        other = DoubleDouble.coerce(other)
        with np.errstate(all="ignore"):
            q1 = self.hi / other.hi
            r = self - other * q1
            q2 = r.hi / other.hi
            r = r - other * q2
            q3 = r.hi / other.hi
            q1, q2 = quick_two_sum(q1, q2)
            result = DoubleDouble(q1, q2) + q3
            hi, lo = _finish(result.hi, result.lo, self.hi / other.hi)
        return DoubleDouble(hi, lo)

    def __rtruediv__(self, other):
        return DoubleDouble.coerce(other) / self

    def sqrt(self):
        """Square root; negative inputs give NaN and never raise."""
        with np.errstate(all="ignore"):
            r = np.sqrt(self.hi)
            p, e = two_prod(r, r)
            corr = ((self.hi - p) - e + self.lo) * 0.5 / r
            corr = np.where(r > 0, corr, 0.0)
            hi, lo = quick_two_sum(r, corr)
            hi, lo = _finish(hi, lo, r)
        return DoubleDouble(hi, lo)

    def __matmul__(self, other):
        return dd_matmul(self, DoubleDouble.coerce(other))

    def __rmatmul__(self, other):
        return dd_matmul(DoubleDouble.coerce(other), self)


def _pairwise_sum(terms):
    # Fixed pairwise order along axis 0 so results are reproducible
    while len(terms) > 1:
        half = len(terms) // 2
        head = terms[:half] + terms[half:2 * half]
        if len(terms) % 2:
            head = DoubleDouble(
                np.concatenate([head.hi, terms.hi[-1:]]),
                np.concatenate([head.lo, terms.lo[-1:]]),
            )
        terms = head
    return terms[0]


def dd_matmul(A, B):
    """
    Matrix product of two 2-D DoubleDouble arrays.

    Products are formed exactly (two_prod) and accumulated by pairwise
    double-double summation over chunks of the inner dimension; chunks are
    combined left to right.

    Parameters:
    - A: DoubleDouble of shape (m, k)
    - B: DoubleDouble of shape (k, n)

    Returns:
    - DoubleDouble of shape (m, n)
    """
    m, k = A.shape
    k2, n = B.shape
    if k != k2:
        raise ValueError(f"Inner dimensions differ: {A.shape} @ {B.shape}")

    out = DoubleDouble.zeros((m, n))
    if k == 0 or m == 0 or n == 0:
        return out

    chunk = max(1, _MATMUL_CHUNK_ELEMENTS // max(1, m * n))
    for start in range(0, k, chunk):
        stop = min(k, start + chunk)
        # (chunk, m, 1) * (chunk, 1, n) -> (chunk, m, n)
        a = A[:, start:stop]
        b = B[start:stop, :]
        a3 = DoubleDouble(a.hi.T[:, :, None], a.lo.T[:, :, None])
        b3 = DoubleDouble(b.hi[:, None, :], b.lo[:, None, :])
        out = out + _pairwise_sum(a3 * b3)
    return out
