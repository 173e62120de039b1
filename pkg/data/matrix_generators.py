import numpy as np
from dataclasses import dataclass, field

from numerics.linalg import householder_qr
from orthogonalization.base import BlockMatrix

MATRIX_CLASSES = ("default", "glued", "monomial", "piled")

# Conditioning knobs each class understands
KNOB_NAMES = {
    "default": ("t",),
    "glued": ("t1", "t2"),
    "monomial": ("r", "t"),
    "piled": ("t1", "t2"),
}

# Monomial operator spectrum lies strictly inside this interval
_MONOMIAL_SPECTRUM = (0.1, 10.0)

# Stream keys, so every random draw of a spec has its own independent counter stream
_STREAM_LEFT = 0
_STREAM_RIGHT = 1
_STREAM_GLUE = 2
_STREAM_MONOMIAL = 3
_STREAM_PILE = 4


class MatrixSpecError(ValueError):
    """Raised for generator inputs that violate the dimension or knob contract."""


@dataclass
class MatrixSpec:
    """
    Everything needed to rebuild a test matrix bit for bit.

    Parameters:
    - matrix_class: str
        One of "default", "glued", "monomial", "piled".
    - m, p, s: int
        Rows, number of block vectors, block width.
    - knobs: dict
        Class-specific conditioning knobs (see KNOB_NAMES).
    - seed: int
        64-bit seed of the counter-based generator.
    """

    matrix_class: str
    m: int
    p: int
    s: int
    knobs: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.matrix_class not in KNOB_NAMES:
            raise MatrixSpecError(
                f"Unknown matrix class '{self.matrix_class}' (expected one of: {', '.join(MATRIX_CLASSES)})"
            )
        _check_dims(self.m, self.p, self.s)
        expected = set(KNOB_NAMES[self.matrix_class])
        if set(self.knobs) != expected:
            raise MatrixSpecError(
                f"Class '{self.matrix_class}' takes knobs {sorted(expected)}, got {sorted(self.knobs)}"
            )
        if self.matrix_class == "monomial" and self.knobs["r"] * self.knobs["t"] != self.p * self.s:
            raise MatrixSpecError(
                f"Monomial basis needs r*t = p*s, got r*t = {self.knobs['r'] * self.knobs['t']} and p*s = {self.p * self.s}"
            )
        if any(value < 0 for value in self.knobs.values()):
            raise MatrixSpecError(f"Conditioning knobs must be nonnegative, got {self.knobs}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise MatrixSpecError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def knob_label(self):
        """Stable text form of the knobs, e.g. "t1=2;t2=3"."""
        return ";".join(f"{name}={self.knobs[name]:g}" for name in KNOB_NAMES[self.matrix_class])


def _check_dims(m, p, s):
    if min(m, p, s) < 1:
        raise MatrixSpecError(f"Dimensions must be positive, got m={m}, p={p}, s={s}")
    if p * s > m:
        raise MatrixSpecError(f"Need p*s <= m, got p*s = {p * s} > m = {m}")


def _rng(seed, *stream):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=stream)))


def _orthonormal(rows, cols, rng):
    G = rng.standard_normal((rows, cols))
    return householder_qr(G, "double").Q


def _log_spectrum(count, t):
    return np.logspace(0.0, -float(t), count)


def _default_matrix(m, n, t, seed, stream):
    if t < 0:
        raise MatrixSpecError(f"Conditioning exponent must be nonnegative, got t={t}")
    U = _orthonormal(m, n, _rng(seed, stream, _STREAM_LEFT))
    V = _orthonormal(n, n, _rng(seed, stream, _STREAM_RIGHT))
    return np.asfortranarray((U * _log_spectrum(n, t)[None, :]) @ V.T)


def gen_default(m, p, s, t, seed=0):
    """
    X = U diag(sigma) V^T with sigma log-spaced on [10^-t, 1], so cond2(X) ~ 10^t.

    Parameters:
    - m, p, s: int
    - t: float
        Decimal exponent of the target condition number.
    - seed: int

    Returns:
    - BlockMatrix
    """
    _check_dims(m, p, s)
    return BlockMatrix(_default_matrix(m, p * s, t, seed, 0), p, s)


def gen_glued(m, p, s, t1, t2, seed=0):
    """
    Default matrix of conditioning t1 whose block vectors are each rescaled.

    Every block X_k is right-multiplied by diag(sigma) V_k with sigma log-spaced
    on [10^-t2, 1] (shared) and V_k a fresh orthonormal s x s matrix per block.
    """
    X = gen_default(m, p, s, t1, seed).data.copy(order="F")
    sigma = _log_spectrum(s, t2)
    for k in range(p):
        V_k = _orthonormal(s, s, _rng(seed, _STREAM_GLUE, k))
        cols = slice(k * s, (k + 1) * s)
        X[:, cols] = X[:, cols] @ (sigma[:, None] * V_k)
    return BlockMatrix(X, p, s)


def gen_monomial(m, p, s, r, t, seed=0):
    """
    r Krylov-like block vectors [v, A v, ..., A^(t-1) v], regrouped into p blocks of width s.

    A is diagonal with m eigenvalues evenly spaced inside (0.1, 10) and every v
    is drawn uniformly and normalized to unit length.

    Parameters:
    - m, p, s: int
    - r: int
        Number of starting vectors.
    - t: int
        Length of each monomial sequence (r * t must equal p * s).
    - seed: int

    Returns:
    - BlockMatrix
    """
    _check_dims(m, p, s)
    r, t = int(r), int(t)
    if r < 1 or t < 1:
        raise MatrixSpecError(f"Monomial knobs must be positive, got r={r}, t={t}")
    if r * t != p * s:
        raise MatrixSpecError(f"Monomial basis needs r*t = p*s, got r*t = {r * t} and p*s = {p * s}")

    low, high = _MONOMIAL_SPECTRUM
    eigenvalues = np.linspace(low, high, m + 2)[1:-1]

    starts = _rng(seed, _STREAM_MONOMIAL).uniform(size=(m, r))
    starts = starts / np.linalg.norm(starts, axis=0)[None, :]

    # Column j*t + i holds A^i v_j
    powers = eigenvalues[:, None, None] ** np.arange(t)[None, None, :]
    X = (starts[:, :, None] * powers).reshape(m, r * t)
    return BlockMatrix(np.asfortranarray(X), p, s)


def gen_piled(m, p, s, t1, t2, seed=0):
    """
    Cumulative sums of default blocks: X_1 has conditioning t1, X_k = X_{k-1} + Z_k
    with every Z_k a fresh default block of conditioning t2.
    """
    _check_dims(m, p, s)
    X = np.empty((m, p * s), order="F")
    X[:, :s] = _default_matrix(m, s, t1, seed, _STREAM_PILE * 1000)
    for k in range(1, p):
        Z_k = _default_matrix(m, s, t2, seed, _STREAM_PILE * 1000 + k)
        X[:, k * s:(k + 1) * s] = X[:, (k - 1) * s:k * s] + Z_k
    return BlockMatrix(X, p, s)


GENERATORS = {
    "default": gen_default,
    "glued": gen_glued,
    "monomial": gen_monomial,
    "piled": gen_piled,
}


def generate(spec):
    """
    Builds the matrix a MatrixSpec describes.

    Parameters:
    - spec: MatrixSpec

    Returns:
    - BlockMatrix
    """
    knobs = [spec.knobs[name] for name in KNOB_NAMES[spec.matrix_class]]
    return GENERATORS[spec.matrix_class](spec.m, spec.p, spec.s, *knobs, seed=spec.seed)
