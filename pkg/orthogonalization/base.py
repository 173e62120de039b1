import time
from dataclasses import dataclass

import numpy as np

from numerics.linalg import CHOLESKY_VARIANTS, QRFactors, UnknownCholeskyError, cholesky, matmul, tri_solve_right, zeros
from numerics.precision import PrecisionPair, cast
from orthogonalization.intraorth import IntraorthId, intraorthogonalize


class BlockPartitionError(ValueError):
    """Raised when a matrix cannot be split into p tall-skinny blocks of width s."""


@dataclass
class BlockMatrix:
    """
    Dense m x (p*s) matrix with an explicit partition into p block vectors.

    Parameters:
    - data: np.ndarray
        The m x (p*s) matrix, stored column-major.
    - p: int
        Number of block vectors.
    - s: int
        Columns per block vector.
    """

    data: np.ndarray
    p: int
    s: int

    def __post_init__(self):
        self.data = np.asfortranarray(self.data)
        if self.data.ndim != 2:
            raise BlockPartitionError(f"Block matrix data must be 2-D, got shape {self.data.shape}")
        if self.p < 1 or self.s < 1:
            raise BlockPartitionError(f"Block count and width must be positive, got p={self.p}, s={self.s}")
        m, n = self.data.shape
        if n != self.p * self.s:
            raise BlockPartitionError(f"Matrix has {n} columns but p*s = {self.p * self.s}")
        if n > m:
            raise BlockPartitionError(f"Block matrix must be tall-skinny: p*s = {n} > m = {m}")

    @property
    def m(self):
        return self.data.shape[0]

    @property
    def n(self):
        return self.data.shape[1]

    def columns(self, k):
        """Column slice of block k (0-based)."""
        return slice(k * self.s, (k + 1) * self.s)

    def block(self, k):
        return self.data[:, self.columns(k)]

    def repartition(self, s):
        """Same matrix viewed with a different block width."""
        if self.n % s:
            raise BlockPartitionError(f"Block width {s} does not divide {self.n} columns")
        return BlockMatrix(self.data, self.n // s, s)


@dataclass
class RunStats:
    """Instrumentation of one algorithm run."""

    sync_points: int = 0
    had_nan: bool = False
    wall_time: float = 0.0


def sync_count(stats):
    """Number of global synchronizations the run would have needed."""
    return stats.sync_points


class BlockGramSchmidt:
    """
    Common machinery of the Pythagorean block Gram-Schmidt family.

    Every variant is written against a precision pair: the basis and R
    factor live in the low precision, the Gram blocks, Cholesky factors and
    block-local triangular solves run in the high one. A uniform run is just
    the degenerate pair (P, P).

    Parameters:
    - io: IntraorthId or str
        Intraorthogonalization routine used for the first block.
    - pair: PrecisionPair
        Low/high precisions.
    - cholesky_variant: str
        Cholesky variant of the Pythagorean step and of CholQR: "nonstop"
        runs through bad pivots, "lapack" halts and yields an all-NaN factor.
    """

    name = "BGS"

    def __init__(self, io=IntraorthId.HOUSE_QR, pair=None, cholesky_variant="nonstop"):
        if cholesky_variant not in CHOLESKY_VARIANTS:
            raise UnknownCholeskyError(
                f"Unknown Cholesky variant '{cholesky_variant}' (expected one of: {', '.join(CHOLESKY_VARIANTS)})"
            )
        self.io = IntraorthId.from_name(io)
        self.pair = pair if pair is not None else PrecisionPair.uniform("double")
        self.cholesky_variant = cholesky_variant

    @property
    def low(self):
        return self.pair.low

    @property
    def high(self):
        return self.pair.high

    def orthogonalize(self, X):
        """
        Runs the algorithm on a block matrix.

        Parameters:
        - X: BlockMatrix

        Returns:
        - QRFactors in the low precision
        - RunStats
        """
        stats = RunStats()
        start = time.perf_counter()
        with np.errstate(all="ignore"):
            # The workspace starts as X and is overwritten block by block
            W = cast(X.data, self.low)
            R = zeros((X.n, X.n), self.low)
            self._factor(W, R, X, stats)
        stats.wall_time = time.perf_counter() - start

        factors = QRFactors(W, R)
        stats.had_nan = factors.has_nan()
        return factors, stats

    def _factor(self, W, R, X, stats):
        raise NotImplementedError

    # --- shared steps --------------------------------------------------------

    def _first_block(self, W, R, X, stats):
        cols = X.columns(0)
        factors = intraorthogonalize(W[:, cols], self.io, self.low, self.cholesky_variant)
        stats.sync_points += 1
        W[:, cols] = factors.Q
        R[cols, cols] = factors.R

    def _pythagorean_step(self, Q_prev, X_k, stats):
        """
        One block classical Gram-Schmidt step with a Pythagorean diagonal.

        Returns the projection coefficients (low), the Cholesky factor of
        P - C^T C (high) and the projected block V (low).
        """
        C = matmul(Q_prev, X_k, self.low, transpose_a=True)
        P = matmul(X_k, X_k, self.high, transpose_a=True)
        stats.sync_points += 1  # the two products travel in one reduction

        M = P - matmul(C, C, self.high, transpose_a=True)
        M = (M + M.T) * 0.5
        R_kk = cholesky(M, self.high, self.cholesky_variant)

        V = X_k - matmul(Q_prev, C, self.low)
        return C, R_kk, V

    def _block_solve(self, V, R_kk):
        # Block-local s x s solve in high precision, result stored low
        return cast(tri_solve_right(V, R_kk, self.high), self.low)

    def _demote(self, block):
        return cast(block, self.low)
