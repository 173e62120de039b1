from numerics.precision import PrecisionPair
from orthogonalization.base import BlockGramSchmidt


class BCGSPIP(BlockGramSchmidt):
    """
    Block classical Gram-Schmidt with Pythagorean inner products.

    R_kk comes from the Cholesky factor of X_k^T X_k - C^T C (the block
    Pythagorean identity) instead of a second intraorthogonalization, so each
    block costs a single synchronization. Loss of orthogonality grows like
    eps * kappa(X)^2 and the bound is void once that reaches one.
    """

    name = "BCGS_PIP"

    def _factor(self, W, R, X, stats):
        self._first_block(W, R, X, stats)

        for k in range(1, X.p):
            cols = X.columns(k)
            prev = slice(0, cols.start)
            Q_prev = W[:, prev]

            C, R_kk, V = self._pythagorean_step(Q_prev, W[:, cols], stats)
            W[:, cols] = self._block_solve(V, R_kk)

            R[prev, cols] = C
            # R is returned low, so the stored diagonal block is the demoted factor
            R[cols, cols] = self._demote(R_kk)


def bcgs_pip(X, io="house_qr", precision="double"):
    """
    Uniform-precision BCGS-PIP.

    Parameters:
    - X: BlockMatrix
    - io: IntraorthId or str
    - precision: PrecisionId or str

    Returns:
    - QRFactors, RunStats
    """
    return BCGSPIP(io, PrecisionPair.uniform(precision)).orthogonalize(X)


def bcgs_pip_mp(X, io="house_qr", pair=None):
    """Two-precision BCGS-PIP: Gram blocks, Cholesky and block solves in the high precision."""
    pair = pair if pair is not None else PrecisionPair("double", "double_double")
    return BCGSPIP(io, pair).orthogonalize(X)
