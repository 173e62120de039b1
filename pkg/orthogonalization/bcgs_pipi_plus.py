from numerics.linalg import matmul, triu
from numerics.precision import PrecisionPair
from orthogonalization.base import BlockGramSchmidt


class BCGSPIPIPlus(BlockGramSchmidt):
    """
    BCGS-PIP with inner reorthogonalization.

    Both Pythagorean passes happen inside one loop, so the first block is
    never reorthogonalized: the intraorthogonalization itself must deliver
    O(eps) orthogonality for the bounds to hold (HouseQR does, CholQR does
    not). Costs 2p - 1 synchronizations.
    """

    name = "BCGS_PIPI+"

    def _factor(self, W, R, X, stats):
        # S_11 = R_11, U_1 = Q_1, T_11 = I
        self._first_block(W, R, X, stats)

        for k in range(1, X.p):
            cols = X.columns(k)
            prev = slice(0, cols.start)
            Q_prev = W[:, prev]

            # First pass
            S, S_kk, V = self._pythagorean_step(Q_prev, W[:, cols], stats)
            U = self._block_solve(V, S_kk)

            # Second pass
            T, T_kk, W_k = self._pythagorean_step(Q_prev, U, stats)
            W[:, cols] = self._block_solve(W_k, T_kk)

            # Finalize R entries
            R[prev, cols] = S + matmul(T, self._demote(S_kk), self.low)
            R[cols, cols] = self._demote(triu(matmul(T_kk, S_kk, self.high)))


def bcgs_pipi_plus(X, io="house_qr", precision="double"):
    """
    Uniform-precision BCGS-PIPI+.

    Parameters:
    - X: BlockMatrix
    - io: IntraorthId or str
    - precision: PrecisionId or str

    Returns:
    - QRFactors, RunStats
    """
    return BCGSPIPIPlus(io, PrecisionPair.uniform(precision)).orthogonalize(X)


def bcgs_pipi_plus_mp(X, io="house_qr", pair=None):
    pair = pair if pair is not None else PrecisionPair("double", "double_double")
    return BCGSPIPIPlus(io, pair).orthogonalize(X)
