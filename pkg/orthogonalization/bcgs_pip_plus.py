from numerics.linalg import matmul, triu, zeros
from numerics.precision import PrecisionPair
from orthogonalization.base import BlockGramSchmidt
from orthogonalization.bcgs_pip import BCGSPIP


class BCGSPIPPlus(BlockGramSchmidt):
    """
    BCGS-PIP run twice in a row.

    The first pass overwrites the workspace with U and fills R with S; the
    second pass turns U into Q with coefficients T, and R = T S is formed at
    the end. No assumption on the loss of orthogonality of the
    intraorthogonalization is needed for the O(eps) bound.
    """

    name = "BCGS_PIP+"

    def _factor(self, W, R, X, stats):
        single_pass = BCGSPIP(self.io, self.pair, self.cholesky_variant)

        # [U, S] = BCGS-PIP(X)
        single_pass._factor(W, R, X, stats)

        # [Q, T] = BCGS-PIP(U)
        T = zeros((X.n, X.n), self.low)
        single_pass._factor(W, T, X, stats)

        R[:, :] = triu(matmul(T, R, self.low))


def bcgs_pip_plus(X, io="house_qr", precision="double"):
    """
    Uniform-precision BCGS-PIP+.

    Parameters:
    - X: BlockMatrix
    - io: IntraorthId or str
    - precision: PrecisionId or str

    Returns:
    - QRFactors, RunStats
    """
    return BCGSPIPPlus(io, PrecisionPair.uniform(precision)).orthogonalize(X)


def bcgs_pip_plus_mp(X, io="house_qr", pair=None):
    pair = pair if pair is not None else PrecisionPair("double", "double_double")
    return BCGSPIPPlus(io, pair).orthogonalize(X)
