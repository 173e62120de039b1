from enum import Enum

from numerics.linalg import QRFactors, cholesky, householder_qr, matmul, tri_solve_right


class UnknownIntraorthError(ValueError):
    """Raised for an intraorthogonalization name that is not registered."""


class IntraorthId(Enum):
    HOUSE_QR = "HouseQR"
    CHOL_QR = "CholQR"

    @property
    def key(self):
        return self.name.lower()

    @classmethod
    def from_name(cls, name):
        """Accepts the config spelling ("HouseQR") or the snake-case key ("house_qr")."""
        if isinstance(name, cls):
            return name
        text = str(name).strip()
        for member in cls:
            if text in (member.value, member.key):
                return member
        valid = ", ".join(f"{m.value} / {m.key}" for m in cls)
        raise UnknownIntraorthError(f"Unknown intraorthogonalization '{name}' (expected one of: {valid})")

    def __str__(self):
        return self.value


def _house_qr(X, precision, cholesky_variant):
    return householder_qr(X, precision)


def _chol_qr(X, precision, cholesky_variant):
    # G = X^T X, R = chol(G), Q = X R^{-1}; breaks down (NaN) once kappa(X)^2 eps ~ 1
    G = matmul(X, X, precision, transpose_a=True)
    R = cholesky(G, precision, cholesky_variant)
    Q = tri_solve_right(X, R, precision)
    return QRFactors(Q, R)


INTRAORTH_ROUTINES = {
    IntraorthId.HOUSE_QR: _house_qr,
    IntraorthId.CHOL_QR: _chol_qr,
}


def intraorthogonalize(X, kind, precision, cholesky_variant="nonstop"):
    """
    Orthogonalizes the columns of a single block vector.

    Parameters:
    - X: m x s matrix (m >= s)
    - kind: IntraorthId or str
    - precision: PrecisionId or str
        Precision the routine computes and returns in.
    - cholesky_variant: str
        Cholesky used by CholQR ("nonstop" or "lapack").

    Returns:
    - QRFactors
    """
    kind = IntraorthId.from_name(kind)
    return INTRAORTH_ROUTINES[kind](X, precision, cholesky_variant)
