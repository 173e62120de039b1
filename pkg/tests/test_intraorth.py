import numpy as np
import pytest

from data.matrix_generators import gen_default
from metrics import loss_of_orthogonality
from orthogonalization.intraorth import IntraorthId, UnknownIntraorthError, intraorthogonalize


@pytest.mark.parametrize("name, expected", [
    ("HouseQR", IntraorthId.HOUSE_QR),
    ("house_qr", IntraorthId.HOUSE_QR),
    ("CholQR", IntraorthId.CHOL_QR),
    ("chol_qr", IntraorthId.CHOL_QR),
])
def test_from_name_accepts_both_spellings(name, expected):
    assert IntraorthId.from_name(name) is expected


def test_unknown_intraorth_is_rejected():
    with pytest.raises(UnknownIntraorthError):
        IntraorthId.from_name("MGS")


@pytest.mark.parametrize("kind", list(IntraorthId))
@pytest.mark.parametrize("precision, tol", [("single", 1e-5), ("double", 1e-13)])
def test_well_conditioned_block_is_orthonormalized(kind, precision, tol):
    X = gen_default(50, 1, 6, 0.5, seed=2).data
    factors = intraorthogonalize(X, kind, precision)
    assert factors.Q.shape == (50, 6)
    assert loss_of_orthogonality(factors.Q) <= tol
    residual = np.linalg.norm(factors.Q.astype(np.float64) @ factors.R.astype(np.float64) - X, 2)
    assert residual <= tol * np.linalg.norm(X, 2)


def test_cholqr_loses_orthogonality_quadratically():
    X = gen_default(200, 1, 5, 6.0, seed=4).data
    house = intraorthogonalize(X, "house_qr", "double")
    chol = intraorthogonalize(X, "chol_qr", "double")
    assert loss_of_orthogonality(house.Q) <= 1e-14
    chol_loo = loss_of_orthogonality(chol.Q)
    assert np.isnan(chol_loo) or chol_loo >= 1e-8


def test_double_double_intraorthogonalization():
    X = gen_default(30, 1, 4, 3.0, seed=6).data
    factors = intraorthogonalize(X, "chol_qr", "double_double")
    assert loss_of_orthogonality(factors.Q) <= 1e-20


def test_halting_cholqr_yields_all_nan_on_a_rank_deficient_block():
    X = gen_default(40, 1, 4, 0.5, seed=6).data.copy()
    X[:, 3] = 0.0
    factors = intraorthogonalize(X, "chol_qr", "double", "lapack")
    assert np.isnan(factors.R).all()
    assert factors.has_nan()


def test_halting_cholqr_matches_nonstop_on_a_well_conditioned_block():
    X = gen_default(50, 1, 6, 0.5, seed=2).data
    nonstop = intraorthogonalize(X, "chol_qr", "double")
    lapack = intraorthogonalize(X, "chol_qr", "double", "lapack")
    np.testing.assert_allclose(lapack.R, nonstop.R, rtol=1e-12)
    np.testing.assert_allclose(lapack.Q, nonstop.Q, rtol=1e-10, atol=1e-12)
