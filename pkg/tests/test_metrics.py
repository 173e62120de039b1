import numpy as np
import pytest

from data.matrix_generators import gen_default, gen_glued
from metrics import (
    StabilityReport,
    compute_stability_report,
    loss_of_orthogonality,
    rel_chol_residual,
    rel_residual,
)
from numerics.linalg import householder_qr
from numerics.precision import unit_roundoff
from orthogonalization.base import BlockMatrix
from orthogonalization.bcgs_pip import bcgs_pip


def test_identity_has_no_loss_of_orthogonality():
    assert loss_of_orthogonality(np.eye(5)) <= unit_roundoff("double")


def test_scaled_column_loss_of_orthogonality():
    Q = np.zeros((4, 2))
    Q[0, 0], Q[1, 1] = 1.0, 2.0
    assert loss_of_orthogonality(Q) == pytest.approx(3.0, rel=1e-15)


def test_householder_basis_is_orthonormal(rng):
    Q = householder_qr(rng.standard_normal((50, 8))).Q
    assert loss_of_orthogonality(Q) <= 1e-14


def test_non_finite_basis_gives_nan():
    Q = np.eye(3)
    Q[1, 2] = np.nan
    assert np.isnan(loss_of_orthogonality(Q))
    assert np.isnan(rel_residual(Q, np.eye(3), np.eye(3)))
    assert np.isnan(rel_chol_residual(np.full((3, 3), np.inf), np.eye(3)))


def test_loss_of_orthogonality_invariant_under_signed_permutation(rng):
    Q = householder_qr(rng.standard_normal((30, 6))).Q + 1e-9 * rng.standard_normal((30, 6))
    P = np.eye(6)[[3, 0, 5, 1, 4, 2]] * np.array([1, -1, 1, 1, -1, -1])[:, None]
    assert loss_of_orthogonality(Q @ P) == pytest.approx(loss_of_orthogonality(Q), rel=1e-6)


def test_residual_of_exact_integer_factors_is_zero():
    Q = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    R = np.array([[2.0, 3.0], [0.0, 5.0]])
    assert rel_residual(Q, R, Q @ R) == 0.0


def test_residual_against_scaled_identity():
    assert rel_residual(np.eye(3), np.eye(3), 2 * np.eye(3)) == pytest.approx(0.5, rel=1e-15)


def test_cholesky_residual():
    assert rel_chol_residual(np.zeros((3, 3)), np.eye(3)) == pytest.approx(1.0, rel=1e-15)
    X = np.array([[1.0, 2.0], [0.0, 3.0], [0.0, 0.0]])
    assert rel_chol_residual(X[:2], X) <= unit_roundoff("double")


def test_stability_report(well_conditioned):
    factors = householder_qr(well_conditioned.data)
    report = compute_stability_report(factors.Q, factors.R, well_conditioned)
    assert isinstance(report, StabilityReport)
    assert report.is_finite()
    assert report.kappa == pytest.approx(10.0, rel=0.05)
    assert report.loo <= 1e-14

    fixed = compute_stability_report(factors.Q, factors.R, well_conditioned, kappa=42.0)
    assert fixed.kappa == 42.0


def test_metrics_accept_single_precision_factors():
    X = gen_default(40, 2, 3, 1.0, seed=3)
    factors = householder_qr(X.data, "single")
    assert 1e-9 < loss_of_orthogonality(factors.Q) <= 1e-5
    assert rel_residual(factors.Q, factors.R, X) <= 1e-5


def test_metrics_do_not_depend_on_summation_order():
    X = gen_glued(100, 10, 2, 2.0, 2.0, seed=17)
    factors, _ = bcgs_pip(X)
    Q, R = factors.Q, factors.R
    perm = np.random.Generator(np.random.Philox(np.random.SeedSequence(3))).permutation(X.m)
    X_perm = BlockMatrix(X.data[perm], X.p, X.s)

    pairs = [
        (loss_of_orthogonality(Q), loss_of_orthogonality(Q[perm])),
        (rel_residual(Q, R, X), rel_residual(Q[perm], R, X_perm)),
        (rel_chol_residual(R, X), rel_chol_residual(R, X_perm)),
    ]
    for original, permuted in pairs:
        assert original > 0
        assert abs(permuted - original) <= 0.01 * original
