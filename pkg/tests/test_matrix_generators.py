import numpy as np
import pytest

from data.matrix_generators import (
    MatrixSpec,
    MatrixSpecError,
    gen_default,
    gen_glued,
    gen_monomial,
    gen_piled,
    generate,
)
from numerics.linalg import cond2


def test_default_is_deterministic():
    a = gen_default(50, 4, 3, 5.0, seed=77)
    b = gen_default(50, 4, 3, 5.0, seed=77)
    c = gen_default(50, 4, 3, 5.0, seed=78)
    np.testing.assert_array_equal(a.data, b.data)
    assert not np.array_equal(a.data, c.data)


def test_default_without_conditioning_is_orthonormal():
    kappa = cond2(gen_default(40, 5, 2, 0.0, seed=1).data)
    assert 1.0 <= kappa <= 1.0 + 1e-10


@pytest.mark.parametrize("t", [2.0, 8.0, 12.0])
def test_default_hits_target_condition_number(t):
    X = gen_default(100, 10, 2, t, seed=5)
    assert cond2(X.data) == pytest.approx(10.0 ** t, rel=0.05)


def test_glued_without_scaling_is_well_conditioned():
    assert cond2(gen_glued(60, 5, 3, 0.0, 0.0, seed=2).data) <= 1.0 + 1e-10


def test_glued_condition_grows_with_knobs():
    kappas = [cond2(gen_glued(100, 10, 2, t, t, seed=3).data) for t in (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)]
    assert all(a < b for a, b in zip(kappas, kappas[1:]))
    assert kappas[0] <= 1e3 and kappas[-1] >= 1e10


def test_glued_is_deterministic():
    np.testing.assert_array_equal(gen_glued(30, 3, 2, 1, 2, seed=4).data, gen_glued(30, 3, 2, 1, 2, seed=4).data)


def test_monomial_without_powers_has_unit_columns():
    X = gen_monomial(30, 3, 2, 6, 1, seed=6)
    np.testing.assert_allclose(np.linalg.norm(X.data, axis=0), 1.0, rtol=1e-14)


def test_monomial_structure():
    X = gen_monomial(20, 2, 3, 2, 3, seed=6).data
    eigenvalues = np.linspace(0.1, 10.0, 22)[1:-1]
    np.testing.assert_allclose(X[:, 1], eigenvalues * X[:, 0], rtol=1e-14)
    np.testing.assert_allclose(X[:, 2], eigenvalues ** 2 * X[:, 0], rtol=1e-14)


def test_monomial_condition_grows_with_sequence_length():
    kappas = [cond2(gen_monomial(400, 24, 10, r, t, seed=7).data) for r, t in ((48, 5), (24, 10), (12, 20))]
    assert kappas[0] < kappas[1] < kappas[2]


def test_monomial_requires_matching_column_count():
    with pytest.raises(MatrixSpecError):
        gen_monomial(30, 3, 2, 4, 2, seed=1)


def test_piled_condition_grows_with_t2():
    kappas = [cond2(gen_piled(100, 10, 5, 1.0, t2, seed=8).data) for t2 in (1.0, 4.0, 7.0)]
    assert kappas[0] < kappas[1] < kappas[2]


def test_small_piled_matrix_is_well_conditioned():
    assert cond2(gen_piled(40, 2, 3, 0.0, 0.0, seed=9).data) <= 1e2


@pytest.mark.parametrize("spec", [
    MatrixSpec("default", 50, 5, 2, {"t": 9}, 1),
    MatrixSpec("glued", 50, 5, 2, {"t1": 3, "t2": 4}, 2),
    MatrixSpec("monomial", 50, 5, 2, {"r": 2, "t": 5}, 3),
    MatrixSpec("piled", 50, 5, 2, {"t1": 2, "t2": 6}, 4),
])
def test_generated_matrices_are_finite_and_reproducible(spec):
    X = generate(spec)
    assert X.data.shape == (50, 10) and (X.p, X.s) == (5, 2)
    assert np.all(np.isfinite(X.data))
    np.testing.assert_array_equal(X.data, generate(spec).data)


@pytest.mark.parametrize("kwargs", [
    dict(matrix_class="spiral", m=10, p=2, s=2, knobs={}),
    dict(matrix_class="default", m=10, p=3, s=4, knobs={"t": 1}),
    dict(matrix_class="default", m=10, p=0, s=4, knobs={"t": 1}),
    dict(matrix_class="glued", m=10, p=2, s=2, knobs={"t": 1}),
    dict(matrix_class="monomial", m=10, p=2, s=2, knobs={"r": 3, "t": 2}),
    dict(matrix_class="default", m=10, p=2, s=2, knobs={"t": -1}),
])
def test_invalid_specs_are_rejected(kwargs):
    with pytest.raises(MatrixSpecError):
        MatrixSpec(seed=0, **kwargs)


def test_knob_label():
    assert MatrixSpec("glued", 10, 2, 2, {"t2": 3, "t1": 1.5}).knob_label == "t1=1.5;t2=3"
