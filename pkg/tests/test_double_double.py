import mpmath
import numpy as np
import pytest

from numerics.double_double import DoubleDouble, dd_matmul, quick_two_sum, two_prod, two_sum

mpmath.mp.prec = 300

# Relative accuracy of every double-double operation
DD_TOL = 2.0 ** -104


def _mp(hi, lo=0.0):
    return mpmath.mpf(float(hi)) + mpmath.mpf(float(lo))


def _random_dd(rng, n, scale=1.0):
    a = rng.uniform(-1.0, 1.0, n) * scale
    b = rng.uniform(-1.0, 1.0, n) * scale * 2.0 ** -60
    hi, lo = quick_two_sum(a, b)
    return DoubleDouble(hi, lo)


def _max_rel_error(result, expected):
    worst = 0.0
    for i, value in enumerate(expected):
        got = _mp(result.hi[i], result.lo[i])
        if value != 0:
            worst = max(worst, float(abs((got - value) / value)))
    return worst


def test_two_sum_is_exact(rng):
    a = rng.standard_normal(200) * 1e8
    b = rng.standard_normal(200) * 1e-8
    s, e = two_sum(a, b)
    for i in range(200):
        assert _mp(s[i]) + _mp(e[i]) == _mp(a[i]) + _mp(b[i])


def test_two_prod_is_exact(rng):
    a = rng.standard_normal(200)
    b = rng.standard_normal(200) * 1e5
    p, e = two_prod(a, b)
    for i in range(200):
        assert _mp(p[i]) + _mp(e[i]) == _mp(a[i]) * _mp(b[i])


@pytest.mark.parametrize("op, oracle", [
    (lambda x, y: x + y, lambda a, b: a + b),
    (lambda x, y: x - y, lambda a, b: a - b),
    (lambda x, y: x * y, lambda a, b: a * b),
    (lambda x, y: x / y, lambda a, b: a / b),
])
def test_arithmetic_matches_big_float(rng, op, oracle):
    x = _random_dd(rng, 300, scale=10.0)
    y = _random_dd(rng, 300, scale=1e-3)
    result = op(x, y)
    expected = [oracle(_mp(x.hi[i], x.lo[i]), _mp(y.hi[i], y.lo[i])) for i in range(300)]
    assert _max_rel_error(result, expected) <= DD_TOL


def test_sqrt_matches_big_float(rng):
    x = _random_dd(rng, 300, scale=1e4)
    x = DoubleDouble(np.abs(x.hi), np.sign(x.hi) * x.lo)
    result = x.sqrt()
    expected = [mpmath.sqrt(_mp(x.hi[i], x.lo[i])) for i in range(300)]
    assert _max_rel_error(result, expected) <= DD_TOL


def test_mixed_operands_with_float64_arrays(rng):
    x = _random_dd(rng, 5)
    y = rng.standard_normal(5)
    np.testing.assert_array_equal((y + x).hi, (x + y).hi)
    np.testing.assert_array_equal((2.0 * x).hi, 2.0 * x.hi)


def test_sum_keeps_bits_a_double_would_lose():
    total = DoubleDouble(np.array([1.0])) + 2.0 ** -80
    assert total.hi[0] == 1.0
    assert total.lo[0] == 2.0 ** -80
    assert (total - 1.0).hi[0] == 2.0 ** -80


def test_non_finite_values_pass_through():
    inf = DoubleDouble(np.array([np.inf])) + 1.0
    assert np.isposinf(inf.hi[0])
    nan = DoubleDouble(np.array([np.nan])) * 3.0
    assert np.isnan(nan.hi[0])
    assert np.isnan(DoubleDouble(np.array([-1.0])).sqrt().hi[0])
    assert np.isposinf((DoubleDouble(np.array([1.0])) / 0.0).hi[0])


def test_zero_square_root_is_zero():
    root = DoubleDouble(np.array([0.0])).sqrt()
    assert root.hi[0] == 0.0 and root.lo[0] == 0.0


def test_matmul_matches_big_float(rng):
    A = DoubleDouble(rng.standard_normal((5, 7)))
    B = DoubleDouble(rng.standard_normal((7, 3)))
    C = dd_matmul(A, B)
    for i in range(5):
        for j in range(3):
            exact = mpmath.fsum(_mp(A.hi[i, k]) * _mp(B.hi[k, j]) for k in range(7))
            got = _mp(C.hi[i, j], C.lo[i, j])
            assert abs(got - exact) <= DD_TOL * mpmath.fsum(abs(_mp(A.hi[i, k]) * _mp(B.hi[k, j])) for k in range(7))


def test_matmul_chunking_does_not_change_shape(rng, monkeypatch):
    import numerics.double_double as dd

    A = DoubleDouble(rng.standard_normal((4, 50)))
    B = DoubleDouble(rng.standard_normal((50, 3)))
    full = dd_matmul(A, B)
    monkeypatch.setattr(dd, "_MATMUL_CHUNK_ELEMENTS", 12)
    chunked = dd_matmul(A, B)
    assert chunked.shape == (4, 3)
    np.testing.assert_allclose(chunked.hi, full.hi, rtol=1e-15)


def test_matmul_rejects_inner_dimension_mismatch():
    with pytest.raises(ValueError):
        dd_matmul(DoubleDouble.zeros((2, 3)), DoubleDouble.zeros((4, 2)))


def test_to_float64_rounds_once():
    x = DoubleDouble(np.array([1.0]), np.array([2.0 ** -53 + 2.0 ** -80]))
    assert x.to_float64()[0] == 1.0 + 2.0 ** -52


OPERATIONS = {
    "add": (lambda x, y: x + y, lambda a, b: a + b),
    "sub": (lambda x, y: x - y, lambda a, b: a - b),
    "mul": (lambda x, y: x * y, lambda a, b: a * b),
    "div": (lambda x, y: x / y, lambda a, b: a / b),
    "sqrt": (lambda x, y: x.sqrt(), lambda a, b: mpmath.sqrt(a)),
}


@pytest.mark.slow
@pytest.mark.parametrize("name", list(OPERATIONS))
def test_operations_on_a_large_sample(rng, name):
    n = 100_000
    op, oracle = OPERATIONS[name]
    x = _random_dd(rng, n, scale=1e3)
    if name == "sqrt":
        x = DoubleDouble(np.abs(x.hi), np.sign(x.hi) * x.lo)
    y = _random_dd(rng, n, scale=1.0)
    result = op(x, y)
    expected = [oracle(_mp(x.hi[i], x.lo[i]), _mp(y.hi[i], y.lo[i])) for i in range(n)]
    assert _max_rel_error(result, expected) <= DD_TOL
