import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from blaschke_transfer.blaschke import (
    BlaschkeProduct,
    FixedPointError,
    NotExpandingError,
    PoleError,
    closed_form_spectrum,
    expansivity_check,
    fixed_point_polynomial,
    fixed_points,
    parse_power_map,
    spectrum_from_multiplier,
)

from conftest import MAPS


@st.composite
def small_zeros(draw, max_n=4, max_mod=0.35):
    """Zeros with small modulus: sum (1-|a|)/(1+|a|) > 1 so the map is expanding."""
    n = draw(st.integers(2, max_n))
    mods = draw(st.lists(st.floats(0, max_mod), min_size=n, max_size=n))
    args = draw(st.lists(st.floats(0, 2 * np.pi), min_size=n, max_size=n))
    zeros = tuple(m * np.exp(1j * t) for m, t in zip(mods, args))
    c = np.exp(1j * draw(st.floats(0, 2 * np.pi)))
    return BlaschkeProduct(zeros, c)


def test_construction_validates():
    with pytest.raises(ValueError):
        BlaschkeProduct((0.5,))
    with pytest.raises(ValueError):
        BlaschkeProduct((0.0, 1.0))
    with pytest.raises(ValueError):
        BlaschkeProduct((0.0, complex("nan")))
    with pytest.raises(ValueError):
        BlaschkeProduct((0.0, 0.1), 2.0)


def test_constant_renormalised():
    b = BlaschkeProduct((0.0, 0.1), 1 + 1e-9j)
    assert abs(abs(b.constant) - 1) <= 1e-15


def test_json_roundtrip():
    b = BlaschkeProduct((0.1 + 0.2j, -0.3), np.exp(0.7j))
    data = json.loads(json.dumps(b.to_json()))
    assert BlaschkeProduct.from_json(data) == b


def test_parse_power_map():
    assert parse_power_map("z^3") == BlaschkeProduct.power(3)
    assert parse_power_map(" z**2 ") == BlaschkeProduct.power(2)
    with pytest.raises(ValueError):
        parse_power_map("z^1")
    with pytest.raises(ValueError):
        parse_power_map("w^2")


def test_evaluate_examples():
    assert abs(MAPS["z2"](1j) - (-1)) < 1e-15
    mu = MAPS["mu05"]
    assert abs(mu(1.0) - (-1)) < 1e-15
    with pytest.raises(PoleError) as exc:
        mu(2.0)
    assert exc.value.zero == 0.5


def test_mu_family_formula():
    mu = 0.3 + 0.2j
    b = BlaschkeProduct.mu_family(mu)
    z = np.array([0.1, 0.5j, -0.7 + 0.2j])
    np.testing.assert_allclose(b(z), z * (mu - z) / (1 - np.conj(mu) * z), atol=1e-15)


def test_derivative_examples():
    assert abs(MAPS["z2"].derivative(1j) - 2j) < 1e-15
    assert abs(MAPS["mu05"].derivative(0.0) - 0.5) < 1e-15
    assert MAPS["z2"].derivative(0.0) == 0


def test_reflected_map():
    b = MAPS["pair03"]
    g = b.reflected()
    w = np.array([0.2, 0.1 + 0.3j, -0.25j])
    np.testing.assert_allclose(g(w), 1 / b(1 / w), rtol=1e-13)


@given(small_zeros())
def test_circle_invariant(b):
    z = np.exp(2j * np.pi * np.random.default_rng(0).uniform(size=1024))
    assert np.abs(np.abs(b(z)) - 1).max() <= 1e-12


@given(small_zeros(), st.integers(0, 2**32 - 1))
def test_derivative_vs_central_difference(b, seed):
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1.2, 1.2, 100) + 1j * rng.uniform(-1.2, 1.2, 100)
    h = 1e-6
    nz = b.a[np.abs(b.a) > 1e-3]
    poles = 1 / np.conj(nz)
    for zi in z:
        if poles.size and np.abs(zi - poles).min() < 0.3:
            continue
        fd = (b(zi + h) - b(zi - h)) / (2 * h)
        d = b.derivative(zi)
        assert abs(d - fd) <= 1e-6 * max(1.0, abs(d))


def test_derivative_near_zero_uses_product_rule():
    b = BlaschkeProduct((0.2, 0.2 + 1e-8), 1.0)
    z = 0.2 + 3e-9
    h = 1e-7
    fd = (b(z + h) - b(z - h)) / (2 * h)
    assert abs(b.derivative(z) - fd) < 1e-8


def test_expansivity_examples():
    e = expansivity_check(MAPS["z2"])
    assert abs(e.sum_margin - 1.0) < 1e-15
    assert abs(e.min_derivative_modulus - 2) < 1e-12 and e.expanding
    e = expansivity_check(BlaschkeProduct((0.0, 0.9)))
    assert abs(e.sum_margin - 1 / 19) < 1e-12 and e.expanding


def test_expansivity_dense_oracle_three_zeros():
    # zeros {0, 0.99, 0.99}: sum margin 1 + 2 (0.01/1.99) - 1 = 0.01005..., expanding
    b = BlaschkeProduct((0.0, 0.99, 0.99))
    e = expansivity_check(b)
    theta = np.linspace(0, 2 * np.pi, 400_001)
    dense = np.abs(b.derivative(np.exp(1j * theta))).min()
    assert abs(e.sum_margin - 2 * 0.01 / 1.99) < 1e-15
    assert abs(e.min_derivative_modulus - dense) < 1e-9
    # on the circle |B'| = sum (1-|a|^2)/|z-a|^2 >= sum (1-|a|)/(1+|a|)
    assert e.min_derivative_modulus >= e.sum_margin + 1 - 1e-12
    assert e.expanding


def test_not_expanding():
    b = BlaschkeProduct((0.9, 0.9))
    e = expansivity_check(b)
    assert not e.expanding and e.min_derivative_modulus < 1
    with pytest.raises(NotExpandingError):
        fixed_points(b)


def test_expansivity_needs_samples():
    with pytest.raises(ValueError):
        expansivity_check(MAPS["z2"], samples=100)


def test_fixed_points_z2():
    fp = fixed_points(MAPS["z2"])
    assert fp.interior_point == 0 and fp.interior_multiplier == 0
    assert len(fp.circle_points) == 1
    p, m = fp.circle_points[0]
    assert abs(p - 1) < 1e-14 and abs(m - 2) < 1e-14
    assert fp.exterior_point == complex("inf")


def test_fixed_points_mu05():
    fp = fixed_points(MAPS["mu05"])
    assert abs(fp.interior_point) < 1e-15
    assert abs(fp.interior_multiplier - 0.5) < 1e-15
    (p, m), = fp.circle_points
    assert abs(p + 1) < 1e-14
    assert abs(m - MAPS["mu05"].derivative(-1.0)) < 1e-14


def test_fixed_points_cubic():
    fp = fixed_points(MAPS["cubic03"])
    assert abs(fp.interior_point) < 1e-15 and abs(fp.interior_multiplier) < 1e-15
    assert len(fp.circle_points) == 2


def test_fixed_points_off_origin():
    # zeros {0.3, -0.3}: B(z) = (z^2 - 0.09)/(1 - 0.09 z^2), interior point is real
    b = MAPS["pair03"]
    fp = fixed_points(b)
    z0 = fp.interior_point
    assert abs(z0.imag) < 1e-15 and -0.1 < z0.real < -0.08
    # closed form: z0 solves z^2 - 0.09 = z - 0.09 z^3
    assert abs(0.09 * z0 ** 3 + z0 ** 2 - z0 - 0.09) < 1e-14
    assert abs(fp.exterior_point - 1 / np.conj(z0)) < 1e-12


@given(small_zeros())
def test_fixed_point_invariants(b):
    fp = fixed_points(b)
    assert abs(b(fp.interior_point) - fp.interior_point) <= 1e-12
    assert abs(fp.interior_multiplier) < 1
    assert abs(fp.exterior_multiplier - np.conj(fp.interior_multiplier)) <= 1e-9
    assert len(fp.circle_points) == b.degree - 1
    for p, m in fp.circle_points:
        assert abs(b(p) - p) <= 1e-10
        assert abs(m) > 1


def test_fixed_point_polynomial_degree():
    b = MAPS["pair03"]
    c = fixed_point_polynomial(b)
    assert len(c) == b.degree + 2


def test_fixed_point_iteration_budget(monkeypatch):
    import blaschke_transfer.blaschke as bl
    monkeypatch.setattr(bl, "MAX_PLAIN_ITER", 2)
    with pytest.raises(FixedPointError):
        fixed_points(MAPS["pair03"])


def test_closed_form_examples():
    s = closed_form_spectrum(MAPS["z2"], 3)
    np.testing.assert_array_equal(s.values, [1, 0, 0])
    assert s.zero_padded

    s = closed_form_spectrum(MAPS["mu05"], 5)
    np.testing.assert_allclose(s.values, [1, 0.5, 0.5, 0.25, 0.25], atol=1e-15)
    assert not s.zero_padded

    mu = 0.3 + 0.2j
    s = closed_form_spectrum(MAPS["mu_complex"], 5)
    expect = [1, mu, np.conj(mu), mu ** 2, np.conj(mu) ** 2]
    assert len(s) == 5
    for e in expect:
        assert np.abs(s.values - e).min() < 1e-15


def test_closed_form_ties_kept_together():
    s = spectrum_from_multiplier(0.5, 2)
    np.testing.assert_allclose(s.values, [1, 0.5, 0.5])


@given(st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False),
       st.integers(1, 30))
def test_closed_form_invariants(lam, count):
    s = spectrum_from_multiplier(lam, count)
    assert len(s) >= count
    assert np.all(np.abs(s.values) <= 1 + 1e-15)
    # value 1 occurs exactly once: only the n = 0 term
    assert np.sum(np.abs(s.values - 1) < 1e-15) == 1
    assert np.all(np.diff(np.abs(s.values)) <= 1e-15)


@given(st.floats(-0.95, 0.95).filter(lambda x: abs(x) > 0.05), st.integers(3, 20))
def test_real_multiplier_doubles(lam, count):
    s = spectrum_from_multiplier(lam, count)
    mult = dict((round(v.real, 12), k) for v, k in s.multiplicities(tol=1e-13))
    for n in range(1, 4):
        v = round(lam ** n, 12)
        if v in mult and abs(lam ** n) > abs(s.values[count - 1]):
            assert mult[v] == 2


def test_spectrum_rejects_bad_input():
    with pytest.raises(ValueError):
        spectrum_from_multiplier(1.0, 3)
    with pytest.raises(ValueError):
        spectrum_from_multiplier(0.5, 0)
