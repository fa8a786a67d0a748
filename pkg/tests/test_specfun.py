"""Special functions against independent oracles.

The polynomial oracle is the Rodrigues formula evaluated through exact
polynomial differentiation; the quadrature oracle is closed-form Beta
moments plus scipy's own Gauss-Jacobi nodes; the incomplete-beta oracle is
scipy.special plus small closed forms.
"""

import math

import numpy as np
import pytest
from numpy.polynomial import polynomial as npoly
from scipy import special as sp

from jacobi_fading.specfun import (
    gauss_jacobi_rule,
    inv_reg_inc_beta,
    jacobi_norm_b,
    jacobi_poly,
    jacobi_poly_sequence,
    log_beta,
    reg_inc_beta,
)


def rodrigues_poly(k, a, b, x):
    """(-1)^k/(2^k k!) (1-x)^-a (1+x)^-b d^k/dx^k [(1-x)^(k+a) (1+x)^(k+b)]."""
    one_minus = npoly.polypow([1.0, -1.0], k + a)
    one_plus = npoly.polypow([1.0, 1.0], k + b)
    poly = npoly.polymul(one_minus, one_plus)
    for _ in range(k):
        poly = npoly.polyder(poly)
    scale = (-1.0) ** k / (2.0**k * math.factorial(k))
    return scale * (1.0 - x) ** (-a) * (1.0 + x) ** (-b) * npoly.polyval(x, poly)


def test_jacobi_poly_degree_zero_and_one():
    assert jacobi_poly(0, 3, 1, 0.37) == 1.0
    # P_1 = (a+b+2)x/2 + (a-b)/2
    assert jacobi_poly(1, 0, 0, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert jacobi_poly(1, 2, 1, -0.25) == pytest.approx((2 + 1 + 2) * -0.25 / 2 + 0.5, abs=1e-14)


def test_jacobi_poly_matches_rodrigues_oracle():
    rng = np.random.default_rng(42)
    for k in range(0, 7):
        for a, b in [(0, 0), (1, 0), (0, 2), (2, 3), (3, 1)]:
            x = rng.uniform(-0.999, 0.999, size=20)
            got = jacobi_poly(k, a, b, x)
            want = rodrigues_poly(k, a, b, x)
            assert np.max(np.abs(got - want)) < 1e-10 * max(1.0, np.max(np.abs(want)))


def test_jacobi_poly_sequence_consistent():
    x = np.linspace(-1, 1, 11)
    seq = jacobi_poly_sequence(5, 2, 3, x)
    for k in range(6):
        assert np.allclose(seq[k], jacobi_poly(k, 2, 3, x), rtol=0, atol=1e-13)


def test_norm_b_small_cases():
    assert jacobi_norm_b(0, 0, 0) == pytest.approx(1.0, rel=1e-14)
    assert jacobi_norm_b(0, 1, 1) == pytest.approx(1.0 / 6.0, rel=1e-14)


def test_norm_b_equals_weighted_square_integral():
    for k in range(0, 8):
        for a, b in [(0, 0), (1, 1), (2, 0), (0, 3), (3, 4)]:
            rule = gauss_jacobi_rule(k + 2, a, b)
            vals = jacobi_poly(k, a, b, 1.0 - 2.0 * rule.nodes)
            integral = rule.integrate(vals**2)
            assert integral == pytest.approx(jacobi_norm_b(k, a, b), rel=1e-9)


def test_orthogonality_under_unit_interval_weight():
    for a, b in [(0, 0), (1, 2), (6, 6), (0, 6)]:
        rule = gauss_jacobi_rule(24, a, b)
        seq = jacobi_poly_sequence(8, a, b, 1.0 - 2.0 * rule.nodes)
        for k in range(9):
            for j in range(k):
                assert abs(rule.integrate(seq[k] * seq[j])) < 1e-9


def test_norm_b_finite_at_large_order():
    val = jacobi_norm_b(80, 20, 20)  # a+b+2k = 200
    assert np.isfinite(val) and val > 0.0


def test_gauss_rule_midpoint_case():
    rule = gauss_jacobi_rule(1, 0, 0)
    assert rule.nodes[0] == pytest.approx(0.5, abs=1e-14)
    assert rule.weights[0] == pytest.approx(1.0, rel=1e-14)


def test_gauss_rule_weight_sum_and_structure():
    for n, a, b in [(1, 0, 0), (8, 1, 2), (34, 0, 28), (16, 5, 3)]:
        rule = gauss_jacobi_rule(n, a, b)
        assert rule.weights.sum() == pytest.approx(math.exp(log_beta(a + 1, b + 1)), rel=1e-12)
        assert np.all(rule.weights > 0)
        assert np.all((rule.nodes > 0) & (rule.nodes < 1))
        assert np.all(np.diff(rule.nodes) > 0)


def test_gauss_rule_moments_exact():
    # weight lam^a (1-lam)^b: integral of lam^j is B(a+j+1, b+1)
    for n, a, b in [(8, 1, 2), (6, 0, 0), (10, 3, 4)]:
        rule = gauss_jacobi_rule(n, a, b)
        for j in range(2 * n):
            want = math.exp(log_beta(a + j + 1, b + 1))
            got = rule.integrate(rule.nodes**j)
            assert got == pytest.approx(want, rel=1e-10)


def test_gauss_rule_matches_scipy_roots_jacobi():
    for n, a, b in [(5, 0, 0), (12, 2, 1), (20, 0, 7)]:
        rule = gauss_jacobi_rule(n, a, b)
        # scipy works on [-1,1] with weight (1-x)^a (1+x)^b
        x, w = sp.roots_jacobi(n, a, b)
        nodes = np.sort(0.5 * (1.0 - x))
        weights = w[np.argsort(0.5 * (1.0 - x))] / 2.0 ** (a + b + 1)
        assert np.max(np.abs(rule.nodes - nodes)) < 1e-12
        assert np.max(np.abs(rule.weights - weights)) < 1e-12


def test_reg_inc_beta_uniform_and_symmetry():
    for x in (0.0, 0.3, 1.0):
        assert reg_inc_beta(x, 1, 1) == pytest.approx(x, abs=1e-14)
    for a in (1, 2, 5):
        assert reg_inc_beta(0.5, a, a) == pytest.approx(0.5, abs=1e-12)


def test_reg_inc_beta_closed_form_2_2():
    # I_x(2,2) = 3x^2 - 2x^3
    for x in (0.1, 0.25, 0.8):
        assert reg_inc_beta(x, 2, 2) == pytest.approx(3 * x**2 - 2 * x**3, rel=1e-12)
    assert reg_inc_beta(0.1, 2, 2) == pytest.approx(0.028, rel=1e-12)


def test_reg_inc_beta_against_scipy():
    rng = np.random.default_rng(3)
    for _ in range(200):
        a = float(rng.uniform(0.2, 40.0))
        b = float(rng.uniform(0.2, 40.0))
        x = float(rng.uniform(0.0, 1.0))
        assert reg_inc_beta(x, a, b) == pytest.approx(float(sp.betainc(a, b, x)), rel=1e-10, abs=1e-13)


def test_reg_inc_beta_monotone():
    xs = np.linspace(0, 1, 101)
    vals = [reg_inc_beta(float(x), 3.5, 1.25) for x in xs]
    assert np.all(np.diff(vals) >= 0)


def test_inverse_endpoints_and_symmetry():
    assert inv_reg_inc_beta(0.0, 2, 3) == 0.0
    assert inv_reg_inc_beta(1.0, 2, 3) == 1.0
    assert inv_reg_inc_beta(0.5, 3, 3) == pytest.approx(0.5, abs=1e-10)


def test_inverse_round_trip():
    rng = np.random.default_rng(9)
    checked = 0
    while checked < 100:
        a = float(rng.uniform(0.3, 30.0))
        b = float(rng.uniform(0.3, 30.0))
        x = float(rng.uniform(1e-6, 1 - 1e-6))
        p = reg_inc_beta(x, a, b)
        back = inv_reg_inc_beta(p, a, b)
        # the defining contract always holds
        assert reg_inc_beta(back, a, b) == pytest.approx(p, abs=1e-9)
        # x itself is recoverable only where p has not saturated in floats
        if 1e-10 < p < 1.0 - 1e-10:
            assert back == pytest.approx(x, abs=1e-8)
            checked += 1


def test_inverse_deep_tail():
    # small-p inversion, the regime behind large normalized-SNR targets
    for eps in (1e-3, 1e-5, 1e-8):
        x = inv_reg_inc_beta(eps, 1, 1)
        assert x == pytest.approx(eps, rel=1e-9)
        x2 = inv_reg_inc_beta(eps, 2, 2)
        assert reg_inc_beta(x2, 2, 2) == pytest.approx(eps, rel=1e-6, abs=1e-12)


def test_invalid_arguments_raise():
    with pytest.raises(ValueError):
        reg_inc_beta(-0.1, 1, 1)
    with pytest.raises(ValueError):
        reg_inc_beta(0.5, 0.0, 1)
    with pytest.raises(ValueError):
        inv_reg_inc_beta(1.5, 1, 1)
    with pytest.raises(ValueError):
        gauss_jacobi_rule(0, 0, 0)
    with pytest.raises(ValueError):
        jacobi_norm_b(-1, 0, 0)
