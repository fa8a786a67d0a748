"""Monte-Carlo engine: reproducibility, oracles, and estimator structure."""

import math

import numpy as np
import pytest

from jacobi_fading.analytic import ergodic_capacity, outage_single_mode
from jacobi_fading.ensembles import ChannelDims
from jacobi_fading.simulate import (
    McConfig,
    estimate_diversity_slope,
    ks_distance,
    ks_distance_to_cdf,
    mc_alamouti_outage,
    mc_ergodic_capacity,
    mc_outage,
    mc_repetition_error,
    q_function,
    qpsk_bit_error,
    qpsk_symbol_error,
    rayleigh_compare,
    repetition_error_tail,
    sample_spectra,
)

DIMS_224 = ChannelDims(2, 2, 4)


def test_reproducibility_same_seed():
    a = mc_ergodic_capacity(DIMS_224, 10.0, McConfig(trials=20_000, master_seed=5))
    b = mc_ergodic_capacity(DIMS_224, 10.0, McConfig(trials=20_000, master_seed=5))
    assert a == b
    c = mc_ergodic_capacity(DIMS_224, 10.0, McConfig(trials=20_000, master_seed=6))
    assert c.value != a.value


def test_worker_count_never_changes_results():
    for fn in (
        lambda cfg: mc_ergodic_capacity(DIMS_224, 10.0, cfg),
        lambda cfg: mc_outage(ChannelDims(2, 2, 3), 100.0, cfg, r=1.5),
        lambda cfg: mc_repetition_error(ChannelDims(1, 2, 3), 10.0, cfg),
    ):
        one = fn(McConfig(trials=30_000, master_seed=3, workers=1))
        many = fn(McConfig(trials=30_000, master_seed=3, workers=8))
        assert one.value == many.value and one.stderr == many.stderr


def test_mc_capacity_matches_analytic():
    cfg = McConfig(trials=100_000)
    est = mc_ergodic_capacity(DIMS_224, 10.0, cfg)
    assert est.stderr < 0.01
    assert abs(est.value - ergodic_capacity(DIMS_224, 10.0)) < 3 * est.stderr


def test_mc_capacity_unitary_channel_is_exact():
    est = mc_ergodic_capacity(ChannelDims(3, 3, 3), 9.0, McConfig(trials=5_000))
    assert est.value == 3 * math.log2(10.0)
    assert est.stderr == 0.0


def test_mc_capacity_pinned_recursion():
    cfg = McConfig(trials=100_000)
    full = mc_ergodic_capacity(ChannelDims(2, 2, 3), 10.0, cfg)
    residual = mc_ergodic_capacity(ChannelDims(1, 1, 3), 10.0, cfg)
    gap = abs(full.value - math.log2(11.0) - residual.value)
    assert gap < 3 * math.hypot(full.stderr, residual.stderr)


def test_mc_outage_single_mode_oracle():
    cfg = McConfig(trials=100_000)
    est = mc_outage(ChannelDims(1, 1, 2), 10.0, cfg, rate_bits=1.0)
    want = outage_single_mode(1, 2, 1.0, 10.0)
    assert abs(est.value - want) < 3 * est.stderr


def test_mc_outage_zero_below_pinned_rate():
    est = mc_outage(ChannelDims(2, 2, 3), 100.0, McConfig(trials=50_000), r=0.9)
    assert est.value == 0.0 and est.stderr == 0.0


def test_mc_outage_rate_reduction_equivalence():
    cfg = McConfig(trials=50_000)
    full = mc_outage(ChannelDims(2, 2, 3), 100.0, cfg, r=1.5)
    reduced = mc_outage(ChannelDims(1, 1, 3), 100.0, cfg, r=0.5)
    assert abs(full.value - reduced.value) < 3 * math.hypot(full.stderr, reduced.stderr)


def test_mc_outage_transposition_symmetry():
    cfg = McConfig(trials=50_000)
    a = mc_outage(ChannelDims(2, 3, 6), 100.0, cfg, r=1.2)
    b = mc_outage(ChannelDims(3, 2, 6), 100.0, cfg, r=1.2)
    assert abs(a.value - b.value) < 3 * math.hypot(a.stderr, b.stderr)


def test_mc_outage_argument_contract():
    with pytest.raises(ValueError):
        mc_outage(DIMS_224, 10.0, McConfig(trials=10))
    with pytest.raises(ValueError):
        mc_outage(DIMS_224, 10.0, McConfig(trials=10), r=1.0, rate_bits=1.0)


def test_stderr_scales_with_trials():
    small = mc_ergodic_capacity(DIMS_224, 10.0, McConfig(trials=25_000))
    large = mc_ergodic_capacity(DIMS_224, 10.0, McConfig(trials=100_000))
    ratio = small.stderr / large.stderr
    assert ratio == pytest.approx(2.0, rel=0.1)


def test_qpsk_helpers():
    assert q_function(0.0) == pytest.approx(0.5, abs=1e-15)
    assert qpsk_bit_error(10.0) == pytest.approx(q_function(math.sqrt(10.0)), abs=1e-15)
    pb = qpsk_bit_error(4.0)
    assert qpsk_symbol_error(4.0) == pytest.approx(1 - (1 - pb) ** 2, abs=1e-15)
    assert qpsk_symbol_error(0.0) == pytest.approx(0.75, abs=1e-12)


def test_repetition_count_vs_conditional():
    # at moderate SNR both estimators see plenty of errors; they must agree
    dims = ChannelDims(1, 2, 3)
    rho = 2.0
    count = mc_repetition_error(dims, rho, McConfig(trials=60_000), method="count")
    cond = mc_repetition_error(dims, rho, McConfig(trials=60_000), method="conditional")
    assert abs(count.value - cond.value) < 3 * math.hypot(count.stderr, cond.stderr)
    assert cond.stderr < count.stderr  # the whole point of conditioning


def test_repetition_tail_matches_conditional_where_both_work():
    dims = ChannelDims(1, 2, 3)
    for rho in (2.0, 10.0):
        cond = mc_repetition_error(dims, rho, McConfig(trials=120_000))
        exact = repetition_error_tail(dims, rho)
        assert abs(cond.value - exact) < 3 * cond.stderr


def test_repetition_tail_pinned_channel():
    # (2,2,3): one pinned eigenvalue shifts the effective SNR by rho
    val = repetition_error_tail(ChannelDims(2, 2, 3), 10.0)
    clean = repetition_error_tail(ChannelDims(1, 1, 3), 10.0)
    assert val < clean  # pinned subspace can only help
    assert val < qpsk_symbol_error(10.0)
    full = repetition_error_tail(ChannelDims(2, 2, 2), 7.0)
    assert full == pytest.approx(qpsk_symbol_error(2 * 7.0), rel=1e-12)


def test_repetition_tail_power_law():
    dims = ChannelDims(1, 2, 3)  # diversity mt*mr = 2
    pts = [(10.0 ** (db / 10), repetition_error_tail(dims, 10.0 ** (db / 10))) for db in (20, 30, 40)]
    assert estimate_diversity_slope(pts) == pytest.approx(2.0, abs=0.05)


def test_repetition_tail_needs_single_eigenvalue():
    with pytest.raises(ValueError):
        repetition_error_tail(ChannelDims(2, 2, 4), 10.0)


def test_alamouti_unitary_and_pinned_gains():
    est = mc_alamouti_outage(2, 10.0, 1.0, McConfig(trials=5_000))
    assert est.value == 0.0  # ||H11||^2 = 2 always
    lam = sample_spectra(ChannelDims(2, 2, 3), McConfig(trials=20_000))
    assert np.min(np.sum(lam, axis=1)) >= 1.0 - 1e-9  # Frobenius norm pinned
    est4 = mc_alamouti_outage(4, 100.0, 0.5, McConfig(trials=100_000))
    assert est4.value > 0.0


def test_slope_estimator():
    pts = [(rho, rho**-2.0) for rho in (10.0, 100.0, 1000.0)]
    assert estimate_diversity_slope(pts) == pytest.approx(2.0, abs=1e-12)
    pts = [(rho, 0.25) for rho in (10.0, 100.0, 1000.0)]
    assert estimate_diversity_slope(pts) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        estimate_diversity_slope([(1.0, 0.1), (2.0, 0.05)])
    with pytest.raises(ValueError):
        estimate_diversity_slope([(1.0, 0.1), (2.0, 0.0), (3.0, 0.01)])


def test_ks_distance_basics():
    rng = np.random.default_rng(0)
    a = rng.uniform(size=5000)
    b = rng.uniform(size=5000)
    assert ks_distance(a, b) < 0.05
    assert ks_distance(a, a) == 0.0
    assert ks_distance(a, a + 10.0) == 1.0
    assert ks_distance_to_cdf(a, lambda x: np.clip(x, 0, 1)) < 0.03


def test_rayleigh_compare_structure():
    cfg = McConfig(trials=20_000)
    rows = rayleigh_compare(2, 2, [8, 32], 100.0, cfg)
    assert [r.m for r in rows] == [8, 32]
    for row in rows:
        assert row.rho_per_mode == pytest.approx(100.0 * row.m / 2)
        assert abs(row.frobenius_mean - row.frobenius_expected) < 0.05 * row.frobenius_expected
        assert np.isfinite(row.capacity_jacobi) and np.isfinite(row.ks_scaled_vs_wishart)
    # randomness effect shrinks with m
    assert rows[1].ks_scaled_vs_wishart < rows[0].ks_scaled_vs_wishart
    with pytest.raises(ValueError):
        rayleigh_compare(2, 2, [3], 100.0, cfg)


def test_mc_config_validation():
    with pytest.raises(ValueError):
        McConfig(trials=0)
    with pytest.raises(ValueError):
        McConfig(trials=10, workers=0)
