"""Deterministic-seeded Monte-Carlo engine for the channel model.

Every experiment owns a tag; trial ``t`` of an experiment draws from the
counter-based stream keyed by ``(master_seed, tag, t)`` (see
:mod:`jacobi_fading.philox`).  Estimates are therefore a pure function of
(experiment parameters, trials, master_seed): worker count only changes how
chunks of trials are scheduled, never which variates a trial sees, and
chunk results are combined in a fixed order.

Channel spectra are sampled through the isometry shortcut: the first
``m_min`` columns of a Haar unitary are a uniformly distributed isometry,
obtained by phase-fixed QR of an ``m x m_min`` Ginibre block, which is far
cheaper than orthogonalizing the full matrix for large m.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from . import analytic
from .ensembles import DEFAULT_UNIT_TOL, ChannelDims, phase_fixed_qr
from .errors import NumericalError
from .philox import complex_normals, stream_key, uniforms

__all__ = [
    "McConfig",
    "McEstimate",
    "RayleighComparison",
    "sample_spectra",
    "sample_jacobi_spectra_wishart",
    "sample_wishart_spectra",
    "mc_ergodic_capacity",
    "mc_outage",
    "mc_repetition_error",
    "repetition_error_tail",
    "mc_alamouti_outage",
    "estimate_diversity_slope",
    "rayleigh_compare",
    "ks_distance",
    "ks_distance_to_cdf",
    "q_function",
    "qpsk_bit_error",
    "qpsk_symbol_error",
]

# Fixed chunk grid: results must not depend on worker count, so trials are
# always partitioned the same way and partial results combined in order.
_CHUNK = 8192


@dataclass(frozen=True)
class McConfig:
    """Trial budget, master seed, and worker count (speed only) of a run."""

    trials: int
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    """A Monte-Carlo mean with its standard error and reproduction seed."""

    value: float
    stderr: float
    trials: int
    seed: int


def _gather(cfg: McConfig, chunk_fn) -> np.ndarray:
    """Evaluate chunk_fn(lo, hi) over the fixed chunk grid, threaded if asked."""
    spans = [(lo, min(lo + _CHUNK, cfg.trials)) for lo in range(0, cfg.trials, _CHUNK)]
    if cfg.workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(lambda span: chunk_fn(*span), spans))
    else:
        parts = [chunk_fn(lo, hi) for lo, hi in spans]
    return np.concatenate(parts, axis=0)


def _estimate(values: np.ndarray, cfg: McConfig) -> McEstimate:
    mean = float(np.mean(values))
    if len(values) > 1 and float(np.max(values)) != float(np.min(values)):
        stderr = float(np.std(values, ddof=1) / math.sqrt(len(values)))
    else:
        stderr = 0.0  # degenerate sample (e.g. a fully unitary channel)
    return McEstimate(value=mean, stderr=stderr, trials=len(values), seed=cfg.master_seed)


def _snap_block(lam: np.ndarray, tol: float) -> np.ndarray:
    lam = np.clip(lam, 0.0, 1.0)
    return np.where(lam >= 1.0 - tol, 1.0, np.where(lam <= tol, 0.0, lam))


def _spectra_chunk(dims: ChannelDims, key, tol: float, lo: int, hi: int) -> np.ndarray:
    cols, rows = dims.m_min, dims.m_max
    z = complex_normals(key, lo, hi, dims.m * cols).reshape(hi - lo, dims.m, cols)
    block = phase_fixed_qr(z)[:, :rows, :]
    gram = np.einsum("bij,bik->bjk", block.conj(), block)
    return _snap_block(np.linalg.eigvalsh(gram), tol)


def sample_spectra(
    dims: ChannelDims,
    cfg: McConfig,
    tag: str = "spectra",
    tol: float = DEFAULT_UNIT_TOL,
) -> np.ndarray:
    """Ascending squared singular values for cfg.trials fresh channels.

    Shape (trials, m_min); values clamped to [0, 1] with endpoint snapping
    at ``tol`` exactly as in :func:`jacobi_fading.ensembles.classify_spectrum`.
    """
    key = stream_key(cfg.master_seed, f"{tag}:{dims.mt},{dims.mr},{dims.m}")
    return _gather(cfg, lambda lo, hi: _spectra_chunk(dims, key, tol, lo, hi))


def sample_jacobi_spectra_wishart(
    m1: int,
    m2: int,
    n: int,
    cfg: McConfig,
    tag: str = "wishart-jacobi",
    tol: float = DEFAULT_UNIT_TOL,
) -> np.ndarray:
    """Spectra of J(m1, m2, n) built from Wishart pairs, shape (trials, n)."""
    if n < 1:
        raise ValueError("n must be >= 1 (empty spectra carry no information)")
    if m1 < n or m2 < n:
        raise ValueError("need m1 >= n and m2 >= n")
    key1 = stream_key(cfg.master_seed, f"{tag}:g1:{m1},{m2},{n}")
    key2 = stream_key(cfg.master_seed, f"{tag}:g2:{m1},{m2},{n}")

    def chunk(lo, hi):
        g1 = complex_normals(key1, lo, hi, m1 * n).reshape(hi - lo, m1, n)
        g2 = complex_normals(key2, lo, hi, m2 * n).reshape(hi - lo, m2, n)
        a = np.einsum("bij,bik->bjk", g1.conj(), g1)
        s = a + np.einsum("bij,bik->bjk", g2.conj(), g2)
        w, v = np.linalg.eigh(s)
        if np.min(w) <= 0.0:
            raise NumericalError("Wishart sum numerically singular")
        inv_sqrt = np.einsum("bij,bj,bkj->bik", v, 1.0 / np.sqrt(w), v.conj())
        ratio = np.einsum("bij,bjk,bkl->bil", inv_sqrt, a, inv_sqrt)
        return _snap_block(np.linalg.eigvalsh(ratio), tol)

    return _gather(cfg, chunk)


def sample_wishart_spectra(
    rows: int, cols: int, cfg: McConfig, tag: str = "wishart"
) -> np.ndarray:
    """Eigenvalues of G^+ G for i.i.d. CN(0,1) G of shape (rows, cols)."""
    key = stream_key(cfg.master_seed, f"{tag}:{rows},{cols}")

    def chunk(lo, hi):
        g = complex_normals(key, lo, hi, rows * cols).reshape(hi - lo, rows, cols)
        return np.linalg.eigvalsh(np.einsum("bij,bik->bjk", g.conj(), g))

    return _gather(cfg, chunk)


def _log_det_values(dims: ChannelDims, rho: float, cfg: McConfig, tag: str) -> np.ndarray:
    key = stream_key(cfg.master_seed, f"{tag}:{dims.mt},{dims.mr},{dims.m}")

    def chunk(lo, hi):
        lam = _spectra_chunk(dims, key, DEFAULT_UNIT_TOL, lo, hi)
        return np.sum(np.log2(1.0 + rho * lam), axis=1)

    return _gather(cfg, chunk)


def mc_ergodic_capacity(dims: ChannelDims, rho: float, cfg: McConfig) -> McEstimate:
    """Empirical mean of log2 det(I + rho * H11^+ H11) over fresh draws (bits)."""
    if rho < 0.0:
        raise ValueError("rho must be >= 0")
    return _estimate(_log_det_values(dims, rho, cfg, "mc-ergodic"), cfg)


def mc_outage(
    dims: ChannelDims,
    rho: float,
    cfg: McConfig,
    r: float | None = None,
    rate_bits: float | None = None,
) -> McEstimate:
    """Fraction of draws whose mutual information falls below the rate.

    The rate is either a multiplexing ratio ``r`` (so R = r * log2(1 + rho))
    or an absolute ``rate_bits``; exactly one must be given.
    """
    if rho <= 0.0:
        raise ValueError("rho must be > 0")
    if (r is None) == (rate_bits is None):
        raise ValueError("give exactly one of r or rate_bits")
    if r is not None:
        if r < 0.0:
            raise ValueError("r must be >= 0")
        rate_bits = r * math.log2(1.0 + rho)
    mi = _log_det_values(dims, rho, cfg, "mc-outage")
    return _estimate((mi < rate_bits).astype(float), cfg)


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def qpsk_bit_error(snr):
    """Gray-mapped QPSK bit error rate on an AWGN channel of linear SNR."""
    return q_function(np.sqrt(np.asarray(snr, dtype=float)))


def qpsk_symbol_error(snr):
    """QPSK symbol error rate on an AWGN channel of linear SNR."""
    pb = qpsk_bit_error(snr)
    return pb * (2.0 - pb)


def mc_repetition_error(
    dims: ChannelDims, rho: float, cfg: McConfig, method: str = "conditional"
) -> McEstimate:
    """Symbol error rate of the one-symbol repetition scheme with MRC.

    One uncoded QPSK symbol is repeated across the mt transmit slots of a
    fresh channel and maximum-ratio combined, so the decision variable sees
    the unfaded SNR ``rho * sum(lambda)``.

    ``method="count"`` simulates the symbol decision through drawn channel
    and noise; ``method="conditional"`` averages the exact conditional
    (given the spectrum) QPSK error instead, removing all noise-dimension
    variance.  For deep tails dominated by near-zero eigenvalues see
    :func:`repetition_error_tail`.
    """
    if rho < 0.0:
        raise ValueError("rho must be >= 0")
    if method == "conditional":
        key = stream_key(cfg.master_seed, f"rep-cond:{dims.mt},{dims.mr},{dims.m}")

        def chunk(lo, hi):
            lam = _spectra_chunk(dims, key, DEFAULT_UNIT_TOL, lo, hi)
            return qpsk_symbol_error(rho * np.sum(lam, axis=1))

        return _estimate(_gather(cfg, chunk), cfg)
    if method != "count":
        raise ValueError("method must be 'conditional' or 'count'")

    kch = stream_key(cfg.master_seed, f"rep-count:ch:{dims.mt},{dims.mr},{dims.m}")
    kz = stream_key(cfg.master_seed, f"rep-count:noise:{dims.mt},{dims.mr},{dims.m}")
    ks = stream_key(cfg.master_seed, f"rep-count:sym:{dims.mt},{dims.mr},{dims.m}")
    mt, mr, m = dims.mt, dims.mr, dims.m

    def chunk(lo, hi):
        nb = hi - lo
        z = complex_normals(kch, lo, hi, m * dims.m_min).reshape(nb, m, dims.m_min)
        block = phase_fixed_qr(z)[:, : dims.m_max, :]
        h = block if mt <= mr else block.conj().transpose(0, 2, 1)  # (nb, mr, mt)
        gain = np.sum(np.abs(h) ** 2, axis=(1, 2))
        noise = complex_normals(kz, lo, hi, mt * mr).reshape(nb, mt, mr)
        combined_noise = np.einsum("bij,bji->b", h.conj(), noise)
        u = uniforms(ks, lo, hi, 2)
        re_sign = np.where(u[:, 0] < 0.5, -1.0, 1.0)
        im_sign = np.where(u[:, 1] < 0.5, -1.0, 1.0)
        symbol = (re_sign + 1j * im_sign) / math.sqrt(2.0)
        decision = math.sqrt(rho) * gain * symbol + combined_noise
        err = (np.sign(decision.real) != re_sign) | (np.sign(decision.imag) != im_sign)
        return err.astype(float)

    return _estimate(_gather(cfg, chunk), cfg)


def repetition_error_tail(dims: ChannelDims, rho: float, n_nodes: int = 400) -> float:
    """Deterministic repetition-scheme error for single-eigenvalue spectra.

    Integrates the exact conditional QPSK symbol error against the spectral
    density (after peeling off the k pinned eigenvalues when k > 0), which
    stays accurate in tails far beyond Monte-Carlo reach.  Requires the
    effective interior spectrum to be one-dimensional, i.e. ``m_min == 1``
    after the k > 0 reduction.
    """
    if rho < 0.0:
        raise ValueError("rho must be >= 0")
    if dims.k > 0:
        shift = float(dims.k)
        mt_res, mr_res = dims.m - dims.mr, dims.m - dims.mt
        if mt_res == 0 or mr_res == 0:
            return float(qpsk_symbol_error(rho * shift))
        residual = ChannelDims(mt_res, mr_res, dims.m)
    else:
        shift = 0.0
        residual = dims
    if residual.m_min != 1:
        raise ValueError(
            "tail evaluation requires an effective single-eigenvalue spectrum; "
            "use mc_repetition_error for wider channels"
        )

    def integrand(lam):
        return qpsk_symbol_error(rho * (shift + lam)) * analytic.eigen_density(residual, lam)

    # split where the exponential factor has died off; beyond it the
    # integrand is below ~1e-26 in relative terms
    split = min(1.0, 120.0 / rho) if rho > 0 else 1.0
    x1, w1 = np.polynomial.legendre.leggauss(n_nodes)
    total = 0.5 * split * float(w1 @ integrand(0.5 * split * (x1 + 1.0)))
    if split < 1.0:
        x2, w2 = np.polynomial.legendre.leggauss(64)
        half = 0.5 * (1.0 - split)
        total += half * float(w2 @ integrand(split + half * (x2 + 1.0)))
    return total


def mc_alamouti_outage(m: int, rho: float, r: float, cfg: McConfig) -> McEstimate:
    """Outage of the 2x2 orthogonal space-time block scheme at rate r*log2(rho).

    The scheme's equivalent scalar channel has gain ||H11||_F^2, so outage
    is the probability that ``log2(1 + ||H11||_F^2 rho) < r log2(rho)``.
    """
    if m < 2:
        raise ValueError("m must be >= 2 (the scheme addresses 2x2 modes)")
    if rho <= 0.0:
        raise ValueError("rho must be > 0")
    dims = ChannelDims(2, 2, m)
    key = stream_key(cfg.master_seed, f"alamouti:{m}")
    threshold = r * math.log2(rho)

    def chunk(lo, hi):
        lam = _spectra_chunk(dims, key, DEFAULT_UNIT_TOL, lo, hi)
        gain = np.sum(lam, axis=1)  # ||H11||_F^2
        return (np.log2(1.0 + rho * gain) < threshold).astype(float)

    return _estimate(_gather(cfg, chunk), cfg)


def estimate_diversity_slope(points) -> float:
    """Least-squares decay exponent of probability against SNR, in decades.

    ``points`` is a sequence of (rho_linear, probability) pairs, at least
    three, all probabilities positive; returns d >= 0 such that the best
    power-law fit is P ~ rho^-d.
    """
    pts = [(float(rho), float(p)) for rho, p in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if any(p <= 0.0 for _, p in pts):
        raise ValueError("all probabilities must be > 0")
    log_rho = np.log10([rho for rho, _ in pts])
    log_p = np.log10([p for _, p in pts])
    return float(-np.polyfit(log_rho, log_p, 1)[0])


def ks_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    grid = np.concatenate([a, b])
    f_a = np.searchsorted(a, grid, side="right") / len(a)
    f_b = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(f_a - f_b)))


def ks_distance_to_cdf(sample: np.ndarray, cdf) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a callable CDF."""
    s = np.sort(np.asarray(sample, dtype=float).ravel())
    n = len(s)
    values = np.asarray(cdf(s), dtype=float)
    steps = np.arange(n + 1) / n
    return float(max(np.max(np.abs(values - steps[:-1])), np.max(np.abs(values - steps[1:]))))


@dataclass(frozen=True)
class RayleighComparison:
    """One row of the large-m comparison against the i.i.d. Gaussian channel."""

    m: int
    rho_bar: float
    rho_per_mode: float
    capacity_jacobi: float
    capacity_rayleigh: McEstimate
    ks_scaled_vs_wishart: float
    frobenius_mean: float
    frobenius_expected: float


def rayleigh_compare(
    mt: int, mr: int, m_list, rho_bar: float, cfg: McConfig
) -> list[RayleighComparison]:
    """Compare the truncated-unitary channel against the Rayleigh baseline.

    ``rho_bar`` is the average SNR per receive mode, the common axis of the
    comparison.  For the truncated-unitary channel the per-mode SNR is
    ``rho = rho_bar * m / mt`` (exact, since E||H11||_F^2 = mt*mr/m by Haar
    symmetry); the baseline is an i.i.d. CN(0,1) channel driven at
    ``rho_bar / mt`` per antenna.  Each row reports the analytic capacity,
    the baseline Monte-Carlo capacity, and the KS distance between the
    m-scaled spectrum and the Wishart spectrum it converges to.
    """
    if rho_bar <= 0.0:
        raise ValueError("rho_bar must be > 0")
    m_list = [int(m) for m in m_list]
    for m in m_list:
        if m < mt + mr:
            raise ValueError(f"every m must satisfy m >= mt + mr, got m={m}")
    wishart = sample_wishart_spectra(mr, mt, cfg, tag="raycmp:wishart")
    rho_w = rho_bar / mt
    cap_ray = _estimate(np.sum(np.log2(1.0 + rho_w * wishart), axis=1), cfg)
    rows = []
    for m in m_list:
        dims = ChannelDims(mt, mr, m)
        rho = rho_bar * m / mt
        lam = sample_spectra(dims, cfg, tag=f"raycmp:jacobi:{m}")
        rows.append(
            RayleighComparison(
                m=m,
                rho_bar=rho_bar,
                rho_per_mode=rho,
                capacity_jacobi=analytic.ergodic_capacity(dims, rho),
                capacity_rayleigh=cap_ray,
                ks_scaled_vs_wishart=ks_distance(m * lam, wishart),
                frobenius_mean=float(np.mean(np.sum(lam, axis=1))),
                frobenius_expected=mt * mr / m,
            )
        )
    return rows
