"""Closed-form channel quantities.

The single-eigenvalue marginal density of the channel spectrum, the ergodic
capacity in both parameter regimes (a Gauss-Jacobi integral when
``mt + mr <= m``, otherwise ``k`` unfaded single-mode capacities plus the
capacity of the complementary channel), single-input outage through the
incomplete beta function, the rate-reduction map for ``k > 0``, and the
optimal diversity-multiplexing frontier.

All rates are in bits (log base 2) and all SNRs are linear; dB conversion
belongs to the CLI boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import ChannelDims
from .specfun import (
    gauss_jacobi_rule,
    inv_reg_inc_beta,
    jacobi_norm_b,
    jacobi_poly_sequence,
    reg_inc_beta,
)

__all__ = [
    "DmtCurve",
    "eigen_density",
    "ergodic_capacity",
    "outage_single_mode",
    "rho_norm",
    "outage_rate_reduction",
    "dmt_optimal_curve",
    "CAPACITY_QUAD_EXTRA_NODES",
]

# The capacity integrand is (polynomial of degree 2(m_min - 1)) times
# log(1 + rho*lam).  The log factor has a branch point at -1/rho, which
# crowds the interval as rho grows, so a fixed node count cannot hold a
# uniform tolerance; the integral is evaluated with doubling node counts
# until two consecutive rules agree to _QUAD_RTOL.
CAPACITY_QUAD_EXTRA_NODES = 32
_QUAD_RTOL = 1e-13
_QUAD_MAX_NODES = 4096


def _density_series(dims: ChannelDims, lam: np.ndarray) -> np.ndarray:
    """Sum_k b_k^-1 P_k(1 - 2*lam)^2 for k < m_min (no weight factor)."""
    polys = jacobi_poly_sequence(dims.m_min - 1, dims.alpha, dims.beta, 1.0 - 2.0 * lam)
    inv_norms = np.array(
        [1.0 / jacobi_norm_b(k, dims.alpha, dims.beta) for k in range(dims.m_min)]
    )
    return np.tensordot(inv_norms, polys**2, axes=(0, 0))


def eigen_density(dims: ChannelDims, lam):
    """Marginal density of one unordered squared singular value.

    Only defined for ``mt + mr <= m`` (when ``k > 0`` the spectrum carries
    atoms at 1 and 0 and is handled through the complementary channel
    instead).  Normalized to integrate to 1 over [0, 1].
    """
    if dims.k > 0:
        raise ValueError("eigen_density requires mt + mr <= m")
    lam_arr = np.asarray(lam, dtype=float)
    weight = lam_arr**dims.alpha * (1.0 - lam_arr) ** dims.beta
    out = weight * _density_series(dims, lam_arr) / dims.m_min
    if np.ndim(lam) == 0:
        return float(out)
    return out


def _capacity_integral(dims: ChannelDims, rho: float) -> float:
    def evaluate(n):
        rule = gauss_jacobi_rule(n, dims.alpha, dims.beta)
        series = _density_series(dims, rule.nodes)
        return rule.integrate(np.log2(1.0 + rho * rule.nodes) * series)

    n = dims.m_min + CAPACITY_QUAD_EXTRA_NODES
    value = evaluate(n)
    while n < _QUAD_MAX_NODES:
        n *= 2
        refined = evaluate(n)
        if abs(refined - value) <= _QUAD_RTOL * max(1.0, abs(refined)):
            return refined
        value = refined
    return value


def ergodic_capacity(dims: ChannelDims, rho: float) -> float:
    """Ergodic capacity in bits per channel use at per-mode SNR ``rho``.

    For ``mt + mr <= m`` this is the Gauss-Jacobi evaluation of the spectral
    integral; otherwise ``k`` single-mode capacities are pinned at
    ``log2(1 + rho)`` and the remainder is the capacity of the complementary
    ``(m - mr, m - mt, m)`` channel, which vanishes when mt or mr equals m.
    """
    if rho < 0.0:
        raise ValueError("rho must be >= 0")
    if rho == 0.0:
        return 0.0
    if dims.k > 0:
        cap = dims.k * math.log2(1.0 + rho)
        mt_res, mr_res = dims.m - dims.mr, dims.m - dims.mt
        if mt_res >= 1 and mr_res >= 1:
            cap += ergodic_capacity(ChannelDims(mt_res, mr_res, dims.m), rho)
        return cap
    return _capacity_integral(dims, rho)


def outage_single_mode(mr: int, m: int, rate_bits: float, rho: float) -> float:
    """Outage probability of a single-transmit-mode channel (mt = 1).

    Equals ``I_x(mr, m - mr)`` with ``x = (2^R - 1) / rho`` (and 1 whenever
    the threshold x reaches 1).
    """
    if mr < 1 or m < mr + 1:
        raise ValueError("need m >= mr + 1 >= 2")
    if rate_bits < 0.0:
        raise ValueError("rate_bits must be >= 0")
    if rate_bits == 0.0:
        return 0.0
    if rho <= 0.0:
        return 1.0
    x = math.expm1(rate_bits * math.log(2.0)) / rho
    if x >= 1.0:
        return 1.0
    return reg_inc_beta(x, mr, m - mr)


def rho_norm(mr: int, m: int, epsilon: float) -> float:
    """Smallest ``rho / (2^R - 1)`` supporting outage <= epsilon (mt = 1).

    Linear scale.  For the lossless case ``mr = m`` the answer is exactly 1
    (0 dB): the minimal power is the unfaded single-mode requirement.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if mr < 1 or m < mr:
        raise ValueError("need m >= mr >= 1")
    if m == mr:
        return 1.0
    return 1.0 / inv_reg_inc_beta(epsilon, mr, m - mr)


def outage_rate_reduction(
    dims: ChannelDims, r: float
) -> tuple[ChannelDims | None, float]:
    """Map an outage query with ``k > 0`` onto the complementary channel.

    Returns ``((m - mr, m - mt, m), max(r - k, 0))``.  The reduced dims are
    ``None`` when a side collapses to zero modes (mt = m or mr = m); the
    channel is then deterministic, so outage is 0 for ``r_tilde = 0`` and 1
    otherwise.  Callers must report outage exactly 0 whenever
    ``r_tilde = 0``.
    """
    if dims.k <= 0:
        raise ValueError("outage_rate_reduction requires mt + mr > m")
    if r < 0.0:
        raise ValueError("r must be >= 0")
    r_tilde = max(r - dims.k, 0.0)
    mt_res, mr_res = dims.m - dims.mr, dims.m - dims.mt
    if mt_res == 0 or mr_res == 0:
        return None, r_tilde
    return ChannelDims(mt_res, mr_res, dims.m), r_tilde


@dataclass(frozen=True)
class DmtCurve:
    """Piecewise-linear optimal diversity-multiplexing frontier.

    ``vertices`` are (multiplexing gain r, diversity gain d) corners with r
    ascending and d reaching 0 at the last vertex; diversity is infinite for
    ``r < infinite_below`` (0 when no such region exists).
    """

    vertices: tuple[tuple[float, float], ...]
    infinite_below: float = 0.0

    def diversity(self, r: float) -> float:
        """Evaluate d*(r); inf below the threshold, 0 beyond the last vertex."""
        if r < 0.0:
            raise ValueError("r must be >= 0")
        if r < self.infinite_below:
            return math.inf
        rs = [v[0] for v in self.vertices]
        ds = [v[1] for v in self.vertices]
        if r >= rs[-1]:
            return 0.0
        return float(np.interp(r, rs, ds))


def dmt_optimal_curve(dims: ChannelDims) -> DmtCurve:
    """Optimal diversity-multiplexing curve of the channel.

    For ``mt + mr <= m`` it connects ``(j, (mt - j)(mr - j))`` for integer
    ``j  = 0 .. m_min`` and does not depend on m.  For ``k > 0`` diversity is
    unbounded below ``r = k`` and the finite branch is the complementary
    channel's curve shifted right by k.
    """
    if dims.k == 0:
        verts = tuple(
            (float(j), float((dims.mt - j) * (dims.mr - j)))
            for j in range(dims.m_min + 1)
        )
        return DmtCurve(vertices=verts, infinite_below=0.0)
    mt_res, mr_res = dims.m - dims.mr, dims.m - dims.mt
    if mt_res == 0 or mr_res == 0:
        return DmtCurve(vertices=((float(dims.k), 0.0),), infinite_below=float(dims.k))
    n_res = min(mt_res, mr_res)
    verts = tuple(
        (float(dims.k + j), float((mt_res - j) * (mr_res - j)))
        for j in range(n_res + 1)
    )
    return DmtCurve(vertices=verts, infinite_below=float(dims.k))
