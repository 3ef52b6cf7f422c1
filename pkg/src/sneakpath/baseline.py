"""Single-threshold reference detector.

Treats sneak-path interference as part of the noise: every cell is decided
against one threshold chosen to minimize the expected per-cell error under
the marginal three-level mixture (LRS with probability q, plain HRS or the
degraded sneak-path level otherwise, split by the sneak-path occurrence
probability implied by the failure-count prior).  The threshold is
re-optimized per noise level, which only strengthens this reference.
"""

from __future__ import annotations

import numpy as np

from .bounds import SFCountDistribution, q_function
from .channel import ChannelParams


def marginal_error(t, params: ChannelParams, p: SFCountDistribution):
    """Expected per-cell error of threshold ``t`` (decide 0 iff y > t)."""
    t = np.asarray(t, dtype=float)
    q = params.q
    psp = p.sp_potential_probability(q)
    sig = params.sigma
    miss_one = q_function((t - params.r1) / sig)
    miss_zero_clear = q_function((params.r0 - t) / sig)
    miss_zero_sp = q_function((params.r0_prime - t) / sig)
    return q * miss_one + (1.0 - q) * ((1.0 - psp) * miss_zero_clear + psp * miss_zero_sp)


def optimal_threshold(
    params: ChannelParams, p: SFCountDistribution, grid_points: int = 180001
) -> float:
    """Threshold minimizing :func:`marginal_error` on a fine grid over (r1, r0).

    Grid resolution is (r0 - r1) / (grid_points - 1), 5 mOhm at the default
    levels; ties resolve to the smallest threshold.
    """
    ts = np.linspace(params.r1, params.r0, grid_points)
    return float(ts[int(np.argmin(marginal_error(ts, params, p)))])


def detect_baseline(
    y: np.ndarray, params: ChannelParams, p: SFCountDistribution, threshold: float | None = None
) -> np.ndarray:
    """Decide every cell against one fixed threshold: 0 iff y > threshold."""
    if threshold is None:
        threshold = optimal_threshold(params, p)
    return (np.asarray(y, dtype=float) <= threshold).astype(np.uint8)
