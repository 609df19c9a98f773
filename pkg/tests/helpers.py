"""Independent oracles shared by the unit and acceptance tests.

The Wilson bounds are the roots of

    g(p0) = (p_hat - p0)^2 - z^2 * p0 * (1 - p0) / n = 0

so a bisection root-finder on g is an oracle for the closed-form evaluation:
it never touches the quadratic's solution formula.
"""

from __future__ import annotations

import numpy as np


def wilson_bisect(u: int, d: int, z: float, iters: int = 100) -> tuple[float, float]:
    """Scalar bisection for both bounds; (0, 1) for the no-vote convention."""
    n = u + d
    if n == 0:
        return (0.0, 1.0)
    p_hat = u / n
    if z == 0.0:
        return (p_hat, p_hat)
    zz = z * z

    def g(p0: float) -> float:
        return (p_hat - p0) ** 2 - zz * p0 * (1.0 - p0) / n

    lo, hi = 0.0, p_hat  # g(lo) >= 0, g(hi) <= 0: converges to the lower root
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    lower = 0.5 * (lo + hi)

    lo, hi = p_hat, 1.0  # g(lo) <= 0, g(hi) >= 0: converges to the upper root
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    upper = 0.5 * (lo + hi)
    return (lower, upper)


def wilson_bisect_arrays(
    u: np.ndarray, d: np.ndarray, z: float, iters: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized bisection over parallel arrays of counts (all n > 0)."""
    n = (u + d).astype(np.float64)
    p_hat = u / n
    zz = z * z

    def g(p0: np.ndarray) -> np.ndarray:
        return (p_hat - p0) ** 2 - zz * p0 * (1.0 - p0) / n

    lo = np.zeros_like(p_hat)
    hi = p_hat.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        take = g(mid) >= 0.0
        lo = np.where(take, mid, lo)
        hi = np.where(take, hi, mid)
    lower = 0.5 * (lo + hi)

    lo = p_hat.copy()
    hi = np.ones_like(p_hat)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        take = g(mid) <= 0.0
        lo = np.where(take, mid, lo)
        hi = np.where(take, hi, mid)
    upper = 0.5 * (lo + hi)
    return lower, upper
