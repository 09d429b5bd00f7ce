"""Scalar kernels: signed powers, Bregman divergences, comparability constants.

For p > 1 the Bregman divergence of the convex map a -> |a|^p,

    F_p(a, b) = |b|^p - |a|^p - p a^<p-1> (b - a),

is nonnegative and comparable to the squared difference of half powers:

    c_p (b^<p/2> - a^<p/2>)^2 <= F_p(a, b) <= C_p (b^<p/2> - a^<p/2>)^2.

The optimal constants have no closed form; :func:`comparability_scan`
estimates them by scanning the one-variable ratio

    r(x) = (|x|^p - 1 - p(x - 1)) / (x^<p/2> - 1)^2

obtained by reducing (a, b) to the ratio x = b/a.  r extends continuously
with r(1) = 2(p-1)/p and r(+-inf) = 1, which the scan uses as exact anchors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "signed_power",
    "bregman_f",
    "bregman_h",
    "comparability_ratio",
    "comparability_scan",
    "ComparabilityScan",
]

# Double precision supports |a|^p without over/underflow surprises only for a
# limited band of exponents; reject p outside it up front.
P_MIN = 1.0 + 1e-6
P_MAX = 1e3

# Inside this band around x = 1 the ratio is evaluated as its analytic limit:
# both numerator and denominator vanish to second order and the direct
# quotient loses all significant digits.
_RATIO_SAFE_BAND = 1e-4


def _check_p(p: float) -> float:
    p = float(p)
    if not (P_MIN <= p <= P_MAX):
        raise ValueError(f"p must lie in [{P_MIN}, {P_MAX}], got {p}")
    return p


def signed_power(a, kappa: float):
    """Odd power a^<kappa> = |a|^kappa * sgn(a), elementwise on arrays."""
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return np.sign(a) * np.abs(a) ** kappa


def bregman_f(p: float, a, b):
    """Bregman divergence F_p(a, b) = |b|^p - |a|^p - p a^<p-1> (b - a)."""
    p = _check_p(p)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.abs(b) ** p - np.abs(a) ** p - p * signed_power(a, p - 1.0) * (b - a)
    return out if out.ndim else float(out)


def bregman_h(p: float, a, b):
    """Symmetrized divergence H_p(a, b) = (p/2)(b - a)(b^<p-1> - a^<p-1>)."""
    p = _check_p(p)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = 0.5 * p * (b - a) * (signed_power(b, p - 1.0) - signed_power(a, p - 1.0))
    return out if out.ndim else float(out)


def comparability_ratio(p: float, x):
    """r(x) = F_p(1, x) / (x^<p/2> - 1)^2 with the removable point filled.

    Within |x - 1| < 1e-4 the value is replaced by the analytic limit
    2(p-1)/p to avoid 0/0 cancellation.
    """
    p = _check_p(p)
    x = np.asarray(x, dtype=np.float64)
    near_one = np.abs(x - 1.0) < _RATIO_SAFE_BAND
    safe_x = np.where(near_one, 0.0, x)
    denom = (signed_power(safe_x, p / 2.0) - 1.0) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = bregman_f(p, 1.0, safe_x) / denom
    out = np.where(near_one, 2.0 * (p - 1.0) / p, raw)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ComparabilityScan:
    """Grid estimate of the comparability constants for one exponent p.

    c_est and C_est are the infimum and supremum of r over the scan grid
    augmented with the two analytic anchors r(1) = 2(p-1)/p and
    r(+-inf) = 1; argmin_x / argmax_x report where each extremum was found
    (1.0 or +-inf when an anchor wins).
    """

    p: float
    x_min: float
    x_max: float
    nodes: int
    c_est: float
    C_est: float
    argmin_x: float
    argmax_x: float
    r_at_one: float
    r_at_infinity: float

    def __post_init__(self) -> None:
        if not (0.0 < self.c_est <= self.C_est < math.inf):
            raise ValueError(
                f"scan produced invalid constants c={self.c_est}, C={self.C_est}"
            )


def _golden_refine(fn, xa: float, xb: float, minimize: bool, iters: int = 90):
    """Golden-section search for the extremum of fn in [xa, xb]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    sign = 1.0 if minimize else -1.0
    a, b = xa, xb
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = sign * fn(c), sign * fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = sign * fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = sign * fn(d)
        if b - a <= 1e-14 * (abs(a) + abs(b) + 1e-300):
            break
    x = c if fc < fd else d
    return x, fn(x)


def _candidate_indices(vals: np.ndarray, kind: str, k: int = 6) -> list[int]:
    """Top-k extremal grid indices, suppressing immediate neighbours.

    Flat stretches of the ratio produce thousands of noise-level grid-local
    extrema; refining each would be wasted work.  The few genuinely extremal
    basins always place a grid point among the k best values, which is all
    golden-section refinement needs as a starting bracket.
    """
    order = np.argsort(vals) if kind == "min" else np.argsort(-vals)
    chosen: list[int] = [0, len(vals) - 1]
    for i in order:
        i = int(i)
        if all(abs(i - j) > 2 for j in chosen):
            chosen.append(i)
        if len(chosen) >= k + 2:
            break
    return chosen


@lru_cache(maxsize=64)
def _scan_cached(p: float, x_min: float, x_max: float, nodes: int) -> ComparabilityScan:
    mags = np.geomspace(x_min, x_max, nodes)
    branches = [mags, -mags]

    fn = lambda x: float(comparability_ratio(p, x))
    best_min = (math.inf, math.nan)
    best_max = (-math.inf, math.nan)
    for xs in branches:
        vals = np.asarray(comparability_ratio(p, xs))
        for which in ("min", "max"):
            for i in _candidate_indices(vals, which):
                lo = xs[max(i - 1, 0)]
                hi = xs[min(i + 1, len(xs) - 1)]
                if lo > hi:
                    lo, hi = hi, lo
                x_ref, v_ref = _golden_refine(fn, lo, hi, minimize=(which == "min"))
                cand = [(float(vals[i]), float(xs[i])), (v_ref, x_ref)]
                for v, x in cand:
                    if which == "min" and v < best_min[0]:
                        best_min = (v, x)
                    if which == "max" and v > best_max[0]:
                        best_max = (v, x)

    r_one = 2.0 * (p - 1.0) / p
    for v, x in ((r_one, 1.0), (1.0, math.inf)):
        if v < best_min[0]:
            best_min = (v, x)
        if v > best_max[0]:
            best_max = (v, x)

    return ComparabilityScan(
        p=p,
        x_min=x_min,
        x_max=x_max,
        nodes=nodes,
        c_est=best_min[0],
        C_est=best_max[0],
        argmin_x=best_min[1],
        argmax_x=best_max[1],
        r_at_one=r_one,
        r_at_infinity=1.0,
    )


def comparability_scan(
    p: float,
    x_min: float = 1e-8,
    x_max: float = 1e8,
    nodes: int = 20_001,
) -> ComparabilityScan:
    """Estimate c_p, C_p by scanning r over +-[x_min, x_max] (log spaced).

    Every grid-local extremum is sharpened by golden-section search, so the
    estimates are limited by the extrema actually bracketed by the grid, not
    by its raw resolution.  The grid must reach into a neighbourhood of 1
    (x_min < 1) and out to large magnitudes (x_max >= 1e6), where the two
    anchor values pin the ratio.
    """
    p = _check_p(p)
    if nodes < 100:
        raise ValueError(f"scan needs at least 100 nodes, got {nodes}")
    if not (0.0 < x_min < 1.0):
        raise ValueError(f"x_min must lie in (0, 1) to bracket x = 1, got {x_min}")
    if x_max < 1e6:
        raise ValueError(f"x_max must reach the large-|x| regime (>= 1e6), got {x_max}")
    return _scan_cached(float(p), float(x_min), float(x_max), int(nodes))
