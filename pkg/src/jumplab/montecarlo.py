"""Continuous-time Markov chain simulation of the underlying jump process.

The process jumps out of x at total rate sum_y J(x, y)/m(x), choosing the
target proportionally to J(x, .); this is the unique chain whose generator
matches the assembled L, so agreement between empirical path statistics and
the spectral semigroup is itself a consistency test.

Reproducibility: each path draws from its own counter-based Philox stream
keyed by (seed, path index), so ensembles are bit-identical regardless of
how path generation might be scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Model, as_state_function
from .semigroup import Spectral, apply_pt

__all__ = ["PathEnsemble", "EmpiricalCheck", "simulate_paths", "empirical_pt_check"]

_UINT64_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class PathEnsemble:
    """Aggregated outcome of independent paths from one start state."""

    x0: int
    n_paths: int
    t_max: float
    seed: int
    terminal_counts: np.ndarray
    transition_counts: np.ndarray
    total_jumps: int
    max_jumps: int

    @property
    def mean_jumps(self) -> float:
        return self.total_jumps / self.n_paths


@dataclass(frozen=True)
class EmpiricalCheck:
    """Monte Carlo estimate of P_t u(x0) against the spectral value."""

    empirical_mean: float
    exact: float
    std_error: float
    z_score: float


def _path_rng(seed: int, path_index: int) -> np.random.Generator:
    key = ((int(seed) & _UINT64_MASK) << 64) | (path_index & _UINT64_MASK)
    return np.random.Generator(np.random.Philox(key=key))


def simulate_paths(
    model: Model, x0: int, t_max: float, n_paths: int, seed: int
) -> PathEnsemble:
    """Simulate n_paths independent trajectories started at x0 up to t_max.

    Holding times are exponential with the state's total jump rate; a state
    with zero total rate holds forever (the process is conservative, never
    killed).  Sampling uses inverse-CDF draws from the per-path stream only,
    keeping ensembles deterministic for a fixed seed.
    """
    n = model.n
    if not (0 <= x0 < n):
        raise ValueError(f"start state {x0} out of range for n={n}")
    if t_max < 0:
        raise ValueError(f"t_max must be nonnegative, got {t_max}")
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")

    rates = model.jumps / model.measure[:, None]
    total_rate = rates.sum(axis=1)
    cum = np.cumsum(rates, axis=1)
    # Normalized jump CDF per state; guaranteed to end at exactly 1.
    with np.errstate(invalid="ignore", divide="ignore"):
        cdf = cum / total_rate[:, None]
    cdf[:, -1] = 1.0

    terminal = np.zeros(n, dtype=np.int64)
    transitions = np.zeros((n, n), dtype=np.int64)
    total_jumps = 0
    max_jumps = 0

    for path in range(n_paths):
        rng = _path_rng(seed, path)
        x = x0
        t = 0.0
        jumps = 0
        while total_rate[x] > 0.0:
            t += -math.log1p(-rng.random()) / total_rate[x]
            if t > t_max:
                break
            y = int(np.searchsorted(cdf[x], rng.random(), side="right"))
            transitions[x, y] += 1
            x = y
            jumps += 1
        terminal[x] += 1
        total_jumps += jumps
        max_jumps = max(max_jumps, jumps)

    terminal.setflags(write=False)
    transitions.setflags(write=False)
    return PathEnsemble(
        x0=x0,
        n_paths=n_paths,
        t_max=float(t_max),
        seed=int(seed),
        terminal_counts=terminal,
        transition_counts=transitions,
        total_jumps=total_jumps,
        max_jumps=max_jumps,
    )


def empirical_pt_check(ensemble: PathEnsemble, spec: Spectral, u) -> EmpiricalCheck:
    """Compare the ensemble mean of u(X_t) with the spectral P_t u(x0)."""
    if ensemble.n_paths < 100:
        raise ValueError(
            f"need at least 100 paths for a meaningful standard error,"
            f" got {ensemble.n_paths}"
        )
    u = as_state_function(spec.model, u)
    counts = ensemble.terminal_counts
    n_paths = ensemble.n_paths
    mean = float(counts @ u) / n_paths
    var = float(counts @ (u - mean) ** 2) / n_paths
    se = math.sqrt(var / n_paths)
    exact = float(apply_pt(spec, ensemble.t_max, u)[ensemble.x0])
    if se == 0.0:
        # Deterministic observable: only a discrepancy beyond spectral
        # roundoff counts as a failure.
        z = 0.0 if abs(mean - exact) <= 1e-12 * (1.0 + abs(exact)) else math.inf
    else:
        z = (mean - exact) / se
    return EmpiricalCheck(mean, exact, se, z)
