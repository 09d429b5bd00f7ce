"""Dirichlet form, approximate forms, and the nonlinear p-form.

The quadratic Dirichlet form is

    E(u, v) = (1/2) sum_{x != y} (u(y) - u(x))(v(y) - v(x)) J(x, y),

and for p > 1 the p-form E_p[u] extends it nonlinearly.  On a finite space it
has three equivalent computational routes, each exercised here separately:

    limit      E_p[u] = lim_{t->0+} (1/t) <u - P_t u, u^<p-1>>
    generator  E_p[u] = -<L u, u^<p-1>>
    jump       E_p[u] = (1/p) sum_{x != y} F_p(u(x), u(y)) J(x, y)

For p = 2 all three collapse to E(u, u).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .bregman import (
    ComparabilityScan,
    _check_p,
    bregman_f,
    bregman_h,
    comparability_scan,
    signed_power,
)
from .model import Model, as_state_function
from .semigroup import Generator, Spectral, heat_kernel

__all__ = [
    "PFormReport",
    "dirichlet_form",
    "approx_form",
    "approx_pform_kernel",
    "pform_limit",
    "pform_generator",
    "pform_jump",
    "three_representation_report",
    "halfpower_inclusion_check",
    "default_limit_schedule",
]

_TINY = 1e-300

# Three consecutive Richardson values agreeing to this relative tolerance
# declare the t -> 0 limit converged.
LIMIT_AGREEMENT_RTOL = 1e-8

# Looser than machine precision because the limit route carries extrapolation
# error while the generator and jump routes are direct sums.
REPRESENTATION_RTOL = 1e-7


def dirichlet_form(model: Model, u, v) -> float:
    """E(u, v) as the explicit double sum over ordered pairs."""
    u = as_state_function(model, u)
    v = as_state_function(model, v)
    du = u[None, :] - u[:, None]
    dv = v[None, :] - v[:, None]
    return 0.5 * float(np.sum(du * dv * model.jumps))


def approx_form(spec: Spectral, t: float, u, v) -> float:
    """Approximate form (1/t) <u - P_t u, v> in the m-weighted pairing.

    Evaluated spectrally as sum_k (-expm1(lambda_k t)/t) <u, phi_k> <v, phi_k>,
    which is exact for the decomposition and free of the u - P_t u
    cancellation, so it stays accurate down to t -> 0.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    u = as_state_function(spec.model, u)
    v = as_state_function(spec.model, v)
    m = spec.model.measure
    a = spec.basis.T @ (m * u)
    b = spec.basis.T @ (m * v)
    rates = -np.expm1(spec.eigenvalues * t) / t
    return float(np.sum(rates * a * b))


def approx_pform_kernel(spec: Spectral, t: float, p: float, u, variant: str) -> float:
    """Kernel representation (1/pt) sum_{x,y} F_p(u(x), u(y)) K_t[x, y].

    variant selects the divergence: "bregman" uses F_p, "symmetrized" uses
    H_p; both agree with approx_form(u, u^<p-1>) up to roundoff.
    """
    p = _check_p(p)
    if variant not in ("bregman", "symmetrized"):
        raise ValueError(f"variant must be 'bregman' or 'symmetrized', got {variant!r}")
    u = as_state_function(spec.model, u)
    K = heat_kernel(spec, t)
    div = bregman_f if variant == "bregman" else bregman_h
    F = div(p, u[:, None], u[None, :])
    return float(np.sum(F * K)) / (p * t)


def pform_generator(gen: Generator, p: float, u) -> float:
    """Generator route: -<L u, u^<p-1>> = -sum_x (Lu)(x) u(x)^<p-1> m(x)."""
    p = _check_p(p)
    u = as_state_function(gen.model, u)
    Lu = gen.matrix @ u
    return -float(np.sum(Lu * signed_power(u, p - 1.0) * gen.model.measure))


def pform_jump(model: Model, p: float, u) -> float:
    """Jump route: (1/p) sum over ordered pairs of F_p(u(x), u(y)) J(x, y)."""
    p = _check_p(p)
    u = as_state_function(model, u)
    F = bregman_f(p, u[:, None], u[None, :])
    return float(np.sum(F * model.jumps)) / p


@dataclass(frozen=True)
class PFormReport:
    """Evaluations of E_p[u] along its three routes.

    pform_limit fills only value_limit; three_representation_report returns
    the completed record.
    """

    p: float
    value_limit: float
    converged: bool
    t_schedule: tuple[float, ...]
    value_generator: float | None = None
    value_jump: float | None = None

    def max_pairwise_deviation(self) -> float:
        vals = [self.value_limit, self.value_generator, self.value_jump]
        if any(v is None for v in vals):
            raise ValueError("report does not carry all three representations")
        lo, hi = min(vals), max(vals)
        return (hi - lo) / max(abs(lo), abs(hi), _TINY)


def default_limit_schedule() -> np.ndarray:
    """Geometric schedule t_k = 2^-k, k = 3..20."""
    return 2.0 ** -np.arange(3, 21)


def _relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), _TINY)


def pform_limit(spec: Spectral, p: float, u, schedule=None) -> PFormReport:
    """Extrapolated limit of the approximate forms along a decreasing schedule.

    The map t -> E^(t)(u, u^<p-1>) is analytic here, so one Richardson step
    against the halved abscissa removes the leading O(t) error.  Convergence
    is declared when three consecutive accelerated values agree pairwise to
    LIMIT_AGREEMENT_RTOL; failure to converge is reported as a flag, never an
    exception, since it indicates numerical trouble rather than divergence.
    """
    p = _check_p(p)
    u = as_state_function(spec.model, u)
    ts = default_limit_schedule() if schedule is None else np.asarray(schedule, float)
    if ts.size < 4:
        raise ValueError(f"schedule needs at least 4 points, got {ts.size}")
    if not np.all(np.diff(ts) < 0.0) or ts[-1] <= 0.0:
        raise ValueError("schedule must be strictly decreasing and positive")

    v = signed_power(u, p - 1.0)
    raw = np.array([approx_form(spec, t, u, v) for t in ts])
    accel = np.empty(ts.size - 1)
    for k in range(ts.size - 1):
        # One Richardson step; exact O(t) cancellation only for halving
        # schedules, generic schedules still gain an order.
        r = ts[k] / ts[k + 1]
        accel[k] = (r * raw[k + 1] - raw[k]) / (r - 1.0)

    converged = False
    value = accel[-1]
    for i in range(accel.size - 2):
        window = accel[i : i + 3]
        gaps = [
            _relative_gap(window[0], window[1]),
            _relative_gap(window[1], window[2]),
            _relative_gap(window[0], window[2]),
        ]
        if max(gaps) <= LIMIT_AGREEMENT_RTOL:
            converged = True
            value = window[2]
            break

    return PFormReport(
        p=p,
        value_limit=float(value),
        converged=converged,
        t_schedule=tuple(float(t) for t in ts),
    )


def three_representation_report(
    gen: Generator, spec: Spectral, p: float, u, schedule=None
) -> PFormReport:
    """Evaluate E_p[u] along all three routes and return the filled report."""
    report = pform_limit(spec, p, u, schedule)
    return dataclasses.replace(
        report,
        value_generator=pform_generator(gen, p, u),
        value_jump=pform_jump(gen.model, p, u),
    )


def halfpower_inclusion_check(
    model: Model, p: float, u, scan: ComparabilityScan | None = None
) -> tuple[float, bool]:
    """Dirichlet energy of u^<p/2> and the bound E[u^<p/2>] <= (p/2c_p) E_p[u].

    The lower comparability constant turns the Bregman sum into a bound on the
    quadratic energy of the half power, which is why u^<p/2> always has finite
    energy when E_p[u] does.  Uses pform_jump for E_p and the scan's c_est for
    c_p (a default scan is run when none is supplied).
    """
    p = _check_p(p)
    u = as_state_function(model, u)
    if scan is None:
        scan = comparability_scan(p)
    energy_half = dirichlet_form(model, signed_power(u, p / 2.0), signed_power(u, p / 2.0))
    bound = (p / (2.0 * scan.c_est)) * pform_jump(model, p, u)
    return energy_half, energy_half <= bound * (1.0 + 1e-8) + _TINY
