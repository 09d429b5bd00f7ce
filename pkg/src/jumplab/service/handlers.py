"""Request handlers shared by the HTTP app and the command-line client.

Each handler is a pure function from a request document to a response
document; exit codes are derived from response contents only, so a saved
report reproduces its verdict.  Exit code conventions:

    0  success
    1  residual or agreement failure
    2  decay hypothesis violated
    3  usage / input error (raised as InputError, never encoded in a report)
"""

from __future__ import annotations

import math

import numpy as np

from .. import __version__
from ..bregman import comparability_scan
from ..forms import three_representation_report
from ..hardy_stein import Report, hardy_stein_verify
from ..model import Model, ModelSpecError, validate_model
from ..montecarlo import empirical_pt_check, simulate_paths
from ..semigroup import Spectral, assemble_generator, spectral_decompose, vague_limit_residual
from .schemas import (
    BregmanConstantsRequest,
    BregmanConstantsResponse,
    HealthResponse,
    HypothesisDoc,
    PanelDoc,
    PFormEntry,
    PFormRequest,
    PFormResponse,
    ScanDoc,
    SimulateRequest,
    SimulateResponse,
    VagueLimitRequest,
    VagueLimitResponse,
    VagueLimitRow,
    VerifyEntry,
    VerifyRequest,
    VerifyResponse,
)

EXIT_OK = 0
EXIT_RESIDUAL = 1
EXIT_HYPOTHESIS = 2
EXIT_USAGE = 3

_TINY = 1e-300


class InputError(ValueError):
    """Invalid request content: bad model, bad parameters, unreadable input."""


def _prepared(spec_doc) -> tuple[Model, Spectral]:
    try:
        model = spec_doc.to_model()
    except ModelSpecError as exc:
        raise InputError(str(exc)) from exc
    diag = validate_model(model)
    if not diag.ok:
        raise InputError("; ".join(diag.violations))
    gen = assemble_generator(model)
    return model, spectral_decompose(gen, model)


def _hypothesis_doc(report: Report) -> HypothesisDoc:
    check = report.hypothesis_ii
    return HypothesisDoc(
        verdict=check.verdict,
        component_means=list(check.component_means),
        components=[list(c) for c in check.components],
    )


def verify_exit_code(entries: list[VerifyEntry]) -> int:
    """Pure verdict mapping; recomputable from any saved verify document."""
    if any(e.hypothesis_ii.verdict == "violated" for e in entries):
        return EXIT_HYPOTHESIS
    if any(not (e.residual_ok and e.tail_ok) for e in entries):
        return EXIT_RESIDUAL
    return EXIT_OK


def run_verify(req: VerifyRequest) -> VerifyResponse:
    model, spec = _prepared(req.model)
    try:
        f = req.f.resolve(model)
        cfg = req.quadrature.to_config()
    except ValueError as exc:
        raise InputError(str(exc)) from exc

    entries = []
    for p in req.p:
        try:
            report = hardy_stein_verify(spec, model, p, f, cfg, with_panels=req.verbose)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        tail_ok = report.tail_bound <= cfg.tail_tol * max(report.lhs, _TINY) * (1 + 1e-12)
        entries.append(
            VerifyEntry(
                p=p,
                lhs=report.lhs,
                rhs=report.rhs,
                abs_residual=report.abs_residual,
                rel_residual=report.rel_residual,
                T_trunc=report.T_trunc,
                tail_bound=report.tail_bound,
                panels_used=report.panels_used,
                max_panel_error=report.max_panel_error,
                min_integrand=report.min_integrand,
                predicted_longtime_mass=report.predicted_longtime_mass,
                hypothesis_ii=_hypothesis_doc(report),
                residual_ok=report.rel_residual <= req.tol,
                tail_ok=tail_ok,
                panels=(
                    [PanelDoc(**vars(row)) for row in report.panels]
                    if report.panels is not None
                    else None
                ),
            )
        )
    code = verify_exit_code(entries)
    verdict = {
        EXIT_OK: "ok",
        EXIT_RESIDUAL: "residual-failure",
        EXIT_HYPOTHESIS: "hypothesis-violated",
    }[code]
    return VerifyResponse(
        tol=req.tol,
        tail_tol=req.quadrature.tail_tol,
        entries=entries,
        verdict=verdict,
        exit_code=code,
    )


def run_pform(req: PFormRequest) -> PFormResponse:
    model, spec = _prepared(req.model)
    gen = assemble_generator(model)
    try:
        u = req.f.resolve(model)
    except ValueError as exc:
        raise InputError(str(exc)) from exc

    entries = []
    for p in req.p:
        try:
            report = three_representation_report(gen, spec, p, u, req.schedule)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        entries.append(
            PFormEntry(
                p=p,
                value_limit=report.value_limit,
                value_generator=report.value_generator,
                value_jump=report.value_jump,
                converged=report.converged,
                max_pairwise_deviation=report.max_pairwise_deviation(),
                t_schedule=list(report.t_schedule),
            )
        )
    ok = all(e.converged and e.max_pairwise_deviation <= req.tol for e in entries)
    return PFormResponse(
        tol=req.tol, entries=entries, exit_code=EXIT_OK if ok else EXIT_RESIDUAL
    )


def run_bregman_constants(req: BregmanConstantsRequest) -> BregmanConstantsResponse:
    scans = []
    for p in req.p:
        try:
            scan = comparability_scan(p, req.x_min, req.x_max, req.nodes)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        scans.append(ScanDoc(**vars(scan)))
    return BregmanConstantsResponse(scans=scans, exit_code=EXIT_OK)


def run_vague_limit(req: VagueLimitRequest) -> VagueLimitResponse:
    model, spec = _prepared(req.model)
    rows = []
    for t in req.t:
        try:
            res = vague_limit_residual(spec, model, t)
            res_half = vague_limit_residual(spec, model, t / 2.0)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        ratio = res / res_half if res_half > 0.0 else math.inf if res > 0.0 else 0.0
        rows.append(VagueLimitRow(t=t, residual=res, residual_half=res_half, ratio=ratio))
    return VagueLimitResponse(
        rows=rows, max_jump_weight=float(model.jumps.max()), exit_code=EXIT_OK
    )


def run_simulate(req: SimulateRequest) -> SimulateResponse:
    model, spec = _prepared(req.model)
    try:
        u = req.f.resolve(model) if req.f is not None else np.ones(model.n)
        ensemble = simulate_paths(model, req.x0, req.t_max, req.n_paths, req.seed)
        check = empirical_pt_check(ensemble, spec, u)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    z_ok = abs(check.z_score) <= 5.0
    return SimulateResponse(
        x0=ensemble.x0,
        t_max=ensemble.t_max,
        n_paths=ensemble.n_paths,
        seed=ensemble.seed,
        terminal_counts=[int(c) for c in ensemble.terminal_counts],
        total_jumps=ensemble.total_jumps,
        mean_jumps=ensemble.mean_jumps,
        max_jumps=ensemble.max_jumps,
        empirical_mean=check.empirical_mean,
        exact=check.exact,
        std_error=check.std_error,
        z_score=check.z_score,
        z_ok=z_ok,
        exit_code=EXIT_OK if z_ok else EXIT_RESIDUAL,
    )


def health() -> HealthResponse:
    return HealthResponse(version=__version__)
