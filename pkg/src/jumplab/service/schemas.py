"""Pydantic request/response documents for the verification service.

These are the wire and file formats: the CLI builds the same request models
and emits the same response documents as the HTTP endpoints, so saved reports
round-trip through either path.  Field sets never depend on verbosity; the
verbose panel table is simply null when not requested.
"""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..model import Model, as_state_function, function_indicator, function_random_zero_mean, model_from_spec
from ..hardy_stein import QuadratureConfig


class ModelSpec(BaseModel):
    """Model description document: explicit (n, measure, jumps) or a builder."""

    model_config = ConfigDict(extra="forbid")

    n: Optional[int] = None
    measure: Optional[list[float]] = None
    jumps: Optional[list[tuple[int, int, float]]] = None
    builder: Optional[str] = None
    weight: Optional[float] = None
    alpha: Optional[float] = None

    def to_model(self) -> Model:
        return model_from_spec(self.model_dump(exclude_none=True))


class FunctionSpec(BaseModel):
    """A state function: explicit values or a named generator.

    Generators: "random-zero-mean" (seeded normal draw recentred in the
    m-weighted mean) and "indicator" (indicator of `state` minus its mean).
    """

    model_config = ConfigDict(extra="forbid")

    values: Optional[list[float]] = None
    generator: Optional[Literal["random-zero-mean", "indicator"]] = None
    seed: int = 0
    state: Optional[int] = None

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "FunctionSpec":
        if (self.values is None) == (self.generator is None):
            raise ValueError("exactly one of 'values' or 'generator' must be given")
        if self.generator == "indicator" and self.state is None:
            raise ValueError("generator 'indicator' requires 'state'")
        return self

    def resolve(self, model: Model) -> np.ndarray:
        if self.values is not None:
            return as_state_function(model, self.values)
        if self.generator == "random-zero-mean":
            return function_random_zero_mean(model, self.seed)
        return function_indicator(model, int(self.state))


class QuadratureSettings(BaseModel):
    """Overridable panel-quadrature and truncation parameters."""

    model_config = ConfigDict(extra="forbid")

    order: int = 16
    initial_width: Optional[float] = None
    growth: float = 2.0
    tail_tol: float = 1e-10
    max_panels: int = 200
    refine_rel_tol: float = 3e-10

    def to_config(self) -> QuadratureConfig:
        return QuadratureConfig(
            order=self.order,
            initial_width=self.initial_width,
            growth=self.growth,
            tail_tol=self.tail_tol,
            max_panels=self.max_panels,
            refine_rel_tol=self.refine_rel_tol,
        )


# ---------------------------------------------------------------------------
# Requests
# ---------------------------------------------------------------------------

class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: ModelSpec
    f: FunctionSpec
    p: list[float] = Field(default_factory=lambda: [2.0], min_length=1)
    tol: float = 1e-7
    quadrature: QuadratureSettings = Field(default_factory=QuadratureSettings)
    verbose: bool = False


class PFormRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: ModelSpec
    f: FunctionSpec
    p: list[float] = Field(default_factory=lambda: [2.0], min_length=1)
    tol: float = 1e-7
    schedule: Optional[list[float]] = None


class BregmanConstantsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p: list[float] = Field(min_length=1)
    x_min: float = 1e-8
    x_max: float = 1e8
    nodes: int = 20_001


class VagueLimitRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: ModelSpec
    t: list[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3], min_length=1)


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: ModelSpec
    x0: int = 0
    t_max: float = 0.5
    n_paths: int = 10_000
    seed: int = 0
    f: Optional[FunctionSpec] = None  # observable; defaults to the constant 1


# ---------------------------------------------------------------------------
# Responses
# ---------------------------------------------------------------------------

class HypothesisDoc(BaseModel):
    verdict: Literal["holds", "violated"]
    component_means: list[float]
    components: list[list[int]]


class PanelDoc(BaseModel):
    t_lo: float
    t_hi: float
    kind: str
    order: int
    value: float
    error_estimate: float


class VerifyEntry(BaseModel):
    p: float
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    T_trunc: float
    tail_bound: float
    panels_used: int
    max_panel_error: float
    min_integrand: float
    predicted_longtime_mass: float
    hypothesis_i: str = "trivially holds (finite space)"
    hypothesis_ii: HypothesisDoc
    residual_ok: bool
    tail_ok: bool
    panels: Optional[list[PanelDoc]] = None


class VerifyResponse(BaseModel):
    command: Literal["verify"] = "verify"
    tol: float
    tail_tol: float
    entries: list[VerifyEntry]
    verdict: Literal["ok", "residual-failure", "hypothesis-violated"]
    exit_code: int


class PFormEntry(BaseModel):
    p: float
    value_limit: float
    value_generator: float
    value_jump: float
    converged: bool
    max_pairwise_deviation: float
    t_schedule: list[float]


class PFormResponse(BaseModel):
    command: Literal["pform"] = "pform"
    tol: float
    entries: list[PFormEntry]
    exit_code: int


class ScanDoc(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

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


class BregmanConstantsResponse(BaseModel):
    command: Literal["bregman-constants"] = "bregman-constants"
    scans: list[ScanDoc]
    exit_code: int


class VagueLimitRow(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    t: float
    residual: float
    residual_half: float
    ratio: float


class VagueLimitResponse(BaseModel):
    command: Literal["vague-limit"] = "vague-limit"
    rows: list[VagueLimitRow]
    max_jump_weight: float
    exit_code: int


class SimulateResponse(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    command: Literal["simulate"] = "simulate"
    x0: int
    t_max: float
    n_paths: int
    seed: int
    terminal_counts: list[int]
    total_jumps: int
    mean_jumps: float
    max_jumps: int
    empirical_mean: float
    exact: float
    std_error: float
    z_score: float
    z_ok: bool
    exit_code: int


class HealthResponse(BaseModel):
    status: Literal["ok"] = "ok"
    version: str
