"""Finite symmetric jump models: state space, reference measure, jump kernel.

A model is a finite state space {0, ..., n-1} carrying a strictly positive
reference measure m and a symmetric nonnegative jump kernel J with zero
diagonal.  J(x, y) is the intensity of jumps between x and y; the measure m
defines the weighted inner product and the L^p norms used everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Model",
    "ModelSpecError",
    "Diagnostics",
    "complete_graph",
    "alpha_stable_ring",
    "model_from_spec",
    "model_to_spec",
    "validate_model",
    "connected_components",
    "as_state_function",
    "function_random_zero_mean",
    "function_indicator",
]


class ModelSpecError(ValueError):
    """Raised when a model description document is malformed or inconsistent."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Model:
    """Finite state space with reference measure and symmetric jump kernel.

    The container itself only enforces shapes; content invariants (symmetry,
    zero diagonal, positivity) are checked by the constructors in this module
    and can be re-audited with :func:`validate_model`.
    """

    measure: np.ndarray
    jumps: np.ndarray

    def __post_init__(self) -> None:
        m = _readonly(self.measure)
        j = _readonly(self.jumps)
        if m.ndim != 1 or m.size == 0:
            raise ModelSpecError("measure must be a nonempty 1-D array")
        if j.shape != (m.size, m.size):
            raise ModelSpecError(
                f"jumps must be {m.size}x{m.size}, got {j.shape}"
            )
        object.__setattr__(self, "measure", m)
        object.__setattr__(self, "jumps", j)

    @property
    def n(self) -> int:
        return self.measure.size

    @property
    def total_mass(self) -> float:
        return float(self.measure.sum())


@dataclass(frozen=True)
class Diagnostics:
    """Result of auditing a model: invariant violations and jump-graph components."""

    violations: tuple[str, ...]
    components: tuple[tuple[int, ...], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def complete_graph(n: int, weight: float) -> Model:
    """All-to-all model: unit measure, J(x, y) = weight for x != y."""
    if n < 2:
        raise ModelSpecError(f"complete_graph needs n >= 2, got {n}")
    if weight <= 0:
        raise ModelSpecError(f"complete_graph needs weight > 0, got {weight}")
    jumps = np.full((n, n), float(weight))
    np.fill_diagonal(jumps, 0.0)
    return Model(np.ones(n), jumps)


def alpha_stable_ring(n: int, alpha: float) -> Model:
    """Ring of n states with J(x, y) = d(x, y)^(-1-alpha), d the ring distance.

    A lattice analogue of a stable jump kernel: circulant, symmetric, with
    polynomially decaying weights.  Requires 0 < alpha < 2.
    """
    if n < 3:
        raise ModelSpecError(f"alpha_stable_ring needs n >= 3, got {n}")
    if not (0.0 < alpha < 2.0):
        raise ModelSpecError(f"alpha_stable_ring needs alpha in (0, 2), got {alpha}")
    idx = np.arange(n)
    diff = np.abs(idx[:, None] - idx[None, :])
    dist = np.minimum(diff, n - diff).astype(np.float64)
    with np.errstate(divide="ignore"):
        jumps = dist ** (-1.0 - alpha)
    np.fill_diagonal(jumps, 0.0)
    return Model(np.ones(n), jumps)


_BUILDERS = {
    "complete_graph": (complete_graph, ("weight",)),
    "alpha_stable_ring": (alpha_stable_ring, ("alpha",)),
}


def model_from_spec(doc: Mapping) -> Model:
    """Construct a validated model from a description document (parsed JSON).

    Two layouts are accepted.  Explicit:

        {"n": 2, "measure": [1, 1], "jumps": [[0, 1, 1.0]]}

    where ``jumps`` lists [i, j, w] triples, 0-based.  One-sided entries are
    mirrored; an entry given in both orders (or twice) must agree exactly.
    Builder form:

        {"builder": "complete_graph", "n": 3, "weight": 2.0}
        {"builder": "alpha_stable_ring", "n": 8, "alpha": 1.0}
    """
    if not isinstance(doc, Mapping):
        raise ModelSpecError("model spec must be a mapping")

    if "builder" in doc:
        name = doc["builder"]
        if name not in _BUILDERS:
            raise ModelSpecError(f"unknown builder {name!r}")
        fn, param_names = _BUILDERS[name]
        extra = set(doc) - {"builder", "n", *param_names}
        if extra:
            raise ModelSpecError(f"unexpected keys for builder {name!r}: {sorted(extra)}")
        if "n" not in doc:
            raise ModelSpecError(f"builder {name!r} requires 'n'")
        missing = [k for k in param_names if k not in doc]
        if missing:
            raise ModelSpecError(f"builder {name!r} missing parameters: {missing}")
        return fn(int(doc["n"]), *(float(doc[k]) for k in param_names))

    extra = set(doc) - {"n", "measure", "jumps"}
    if extra:
        raise ModelSpecError(f"unexpected keys in model spec: {sorted(extra)}")
    try:
        n = int(doc["n"])
        measure = np.asarray(doc["measure"], dtype=np.float64)
        triples = list(doc["jumps"])
    except KeyError as exc:
        raise ModelSpecError(f"model spec missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ModelSpecError(f"cannot parse model spec: {exc}") from exc

    if n < 1:
        raise ModelSpecError(f"n must be positive, got {n}")
    if measure.shape != (n,):
        raise ModelSpecError(f"measure must have length {n}, got shape {measure.shape}")
    if np.any(measure <= 0.0) or not np.all(np.isfinite(measure)):
        raise ModelSpecError("measure entries must be strictly positive and finite")

    jumps = np.zeros((n, n))
    seen: dict[tuple[int, int], float] = {}
    for entry in triples:
        try:
            i, j, w = entry
            i, j, w = int(i), int(j), float(w)
        except (TypeError, ValueError) as exc:
            raise ModelSpecError(f"bad jump entry {entry!r}: {exc}") from exc
        if not (0 <= i < n and 0 <= j < n):
            raise ModelSpecError(f"jump entry ({i}, {j}) out of range for n={n}")
        if i == j:
            raise ModelSpecError(f"diagonal jump entry at state {i}")
        if w < 0 or not np.isfinite(w):
            raise ModelSpecError(f"jump weight must be finite and >= 0, got {w}")
        key = (min(i, j), max(i, j))
        if key in seen and seen[key] != w:
            raise ModelSpecError(
                f"conflicting weights for pair {key}: {seen[key]} vs {w}"
            )
        seen[key] = w
        jumps[i, j] = w
        jumps[j, i] = w

    model = Model(measure, jumps)
    diag = validate_model(model)
    if not diag.ok:
        raise ModelSpecError("; ".join(diag.violations))
    return model


def model_to_spec(model: Model) -> dict:
    """Serialize a model to the document layout accepted by :func:`model_from_spec`.

    Round trip is bit exact: weights are emitted as Python floats.
    """
    n = model.n
    triples = [
        [i, j, float(model.jumps[i, j])]
        for i in range(n)
        for j in range(i + 1, n)
        if model.jumps[i, j] != 0.0
    ]
    return {"n": n, "measure": [float(v) for v in model.measure], "jumps": triples}


def connected_components(jumps: np.ndarray) -> tuple[tuple[int, ...], ...]:
    """Connected components of the jump graph (edges where J > 0)."""
    n = jumps.shape[0]
    adj = (jumps > 0.0) | (jumps.T > 0.0)
    unseen = set(range(n))
    comps = []
    while unseen:
        root = min(unseen)
        stack = [root]
        comp = {root}
        unseen.discard(root)
        while stack:
            x = stack.pop()
            for y in np.nonzero(adj[x])[0]:
                if y in unseen:
                    unseen.discard(int(y))
                    comp.add(int(y))
                    stack.append(int(y))
        comps.append(tuple(sorted(comp)))
    return tuple(comps)


def validate_model(model: Model) -> Diagnostics:
    """Audit model invariants; returns violations (empty if valid) plus components.

    Never raises: intended for diagnosing candidate models, including broken
    ones assembled by hand.
    """
    violations = []
    m, j = model.measure, model.jumps
    bad_measure = np.nonzero(~(m > 0.0) | ~np.isfinite(m))[0]
    for x in bad_measure:
        violations.append(f"measure[{x}] = {m[x]} is not strictly positive")
    if not np.all(np.isfinite(j)):
        violations.append("jump kernel contains non-finite entries")
    else:
        asym = np.argwhere(j != j.T)
        for x, y in asym[np.lexsort((asym[:, 1], asym[:, 0]))][:, :2]:
            if x < y:
                violations.append(
                    f"asymmetric jumps at pair ({x}, {y}): {j[x, y]} vs {j[y, x]}"
                )
        neg = np.argwhere(j < 0.0)
        for x, y in neg:
            if x <= y:
                violations.append(f"negative jump weight at ({x}, {y}): {j[x, y]}")
        diag = np.nonzero(np.diag(j) != 0.0)[0]
        for x in diag:
            violations.append(f"nonzero diagonal jump at state {x}")
    return Diagnostics(tuple(violations), connected_components(j))


def as_state_function(model: Model, values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Validate and coerce a vector of per-state values to a float64 array."""
    u = np.asarray(values, dtype=np.float64)
    if u.shape != (model.n,):
        raise ValueError(f"state function must have length {model.n}, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("state function entries must be finite")
    return u


def function_random_zero_mean(model: Model, seed: int) -> np.ndarray:
    """Standard normal draw recentred to have zero m-weighted mean."""
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(model.n)
    u -= float(u @ model.measure) / model.total_mass
    return u


def function_indicator(model: Model, state: int) -> np.ndarray:
    """Indicator of one state minus its m-weighted mean (zero-mean overall)."""
    if not (0 <= state < model.n):
        raise ValueError(f"state {state} out of range for n={model.n}")
    u = np.zeros(model.n)
    u[state] = 1.0
    u -= model.measure[state] / model.total_mass
    return u
