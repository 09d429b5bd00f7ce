"""Shared fixtures: the closed-form two-state model and random model pools."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from jumplab import Model, Spectral, Generator, assemble_generator, complete_graph, spectral_decompose


@dataclass(frozen=True)
class Prepared:
    model: Model
    gen: Generator
    spec: Spectral


def prepare(model: Model) -> Prepared:
    gen = assemble_generator(model)
    return Prepared(model, gen, spectral_decompose(gen, model))


def random_connected_model(
    rng: np.random.Generator,
    n_min: int = 2,
    n_max: int = 50,
    w_lo: float = 0.2,
    w_hi: float = 1.0,
    density: float = 0.3,
    m_lo: float = 0.5,
    m_hi: float = 2.0,
) -> Model:
    """Random spanning tree plus extra edges: connected by construction."""
    n = int(rng.integers(n_min, n_max + 1))
    measure = rng.uniform(m_lo, m_hi, n)
    J = np.zeros((n, n))
    perm = rng.permutation(n)
    for k in range(1, n):
        i, j = perm[k], perm[int(rng.integers(0, k))]
        J[i, j] = J[j, i] = rng.uniform(w_lo, w_hi)
    extra = np.triu(rng.random((n, n)) < density, 1)
    for i, j in zip(*np.nonzero(extra)):
        J[i, j] = J[j, i] = rng.uniform(w_lo, w_hi)
    return Model(measure, J)


def two_component_model(rng: np.random.Generator, n_each: int = 3) -> Model:
    """Two disjoint complete components (zero jump rate across)."""
    n = 2 * n_each
    measure = rng.uniform(0.5, 2.0, n)
    J = np.zeros((n, n))
    for base in (0, n_each):
        for i in range(base, base + n_each):
            for j in range(i + 1, base + n_each):
                J[i, j] = J[j, i] = rng.uniform(0.3, 1.0)
    return Model(measure, J)


def zero_mean(model: Model, f: np.ndarray) -> np.ndarray:
    return f - float(f @ model.measure) / model.total_mass


@pytest.fixture(scope="session")
def two_state() -> Prepared:
    return prepare(complete_graph(2, 1.0))


@pytest.fixture(scope="session")
def model_pool() -> list[Prepared]:
    """100 random connected models with n <= 50, decomposed once."""
    rng = np.random.default_rng(20250810)
    return [prepare(random_connected_model(rng)) for _ in range(100)]


@pytest.fixture(scope="session")
def small_pool() -> list[Prepared]:
    """Gentler models (n <= 12, modest rates) for limit-extrapolation work."""
    rng = np.random.default_rng(4711)
    return [
        prepare(random_connected_model(rng, n_max=12, w_lo=0.1, w_hi=0.6, m_lo=1.0))
        for _ in range(40)
    ]
