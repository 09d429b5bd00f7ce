import numpy as np
import pytest

from jumplab import (
    Model,
    QuadratureBudgetError,
    QuadratureConfig,
    apply_pt,
    decay_check,
    finite_horizon_check,
    hardy_stein_verify,
    integrate_panels,
    lp_norm_p,
)
from jumplab.hardy_stein import zero_crossing_times

from conftest import prepare, random_connected_model, two_component_model, zero_mean


F = np.array([1.0, -1.0])


# ---------------------------------------------------------------------------
# panel quadrature
# ---------------------------------------------------------------------------

def test_integrate_exponential():
    cfg = QuadratureConfig(initial_width=0.5)
    value, panels, max_err = integrate_panels(lambda t: np.exp(-t), cfg, 40.0)
    assert value == pytest.approx(1.0 - np.exp(-40.0), abs=1e-12)
    assert panels >= 1
    assert max_err < 1e-10


def test_integrate_zero():
    cfg = QuadratureConfig(initial_width=0.5)
    value, _, max_err = integrate_panels(lambda t: np.zeros_like(t), cfg, 5.0)
    assert value == 0.0
    assert max_err == 0.0


def test_integrate_scaled_exponential():
    cfg = QuadratureConfig(initial_width=0.25)
    value, _, _ = integrate_panels(lambda t: 4.0 * np.exp(-6.0 * t), cfg, 10.0)
    assert value == pytest.approx((2.0 / 3.0) * (1 - np.exp(-60.0)), abs=1e-12)


def test_integrate_cusp_with_breakpoint():
    # |t - c|^(1/2) kink: hopeless for plain panels, exact with the cusp map
    c = 0.37
    exact = ((1 - c) ** 1.5 - c**1.5) / 1.5
    cfg = QuadratureConfig(initial_width=1.0)
    integrand = lambda t: np.sign(t - c) * np.sqrt(np.abs(t - c))
    value, _, _ = integrate_panels(integrand, cfg, 1.0, breakpoints=[c])
    assert value == pytest.approx(exact, abs=1e-12)


def test_integrate_budget_exhausted():
    cfg = QuadratureConfig(initial_width=1e-3, growth=1.0, max_panels=5)
    with pytest.raises(QuadratureBudgetError):
        integrate_panels(lambda t: np.exp(-t), cfg, 1.0)


def test_integrate_deterministic():
    cfg = QuadratureConfig(initial_width=0.5)
    runs = {
        integrate_panels(lambda t: np.exp(-t) * np.cos(t), cfg, 20.0) for _ in range(3)
    }
    assert len(runs) == 1


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(order=1)
    with pytest.raises(ValueError):
        QuadratureConfig(growth=0.5)
    with pytest.raises(ValueError):
        QuadratureConfig(tail_tol=0.5)
    with pytest.raises(ValueError):
        QuadratureConfig(initial_width=0.0)


# ---------------------------------------------------------------------------
# decay hypothesis
# ---------------------------------------------------------------------------

def test_decay_check_antisymmetric_function_holds(two_state):
    check = decay_check(two_state.spec, two_state.model, 2.0, F)
    assert check.holds
    assert check.component_means == (0.0,)


def test_decay_check_constant_violated(two_state):
    check = decay_check(two_state.spec, two_state.model, 2.0, np.ones(2))
    assert not check.holds
    assert check.component_means == (1.0,)


def test_decay_check_per_component():
    rng = np.random.default_rng(17)
    prep = prepare(two_component_model(rng))
    m = prep.model.measure
    # globally zero-mean but componentwise means +-1
    f = np.empty(6)
    f[:3] = 1.0
    f[3:] = -m[:3].sum() / m[3:].sum()
    check = decay_check(prep.spec, prep.model, 2.0, f)
    assert not check.holds
    assert check.component_means[0] == pytest.approx(1.0)
    assert abs(f @ m) < 1e-12


# ---------------------------------------------------------------------------
# crossing detection
# ---------------------------------------------------------------------------

def test_zero_crossings_two_state():
    prep = prepare(Model(np.ones(2), np.array([[0.0, 1.0], [1.0, 0.0]])))
    # f = (1, -3): component 0 evolves as -1 + 2 e^{-2t}, crossing at ln(2)/2
    f = np.array([1.0, -3.0])
    times = zero_crossing_times(prep.spec, f, 5.0)
    assert times.size == 1
    assert times[0] == pytest.approx(np.log(2.0) / 2.0, abs=1e-10)


def test_zero_crossings_none_for_sign_definite(two_state):
    times = zero_crossing_times(two_state.spec, F, 5.0)
    assert times.size == 0


# ---------------------------------------------------------------------------
# finite horizon identity
# ---------------------------------------------------------------------------

def test_finite_horizon_two_state_closed_form(two_state):
    report = finite_horizon_check(two_state.spec, two_state.model, 3.0, F, 1.0)
    assert report.lhs == pytest.approx(2.0 * (1 - np.exp(-6.0)), rel=1e-14)
    assert report.rel_residual <= 1e-10
    assert report.tail_bound == 0.0


def test_finite_horizon_constant_function(two_state):
    report = finite_horizon_check(two_state.spec, two_state.model, 2.0, np.ones(2), 1.0)
    assert report.lhs == pytest.approx(0.0, abs=1e-14)
    assert report.rhs == pytest.approx(0.0, abs=1e-14)


def test_finite_horizon_small_T_vanishes(two_state):
    report = finite_horizon_check(two_state.spec, two_state.model, 3.0, F, 1e-4)
    # both sides shrink like p * E_p[f] * T = 12 T
    assert abs(report.lhs) < 1.3e-3
    assert abs(report.rhs) < 1.3e-3
    assert report.rel_residual <= 1e-9


def test_finite_horizon_holds_for_nonzero_mean(model_pool):
    rng = np.random.default_rng(23)
    worst = 0.0
    for prep in model_pool[:10]:
        f = rng.standard_normal(prep.model.n) + 0.5
        for p in (1.5, 2.0, 3.0):
            for T in (0.1, 1.0, 10.0):
                report = finite_horizon_check(prep.spec, prep.model, p, f, T)
                worst = max(worst, report.rel_residual)
    assert worst <= 1e-8


def test_finite_horizon_rejects_bad_T(two_state):
    with pytest.raises(ValueError):
        finite_horizon_check(two_state.spec, two_state.model, 2.0, F, 0.0)


# ---------------------------------------------------------------------------
# full identity
# ---------------------------------------------------------------------------

def test_full_identity_two_state(two_state):
    for p in (1.2, 1.5, 2.0, 3.0, 7.0):
        report = hardy_stein_verify(two_state.spec, two_state.model, p, F)
        assert report.lhs == pytest.approx(2.0)
        assert report.rel_residual <= 1e-9
        assert report.hypothesis_ii.holds


def test_full_identity_zero_function(two_state):
    report = hardy_stein_verify(two_state.spec, two_state.model, 3.0, np.zeros(2))
    assert report.lhs == 0.0
    assert report.rhs == 0.0
    assert report.rel_residual == 0.0


def test_full_identity_p2_spectral_oracle(model_pool):
    # p = 2: rhs must match the spectral mass sum over nonzero modes
    rng = np.random.default_rng(29)
    for prep in model_pool[:8]:
        f = zero_mean(prep.model, rng.standard_normal(prep.model.n))
        report = hardy_stein_verify(prep.spec, prep.model, 2.0, f)
        coeffs = prep.spec.basis.T @ (prep.model.measure * f)
        oracle = float(np.sum(coeffs[prep.spec.eigenvalues < 0.0] ** 2))
        assert report.rhs == pytest.approx(oracle, rel=1e-9)


def test_full_identity_random_zero_mean(model_pool):
    rng = np.random.default_rng(31)
    for prep in model_pool[:10]:
        f = zero_mean(prep.model, rng.standard_normal(prep.model.n))
        for p in (1.5, 2.0, 3.0):
            report = hardy_stein_verify(prep.spec, prep.model, p, f)
            assert report.rel_residual <= 1e-7
            assert report.tail_bound <= 1e-9 * report.lhs
            assert report.min_integrand >= -1e-12 * max(1.0, report.lhs)


def test_violated_hypothesis_prediction(model_pool):
    rng = np.random.default_rng(37)
    for prep in model_pool[:8]:
        f = rng.standard_normal(prep.model.n) + 0.7
        for p in (1.5, 2.0, 3.0):
            report = hardy_stein_verify(prep.spec, prep.model, p, f)
            assert not report.hypothesis_ii.holds
            predicted = report.predicted_longtime_mass
            assert predicted > 0.0
            gap = report.lhs - report.rhs
            assert abs(gap - predicted) <= 1e-7 * predicted


def test_violated_hypothesis_disconnected():
    rng = np.random.default_rng(41)
    prep = prepare(two_component_model(rng))
    m = prep.model.measure
    f = np.empty(6)
    f[:3] = 1.0
    f[3:] = -m[:3].sum() / m[3:].sum()
    report = hardy_stein_verify(prep.spec, prep.model, 3.0, f)
    assert not report.hypothesis_ii.holds
    gap = report.lhs - report.rhs
    assert abs(gap - report.predicted_longtime_mass) <= 1e-7 * report.predicted_longtime_mass


def test_semigroup_shift_consistency(model_pool):
    # rhs(P_s f) must equal rhs(f) minus the [0, s] contribution
    rng = np.random.default_rng(43)
    for prep in model_pool[:5]:
        f = zero_mean(prep.model, rng.standard_normal(prep.model.n))
        p, s = 3.0, 0.4
        full = hardy_stein_verify(prep.spec, prep.model, p, f)
        shifted = hardy_stein_verify(
            prep.spec, prep.model, p, apply_pt(prep.spec, s, f)
        )
        head = finite_horizon_check(prep.spec, prep.model, p, f, s)
        assert abs((full.rhs - shifted.rhs) - head.rhs) <= 1e-8 * max(full.lhs, 1e-300)


def test_rhs_monotone_in_horizon(model_pool):
    rng = np.random.default_rng(47)
    prep = model_pool[0]
    f = zero_mean(prep.model, rng.standard_normal(prep.model.n))
    p = 2.5
    full = hardy_stein_verify(prep.spec, prep.model, p, f)
    prev = 0.0
    for T in (0.25, 0.5, 1.0, 2.0, 4.0):
        rhs = finite_horizon_check(prep.spec, prep.model, p, f, T).rhs
        assert rhs >= prev - 1e-12 * full.lhs
        assert rhs <= full.lhs * (1 + 1e-10)
        prev = rhs


def test_no_edge_model_verify():
    prep = prepare(Model(np.ones(3), np.zeros((3, 3))))
    f = np.array([1.0, -1.0, 0.0])
    report = hardy_stein_verify(prep.spec, prep.model, 2.0, f)
    assert not report.hypothesis_ii.holds  # each state is its own component
    assert report.rhs == 0.0
    assert report.predicted_longtime_mass == pytest.approx(report.lhs)


def test_verbose_panel_table(two_state):
    report = hardy_stein_verify(
        two_state.spec, two_state.model, 2.0, F, with_panels=True
    )
    assert report.panels is not None
    assert len(report.panels) == report.panels_used
    total = sum(row.value for row in report.panels)
    assert total == pytest.approx(report.rhs, rel=1e-12)
