import numpy as np
import pytest

from jumplab import (
    approx_form,
    approx_pform_kernel,
    comparability_scan,
    complete_graph,
    dirichlet_form,
    halfpower_inclusion_check,
    pform_generator,
    pform_jump,
    pform_limit,
    signed_power,
    three_representation_report,
)

from conftest import prepare


F = np.array([1.0, -1.0])


def test_dirichlet_two_state_value(two_state):
    assert dirichlet_form(two_state.model, F, F) == pytest.approx(4.0)


def test_dirichlet_constant_annihilated(two_state):
    v = np.array([0.3, -2.0])
    assert dirichlet_form(two_state.model, np.ones(2), v) == 0.0


def test_dirichlet_symmetric_bilinear(model_pool):
    rng = np.random.default_rng(2)
    for prep in model_pool[:8]:
        u = rng.standard_normal(prep.model.n)
        v = rng.standard_normal(prep.model.n)
        assert dirichlet_form(prep.model, u, v) == pytest.approx(
            dirichlet_form(prep.model, v, u), rel=1e-12, abs=1e-300
        )
        assert dirichlet_form(prep.model, u, u) >= 0.0


def test_approx_form_two_state_closed_form(two_state):
    for t in (0.1, 0.7, 2.0):
        val = approx_form(two_state.spec, t, F, F)
        assert val == pytest.approx((1 - np.exp(-2 * t)) * 2 / t, rel=1e-13)


def test_approx_form_constant_is_zero(two_state):
    assert approx_form(two_state.spec, 0.5, np.ones(2), np.ones(2)) == pytest.approx(
        0.0, abs=1e-14
    )


def test_approx_form_rejects_nonpositive_t(two_state):
    with pytest.raises(ValueError):
        approx_form(two_state.spec, 0.0, F, F)


def test_approx_form_converges_to_dirichlet(model_pool):
    rng = np.random.default_rng(3)
    for prep in model_pool[:6]:
        u = rng.standard_normal(prep.model.n)
        energy = dirichlet_form(prep.model, u, u)
        val = approx_form(prep.spec, 1e-8, u, u)
        assert val == pytest.approx(energy, rel=1e-6)


def test_kernel_representations_agree(model_pool):
    rng = np.random.default_rng(4)
    for prep in model_pool[:8]:
        u = rng.standard_normal(prep.model.n)
        for p in (1.5, 2.0, 3.0):
            v = signed_power(u, p - 1.0)
            for t in (1e-3, 0.1, 1.0):
                direct = approx_form(prep.spec, t, u, v)
                breg = approx_pform_kernel(prep.spec, t, p, u, "bregman")
                symm = approx_pform_kernel(prep.spec, t, p, u, "symmetrized")
                scale = max(abs(direct), 1e-300)
                assert abs(breg - direct) <= 1e-10 * scale
                assert abs(symm - direct) <= 1e-10 * scale
                assert breg >= -1e-12 * scale


def test_kernel_representation_two_state_closed_form(two_state):
    # off-diagonal kernel mass (1 - e^{-2t})/2 against F_3(1,-1) = F_3(-1,1) = 6
    for t in (0.2, 1.0):
        val = approx_pform_kernel(two_state.spec, t, 3.0, F, "bregman")
        assert val == pytest.approx((1 - np.exp(-2 * t)) * 2 / t, rel=1e-12)


def test_kernel_variant_name_checked(two_state):
    with pytest.raises(ValueError, match="variant"):
        approx_pform_kernel(two_state.spec, 0.5, 2.0, F, "other")


def test_pform_limit_collapses_to_dirichlet_at_p2(small_pool):
    rng = np.random.default_rng(5)
    for prep in small_pool[:8]:
        u = rng.standard_normal(prep.model.n)
        report = pform_limit(prep.spec, 2.0, u)
        assert report.converged
        energy = dirichlet_form(prep.model, u, u)
        assert report.value_limit == pytest.approx(energy, rel=1e-8, abs=1e-12)


def test_pform_limit_two_state_any_p(two_state):
    for p in (1.3, 2.0, 3.5, 7.0):
        report = pform_limit(two_state.spec, p, F)
        assert report.converged
        assert report.value_limit == pytest.approx(4.0, rel=1e-8)


def test_pform_limit_constant_converges_to_zero(two_state):
    report = pform_limit(two_state.spec, 3.0, np.ones(2))
    assert report.converged
    assert report.value_limit == 0.0


def test_pform_limit_schedule_validation(two_state):
    with pytest.raises(ValueError, match="decreasing"):
        pform_limit(two_state.spec, 2.0, F, [0.1, 0.2, 0.05, 0.01])
    with pytest.raises(ValueError, match="4 points"):
        pform_limit(two_state.spec, 2.0, F, [0.1, 0.05])


def test_pform_generator_values(two_state):
    assert pform_generator(two_state.gen, 2.0, F) == pytest.approx(4.0)
    for p in (1.5, 3.0, 7.0):
        assert pform_generator(two_state.gen, p, F) == pytest.approx(4.0)
    assert pform_generator(two_state.gen, 3.0, np.ones(2)) == pytest.approx(
        0.0, abs=1e-14
    )


def test_pform_generator_matches_dirichlet_at_p2(model_pool):
    rng = np.random.default_rng(6)
    for prep in model_pool[:8]:
        u = rng.standard_normal(prep.model.n)
        energy = dirichlet_form(prep.model, u, u)
        assert abs(pform_generator(prep.gen, 2.0, u) - energy) <= 1e-12 * (1 + energy)


def test_pform_jump_values(two_state):
    assert pform_jump(two_state.model, 3.0, F) == pytest.approx(4.0)
    assert pform_jump(two_state.model, 3.0, np.full(2, 1.7)) == 0.0


def test_pform_jump_matches_dirichlet_at_p2(model_pool):
    rng = np.random.default_rng(7)
    for prep in model_pool[:8]:
        u = rng.standard_normal(prep.model.n)
        energy = dirichlet_form(prep.model, u, u)
        assert abs(pform_jump(prep.model, 2.0, u) - energy) <= 1e-12 * (1 + energy)


def test_three_representation_agreement(small_pool):
    rng = np.random.default_rng(8)
    for prep in small_pool[:12]:
        u = rng.standard_normal(prep.model.n)
        p = float(rng.uniform(1.2, 7.0))
        rep = three_representation_report(prep.gen, prep.spec, p, u)
        assert rep.converged
        scale = 1 + abs(rep.value_generator)
        assert abs(rep.value_limit - rep.value_generator) <= 1e-7 * scale
        assert abs(rep.value_generator - rep.value_jump) <= 1e-7 * scale
        for v in (rep.value_limit, rep.value_generator, rep.value_jump):
            assert v >= -1e-10 * scale


def test_nonnegativity_of_forms(small_pool):
    rng = np.random.default_rng(9)
    for prep in small_pool[:10]:
        u = rng.standard_normal(prep.model.n)
        p = float(rng.uniform(1.1, 8.0))
        assert pform_jump(prep.model, p, u) >= 0.0
        assert approx_form(prep.spec, 0.3, u, signed_power(u, p - 1.0)) >= 0.0


def test_halfpower_inclusion_two_state(two_state):
    for p in (1.5, 2.0, 3.0, 7.0):
        energy, ok = halfpower_inclusion_check(two_state.model, p, F)
        assert energy == pytest.approx(4.0)
        assert ok


def test_halfpower_inclusion_p2_equality():
    prep = prepare(complete_graph(3, 0.8))
    u = np.array([0.5, -1.0, 2.0])
    energy, ok = halfpower_inclusion_check(prep.model, 2.0, u)
    # p = 2: the bound reads E(u,u) <= E_2[u] with c = 1, an equality
    assert ok
    assert energy == pytest.approx(pform_jump(prep.model, 2.0, u), rel=1e-12)


def test_halfpower_inclusion_constant(two_state):
    energy, ok = halfpower_inclusion_check(two_state.model, 3.0, np.ones(2))
    assert energy == 0.0
    assert ok


def test_halfpower_inclusion_random(model_pool):
    rng = np.random.default_rng(10)
    for prep in model_pool[:10]:
        u = rng.standard_normal(prep.model.n)
        p = float(rng.uniform(1.1, 7.0))
        scan = comparability_scan(p)
        energy, ok = halfpower_inclusion_check(prep.model, p, u, scan)
        assert ok
        assert energy >= 0.0
