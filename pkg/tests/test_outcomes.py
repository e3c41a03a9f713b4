import numpy as np
import pytest

from interfere.core.exceptions import ConfigValidationError, ParameterError
from interfere.core.graph import Graph, distance_shells
from interfere.core.outcomes import (DecayModel, EateEstimate, FunctionOracle, SutvaOracle, build_decay_model,
                                     decay_outcomes, eate_closed_form, eate_enumeration, eate_monte_carlo,
                                     exposure_fractions, sample_constant_effects, sample_direct_effects)
from tests.conftest import decay_on, random_case


class TestExposure:
    def test_path_fractions(self, p3):
        z = exposure_fractions(distance_shells(p3, 2), np.array([1, 0, 1]))
        assert z[1].tolist() == [0.0, 1.0, 0.0]
        assert z[2].tolist() == [1.0, 0.0, 1.0]

    def test_all_treated(self, small_er):
        shells = distance_shells(small_er, 3)
        z = exposure_fractions(shells, np.ones(small_er.n))
        assert np.array_equal(z[1:], (shells.sizes[1:] > 0).astype(float))

    def test_isolated_node_is_unexposed(self):
        shells = distance_shells(Graph.from_edges(3, [(0, 1)]), 1)
        assert exposure_fractions(shells, np.ones(3))[1, 2] == 0.0


class TestDecayModel:
    def test_path_example(self, p3):
        model = decay_on(p3, 1, 0.5, alpha1=np.zeros(3))
        y0, y1, y = decay_outcomes(model, np.array([1, 0, 1]))
        assert y0[1] == pytest.approx(0.5)
        assert y1[1] == pytest.approx(1.0)
        assert y[1] == pytest.approx(0.5)
        assert y0[0] == 0.0

    def test_rho_zero_is_no_interference(self, p5):
        rng = np.random.default_rng(0)
        model = decay_on(p5, 0, 0.5, rng.random(5), rng.random(5))
        w = np.array([1, 0, 1, 1, 0])
        y0, y1, _ = decay_outcomes(model, w)
        assert np.array_equal(y0, model.alpha0)
        assert np.array_equal(y1, model.alpha1)

    def test_observed_outcome_picks_the_assigned_arm(self, random_decay_model):
        rng = np.random.default_rng(3)
        for _ in range(100):
            w = (rng.random(random_decay_model.n) < 0.5).astype(int)
            y0, y1, y = decay_outcomes(random_decay_model, w)
            assert np.array_equal(y, np.where(w == 1, y1, y0))

    def test_own_treatment_does_not_move_potential_outcomes(self, random_decay_model):
        w = np.array([1, 0, 1, 1, 0, 0, 1, 0, 1, 1])
        y0, y1 = random_decay_model.potential_outcomes(w)
        for i in range(random_decay_model.n):
            flipped = w.copy()
            flipped[i] = 1 - flipped[i]
            f0, f1 = random_decay_model.potential_outcomes(flipped)
            assert f0[i] == pytest.approx(y0[i])
            assert f1[i] == pytest.approx(y1[i])

    def test_fast_path_matches_generic_counterfactuals(self, random_decay_model):
        w = np.array([[1, 0, 1, 1, 0, 0, 1, 0, 1, 1], [0] * 10])
        fast = random_decay_model.potential_outcomes_batch(w)
        generic = FunctionOracle(10, random_decay_model.evaluate).potential_outcomes_batch(w)
        assert np.allclose(fast[0], generic[0])
        assert np.allclose(fast[1], generic[1])

    @pytest.mark.parametrize('gamma', [0.0, 1.0, 1.5])
    def test_gamma_range(self, p3, gamma):
        with pytest.raises(ParameterError):
            decay_on(p3, 1, gamma)

    def test_config_section_rebuilds_the_model(self, small_er):
        model = build_decay_model(small_er, 2, 0.4, seed=12)
        again = DecayModel.from_config(small_er, model.to_config())
        assert np.array_equal(again.alpha0, model.alpha0)
        assert np.array_equal(again.alpha1, model.alpha1)
        assert again.gamma == 0.4

    def test_config_section_missing_keys(self, small_er):
        with pytest.raises(ConfigValidationError, match="seed"):
            DecayModel.from_config(small_er, {'gamma': 0.5, 'rho_max': 1})

    def test_unknown_direct_effect(self, small_er):
        with pytest.raises(ParameterError):
            build_decay_model(small_er, 1, 0.5, seed=0, direct_effect='random')


class TestDirectEffects:
    def test_exponential_means(self):
        alpha0, alpha1 = sample_direct_effects(100000, seed=1)
        assert abs(alpha1.mean() - 1 / 0.3) < 4 * (1 / 0.3) / np.sqrt(100000)
        assert abs(alpha0.mean() - 2.0) < 4 * 2.0 / np.sqrt(100000)

    def test_instances_differ(self):
        a, _ = sample_direct_effects(20, seed=1, instance=0)
        b, _ = sample_direct_effects(20, seed=1, instance=1)
        assert not np.array_equal(a, b)

    def test_means_must_be_positive(self):
        with pytest.raises(ParameterError):
            sample_direct_effects(10, mean_treated=0.0)

    def test_constant_effects(self):
        alpha0, alpha1 = sample_constant_effects(50, 1.25, seed=3)
        assert np.allclose(alpha1 - alpha0, 1.25)


class TestEate:
    def test_no_interference(self, p5):
        model = decay_on(p5, 0, 0.5)
        assert eate_closed_form(model, 0.5).value == pytest.approx(1.0)

    def test_path_example(self, p3):
        model = decay_on(p3, 1, 0.5)
        assert eate_closed_form(model, 0.5).value == pytest.approx(1.25)
        assert eate_enumeration(model, 0.5).value == pytest.approx(1.25, abs=1e-12)

    @pytest.mark.parametrize('case', range(20))
    def test_closed_form_matches_enumeration(self, case):
        model, pi = random_case(case, max_n=12)
        exact = eate_enumeration(model, pi).value
        assert eate_closed_form(model, pi).value == pytest.approx(exact, rel=1e-12, abs=1e-12)

    def test_vanishing_gamma(self, random_decay_model):
        model = DecayModel(shells=random_decay_model.shells, alpha0=random_decay_model.alpha0,
                           alpha1=random_decay_model.alpha1, gamma=1e-12)
        direct = float(np.mean(model.alpha1 - model.alpha0))
        assert eate_closed_form(model, 0.5).value == pytest.approx(direct, abs=1e-9)

    def test_monotone_in_gamma_and_rho(self, small_er):
        values = [eate_closed_form(build_decay_model(small_er, rho, gamma, seed=0), 0.5).value
                  for rho in (1, 2, 3) for gamma in (0.2, 0.5, 0.8)]
        grid = np.array(values).reshape(3, 3)
        assert (np.diff(grid, axis=1) > 0).all()
        assert (np.diff(grid, axis=0) >= 0).all()

    def test_monte_carlo_agrees_with_closed_form(self, ws_graph):
        model = build_decay_model(ws_graph, 2, 0.7, seed=4)
        exact = eate_closed_form(model, 0.5).value
        mc = eate_monte_carlo(model, 0.5, replicates=400, seed=9)
        assert mc.replicates == 400
        assert abs(mc.value - exact) <= 4 * mc.mc_standard_error

    def test_monte_carlo_without_interference_has_zero_error(self, sutva_oracle):
        mc = eate_monte_carlo(sutva_oracle, 0.5, replicates=50, seed=0)
        assert mc.mc_standard_error == 0.0
        assert mc.value == pytest.approx(eate_enumeration(sutva_oracle, 0.5).value)

    def test_monte_carlo_needs_two_replicates(self, sutva_oracle):
        with pytest.raises(ParameterError):
            eate_monte_carlo(sutva_oracle, 0.5, replicates=1, seed=0)

    def test_estimate_reports_error_only_for_monte_carlo(self):
        with pytest.raises(ParameterError):
            EateEstimate(value=1.0, method='closed_form', mc_standard_error=0.1)

    def test_sutva_oracle_enumeration(self):
        oracle = SutvaOracle(np.zeros(4), np.arange(4.0))
        assert eate_enumeration(oracle, 0.3).value == pytest.approx(1.5)
