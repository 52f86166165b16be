"""The functional, its projective variants, and the deterministic bound."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from bellopt.inequality import (
    OUTCOME1_WEIGHT,
    PROJECTIVE_CLASSES,
    RankClass,
    Scenario,
    bob_overlap,
    i3_value,
    ich3_value,
    ich_value,
    lhv_max,
    projective_variant_params,
    rank_profile,
    scenario_terms,
)
from bellopt.quantum import (
    IDENTITY,
    Povm3,
    PovmAngles,
    ProjectiveSetting,
    ZERO_OP,
    make_state,
    povm_from_angles,
)
from conftest import EFFICIENCY_C100_M0, EFFICIENCY_C100_M1


def random_setting(rng) -> ProjectiveSetting:
    return ProjectiveSetting(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))


def random_feasible_povm(rng) -> Povm3:
    while True:
        povm = povm_from_angles(PovmAngles(*rng.uniform(0, 2 * np.pi, 8)))
        if min(povm.min_eigenvalues()) >= -1e-12:
            return povm


def random_scenario(rng, c=3.0, ratio=None) -> Scenario:
    return Scenario(
        c=c,
        state=make_state(rng.uniform(0, 2) if ratio is None else ratio),
        alice0=random_setting(rng),
        alice1=random_setting(rng),
        bob0=random_setting(rng),
        bob1=random_setting(rng),
        alice2=random_feasible_povm(rng),
    )


class TestChBlock:
    def test_coincident_settings_never_positive(self):
        """With all four settings equal the block is 2p - pa - pb <= 0."""
        rng = np.random.default_rng(5)
        for _ in range(100):
            s = random_setting(rng)
            scenario = Scenario(
                c=1.0, state=make_state(rng.uniform(0, 2)),
                alice0=s, alice1=s, bob0=s, bob1=s,
                alice2=random_feasible_povm(rng),
            )
            assert ich_value(scenario) <= 1e-12

    def test_deterministic_product_scenario_is_zero(self):
        up = ProjectiveSetting(np.pi / 4, 0.0)     # outcome 0 on |0>
        down = ProjectiveSetting(3 * np.pi / 4, 0.0)  # outcome 0 on |1>
        scenario = Scenario(
            c=3.0, state=make_state(0.0),  # state |10>
            alice0=down, alice1=down, bob0=up, bob1=up,
            alice2=Povm3(ZERO_OP, ZERO_OP, IDENTITY),
        )
        assert ich_value(scenario) == pytest.approx(0.0, abs=1e-12)


class TestExtraBlock:
    def test_identity_middle_element(self):
        """alice2 = {0, identity, 0} with equal Bob settings scores -(1-1/sqrt 2)."""
        rng = np.random.default_rng(9)
        bob = random_setting(rng)
        scenario = Scenario(
            c=1.0, state=make_state(rng.uniform(0, 2)),
            alice0=random_setting(rng), alice1=random_setting(rng),
            bob0=bob, bob1=bob,
            alice2=Povm3(ZERO_OP, IDENTITY, ZERO_OP),
        )
        assert i3_value(scenario) == pytest.approx(-OUTCOME1_WEIGHT, abs=1e-12)

    def test_identity_first_element(self):
        """alice2 = {identity, 0, 0} scores pb00 + pb01 - 1 for any state."""
        rng = np.random.default_rng(13)
        for _ in range(50):
            scenario = Scenario(
                c=1.0, state=make_state(rng.uniform(0, 2)),
                alice0=random_setting(rng), alice1=random_setting(rng),
                bob0=random_setting(rng), bob1=random_setting(rng),
                alice2=Povm3(IDENTITY, ZERO_OP, ZERO_OP),
            )
            t = scenario_terms(scenario)
            assert i3_value(scenario) == pytest.approx(t.pb00 + t.pb01 - 1.0, abs=1e-12)


class TestComposition:
    def test_weighted_sum_identity(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            scenario = random_scenario(rng, c=float(rng.uniform(0.5, 20)))
            combined = ich3_value(scenario)
            parts = scenario.c * ich_value(scenario) + i3_value(scenario)
            assert combined == pytest.approx(parts, abs=1e-12)


class TestProjectiveVariants:
    def _settings(self, rng):
        return {
            "alice0": random_setting(rng), "alice1": random_setting(rng),
            "bob0": random_setting(rng), "bob1": random_setting(rng),
        }

    def test_rank10_complement(self, mes):
        rng = np.random.default_rng(31)
        scenario = projective_variant_params(
            RankClass.R10, c=3.0, state=mes, **self._settings(rng),
            m0_setting=ProjectiveSetting(np.pi / 4, 0.0),
        )
        np.testing.assert_allclose(scenario.alice2.m0, np.diag([1.0, 0.0]), atol=1e-12)
        np.testing.assert_allclose(scenario.alice2.m1, 0.0, atol=1e-12)
        np.testing.assert_allclose(scenario.alice2.m2, np.diag([0.0, 1.0]), atol=1e-12)

    def test_rank00_forced_identity(self, mes):
        rng = np.random.default_rng(37)
        scenario = projective_variant_params(RankClass.R00, c=3.0, state=mes,
                                             **self._settings(rng))
        np.testing.assert_allclose(scenario.alice2.m2, IDENTITY, atol=1e-12)

    def test_rank11_defaults_to_orthogonal_complement(self, mes):
        rng = np.random.default_rng(41)
        setting = random_setting(rng)
        scenario = projective_variant_params(
            RankClass.R11, c=3.0, state=mes, **self._settings(rng), m0_setting=setting)
        np.testing.assert_allclose(scenario.alice2.m1, IDENTITY - scenario.alice2.m0,
                                   atol=1e-12)
        np.testing.assert_allclose(scenario.alice2.m2, 0.0, atol=1e-12)

    def test_rank11_rejects_non_orthogonal_pair(self, mes):
        rng = np.random.default_rng(43)
        with pytest.raises(ValueError, match="positive semidefinite"):
            projective_variant_params(
                RankClass.R11, c=3.0, state=mes, **self._settings(rng),
                m0_setting=ProjectiveSetting(np.pi / 4, 0.0),
                m1_setting=ProjectiveSetting(np.pi / 3, 0.0),
            )

    def test_requires_settings_for_rank1_slots(self, mes):
        rng = np.random.default_rng(47)
        with pytest.raises(ValueError, match="m0_setting"):
            projective_variant_params(RankClass.R10, c=3.0, state=mes,
                                      **self._settings(rng))
        with pytest.raises(ValueError, match="m1_setting"):
            projective_variant_params(RankClass.R01, c=3.0, state=mes,
                                      **self._settings(rng))

    def test_general_class_rejected(self, mes):
        rng = np.random.default_rng(53)
        with pytest.raises(ValueError):
            projective_variant_params(RankClass.GENERAL, c=3.0, state=mes,
                                      **self._settings(rng))


class TestLhvBound:
    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 100.0])
    def test_enumerated_maximum_is_one(self, c):
        assert lhv_max(c) == 1.0

    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ValueError):
            lhv_max(0.0)

    def test_deterministic_quantum_scenarios_obey_bound(self):
        """Diagonal measurements on a product state realize only local values."""
        up = ProjectiveSetting(np.pi / 4, 0.0)
        down = ProjectiveSetting(3 * np.pi / 4, 0.0)
        basis = {0: up, 1: down}
        diag_elements = {
            0: ZERO_OP, 1: np.diag([1.0, 0.0]).astype(complex),
            2: np.diag([0.0, 1.0]).astype(complex), 3: IDENTITY,
        }
        state = make_state(0.0)
        worst = -np.inf
        for a0, a1, b0, b1 in itertools.product((0, 1), repeat=4):
            for d0, d1 in itertools.product(range(4), range(4)):
                m0, m1 = diag_elements[d0], diag_elements[d1]
                m2 = IDENTITY - m0 - m1
                if np.linalg.eigvalsh(m2).min() < -1e-12:
                    continue
                scenario = Scenario(
                    c=3.0, state=state,
                    alice0=basis[a0], alice1=basis[a1],
                    bob0=basis[b0], bob1=basis[b1],
                    alice2=Povm3(m0, m1, m2),
                )
                worst = max(worst, ich3_value(scenario))
                assert ich3_value(scenario) <= 1.0 + 1e-9
        assert worst == pytest.approx(1.0, abs=1e-9)  # the bound is attained


class TestBobOverlap:
    def test_equal_settings(self):
        rng = np.random.default_rng(61)
        s = random_setting(rng)
        scenario = Scenario(c=1.0, state=make_state(1.0), alice0=s, alice1=s,
                            bob0=s, bob1=s, alice2=random_feasible_povm(rng))
        assert bob_overlap(scenario) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_settings(self):
        rng = np.random.default_rng(67)
        s = ProjectiveSetting(0.3, 1.1)
        t = ProjectiveSetting(0.3 + np.pi / 2, 1.1)
        scenario = Scenario(c=1.0, state=make_state(1.0), alice0=s, alice1=s,
                            bob0=s, bob1=t, alice2=random_feasible_povm(rng))
        assert bob_overlap(scenario) == pytest.approx(0.0, abs=1e-12)

    def test_ch_optimal_settings_half_overlap(self, mes, ch_optimal_settings):
        _, _, bob0, bob1 = ch_optimal_settings
        rng = np.random.default_rng(71)
        scenario = Scenario(c=1.0, state=mes, alice0=bob0, alice1=bob0,
                            bob0=bob0, bob1=bob1, alice2=random_feasible_povm(rng))
        assert bob_overlap(scenario) == pytest.approx(0.5, abs=2e-3)


class TestRankProfile:
    def test_projective_structure(self):
        povm = Povm3(np.diag([1.0, 0.0]).astype(complex),
                     np.diag([0.0, 1.0]).astype(complex), ZERO_OP)
        assert rank_profile(povm).ranks == (1, 1, 0)

    def test_reported_threshold_optimum_is_rank2(self):
        m2 = IDENTITY - EFFICIENCY_C100_M0 - EFFICIENCY_C100_M1
        povm = Povm3(EFFICIENCY_C100_M0, EFFICIENCY_C100_M1, m2)
        profile = rank_profile(povm, rank_tol=1e-4)
        assert profile.ranks == (2, 2, 2)
        flat = np.sort(np.asarray(profile.eigenvalues))
        assert flat[0] == pytest.approx(0.000369, abs=1.5e-4)
        assert np.sort(flat)[-1] == pytest.approx(0.810611, abs=1.5e-4)


class TestScenarioValidation:
    def test_rejects_nonpositive_weight(self, mes):
        rng = np.random.default_rng(73)
        with pytest.raises(ValueError, match="positive"):
            Scenario(c=-1.0, state=mes, alice0=random_setting(rng),
                     alice1=random_setting(rng), bob0=random_setting(rng),
                     bob1=random_setting(rng), alice2=random_feasible_povm(rng))

    def test_rejects_incomplete_elements(self, mes):
        rng = np.random.default_rng(79)
        bad = Povm3(IDENTITY, IDENTITY, IDENTITY)
        with pytest.raises(ValueError, match="identity"):
            Scenario(c=1.0, state=mes, alice0=random_setting(rng),
                     alice1=random_setting(rng), bob0=random_setting(rng),
                     bob1=random_setting(rng), alice2=bad)

    def test_rejects_indefinite_elements(self, mes):
        rng = np.random.default_rng(83)
        sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        bad = Povm3(sx, IDENTITY - sx, ZERO_OP)
        with pytest.raises(ValueError, match="semidefinite"):
            Scenario(c=1.0, state=mes, alice0=random_setting(rng),
                     alice1=random_setting(rng), bob0=random_setting(rng),
                     bob1=random_setting(rng), alice2=bad)
