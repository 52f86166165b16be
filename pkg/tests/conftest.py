"""Shared fixtures: reference states, fitted reference angles, small budgets."""

from __future__ import annotations

import math

import numpy as np
import pytest

from bellopt.inequality import RankClass
from bellopt.optimizer import OptimizerConfig, multistart
from bellopt.quantum import PovmAngles, make_state


def fit_povm_angles(m0: np.ndarray, m1: np.ndarray) -> PovmAngles:
    """Invert the element parametrization for printed reference matrices."""
    st2 = m1[0, 0].real
    ct2 = 1.0 - st2
    cv2 = m0[0, 0].real / ct2
    ce2 = abs(m1[0, 1])
    cg2 = abs(m0[0, 1]) / ce2 if ce2 > 0 else 0.0
    sx2 = m1[1, 1].real
    cx2 = 1.0 - sx2
    cm2 = m0[1, 1].real / cx2

    def angle_from_cos2(x: float) -> float:
        return math.acos(math.sqrt(min(max(x, 0.0), 1.0)))

    return PovmAngles(
        theta=math.asin(math.sqrt(min(max(st2, 0.0), 1.0))),
        varphi=angle_from_cos2(cv2),
        eta_p=angle_from_cos2(ce2),
        gamma=angle_from_cos2(cg2),
        chi=math.asin(math.sqrt(min(max(sx2, 0.0), 1.0))),
        mu=angle_from_cos2(cm2),
        omega0=math.atan2((-m0[0, 1]).imag, (-m0[0, 1]).real),
        omega1=math.atan2(m1[0, 1].imag, m1[0, 1].real),
    )


# reference optimal elements reported for the weight-3 maximal violation
VIOLATION_C3_M0 = np.array([[0.8890, -0.0818 + 0.1047j], [-0.0818 - 0.1047j, 0.0198]])
VIOLATION_C3_M1 = np.array([[0.0553, -0.1023 - 0.0995j], [-0.1023 + 0.0995j, 0.3680]])

# reference threshold-optimal elements at weight 100, maximally entangled state
EFFICIENCY_C100_M0 = np.array([[0.8009, -0.0844 - 0.0262j], [-0.0844 + 0.0262j, 0.0102]])
EFFICIENCY_C100_M1 = np.array([[0.0703, -0.0785 - 0.1673j], [-0.0785 + 0.1673j, 0.4889]])


@pytest.fixture(scope="session")
def mes():
    return make_state(1.0)


@pytest.fixture(scope="session")
def ch_optimal_settings(mes):
    """Settings maximizing the two-setting block alone, found by a small search.

    The R00 class zeroes the three-outcome block, so its maximum at weight 1
    is exactly the two-setting maximum.
    """
    config = OptimizerConfig(starts=120, seed=2024, max_iters=800,
                             measurement_class=RankClass.R00)
    record = multistart(config, 1.0, mes)
    assert record.status == "ok"
    expected = (math.sqrt(2.0) - 1.0) / 2.0
    assert abs(record.best_value - expected) < 1e-5
    s = record.scenario
    return s.alice0, s.alice1, s.bob0, s.bob1
