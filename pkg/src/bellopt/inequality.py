"""The weighted CH-plus-three-outcome Bell functional and its projective variants.

Alice holds three settings (two binary projective, one three-outcome POVM),
Bob two binary projective settings. The functional is ``c * ch + extra`` with
local deterministic bound 1 for every weight ``c > 0``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .quantum import (
    COMPLETENESS_TOL,
    IDENTITY,
    PSD_TOL,
    Povm3,
    ProjectiveSetting,
    TwoQubitPureState,
    ZERO_OP,
    eigenvalue_pair,
    joint_probability,
    min_eigenvalue,
    projector_pair,
)

#: weight of the outcome-1 marginal in the three-outcome block
OUTCOME1_WEIGHT = 1.0 - 1.0 / math.sqrt(2.0)

DEFAULT_RANK_TOL = 1e-4


class RankClass(enum.Enum):
    """Measurement class of Alice's third setting.

    GENERAL leaves all three elements free; the named classes restrict the
    first two elements to ranks (j, k) with the third completing to identity,
    which recovers the purely projective variants of the inequality.
    """

    GENERAL = "general"
    R00 = "r00"
    R01 = "r01"
    R10 = "r10"
    R11 = "r11"
    R02 = "r02"
    R20 = "r20"

    @property
    def ranks(self) -> tuple[int, int] | None:
        if self is RankClass.GENERAL:
            return None
        return (int(self.value[1]), int(self.value[2]))

    @classmethod
    def from_label(cls, label: str) -> "RankClass":
        try:
            return cls(label.lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown measurement class {label!r}; expected one of {valid}") from None


PROJECTIVE_CLASSES = tuple(m for m in RankClass if m is not RankClass.GENERAL)


@dataclass(frozen=True)
class Scenario:
    """One full measurement layout: weight, state, four settings, one POVM."""

    c: float
    state: TwoQubitPureState
    alice0: ProjectiveSetting
    alice1: ProjectiveSetting
    bob0: ProjectiveSetting
    bob1: ProjectiveSetting
    alice2: Povm3

    def __post_init__(self) -> None:
        if not (math.isfinite(self.c) and self.c > 0.0):
            raise ValueError(f"weight c must be positive and finite, got {self.c!r}")
        if self.alice2.completeness_defect() > COMPLETENESS_TOL:
            raise ValueError("third-setting elements do not sum to identity")
        if min(self.alice2.min_eigenvalues()) < -PSD_TOL:
            raise ValueError("third-setting elements are not positive semidefinite")


@dataclass(frozen=True)
class ScenarioTerms:
    """All outcome probabilities entering the functional, one scenario."""

    p0000: float
    p0001: float
    p0010: float
    p0011: float
    pa00: float
    pb00: float
    p0020: float
    p0021: float
    p1020: float
    p1021: float
    pa02: float
    pa12: float
    pb01: float

    @property
    def ch_joint(self) -> float:
        return self.p0000 + self.p0001 + self.p0010 - self.p0011

    @property
    def extra_joint(self) -> float:
        return self.p0020 + self.p0021 + self.p1020 - self.p1021

    def joint_part(self, c: float) -> float:
        """Sum of all joint-probability terms with their signs."""
        return c * self.ch_joint + self.extra_joint

    def marginal_part(self, c: float) -> float:
        """Sum of all (negative) single-party marginal terms."""
        return -(c * self.pa00 + self.pa02 + OUTCOME1_WEIGHT * self.pa12 + c * self.pb00)


def scenario_terms(scenario: Scenario) -> ScenarioTerms:
    """Evaluate every probability the functional needs via the Born rule."""
    state = scenario.state
    a0 = projector_pair(scenario.alice0)[0]
    a1 = projector_pair(scenario.alice1)[0]
    b0 = projector_pair(scenario.bob0)[0]
    b1 = projector_pair(scenario.bob1)[0]
    m0, m1, _ = scenario.alice2.elements
    return ScenarioTerms(
        p0000=joint_probability(state, a0, b0),
        p0001=joint_probability(state, a0, b1),
        p0010=joint_probability(state, a1, b0),
        p0011=joint_probability(state, a1, b1),
        pa00=joint_probability(state, a0, IDENTITY),
        pb00=joint_probability(state, IDENTITY, b0),
        p0020=joint_probability(state, m0, b0),
        p0021=joint_probability(state, m0, b1),
        p1020=joint_probability(state, m1, b0),
        p1021=joint_probability(state, m1, b1),
        pa02=joint_probability(state, m0, IDENTITY),
        pa12=joint_probability(state, m1, IDENTITY),
        pb01=joint_probability(state, IDENTITY, b1),
    )


def ich_value(scenario: Scenario) -> float:
    """The two-setting CH block (local bound 0)."""
    t = scenario_terms(scenario)
    return t.ch_joint - t.pa00 - t.pb00


def i3_value(scenario: Scenario) -> float:
    """The three-outcome block; element index of the POVM is the outcome label."""
    t = scenario_terms(scenario)
    return t.extra_joint - t.pa02 - OUTCOME1_WEIGHT * t.pa12


def ich3_value(scenario: Scenario) -> float:
    """Full functional ``c * ch + extra`` with local bound 1."""
    return scenario.c * ich_value(scenario) + i3_value(scenario)


def projective_variant_params(
    rank_class: RankClass,
    *,
    c: float,
    state: TwoQubitPureState,
    alice0: ProjectiveSetting,
    alice1: ProjectiveSetting,
    bob0: ProjectiveSetting,
    bob1: ProjectiveSetting,
    m0_setting: ProjectiveSetting | None = None,
    m1_setting: ProjectiveSetting | None = None,
) -> Scenario:
    """Scenario whose third setting is built from projective ingredients.

    Rank-0 slots become the zero operator, rank-1 slots the outcome-0
    projector of the given setting, rank-2 slots the identity; the remaining
    element completes to identity. For the (1,1) class an omitted second
    setting defaults to the orthogonal complement of the first.

    Raises ValueError when required settings are missing or the completion is
    not positive semidefinite.
    """
    if rank_class is RankClass.GENERAL:
        raise ValueError("a projective variant requires a non-general rank class")

    j, k = rank_class.ranks
    if j == 1 and m0_setting is None:
        raise ValueError(f"{rank_class.value} needs m0_setting for its rank-1 first element")
    if k == 1 and rank_class is not RankClass.R11 and m1_setting is None:
        raise ValueError(f"{rank_class.value} needs m1_setting for its rank-1 second element")

    m0 = ZERO_OP if j == 0 else IDENTITY if j == 2 else projector_pair(m0_setting)[0]
    if k == 0:
        m1 = ZERO_OP
    elif k == 2:
        m1 = IDENTITY
    elif m1_setting is not None:
        m1 = projector_pair(m1_setting)[0]
    else:
        m1 = IDENTITY - m0
    m2 = IDENTITY - m0 - m1

    if min_eigenvalue(m2) < -PSD_TOL:
        raise ValueError("completion of the projective variant is not positive semidefinite")
    alice2 = Povm3(m0=np.asarray(m0, dtype=complex), m1=np.asarray(m1, dtype=complex),
                   m2=np.asarray(m2, dtype=complex))
    return Scenario(c=c, state=state, alice0=alice0, alice1=alice1,
                    bob0=bob0, bob1=bob1, alice2=alice2)


def lhv_max(c: float) -> float:
    """Exact maximum over all 48 deterministic local strategies.

    Alice deterministically assigns outcomes to her three settings (2*2*3
    choices), Bob to his two (2*2); every probability is then 0 or 1.
    """
    if not (math.isfinite(c) and c > 0.0):
        raise ValueError(f"weight c must be positive and finite, got {c!r}")
    best = -math.inf
    for a0, a1, a2, b0, b1 in itertools.product((0, 1), (0, 1), (0, 1, 2), (0, 1), (0, 1)):
        ch = (
            float(a0 == 0 and b0 == 0)
            + float(a0 == 0 and b1 == 0)
            + float(a1 == 0 and b0 == 0)
            - float(a1 == 0 and b1 == 0)
            - float(a0 == 0)
            - float(b0 == 0)
        )
        extra = (
            float(a2 == 0 and b0 == 0)
            + float(a2 == 0 and b1 == 0)
            + float(a2 == 1 and b0 == 0)
            - float(a2 == 1 and b1 == 0)
            - float(a2 == 0)
            - OUTCOME1_WEIGHT * float(a2 == 1)
        )
        best = max(best, c * ch + extra)
    return best


def bob_overlap(scenario: Scenario) -> float:
    """Squared inner product of Bob's two outcome-0 states."""
    v3 = scenario.bob0.outcome0_vector()
    v4 = scenario.bob1.outcome0_vector()
    return float(abs(np.vdot(v3, v4)) ** 2)


@dataclass(frozen=True)
class RankProfile:
    """Eigenvalues (ascending per element) and numerical ranks of a POVM."""

    eigenvalues: tuple[float, float, float, float, float, float]
    ranks: tuple[int, int, int]
    rank_tol: float


def rank_profile(povm: Povm3, rank_tol: float = DEFAULT_RANK_TOL) -> RankProfile:
    """Numerical rank of each element: eigenvalues above ``rank_tol`` count."""
    pairs = [eigenvalue_pair(m) for m in povm.elements]
    eigs = tuple(x for pair in pairs for x in pair)
    ranks = tuple(sum(1 for x in pair if x > rank_tol) for pair in pairs)
    return RankProfile(eigenvalues=eigs, ranks=ranks, rank_tol=rank_tol)
