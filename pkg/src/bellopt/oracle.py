"""Independent verification of optimizer outputs.

Nothing here shares search code with the optimizer: random search draws its
own scenarios and evaluates them through explicit 4x4 product operators,
feasibility comes from a dense eigensolver, and the invariance check
conjugates states and operators by Haar-random local unitaries. Agreement
with the optimizer is therefore evidence, not bookkeeping.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import parameters
from .inequality import OUTCOME1_WEIGHT, RankClass, Scenario
from .quantum import IDENTITY, TwoQubitPureState, projector_pair

_CHUNK = 20000


class OracleMethod(enum.Enum):
    RANDOM_SEARCH = "random_search"
    GRID_SEARCH = "grid_search"
    GRADIENT_CHECK = "gradient_check"
    LOCAL_UNITARY = "local_unitary"


@dataclass(frozen=True)
class OracleReport:
    method: OracleMethod
    samples: int
    seed: int
    best_value: float | None = None
    best_params: tuple[float, ...] | None = None
    max_deviation: float | None = None
    non_smooth: bool = False
    status: str = "ok"


def _projectors_from_angles(phi: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """Outcome-0 projectors, shape (n, 2, 2), built from explicit state vectors."""
    s, c = np.sin(phi), np.cos(phi)
    phase = np.exp(1j * nu)
    v = np.stack([(s + phase * c), (s - phase * c)], axis=1) * math.sqrt(0.5)
    return np.einsum("ni,nj->nij", v, v.conj())


def _alice2_elements(draw: np.ndarray, mclass: RankClass) -> np.ndarray:
    """Third-setting elements, shape (n, 3, 2, 2), from class-specific angles."""
    n = draw.shape[0]
    eye = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2))
    out = np.zeros((n, 3, 2, 2), dtype=complex)
    if mclass is RankClass.GENERAL:
        theta, varphi, eta_p, gamma, chi, mu, w0, w1 = draw.T
        ce2 = np.cos(eta_p) ** 2
        z0 = -np.exp(1j * w0) * ce2 * np.cos(gamma) ** 2
        out[:, 0, 0, 0] = np.cos(theta) ** 2 * np.cos(varphi) ** 2
        out[:, 0, 0, 1] = z0
        out[:, 0, 1, 0] = z0.conj()
        out[:, 0, 1, 1] = np.cos(chi) ** 2 * np.cos(mu) ** 2
        z1 = np.exp(1j * w1) * ce2
        out[:, 1, 0, 0] = np.sin(theta) ** 2
        out[:, 1, 0, 1] = z1
        out[:, 1, 1, 0] = z1.conj()
        out[:, 1, 1, 1] = np.sin(chi) ** 2
        out[:, 2] = eye - out[:, 0] - out[:, 1]
        return out
    if mclass in (RankClass.R10, RankClass.R01, RankClass.R11):
        proj = _projectors_from_angles(draw[:, 0], draw[:, 1])
        if mclass is RankClass.R10:
            out[:, 0] = proj
            out[:, 2] = eye - proj
        elif mclass is RankClass.R01:
            out[:, 1] = proj
            out[:, 2] = eye - proj
        else:
            out[:, 0] = proj
            out[:, 1] = eye - proj
        return out
    if mclass is RankClass.R00:
        out[:, 2] = eye
    elif mclass is RankClass.R02:
        out[:, 1] = eye
    else:  # R20
        out[:, 0] = eye
    return out


def _bell_values_born(
    a0: np.ndarray, a1: np.ndarray, b0: np.ndarray, b1: np.ndarray,
    alice2: np.ndarray, c: float, state: TwoQubitPureState,
) -> np.ndarray:
    """Functional values via the Born rule on explicit product operators."""
    psi = state.state_vector().reshape(2, 2)
    psi_c = psi.conj()

    def joint(left, right):
        p = np.einsum("nij,nkl,ik,jl->n", left, right, psi_c, psi).real
        return np.clip(p, 0.0, 1.0)

    def marg_a(left):
        return np.clip(np.einsum("nij,ik,jk->n", left, psi_c, psi).real, 0.0, 1.0)

    def marg_b(right):
        return np.clip(np.einsum("nkl,ik,il->n", right, psi_c, psi).real, 0.0, 1.0)

    m0, m1 = alice2[:, 0], alice2[:, 1]
    ch = joint(a0, b0) + joint(a0, b1) + joint(a1, b0) - joint(a1, b1) - marg_a(a0) - marg_b(b0)
    extra = (joint(m0, b0) + joint(m0, b1) + joint(m1, b0) - joint(m1, b1)
             - marg_a(m0) - OUTCOME1_WEIGHT * marg_a(m1))
    return c * ch + extra


def random_search(
    c: float,
    state: TwoQubitPureState,
    measurement_class: RankClass,
    samples: int,
    seed: int,
) -> OracleReport:
    """Best feasible functional value over uniform random scenario draws.

    Feasibility is decided by a dense eigensolver on the three elements; no
    penalty or gradient information is involved.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    ranges = parameters.start_ranges(measurement_class)
    lo, span = ranges[:, 0], ranges[:, 1] - ranges[:, 0]

    best_value = -math.inf
    best_params: np.ndarray | None = None
    remaining = samples
    while remaining > 0:
        n = min(remaining, _CHUNK)
        remaining -= n
        draw = lo + span * rng.random((n, ranges.shape[0]))
        a0 = _projectors_from_angles(draw[:, 0], draw[:, 1])
        a1 = _projectors_from_angles(draw[:, 2], draw[:, 3])
        b0 = _projectors_from_angles(draw[:, 4], draw[:, 5])
        b1 = _projectors_from_angles(draw[:, 6], draw[:, 7])
        alice2 = _alice2_elements(draw[:, 8:], measurement_class)
        feasible = np.linalg.eigvalsh(alice2).min(axis=(1, 2)) >= -1e-9
        if not feasible.any():
            continue
        values = _bell_values_born(a0, a1, b0, b1, alice2, c, state)
        values = np.where(feasible, values, -np.inf)
        k = int(values.argmax())
        if values[k] > best_value:
            best_value = float(values[k])
            best_params = draw[k].copy()

    if best_params is None:
        return OracleReport(
            method=OracleMethod.RANDOM_SEARCH, samples=samples, seed=seed,
            status="no-feasible-sample",
        )
    return OracleReport(
        method=OracleMethod.RANDOM_SEARCH,
        samples=samples,
        seed=seed,
        best_value=best_value,
        best_params=tuple(parameters.canonicalize(best_params, measurement_class)),
    )


def gradient_check(
    params,
    c: float,
    state: TwoQubitPureState,
    measurement_class: RankClass = RankClass.GENERAL,
    trials: int = 20,
    seed: int = 0,
    fd_step: float = 1e-7,
    penalty_weight: float = 1e4,
    directions: np.ndarray | None = None,
) -> OracleReport:
    """Compare finite-difference directional derivatives against secant slopes.

    The secant uses a step ten times the gradient step; deviations beyond
    1e-3 relative flag the point as non-smooth (expected on the positivity
    boundary, where the penalty kinks).
    """
    x = np.asarray(params, dtype=float).reshape(1, -1)

    def fun(batch):
        return parameters.objective_value(batch, c, state, measurement_class, penalty_weight)

    if directions is None:
        rng = np.random.default_rng(seed)
        directions = rng.normal(size=(trials, x.shape[1]))
    else:
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
    norms = np.linalg.norm(directions, axis=1)
    if (norms == 0.0).any():
        raise ValueError("direction vectors must be nonzero")
    directions = directions / norms[:, None]

    grad = np.empty(x.shape[1])
    for j in range(x.shape[1]):
        xp, xm = x.copy(), x.copy()
        xp[0, j] += fd_step
        xm[0, j] -= fd_step
        grad[j] = (fun(xp)[0] - fun(xm)[0]) / (2.0 * fd_step)

    big = 10.0 * fd_step
    worst = 0.0
    for u in directions:
        directional = float(grad @ u)
        secant = float((fun(x + big * u)[0] - fun(x - big * u)[0]) / (2.0 * big))
        worst = max(worst, abs(directional - secant) / max(abs(secant), 1e-12))
    return OracleReport(
        method=OracleMethod.GRADIENT_CHECK,
        samples=directions.shape[0],
        seed=seed,
        max_deviation=worst,
        non_smooth=worst > 1e-3,
    )


def _haar_unitary(rng: np.random.Generator) -> np.ndarray:
    """2x2 Haar unitary via QR of a complex Gaussian matrix."""
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) * math.sqrt(0.5)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _scenario_operators(scenario: Scenario):
    a0 = projector_pair(scenario.alice0)[0]
    a1 = projector_pair(scenario.alice1)[0]
    b0 = projector_pair(scenario.bob0)[0]
    b1 = projector_pair(scenario.bob1)[0]
    return a0, a1, b0, b1, scenario.alice2.elements


def _assemble(psi: np.ndarray, a0, a1, b0, b1, elements, c: float) -> float:
    eye = IDENTITY

    def p(left, right):
        value = np.vdot(psi, np.kron(left, right) @ psi).real
        return min(max(value, 0.0), 1.0)

    m0, m1, _ = elements
    ch = p(a0, b0) + p(a0, b1) + p(a1, b0) - p(a1, b1) - p(a0, eye) - p(eye, b0)
    extra = (p(m0, b0) + p(m0, b1) + p(m1, b0) - p(m1, b1)
             - p(m0, eye) - OUTCOME1_WEIGHT * p(m1, eye))
    return c * ch + extra


def local_unitary_check(scenario: Scenario, n_unitaries: int, seed: int) -> OracleReport:
    """Largest functional shift under random local basis changes.

    The state and every measurement operator are conjugated by the same
    single-qubit unitary pair, so the value must be unchanged up to round-off.
    """
    if n_unitaries < 1:
        raise ValueError("need at least one unitary pair")
    rng = np.random.default_rng(seed)
    a0, a1, b0, b1, elements = _scenario_operators(scenario)
    psi = scenario.state.state_vector()
    reference = _assemble(psi, a0, a1, b0, b1, elements, scenario.c)

    worst = 0.0
    for _ in range(n_unitaries):
        ua = _haar_unitary(rng)
        ub = _haar_unitary(rng)
        rot = lambda m, u: u @ m @ u.conj().T  # noqa: E731
        value = _assemble(
            np.kron(ua, ub) @ psi,
            rot(a0, ua), rot(a1, ua), rot(b0, ub), rot(b1, ub),
            tuple(rot(m, ua) for m in elements),
            scenario.c,
        )
        worst = max(worst, abs(value - reference))
    return OracleReport(
        method=OracleMethod.LOCAL_UNITARY,
        samples=n_unitaries,
        seed=seed,
        max_deviation=worst,
    )


def oracle_reference_value(scenario: Scenario) -> float:
    """The oracle's own assembly of the functional (for cross-route tests)."""
    a0, a1, b0, b1, elements = _scenario_operators(scenario)
    return _assemble(scenario.state.state_vector(), a0, a1, b0, b1, elements, scenario.c)


__all__ = [
    "OracleMethod",
    "OracleReport",
    "random_search",
    "gradient_check",
    "local_unitary_check",
    "oracle_reference_value",
]
