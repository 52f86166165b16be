"""Multistart conjugate-gradient maximization of the Bell functional.

The search runs Polak-Ribiere nonlinear CG with backtracking Armijo line
search on the negated objective; gradients come from central finite
differences. Starts are independent rows of one batch: each row's trajectory
depends only on its own entries, so results are reproducible bit for bit
under a fixed seed regardless of how rows are grouped.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from . import parameters
from .inequality import RankClass, RankProfile, Scenario, ich3_value, rank_profile
from .quantum import TwoQubitPureState

FEASIBILITY_TOL = 1e-9

HISTOGRAM_RESOLUTION = 1e-4

ARMIJO_C1 = 1e-4
BACKTRACK_FACTOR = 0.5
STEP_MIN = 1e-14
STEP_INIT = 0.5
STEP_GROW = 2.0
STEP_MAX = 4.0
MAX_BACKTRACKS = 60
EXPANSION_ROUNDS = 12
STALL_PATIENCE = 4
STALL_RTOL = 1e-13
PROGRESS_WINDOW = 50
PROGRESS_MIN_RTOL = 1e-7
PENALTY_ESCALATIONS = 8


@dataclass(frozen=True)
class OptimizerConfig:
    """Search budget and reproducibility knobs shared by all drivers."""

    starts: int = 10000
    tol: float = 1e-6
    max_iters: int = 5000
    seed: int = 0
    penalty_weight: float = 1e4
    fd_step: float = 1e-7
    measurement_class: RankClass = RankClass.GENERAL

    def __post_init__(self) -> None:
        if self.starts < 1:
            raise ValueError("starts must be at least 1")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class OptimizationRecord:
    """Reproducible result of one multistart run."""

    best_value: float
    best_params: tuple[float, ...]
    measurement_class: RankClass
    c: float
    state: TwoQubitPureState
    scenario: Scenario | None
    rank_profile: RankProfile | None
    n_converged: int
    n_feasible: int
    best_converged: bool
    value_histogram: tuple[tuple[float, int], ...]
    seed: int
    wall_time: float = field(compare=False)
    status: str = "ok"


def fd_gradient(fun, x: np.ndarray, step: float) -> np.ndarray:
    """Central-difference gradient of a row-wise batch function.

    All 2*D perturbed copies are stacked into one call so the per-call
    overhead does not dominate when few rows are active.
    """
    n, d = x.shape
    stacked = np.broadcast_to(x, (2 * d, n, d)).copy()
    for j in range(d):
        stacked[2 * j, :, j] += step
        stacked[2 * j + 1, :, j] -= step
    values = np.asarray(fun(stacked.reshape(2 * d * n, d)), dtype=float).reshape(2 * d, n)
    return ((values[0::2] - values[1::2]) / (2.0 * step)).T.copy()


def cg_minimize_batch(fun, x0: np.ndarray, *, tol: float, max_iters: int, fd_step: float):
    """Minimize ``fun`` row-wise from every start in ``x0``.

    Returns (x, f, converged, aborted, iterations). A row converges when its
    gradient max-norm drops below ``tol`` or its line-search step underflows;
    it aborts if the objective turns non-finite at its current point.
    """
    x = np.array(x0, dtype=float)
    n = x.shape[0]
    f = np.asarray(fun(x), dtype=float)
    aborted = ~np.isfinite(f)
    converged = np.zeros(n, dtype=bool)

    grad = np.zeros_like(x)
    live = ~aborted
    if live.any():
        grad[live] = fd_gradient(fun, x[live], fd_step)
        bad = live.copy()
        bad[live] = ~np.isfinite(grad[live]).all(axis=1)
        aborted |= bad
        converged[live & ~bad] = np.abs(grad[live & ~bad]).max(axis=1) < tol

    direction = -grad
    step = np.full(n, STEP_INIT)
    stall = np.zeros(n, dtype=int)
    anchor = f.copy()
    active = ~(aborted | converged)
    iterations = 0

    while active.any() and iterations < max_iters:
        iterations += 1
        rows = np.flatnonzero(active)
        xa = x[rows]
        ga = grad[rows]
        da = direction[rows].copy()
        fa = f[rows]

        slope = np.einsum("ij,ij->i", ga, da)
        uphill = ~(slope < 0.0)
        if uphill.any():
            da[uphill] = -ga[uphill]
            slope[uphill] = -np.einsum("ij,ij->i", ga[uphill], ga[uphill])

        # vectorized backtracking: rows drop out as they accept or underflow
        t = step[rows].copy()
        accepted = np.zeros(rows.size, dtype=bool)
        x_new = xa.copy()
        f_new = fa.copy()
        searching = slope < 0.0
        first_try = np.zeros(rows.size, dtype=bool)
        for k in range(MAX_BACKTRACKS):
            if not searching.any():
                break
            idx = np.flatnonzero(searching)
            trial = xa[idx] + t[idx, None] * da[idx]
            ft = np.asarray(fun(trial), dtype=float)
            good = np.isfinite(ft) & (ft <= fa[idx] + ARMIJO_C1 * t[idx] * slope[idx])
            hit = idx[good]
            x_new[hit] = trial[good]
            f_new[hit] = ft[good]
            accepted[hit] = True
            searching[hit] = False
            if k == 0:
                first_try[hit] = True
            miss = idx[~good]
            t[miss] *= BACKTRACK_FACTOR
            dead = miss[t[miss] < STEP_MIN]
            searching[dead] = False
        # rows whose line search underflowed (or had a flat direction) stop here
        converged[rows[~accepted]] = True

        # expansion: rows whose very first trial passed may take much longer
        # steps along the current ray, which races through flat ridges
        growing = first_try.copy()
        for _ in range(EXPANSION_ROUNDS):
            if not growing.any():
                break
            idx = np.flatnonzero(growing)
            t_big = t[idx] * 2.0
            trial = xa[idx] + t_big[:, None] * da[idx]
            ft = np.asarray(fun(trial), dtype=float)
            better = np.isfinite(ft) & (ft < f_new[idx])
            hit = idx[better]
            x_new[hit] = trial[better]
            f_new[hit] = ft[better]
            t[hit] = t_big[better]
            growing[idx[~better]] = False

        if accepted.any():
            sub = np.flatnonzero(accepted)
            g_new = fd_gradient(fun, x_new[sub], fd_step)
            broken = ~np.isfinite(g_new).all(axis=1)

            g_old = ga[sub]
            y = g_new - g_old
            denom = np.einsum("ij,ij->i", g_old, g_old)
            beta = np.einsum("ij,ij->i", g_new, y) / np.maximum(denom, 1e-300)
            beta = np.maximum(beta, 0.0)  # automatic restart
            d_new = -g_new + beta[:, None] * da[sub]

            tgt = rows[sub]
            # a run of vanishing decreases means the search cannot make
            # progress at this precision; treat it like a step underflow
            tiny = (fa[sub] - f_new[sub]) <= STALL_RTOL * (1.0 + np.abs(fa[sub]))
            stall[tgt] = np.where(tiny, stall[tgt] + 1, 0)
            x[tgt] = x_new[sub]
            f[tgt] = f_new[sub]
            grad[tgt] = g_new
            direction[tgt] = d_new
            step[tgt] = np.minimum(t[sub] * STEP_GROW, STEP_MAX)
            aborted[tgt[broken]] = True
            done = (np.abs(g_new).max(axis=1) < tol) | (stall[tgt] >= STALL_PATIENCE)
            converged[tgt[done & ~broken]] = True

        # crawl guard: rows that gained almost nothing over a whole window
        # are within noise of their local maximum and stop there
        if iterations % PROGRESS_WINDOW == 0:
            live = np.flatnonzero(~(aborted | converged))
            if live.size:
                crawl = (anchor[live] - f[live]) < PROGRESS_MIN_RTOL * (1.0 + np.abs(f[live]))
                converged[live[crawl]] = True
                anchor[live] = f[live]

        active = ~(aborted | converged)

    return x, f, converged, aborted, iterations


def objective(
    params,
    c: float,
    state: TwoQubitPureState,
    measurement_class: RankClass = RankClass.GENERAL,
    penalty_weight: float = 1e4,
) -> float:
    """Functional value minus the weighted positivity penalty, one point."""
    row = np.asarray(params, dtype=float).reshape(1, -1)
    return float(parameters.objective_value(row, c, state, measurement_class, penalty_weight)[0])


def _maximize_rows(x0: np.ndarray, config: OptimizerConfig, c: float, state: TwoQubitPureState):
    """Run the CG maximizer on every row, re-penalizing infeasible finals once."""
    mclass = config.measurement_class

    def negated(weight):
        def fun(x):
            return -parameters.objective_value(x, c, state, mclass, weight)

        return fun

    x, f, converged, aborted, _ = cg_minimize_batch(
        negated(config.penalty_weight), x0,
        tol=config.tol, max_iters=config.max_iters, fd_step=config.fd_step,
    )
    # a quadratic penalty leaves boundary optima slightly infeasible, by an
    # amount inversely proportional to the weight; re-polish those points at
    # escalating weights until they clear the tolerance
    weight = config.penalty_weight
    for _ in range(PENALTY_ESCALATIONS):
        feasible = parameters.min_eigs(x, mclass).min(axis=1) >= -FEASIBILITY_TOL
        retry = ~feasible & ~aborted
        if not retry.any():
            break
        weight *= 10.0
        x2, _, conv2, ab2, _ = cg_minimize_batch(
            negated(weight), x[retry],
            tol=config.tol, max_iters=min(config.max_iters, 500), fd_step=config.fd_step,
        )
        x[retry] = x2
        converged[retry] = conv2
        aborted[retry] |= ab2
    feasible = parameters.min_eigs(x, mclass).min(axis=1) >= -FEASIBILITY_TOL
    return x, converged, aborted, feasible


def cg_maximize(start, config: OptimizerConfig, c: float, state: TwoQubitPureState):
    """Single-start ascent; returns (objective value, canonical params, converged).

    The returned point is feasibility-verified: a final point with an
    eigenvalue below -1e-9 is pushed back by re-running at ten times the
    penalty weight.
    """
    x0 = np.asarray(start, dtype=float).reshape(1, -1)
    x, converged, aborted, _ = _maximize_rows(x0, config, c, state)
    params = parameters.canonicalize(x[0], config.measurement_class)
    value = objective(params, c, state, config.measurement_class, config.penalty_weight)
    return value, tuple(params), bool(converged[0] and not aborted[0])


def multistart(config: OptimizerConfig, c: float, state: TwoQubitPureState) -> OptimizationRecord:
    """Best feasible local maximum over seeded uniform starts.

    Ties within ``config.tol`` go to the earliest start index. Zero feasible
    results is reported through the record status, not an exception.
    """
    t0 = time.perf_counter()
    mclass = config.measurement_class
    x0 = parameters.random_starts(mclass, config.starts, config.seed)
    x, converged, aborted, feasible = _maximize_rows(x0, config, c, state)

    candidates = feasible & ~aborted
    n_converged = int((converged & ~aborted).sum())
    if not candidates.any():
        return OptimizationRecord(
            best_value=float("nan"), best_params=(), measurement_class=mclass,
            c=c, state=state, scenario=None, rank_profile=None,
            n_converged=n_converged, n_feasible=0, best_converged=False,
            value_histogram=(), seed=config.seed,
            wall_time=time.perf_counter() - t0, status="no-feasible-result",
        )

    values = parameters.bell_value(x, c, state, mclass)
    v_best = values[candidates].max()
    sel = int(np.flatnonzero(candidates & (values >= v_best - config.tol))[0])

    best_params = parameters.canonicalize(x[sel], mclass)
    scenario = parameters.scenario_from_params(best_params, c, state, mclass)
    best_value = float(parameters.bell_value(best_params, c, state, mclass)[0])

    buckets = Counter(
        round(float(v) / HISTOGRAM_RESOLUTION) * HISTOGRAM_RESOLUTION
        for v in values[candidates & converged]
    )
    histogram = tuple(sorted(buckets.items(), key=lambda kv: -kv[0]))

    return OptimizationRecord(
        best_value=best_value,
        best_params=tuple(best_params),
        measurement_class=mclass,
        c=c,
        state=state,
        scenario=scenario,
        rank_profile=rank_profile(scenario.alice2),
        n_converged=n_converged,
        n_feasible=int(candidates.sum()),
        best_converged=bool(converged[sel]),
        value_histogram=histogram,
        seed=config.seed,
        wall_time=time.perf_counter() - t0,
        status="ok",
    )


def sweep(axis: str, grid, *, config: OptimizerConfig, c: float | None = None,
          state: TwoQubitPureState | None = None) -> list[OptimizationRecord]:
    """One multistart record per grid point, seeded as ``seed ^ index``.

    ``axis`` is "c" (state fixed, grid of weights) or "ratio" (weight fixed,
    grid of amplitude ratios). Per-point failures are carried in the record
    status; the sweep itself never aborts.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid must be non-empty")
    records = []
    if axis == "c":
        if state is None:
            raise ValueError("a c-sweep needs a state")
        for i, ci in enumerate(grid):
            records.append(multistart(replace(config, seed=config.seed ^ i), float(ci), state))
    elif axis == "ratio":
        if c is None:
            raise ValueError("a ratio-sweep needs the weight c")
        from .quantum import make_state

        for i, ri in enumerate(grid):
            records.append(multistart(replace(config, seed=config.seed ^ i), c, make_state(float(ri))))
    else:
        raise ValueError(f"unknown sweep axis {axis!r}")
    return records


def verify_record(record: OptimizationRecord) -> float:
    """Absolute gap between the recorded best value and a fresh scenario evaluation."""
    if record.scenario is None:
        raise ValueError("record carries no scenario")
    return abs(record.best_value - ich3_value(record.scenario))
