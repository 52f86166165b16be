"""How much experimental error the POVM-over-projective advantage survives.

Symmetric per-block errors are assumed: the same delta applies to the
two-setting block and the three-outcome block, so the total subtraction from
the functional is ``(c + 1) * delta``. The error enters as a deterministic
worst-case subtraction, matching how experimental error bars are compared
against a violation.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, replace

from .inequality import PROJECTIVE_CLASSES, RankClass
from .optimizer import OptimizationRecord, OptimizerConfig, multistart
from .quantum import TwoQubitPureState

DELTA_RESOLUTION = 1e-5


@dataclass(frozen=True)
class RecordPair:
    """Best general-class and best projective-class records at one weight."""

    general: OptimizationRecord
    projective: OptimizationRecord

    def __post_init__(self) -> None:
        if self.general.status != "ok" or self.projective.status != "ok":
            raise ValueError("record pair requires successful optimization records")
        if abs(self.general.c - self.projective.c) > 1e-12:
            raise ValueError("record pair mixes different weights")


def _pair_for(c: float, records: Mapping[float, RecordPair]) -> RecordPair:
    if c not in records:
        raise KeyError(f"no optimization records for c={c!r}")
    return records[c]


def povm_advantage(c: float, delta: float, records: Mapping[float, RecordPair]) -> float:
    """``(best_povm - (c+1) delta) - best_projective`` at one weight."""
    pair = _pair_for(c, records)
    return (pair.general.best_value - (c + 1.0) * delta) - pair.projective.best_value


def violation_margin(c: float, delta: float, records: Mapping[float, RecordPair]) -> float:
    """``best_povm - (c+1) delta - 1``: how far above the local bound remains."""
    pair = _pair_for(c, records)
    return pair.general.best_value - (c + 1.0) * delta - 1.0


def collect_records(
    c_grid,
    state: TwoQubitPureState,
    config: OptimizerConfig,
    projective_classes: tuple[RankClass, ...] = PROJECTIVE_CLASSES,
) -> dict[float, RecordPair]:
    """General plus best-projective multistart records for every grid weight.

    Seeds are derived per (grid index, class slot) so the whole collection is
    reproducible from ``config.seed``.
    """
    records: dict[float, RecordPair] = {}
    n_slots = len(projective_classes) + 1
    for i, c in enumerate(c_grid):
        c = float(c)
        general = multistart(
            replace(config, measurement_class=RankClass.GENERAL, seed=config.seed ^ (n_slots * i)),
            c, state,
        )
        best_proj: OptimizationRecord | None = None
        for k, mclass in enumerate(projective_classes):
            rec = multistart(
                replace(config, measurement_class=mclass, seed=config.seed ^ (n_slots * i + k + 1)),
                c, state,
            )
            if rec.status != "ok":
                continue
            if best_proj is None or rec.best_value > best_proj.best_value:
                best_proj = rec
        if general.status != "ok" or best_proj is None:
            raise RuntimeError(f"optimization failed at c={c}")
        records[c] = RecordPair(general=general, projective=best_proj)
    return records


@dataclass(frozen=True)
class ToleranceReport:
    """Error-tolerance summary over a weight grid."""

    delta: float
    c_grid: tuple[float, ...]
    differences: tuple[float, ...]
    violation_margins: tuple[float, ...]
    max_supported_delta: float
    argmax_c: float
    status: str = "ok"


def max_supported_delta(
    c_grid,
    records: Mapping[float, RecordPair],
    resolution: float = DELTA_RESOLUTION,
    probe_delta: float | None = None,
) -> ToleranceReport:
    """Largest delta at which some weight keeps advantage and violation positive.

    Found by bisection at the given resolution; the report's differences and
    margins are evaluated at ``probe_delta`` (default: the supported maximum).
    """
    grid = tuple(float(c) for c in c_grid)
    if not grid:
        raise ValueError("weight grid must be non-empty")

    def supported(delta: float) -> bool:
        return any(
            povm_advantage(c, delta, records) > 0.0 and violation_margin(c, delta, records) > 0.0
            for c in grid
        )

    if not supported(0.0):
        best_delta = 0.0
        status = "no-advantage"
    else:
        lo, hi = 0.0, 1.0
        while not math.isclose(hi - lo, 0.0, abs_tol=resolution):
            mid = 0.5 * (lo + hi)
            if supported(mid):
                lo = mid
            else:
                hi = mid
        best_delta = lo
        status = "ok"

    # the weight that still supports the maximal delta
    per_c = [
        min(povm_advantage(c, 0.0, records), violation_margin(c, 0.0, records)) / (c + 1.0)
        for c in grid
    ]
    argmax_c = grid[max(range(len(grid)), key=lambda i: per_c[i])]

    delta = best_delta if probe_delta is None else probe_delta
    return ToleranceReport(
        delta=delta,
        c_grid=grid,
        differences=tuple(povm_advantage(c, delta, records) for c in grid),
        violation_margins=tuple(violation_margin(c, delta, records) for c in grid),
        max_supported_delta=best_delta,
        argmax_c=argmax_c,
        status=status,
    )
