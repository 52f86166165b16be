"""Command-line surface: optimization runs, sweeps, thresholds, CSV/JSON output.

Every command is a pure function of its flags and seed; rerunning a stored
command reproduces the result payload bit for bit. CSV rows share one fixed
schema across subcommands, with unused columns left empty.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
import time
from datetime import datetime, timezone
from typing import Any

import numpy as np

from . import __version__
from . import efficiency, error_tolerance, inequality, oracle, optimizer, parameters
from .inequality import RankClass
from .quantum import Basis, TwoQubitPureState, make_phi_plus, make_state

CSV_HEADER = (
    ["c", "ratio", "class", "value", "eta_crit"]
    + [f"p{i:02d}" for i in range(1, 17)]
    + ["rank0", "rank1", "rank2", "converged", "seed"]
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

PROJECTIVE_MAX_SERIES = "i10-formula"
VB_BOUND_SERIES = "vb-lower-bound"
CH_REFERENCE_SERIES = "ich-reference"


def _fmt(value: Any) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".9g")
    return str(value)


@dataclasses.dataclass
class SweepRow:
    """One CSV line; column order is fixed by CSV_HEADER."""

    c: float
    ratio: float
    klass: str
    value: float
    eta_crit: float | None = None
    params: tuple[float, ...] = ()
    ranks: tuple[int, int, int] | None = None
    converged: bool | None = None
    seed: int | None = None

    def as_list(self) -> list[str]:
        padded = list(self.params) + [""] * (16 - len(self.params))
        ranks = list(self.ranks) if self.ranks is not None else ["", "", ""]
        return [
            _fmt(self.c), _fmt(self.ratio), self.klass, _fmt(self.value),
            _fmt(self.eta_crit),
            *[_fmt(p) for p in padded],
            *[_fmt(r) for r in ranks],
            _fmt(self.converged) if self.converged is not None else "",
            _fmt(self.seed) if self.seed is not None else "",
        ]


def emit_csv(rows, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_list())


def _state_ratio(state: TwoQubitPureState) -> float:
    return 1.0 if state.basis is Basis.PHI_PLUS else state.ratio()


def record_row(record: optimizer.OptimizationRecord) -> SweepRow:
    return SweepRow(
        c=record.c,
        ratio=_state_ratio(record.state),
        klass=record.measurement_class.value,
        value=record.best_value,
        params=record.best_params,
        ranks=record.rank_profile.ranks if record.rank_profile else None,
        converged=record.best_converged,
        seed=record.seed,
    )


def efficiency_row(result: efficiency.EfficiencyResult) -> SweepRow:
    return SweepRow(
        c=result.c,
        ratio=_state_ratio(result.state),
        klass=result.measurement_class.value,
        value=result.eta_crit,
        eta_crit=result.eta_crit,
        params=result.best_params,
        ranks=result.rank_profile.ranks if result.rank_profile else None,
        converged=result.best_converged,
        seed=result.seed,
    )


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, RankClass):
        return obj.value
    if isinstance(obj, Basis):
        return obj.value
    if isinstance(obj, efficiency.ThresholdMethod):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _scenario_payload(scenario: inequality.Scenario | None) -> Any:
    if scenario is None:
        return None
    def setting(s):
        return {"phi": s.phi, "nu": s.nu}
    def op(m):
        return [[{"re": v.real, "im": v.imag} for v in row] for row in np.asarray(m).tolist()]
    return {
        "c": scenario.c,
        "state": {
            "alpha": scenario.state.alpha,
            "beta": scenario.state.beta,
            "basis": scenario.state.basis.value,
        },
        "alice0": setting(scenario.alice0),
        "alice1": setting(scenario.alice1),
        "bob0": setting(scenario.bob0),
        "bob1": setting(scenario.bob1),
        "alice2": {
            "m0": op(scenario.alice2.m0),
            "m1": op(scenario.alice2.m1),
            "m2": op(scenario.alice2.m2),
        },
    }


def record_payload(record: optimizer.OptimizationRecord) -> dict[str, Any]:
    """Deterministic serialization of one record (timing excluded)."""
    return {
        "best_value": record.best_value,
        "best_params": list(record.best_params),
        "measurement_class": record.measurement_class.value,
        "c": record.c,
        "state": _jsonable({"alpha": record.state.alpha, "beta": record.state.beta,
                            "basis": record.state.basis}),
        "scenario": _scenario_payload(record.scenario),
        "rank_profile": _jsonable(record.rank_profile),
        "n_converged": record.n_converged,
        "n_feasible": record.n_feasible,
        "best_converged": record.best_converged,
        "value_histogram": [[v, n] for v, n in record.value_histogram],
        "seed": record.seed,
        "status": record.status,
    }


def efficiency_payload(result: efficiency.EfficiencyResult) -> dict[str, Any]:
    return {
        "eta_crit": result.eta_crit,
        "eta_crit_root": result.root_value,
        "ratio_root_gap": (result.eta_crit - result.root_value
                           if not math.isnan(result.root_value) else None),
        "method": result.method.value,
        "scenario": _scenario_payload(result.scenario),
        "rank_profile": _jsonable(result.rank_profile),
        "reference_value": result.reference_ich_value,
        "best_params": list(result.best_params),
        "measurement_class": result.measurement_class.value,
        "c": result.c,
        "state": _jsonable({"alpha": result.state.alpha, "beta": result.state.beta,
                            "basis": result.state.basis}),
        "n_converged": result.n_converged,
        "n_valid": result.n_valid,
        "best_converged": result.best_converged,
        "seed": result.seed,
        "status": result.status,
    }


def run_record(command: str, config: dict[str, Any], seed: int, payload: Any,
               wall_time: float) -> dict[str, Any]:
    return {
        "command": command,
        "config": _jsonable(config),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "wall_time_s": wall_time,
        "seed": seed,
        "version": __version__,
        "payload": _jsonable(payload),
    }


def emit_json(record: dict[str, Any], path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(record, handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_json(path: str) -> dict[str, Any]:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {line!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _default_seed() -> int:
    env = os.environ.get("BELLOPT_SEED")
    if env is not None:
        return int(env)
    return 0


def _add_common(parser: argparse.ArgumentParser, state: bool = True) -> None:
    parser.add_argument("--starts", type=int, default=None,
                        help="multistart budget (default 1000; 10000 with --paper-fidelity)")
    parser.add_argument("--tol", type=float, default=None, help="convergence tolerance (default 1e-6)")
    parser.add_argument("--max-iters", type=int, default=5000, help="iteration cap per start")
    parser.add_argument("--seed", type=int, default=None,
                        help="base seed (default: BELLOPT_SEED or 0)")
    parser.add_argument("--paper-fidelity", action="store_true",
                        help="use the full 10000-start budget")
    parser.add_argument("--config", default=None, help="key=value file with starts/tol/seed defaults")
    parser.add_argument("--out", default=None, help="output file path")
    if state:
        group = parser.add_mutually_exclusive_group()
        group.add_argument("--ratio", type=float, default=None,
                           help="amplitude ratio of the shared state")
        group.add_argument("--phi-plus", action="store_true", help="use the |00>+|11> state")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellopt",
        description="Optimize the weighted three-outcome Bell functional and its "
                    "error tolerance and threshold detection efficiencies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("maximize", help="multistart maximization at one weight")
    p.add_argument("--c", type=float, required=True, help="weight of the two-setting block")
    p.add_argument("--class", dest="klass", default="general",
                   choices=[m.value for m in RankClass], help="measurement class")
    _add_common(p)

    p = sub.add_parser("sweep-c", help="maximization over a weight grid")
    p.add_argument("--from", dest="lo", type=float, required=True)
    p.add_argument("--to", dest="hi", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--class", dest="klass", default="general",
                   choices=[m.value for m in RankClass])
    _add_common(p)

    p = sub.add_parser("sweep-ratio", help="maximization over an amplitude-ratio grid")
    p.add_argument("--from", dest="lo", type=float, required=True)
    p.add_argument("--to", dest="hi", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--class", dest="klass", default="general",
                   choices=[m.value for m in RankClass])
    _add_common(p, state=False)

    p = sub.add_parser("efficiency", help="minimize the threshold detection efficiency")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--class", dest="klass", default="general",
                   choices=[m.value for m in RankClass])
    _add_common(p)

    p = sub.add_parser("error-tolerance", help="largest supported symmetric per-block error")
    p.add_argument("--c-from", dest="lo", type=float, default=3.0)
    p.add_argument("--c-to", dest="hi", type=float, default=10.0)
    p.add_argument("--c-step", dest="step", type=float, default=0.5)
    p.add_argument("--delta-resolution", type=float, default=error_tolerance.DELTA_RESOLUTION)
    p.add_argument("--delta", type=float, default=None,
                   help="probe error level for the reported differences")
    _add_common(p)

    p = sub.add_parser("lhv-bound", help="deterministic local bound at one weight")
    p.add_argument("--c", type=float, required=True)

    p = sub.add_parser("verify", help="run the independent oracle suite")
    p.add_argument("--samples", type=int, default=20000)
    _add_common(p)

    p = sub.add_parser("figure", help="emit the CSV behind one figure of the study")
    p.add_argument("--id", dest="figure_id", type=int, required=True, choices=range(1, 17))
    p.add_argument("--from", dest="lo", type=float, default=None)
    p.add_argument("--to", dest="hi", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    _add_common(p, state=False)

    return parser


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("grid step must be positive")
    n = int(round((hi - lo) / step))
    points = [lo + k * step for k in range(n + 1)]
    return [p for p in points if p <= hi + 1e-12]


def _resolve_config(args) -> optimizer.OptimizerConfig:
    file_values: dict[str, str] = {}
    if getattr(args, "config", None):
        file_values = _read_config_file(args.config)
    starts = args.starts
    if starts is None:
        starts = 10000 if args.paper_fidelity else int(file_values.get("starts", 1000))
    tol = args.tol if args.tol is not None else float(file_values.get("tol", 1e-6))
    seed = args.seed
    if seed is None:
        seed = int(file_values["seed"]) if "seed" in file_values else _default_seed()
    klass = RankClass.from_label(getattr(args, "klass", "general"))
    return optimizer.OptimizerConfig(
        starts=starts, tol=tol, max_iters=args.max_iters, seed=seed, measurement_class=klass,
    )


def _resolve_state(args) -> TwoQubitPureState:
    if getattr(args, "phi_plus", False):
        return make_phi_plus()
    ratio = getattr(args, "ratio", None)
    return make_state(1.0 if ratio is None else ratio)


def _projective_formula(c: float) -> float:
    return (-c + math.sqrt(c * c + (c + 1.0) ** 2)) / 2.0


def _vb_bound(c: float) -> float:
    return c * (math.sqrt(2.0) - 1.0) / 2.0 + 0.3788


def _cmd_maximize(args) -> int:
    if args.c <= 0:
        raise _UsageError("the weight --c must be positive")
    config = _resolve_config(args)
    state = _resolve_state(args)
    t0 = time.perf_counter()
    record = optimizer.multistart(config, args.c, state)
    wall = time.perf_counter() - t0
    print(f"best_value={_fmt(record.best_value)} class={record.measurement_class.value} "
          f"status={record.status}")
    if args.out:
        emit_json(run_record("maximize", _config_dict(args), config.seed,
                             record_payload(record), wall), args.out)
    return EXIT_OK if record.status == "ok" else EXIT_NUMERICAL


def _cmd_sweep(args, axis: str) -> int:
    config = _resolve_config(args)
    grid = _grid(args.lo, args.hi, args.step)
    if axis == "c":
        if any(c <= 0 for c in grid):
            raise _UsageError("all weights must be positive")
        records = optimizer.sweep("c", grid, config=config, state=_resolve_state(args))
    else:
        if args.c <= 0:
            raise _UsageError("the weight --c must be positive")
        records = optimizer.sweep("ratio", grid, config=config, c=args.c)
    rows = [record_row(r) for r in records]
    if args.out:
        emit_csv(rows, args.out)
    else:
        for row in rows:
            print(",".join(row.as_list()))
    return EXIT_OK if all(r.status == "ok" for r in records) else EXIT_NUMERICAL


def _cmd_efficiency(args) -> int:
    if args.c <= 0:
        raise _UsageError("the weight --c must be positive")
    config = _resolve_config(args)
    state = _resolve_state(args)
    t0 = time.perf_counter()
    result = efficiency.minimize_eta_crit(args.c, state, config)
    wall = time.perf_counter() - t0
    print(f"eta_crit={_fmt(result.eta_crit)} root={_fmt(result.root_value)} "
          f"status={result.status}")
    if args.out:
        emit_json(run_record("efficiency", _config_dict(args), config.seed,
                             efficiency_payload(result), wall), args.out)
    return EXIT_OK if result.status == "ok" else EXIT_NUMERICAL


def _cmd_error_tolerance(args) -> int:
    config = _resolve_config(args)
    state = _resolve_state(args)
    grid = _grid(args.lo, args.hi, args.step)
    if any(c <= 0 for c in grid):
        raise _UsageError("all weights must be positive")
    t0 = time.perf_counter()
    records = error_tolerance.collect_records(grid, state, config)
    report = error_tolerance.max_supported_delta(
        grid, records, resolution=args.delta_resolution, probe_delta=args.delta,
    )
    wall = time.perf_counter() - t0
    print(f"max_supported_delta={_fmt(report.max_supported_delta)} "
          f"argmax_c={_fmt(report.argmax_c)} status={report.status}")
    if args.out:
        payload = {
            "report": _jsonable(report),
            "records": {
                _fmt(c): {"general": record_payload(p.general),
                          "projective": record_payload(p.projective)}
                for c, p in records.items()
            },
        }
        emit_json(run_record("error-tolerance", _config_dict(args), config.seed,
                             payload, wall), args.out)
    return EXIT_OK if report.status == "ok" else EXIT_NUMERICAL


def _cmd_lhv(args) -> int:
    if args.c <= 0:
        raise _UsageError("the weight --c must be positive")
    print(f"{inequality.lhv_max(args.c):.6f}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    config = _resolve_config(args)
    state = _resolve_state(args)
    seed = config.seed
    failures = 0

    def check(name: str, ok: bool, detail: str) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failures += 0 if ok else 1

    c = 3.0
    record = optimizer.multistart(
        dataclasses.replace(config, starts=min(config.starts, 400)), c, state)
    gap = optimizer.verify_record(record)
    check("record-consistency", gap <= 1e-9,
          f"recorded best vs scenario evaluation gap {gap:.2e}")

    search = oracle.random_search(c, state, config.measurement_class, args.samples, seed)
    ok = search.best_value is not None and search.best_value <= record.best_value + 1e-6
    check("random-search-never-beats-cg", ok,
          f"random best {_fmt(search.best_value)} vs refined {_fmt(record.best_value)}")

    feasible = parameters.min_eigs(
        parameters.random_starts(RankClass.GENERAL, 200, seed), RankClass.GENERAL
    ).min(axis=1) >= 0.0
    point = parameters.random_starts(RankClass.GENERAL, 200, seed)[np.flatnonzero(feasible)[0]]
    grad = oracle.gradient_check(point, c, state, RankClass.GENERAL, trials=30, seed=seed)
    check("gradient-check", grad.max_deviation <= 1e-3,
          f"max relative deviation {grad.max_deviation:.2e}")

    if record.scenario is not None:
        lu = oracle.local_unitary_check(record.scenario, 100, seed)
        check("local-unitary-invariance", lu.max_deviation <= 1e-9,
              f"max deviation {lu.max_deviation:.2e}")

    repeat = optimizer.multistart(
        dataclasses.replace(config, starts=min(config.starts, 400)), c, state)
    check("determinism", record_payload(repeat) == record_payload(record),
          "two runs with one seed produce identical payloads")

    return EXIT_OK if failures == 0 else EXIT_NUMERICAL


_FIGURE_DEFAULTS: dict[int, dict[str, Any]] = {
    1: {"axis": "c", "grid": (1.0, 10.0, 0.5)},
    2: {"axis": "c", "grid": (1.0, 10.0, 0.5)},
    3: {"axis": "c", "grid": (1.0, 10.0, 0.5)},
    4: {"axis": "c", "grid": (3.0, 10.0, 0.5), "delta": 0.01},
    5: {"axis": "c", "grid": (3.0, 10.0, 0.5), "delta": 0.0018},
    6: {"axis": "ratio", "grid": (0.05, 1.0, 0.05), "c": 3.0},
    7: {"axis": "ratio", "grid": (0.05, 1.0, 0.05), "c": 5.0},
    8: {"axis": "ratio", "grid": (0.05, 1.0, 0.05), "c": 10.0},
    9: {"axis": "ratio", "grid": (0.05, 1.0, 0.05), "c": 3.0},
    10: {"axis": "ratio", "grid": (0.05, 1.0, 0.05), "c": 5.0},
    11: {"axis": "ratio", "grid": (0.05, 1.0, 0.05), "c": 10.0},
    12: {"axis": "c", "grid": (3.0, 10.0, 0.5), "ratios": (1.0, 0.9, 0.8, 0.7)},
    13: {"axis": "c", "grid": (5.0, 100.0, None), "ratio": 1.0,
         "points": (5.0, 10.0, 20.0, 50.0, 100.0), "reference": 2.0 * (math.sqrt(2.0) - 1.0)},
    14: {"axis": "c", "grid": (10.0, 100.0, None), "ratio": 0.7,
         "points": (10.0, 20.0, 50.0, 100.0), "reference": 0.7849},
    15: {"axis": "c", "grid": (10.0, 100.0, None), "ratio": 0.5,
         "points": (10.0, 20.0, 50.0, 100.0), "reference": 0.7518},
    16: {"axis": "c", "grid": (400.0, 10000.0, None), "ratio": 0.05,
         "points": (400.0, 1000.0, 2000.0, 5000.0, 10000.0), "reference": 0.6667},
}


def _cmd_figure(args) -> int:
    spec = _FIGURE_DEFAULTS[args.figure_id]
    config = _resolve_config(args)
    overrides = (args.lo, args.hi, args.step)
    if any(v is not None for v in overrides) and not all(v is not None for v in overrides):
        raise _UsageError("grid overrides need all of --from, --to and --step")
    if args.lo is not None:
        grid = _grid(args.lo, args.hi, args.step)
    elif "points" in spec:
        grid = list(spec["points"])
    else:
        lo, hi, step = spec["grid"]
        grid = _grid(lo, hi, step)

    rows: list[SweepRow] = []
    fig = args.figure_id
    if fig in (1, 2, 3):
        state = make_state(1.0)
        records = optimizer.sweep("c", grid, config=config, state=state)
        for c, rec in zip(grid, records):
            if fig == 1:
                rows.append(record_row(rec))
                rows.append(SweepRow(c=c, ratio=1.0, klass=PROJECTIVE_MAX_SERIES,
                                     value=_projective_formula(c)))
                rows.append(SweepRow(c=c, ratio=1.0, klass=VB_BOUND_SERIES, value=_vb_bound(c)))
            elif fig == 2:
                row = record_row(rec)
                row.value = inequality.bob_overlap(rec.scenario)
                rows.append(row)
                rows.append(SweepRow(c=c, ratio=1.0, klass=CH_REFERENCE_SERIES, value=0.5))
            else:
                rows.append(SweepRow(c=c, ratio=1.0, klass="povm-minus-projective",
                                     value=rec.best_value - _projective_formula(c),
                                     seed=rec.seed))
                rows.append(SweepRow(c=c, ratio=1.0, klass="vb-minus-projective",
                                     value=_vb_bound(c) - _projective_formula(c)))
    elif fig in (4, 5):
        state = make_state(1.0)
        delta = spec["delta"]
        records = optimizer.sweep("c", grid, config=config, state=state)
        for c, rec in zip(grid, records):
            rows.append(SweepRow(
                c=c, ratio=1.0, klass="povm-minus-projective",
                value=rec.best_value - (c + 1.0) * delta - _projective_formula(c),
                seed=rec.seed))
            vb_delta = 0.0016 if fig == 5 else delta
            rows.append(SweepRow(
                c=c, ratio=1.0, klass="vb-minus-projective",
                value=_vb_bound(c) - (c + 1.0) * vb_delta - _projective_formula(c)))
    elif fig in (6, 7, 8):
        c = spec["c"]
        for mclass in inequality.PROJECTIVE_CLASSES:
            cfg = dataclasses.replace(config, measurement_class=mclass)
            for rec in optimizer.sweep("ratio", grid, config=cfg, c=c):
                rows.append(record_row(rec))
    elif fig in (9, 10, 11):
        c = spec["c"]
        classes = (RankClass.GENERAL, RankClass.R10) if fig == 9 else (
            RankClass.GENERAL, RankClass.R10, RankClass.R11)
        for mclass in classes:
            cfg = dataclasses.replace(config, measurement_class=mclass)
            for rec in optimizer.sweep("ratio", grid, config=cfg, c=c):
                rows.append(record_row(rec))
    elif fig == 12:
        for k, ratio in enumerate(spec["ratios"]):
            state = make_state(ratio)
            cfg = dataclasses.replace(config, seed=config.seed ^ (1000 + k))
            pairs = error_tolerance.collect_records(grid, state, cfg)
            for c in grid:
                pair = pairs[c]
                rows.append(SweepRow(
                    c=c, ratio=ratio, klass="povm-minus-projective",
                    value=pair.general.best_value - pair.projective.best_value,
                    seed=cfg.seed))
    else:  # 13-16: threshold efficiency vs weight
        ratio = spec["ratio"]
        state = make_state(ratio)
        for i, c in enumerate(grid):
            cfg = dataclasses.replace(config, seed=config.seed ^ i)
            result = efficiency.minimize_eta_crit(c, state, cfg)
            rows.append(efficiency_row(result))
            rows.append(SweepRow(c=c, ratio=ratio, klass=CH_REFERENCE_SERIES,
                                 value=spec["reference"]))

    if args.out:
        emit_csv(rows, args.out)
    else:
        for row in rows:
            print(",".join(row.as_list()))
    return EXIT_OK


def _config_dict(args) -> dict[str, Any]:
    skip = {"command"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


class _UsageError(Exception):
    pass


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        if args.command == "maximize":
            return _cmd_maximize(args)
        if args.command == "sweep-c":
            return _cmd_sweep(args, "c")
        if args.command == "sweep-ratio":
            return _cmd_sweep(args, "ratio")
        if args.command == "efficiency":
            return _cmd_efficiency(args)
        if args.command == "error-tolerance":
            return _cmd_error_tolerance(args)
        if args.command == "lhv-bound":
            return _cmd_lhv(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "figure":
            return _cmd_figure(args)
        parser.error(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
