"""Command-line surface: fit models, validate data, run routines, emit reports.

Subcommands: ``fit``, ``validate``, ``optimize``, ``front``, ``compare``.
Exit status is 0 on success, 2 for configuration or file errors, and 3 for
numerical failures (rank deficiency, infeasibility, solver breakdown).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import scalarize
from .dataset import (
    CASE_STUDY_BOUNDS,
    Bounds,
    DatasetError,
    builtin_case_study,
    load_experiments,
    validate_records,
)
from .evolve import GaConfig, GaResult, run_ga
from .nlsolver import (
    ConstraintSet,
    EqualityConstraintError,
    NonFiniteEvaluationError,
    RunCounters,
    SolverConfig,
)
from .pareto import Front, ParetoPoint, Sense, merge_fronts, read_front_csv, write_front_csv
from .polymodel import PolyBasis, PolynomialModel, model_to_dict, published_pair
from .regression import (
    RegressionError,
    comparison_csv_text,
    compare_models,
    fit_ols,
    model_diagnostics,
)
from .scalarize import (
    DEFAULT_P_VALUES,
    InfeasibleEpsilonError,
    MooProblem,
    Objective,
    StageInfeasibleError,
    UtopiaSolveError,
)
from .svgplot import write_front_svg

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SCALARIZATION_METHODS = ("global_criterion", "lexicographic", "weighted_sum", "epsilon_constraint")
ALL_METHODS = SCALARIZATION_METHODS + ("ga",)

_NUMERIC_ERRORS = (
    RegressionError,
    InfeasibleEpsilonError,
    StageInfeasibleError,
    UtopiaSolveError,
    NonFiniteEvaluationError,
    EqualityConstraintError,
)


class ConfigError(ValueError):
    """Bad command line or config-file contents."""


@dataclass
class MethodConfig:
    method: str = "all"
    p_values: tuple[int, ...] = DEFAULT_P_VALUES
    weight_steps: int = 11
    epsilon_points: int = 11
    epsilon_primary: str = "mrr"
    order: tuple[str, ...] = ("mrr", "ra")


@dataclass
class RunConfig:
    """Everything one run needs: data source, model source, methods, outputs."""

    data: str = "builtin"
    models: str = "refit"
    bounds: Bounds = CASE_STUDY_BOUNDS
    method: MethodConfig = field(default_factory=MethodConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    ga: GaConfig = field(default_factory=GaConfig)
    out: Path = Path("results")


_SOLVER_KEYS = {"starts": "n_starts", "seed": "seed", "kkt_tol": "kkt_tol", "feas_tol": "feas_tol",
                "max_outer": "max_outer", "max_inner": "max_inner"}
_GA_KEYS = {"pop": "pop_size", "gens": "generations", "pc": "crossover_prob",
            "eta_c": "crossover_eta", "pm": "mutation_prob", "eta_m": "mutation_eta",
            "elite": "elite_fraction", "seed": "seed"}
_METHOD_KEYS = ("method", "p_values", "weight_steps", "epsilon_points", "epsilon_primary", "order")


def _mapped_kwargs(block: dict, mapping: dict[str, str], label: str) -> dict:
    unknown = set(block) - set(mapping)
    if unknown:
        raise ConfigError(f"unknown {label} config keys: {sorted(unknown)}")
    return {mapping[k]: v for k, v in block.items()}


def load_config(path: str | Path | None) -> RunConfig:
    """Build a RunConfig from a JSON file; missing blocks keep their defaults."""
    cfg = RunConfig()
    if path is None:
        return cfg
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {"data", "models", "bounds", "method", "solver", "ga", "out"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        if "data" in raw:
            cfg.data = str(raw["data"])
        if "models" in raw:
            cfg.models = str(raw["models"])
        if "bounds" in raw:
            cfg.bounds = Bounds(tuple(raw["bounds"]["lower"]), tuple(raw["bounds"]["upper"]))
        if "method" in raw:
            block = dict(raw["method"])
            unknown = set(block) - set(_METHOD_KEYS)
            if unknown:
                raise ConfigError(f"unknown method config keys: {sorted(unknown)}")
            if "p_values" in block:
                block["p_values"] = tuple(int(p) for p in block["p_values"])
            if "order" in block:
                block["order"] = tuple(str(o) for o in block["order"])
            cfg.method = dataclasses.replace(cfg.method, **block)
        if "solver" in raw:
            cfg.solver = SolverConfig(**_mapped_kwargs(dict(raw["solver"]), _SOLVER_KEYS, "solver"))
        if "ga" in raw:
            cfg.ga = GaConfig(**_mapped_kwargs(dict(raw["ga"]), _GA_KEYS, "ga"))
        if "out" in raw:
            cfg.out = Path(str(raw["out"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc
    return cfg


def apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    if getattr(args, "data", None):
        cfg.data = args.data
    if getattr(args, "models", None):
        cfg.models = args.models
    if getattr(args, "out", None):
        cfg.out = Path(args.out)
    if getattr(args, "method", None):
        cfg.method.method = args.method
    if getattr(args, "p", None):
        cfg.method.p_values = tuple(args.p)
    if getattr(args, "steps", None) is not None:
        cfg.method.weight_steps = args.steps
    if getattr(args, "epsilon_points", None) is not None:
        cfg.method.epsilon_points = args.epsilon_points
    if getattr(args, "order", None):
        cfg.method.order = tuple(s.strip() for s in args.order.split(","))
    if getattr(args, "starts", None) is not None:
        cfg.solver = dataclasses.replace(cfg.solver, n_starts=args.starts)
    if getattr(args, "seed", None) is not None:
        cfg.solver = dataclasses.replace(cfg.solver, seed=args.seed)
        cfg.ga = dataclasses.replace(cfg.ga, seed=args.seed)
    return cfg


def _load_records(cfg: RunConfig):
    if cfg.data == "builtin":
        return builtin_case_study()
    return load_experiments(cfg.data)


def _select_models(cfg: RunConfig, records) -> tuple[PolynomialModel, PolynomialModel]:
    if cfg.models == "refit":
        return (
            fit_ols(records, PolyBasis.FULL_QUADRATIC_TRIPLE, "ra").model,
            fit_ols(records, PolyBasis.FULL_QUADRATIC_TRIPLE, "mrr").model,
        )
    if cfg.models in ("eq21", "eq23"):
        return published_pair(cfg.models)
    raise ConfigError(f"unknown model source {cfg.models!r}; expected refit, eq23 or eq21")


def _build_problem(cfg: RunConfig, models) -> MooProblem:
    ra_model, mrr_model = models
    return MooProblem(
        objectives=(Objective(ra_model, Sense.MINIMIZE), Objective(mrr_model, Sense.MAXIMIZE)),
        constraints=ConstraintSet(cfg.bounds),
    )


def _counters_dict(c: RunCounters) -> dict:
    return {
        "iterations": c.iterations,
        "function_evals": c.function_evals,
        "gradient_evals": c.gradient_evals,
    }


def _outcome_dict(outcome) -> dict:
    return {
        "x": list(outcome.x),
        "objective": outcome.objective,
        "converged": outcome.converged,
        "kkt_residual": outcome.kkt_residual,
        "constraint_violation": outcome.constraint_violation,
        "counters": _counters_dict(outcome.counters),
    }


def _utopia_dict(utopia) -> dict:
    return {
        "counters": _counters_dict(utopia.counters),
        "objectives": {
            e.name: {
                "sense": e.sense.value,
                "best": e.best,
                "best_x": list(e.best_x),
                "worst": e.worst,
                "worst_x": list(e.worst_x),
            }
            for e in utopia.entries
        },
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_fit(cfg: RunConfig) -> int:
    records = _load_records(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    pair = _select_models(cfg, records)
    baseline = published_pair("eq21")
    label = cfg.models
    cmp = compare_models(records, pair, baseline, label_a=label, label_b="eq21")
    diag = {
        "ra": model_diagnostics(records, pair[0], "ra"),
        "mrr": model_diagnostics(records, pair[1], "mrr"),
    }
    payload = {
        "data": cfg.data,
        "models": {
            resp: {
                "model": model_to_dict(d.model),
                "mapd": d.mapd,
                "apd_per_row": list(d.apd_per_row),
                "predicted": list(d.predicted),
                "max_predicted": d.max_predicted,
                "min_predicted": d.min_predicted,
            }
            for resp, d in diag.items()
        },
        "summary": {
            "mapd": {label: list(cmp.mapd_a), "eq21": list(cmp.mapd_b)},
            "max_predicted": {label: list(cmp.max_predicted_a), "eq21": list(cmp.max_predicted_b)},
            "min_predicted": {label: list(cmp.min_predicted_a), "eq21": list(cmp.min_predicted_b)},
            "winner_by_lower_mapd": {"ra": cmp.winners[0], "mrr": cmp.winners[1]},
        },
    }
    _write_json(cfg.out / "fit.json", payload)
    (cfg.out / "comparison.csv").write_text(comparison_csv_text(cmp), encoding="utf-8")
    print(f"fit: {len(records)} records, models={cfg.models}")
    print(f"  MAPD Ra={cmp.mapd_a[0]:.4f} MRR={cmp.mapd_a[1]:.4f} "
          f"(eq21 baseline: Ra={cmp.mapd_b[0]:.4f} MRR={cmp.mapd_b[1]:.4f})")
    print(f"  wrote {cfg.out / 'fit.json'} and {cfg.out / 'comparison.csv'}")
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    records = _load_records(cfg)
    report = validate_records(records, cfg.bounds)
    if report.ok:
        print(f"validate: {len(records)} records, all within bounds "
              f"{cfg.bounds.lower} .. {cfg.bounds.upper}")
    else:
        print(f"validate: {len(report.violations)} violation(s) in {len(records)} records")
        for v in report.violations:
            print(f"  record {v.index + 1}: {v.message}")
    return EXIT_OK


def _run_method(method: str, cfg: RunConfig, problem: MooProblem, utopia):
    """Run one routine with its default sweep; returns (front, payload, counters)."""
    mc = cfg.method
    if method == "global_criterion":
        sweep = scalarize.global_criterion_sweep(problem, mc.p_values, cfg.solver, utopia)
        payload = {
            "parameters": {"p_values": list(mc.p_values)},
            "points": [
                {"tag": f"p={r.p}", "criterion": r.criterion, "responses": list(r.responses),
                 **_outcome_dict(r.outcome)}
                for r in sweep.results
            ],
        }
        return sweep.front, payload, sweep.counters
    if method == "weighted_sum":
        sweep = scalarize.weighted_sum_sweep(problem, mc.weight_steps, cfg.solver, utopia)
        payload = {
            "parameters": {"weight_steps": mc.weight_steps},
            "points": [
                {"tag": f"w={r.weights[0]:g}", "weights": list(r.weights),
                 "weak_pareto_only": r.weak_pareto_only, "responses": list(r.responses),
                 **_outcome_dict(r.outcome)}
                for r in sweep.results
            ],
        }
        return sweep.front, payload, sweep.counters
    if method == "epsilon_constraint":
        sweep = scalarize.epsilon_sweep(problem, mc.epsilon_primary, mc.epsilon_points,
                                        cfg.solver, utopia)
        payload = {
            "parameters": {"epsilon_points": mc.epsilon_points, "primary": mc.epsilon_primary},
            "points": [
                {"tag": f"eps={r.epsilons[0]:.6g}", "epsilons": list(r.epsilons),
                 "active": list(r.active), "feasible": r.feasible,
                 "responses": list(r.responses), **_outcome_dict(r.outcome)}
                for r in sweep.results
            ],
        }
        return sweep.front, payload, sweep.counters
    if method == "lexicographic":
        res = scalarize.lexicographic(problem, mc.order, cfg.solver)
        front = Front(
            (ParetoPoint(res.x, res.responses, "lexicographic",
                         "order=" + ">".join(res.order)),),
            problem.senses,
        )
        payload = {
            "parameters": {"order": list(res.order)},
            "terminated_early": res.terminated_early,
            "stages": [
                {"objective": s.objective, "optimum": s.optimum,
                 "responses": list(s.responses), "outcome": _outcome_dict(s.outcome)}
                for s in res.stages
            ],
        }
        return front, payload, res.counters
    if method == "ga":
        res: GaResult = run_ga(problem, cfg.ga)
        payload = {
            "parameters": {k: getattr(cfg.ga, f) for k, f in _GA_KEYS.items()},
            "points": [
                {"tag": p.tag, "x": list(p.x), "responses": list(p.responses)}
                for p in res.front.points
            ],
        }
        return res.front, payload, res.counters
    raise ConfigError(f"unknown method {method!r}; expected one of {ALL_METHODS + ('all',)}")


def _needs_utopia(methods) -> bool:
    return any(m in ("global_criterion", "weighted_sum", "epsilon_constraint") for m in methods)


def _run_methods(cfg: RunConfig, methods):
    records = _load_records(cfg)
    problem = _build_problem(cfg, _select_models(cfg, records))
    cfg.out.mkdir(parents=True, exist_ok=True)
    utopia = scalarize.individual_optima(problem, cfg.solver) if _needs_utopia(methods) else None
    fronts = {}
    counters = {}
    for method in methods:
        front, payload, method_counters = _run_method(method, cfg, problem, utopia)
        fronts[method] = front
        counters[method] = method_counters
        payload = {"method": method, "counters": _counters_dict(method_counters), **payload}
        if utopia is not None and method in ("global_criterion", "weighted_sum", "epsilon_constraint"):
            payload["individual_optima"] = _utopia_dict(utopia)
        _write_json(cfg.out / f"outcome_{method}.json", payload)
        write_front_csv(cfg.out / f"front_{method}.csv", front)
        write_front_svg(cfg.out / f"front_{method}.svg", front,
                        title=method.replace("_", " "))
        n_feasible = sum(p.feasible for p in front.points)
        print(f"{method}: {n_feasible} point(s), "
              f"{method_counters.iterations} iterations, "
              f"{method_counters.function_evals} function evals")
    return problem, utopia, fronts, counters


def cmd_optimize(cfg: RunConfig) -> int:
    method = cfg.method.method
    methods = ALL_METHODS if method == "all" else (method,)
    for m in methods:
        if m not in ALL_METHODS:
            raise ConfigError(f"unknown method {m!r}; expected one of {ALL_METHODS + ('all',)}")
    _run_methods(cfg, methods)
    print(f"wrote results to {cfg.out}/")
    return EXIT_OK


def _merge_tolerance(fronts) -> tuple[float, ...]:
    """Per-objective epsilon for cross-method merging.

    1e-9 of the response scale: well above last-bit solver noise, well below
    the 1e-6 relative slack the lexicographic stages trade away, so genuinely
    distinct points never eliminate each other.
    """
    n_obj = len(fronts[0].senses)
    spans = [1.0] * n_obj
    for front in fronts:
        for p in front.points:
            for j, v in enumerate(p.responses):
                spans[j] = max(spans[j], abs(v))
    return tuple(1e-9 * s for s in spans)


def _merge_feasible(fronts):
    feasible = [Front(tuple(p for p in f.points if p.feasible), f.senses) for f in fronts]
    return merge_fronts(feasible, eps=_merge_tolerance(feasible))


def cmd_compare(cfg: RunConfig) -> int:
    _, utopia, fronts, counters = _run_methods(cfg, ALL_METHODS)
    rows = []
    if utopia is not None:
        rows.append(("individual_optima", utopia.counters))
    rows.extend((m, counters[m]) for m in ALL_METHODS)
    lines = ["routine,total_iterations,total_function_evals,total_gradient_evals"]
    lines += [f"{name},{c.iterations},{c.function_evals},{c.gradient_evals}" for name, c in rows]
    (cfg.out / "efficiency.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    merged = _merge_feasible(list(fronts.values()))
    write_front_csv(cfg.out / "front_all.csv", merged)
    write_front_svg(cfg.out / "front_all.svg", merged, title="all methods")
    print(f"efficiency report and merged front ({len(merged.points)} points) in {cfg.out}/")
    return EXIT_OK


def cmd_front(cfg: RunConfig, csv_paths) -> int:
    if not csv_paths:
        raise ConfigError("front: at least one front CSV is required")
    senses = (Sense.MINIMIZE, Sense.MAXIMIZE)
    try:
        fronts = [read_front_csv(p, senses) for p in csv_paths]
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    merged = _merge_feasible(fronts)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_front_csv(cfg.out / "front_all.csv", merged)
    write_front_svg(cfg.out / "front_all.svg", merged, title="merged front")
    print(f"merged {len(fronts)} front(s) into {len(merged.points)} points in {cfg.out}/")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pareto-forge",
        description="Fit milling response models and generate Pareto fronts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--data", help="experiment CSV path, or 'builtin'")
        p.add_argument("--models", choices=("refit", "eq23", "eq21"), help="model source")
        p.add_argument("--out", help="output directory")

    p_fit = sub.add_parser("fit", help="fit models and write APD/MAPD diagnostics")
    add_common(p_fit)

    p_val = sub.add_parser("validate", help="check records against the variable bounds")
    add_common(p_val)

    p_opt = sub.add_parser("optimize", help="run one routine (or all) and emit fronts")
    add_common(p_opt)
    p_opt.add_argument("--method", choices=ALL_METHODS + ("all",), help="routine to run")
    p_opt.add_argument("--p", type=int, nargs="+", help="p values for the deviation criterion")
    p_opt.add_argument("--steps", type=int, help="weight sweep step count")
    p_opt.add_argument("--epsilon-points", type=int, dest="epsilon_points",
                       help="epsilon sweep point count")
    p_opt.add_argument("--order", help="lexicographic preference order, e.g. mrr,ra")
    p_opt.add_argument("--seed", type=int, help="seed for solver starts and the GA")
    p_opt.add_argument("--starts", type=int, help="multistart count")

    p_cmp = sub.add_parser("compare", help="run all five routines and the efficiency report")
    add_common(p_cmp)
    p_cmp.add_argument("--seed", type=int, help="seed for solver starts and the GA")
    p_cmp.add_argument("--starts", type=int, help="multistart count")

    p_front = sub.add_parser("front", help="merge front CSVs into one filtered front")
    p_front.add_argument("csvs", nargs="*", help="front CSV files to merge")
    p_front.add_argument("--out", help="output directory")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = apply_overrides(load_config(getattr(args, "config", None)), args)
        if args.command == "fit":
            return cmd_fit(cfg)
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "optimize":
            return cmd_optimize(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
        if args.command == "front":
            return cmd_front(cfg, args.csvs)
        raise ConfigError(f"unknown command {args.command!r}")
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, DatasetError, ValueError) as exc:
        # remaining ValueErrors are bad parameter values (step counts, seeds, ...)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
