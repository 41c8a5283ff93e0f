"""Classical multi-objective routines over the constrained response models.

Four scalarizations are provided: the relative-deviation criterion (a p-norm of
deviations from the per-objective optima), the lexicographic sequence, the
normalized weighted sum, and the epsilon-constraint method, plus the shared
individual-optima (utopia and anti-optimum) computation they rely on.

Maximized objectives are converted to minimization by negation internally;
every reported response is in natural, un-negated units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .nlsolver import (
    ConstraintSet,
    RunCounters,
    SmoothFunction,
    SolveOutcome,
    SolverConfig,
    multistart_minimize,
)
from .pareto import Front, ParetoPoint, Sense, annotate_dominance
from .polymodel import PolynomialModel, evaluate, gradient

#: p grid used by the deviation-criterion sweep in the case study.
DEFAULT_P_VALUES = (1, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20)

#: Relative slack applied to a stage optimum when it becomes a constraint bound.
LEX_SLACK_REL = 1e-6

#: Scaled constraint values above -ACTIVE_TOL count as active.
ACTIVE_TOL = 1e-5

_WEIGHT_SUM_TOL = 1e-12


class InfeasibleEpsilonError(RuntimeError):
    """The epsilon bounds admit no feasible point."""


class StageInfeasibleError(RuntimeError):
    """A lexicographic stage is infeasible under the previously fixed objectives."""


class UtopiaSolveError(RuntimeError):
    """An individual-optimum solve failed; the failing objective is named."""


@dataclass(frozen=True)
class Objective:
    model: PolynomialModel
    sense: Sense

    @property
    def name(self) -> str:
        return self.model.response

    @property
    def sign(self) -> float:
        """+1 for minimized objectives, -1 for maximized ones."""
        return 1.0 if self.sense is Sense.MINIMIZE else -1.0

    def minimized(self, x) -> tuple[float, np.ndarray]:
        """Minimization-form value and gradient at ``x``."""
        return self.sign * float(evaluate(self.model, x)), self.sign * gradient(self.model, x)


@dataclass(frozen=True)
class MooProblem:
    objectives: tuple[Objective, ...]
    constraints: ConstraintSet

    def __post_init__(self) -> None:
        object.__setattr__(self, "objectives", tuple(self.objectives))
        if len(self.objectives) < 2:
            raise ValueError("a multi-objective problem needs at least two objectives")

    @property
    def senses(self) -> tuple[Sense, ...]:
        return tuple(o.sense for o in self.objectives)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(o.name for o in self.objectives)

    def responses_at(self, x) -> tuple[float, ...]:
        return tuple(float(evaluate(o.model, x)) for o in self.objectives)

    def index_of(self, objective: int | str) -> int:
        if isinstance(objective, int):
            if not 0 <= objective < len(self.objectives):
                raise ValueError(f"objective index {objective} out of range")
            return objective
        lowered = [n.lower() for n in self.names]
        try:
            return lowered.index(objective.lower())
        except ValueError:
            raise ValueError(f"no objective named {objective!r}; have {self.names}") from None


@dataclass(frozen=True)
class ObjectiveRange:
    """Feasible-region extremes of one objective, in natural units."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"degenerate range: lo {self.lo} must be below hi {self.hi}")


@dataclass(frozen=True)
class NormalizationBounds:
    ranges: tuple[ObjectiveRange, ...]


def normalize(value: float, bounds: ObjectiveRange | Sequence[float]) -> float:
    """Map ``value`` to (value - lo) / (hi - lo); not clamped to [0, 1]."""
    if not isinstance(bounds, ObjectiveRange):
        lo, hi = bounds
        bounds = ObjectiveRange(float(lo), float(hi))
    return (value - bounds.lo) / (bounds.hi - bounds.lo)


@dataclass(frozen=True)
class UtopiaEntry:
    name: str
    sense: Sense
    best: float
    best_x: tuple[float, ...]
    worst: float
    worst_x: tuple[float, ...]

    def range(self) -> ObjectiveRange:
        lo, hi = sorted((self.best, self.worst))
        return ObjectiveRange(lo, hi)


@dataclass(frozen=True)
class UtopiaRecord:
    """Per-objective optimum and anti-optimum over the feasible region."""

    entries: tuple[UtopiaEntry, ...]
    counters: RunCounters

    def normalization_bounds(self) -> NormalizationBounds:
        return NormalizationBounds(tuple(e.range() for e in self.entries))

    def best_minimized(self, i: int) -> float:
        e = self.entries[i]
        return e.best if e.sense is Sense.MINIMIZE else -e.best


def _objective_fn(obj: Objective, negate: bool = False) -> SmoothFunction:
    sign = -1.0 if negate else 1.0

    def vg(x):
        f, g = obj.minimized(x)
        return sign * f, sign * g

    label = f"-{obj.name}" if negate else obj.name
    return SmoothFunction(vg, model_cost=1, name=label)


def individual_optima(problem: MooProblem, config: SolverConfig | None = None) -> UtopiaRecord:
    """Multistart optimum and anti-optimum of every objective, in its own sense.

    The anti-optimum (worst feasible value) feeds normalization and sweep ranges.
    """
    config = config or SolverConfig()
    counters = RunCounters()
    entries = []
    for obj in problem.objectives:
        results = {}
        for negate in (False, True):
            outcome = multistart_minimize(_objective_fn(obj, negate), problem.constraints, config)
            counters.add(outcome.counters)
            if not outcome.converged:
                kind = "anti-optimum" if negate else "optimum"
                raise UtopiaSolveError(
                    f"solver failed on the {kind} of objective {obj.name!r} "
                    f"(violation {outcome.constraint_violation:.3g}, "
                    f"kkt {outcome.kkt_residual:.3g})"
                )
            results[negate] = outcome
        best_minform = results[False].objective
        worst_minform = -results[True].objective
        entries.append(
            UtopiaEntry(
                name=obj.name,
                sense=obj.sense,
                best=obj.sign * best_minform,
                best_x=results[False].x,
                worst=obj.sign * worst_minform,
                worst_x=results[True].x,
            )
        )
    return UtopiaRecord(tuple(entries), counters)


def relative_deviation_norm(values, utopia_values, p: int):
    """The scalarized deviation criterion: the p-norm of |f_i - f_i*| / |f_i*|.

    ``values`` holds minimization-form objective values in its last axis;
    broadcasting over leading axes allows grid evaluation. A single objective at
    its own optimum yields 0.
    """
    if p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    values = np.asarray(values, dtype=float)
    stars = np.asarray(utopia_values, dtype=float)
    if np.any(stars == 0.0):
        raise ValueError("deviation criterion undefined: an individual optimum is zero")
    d = np.abs(values - stars) / np.abs(stars)
    m = d.max(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(m[..., None] > 0, d / np.where(m[..., None] > 0, m[..., None], 1.0), 0.0)
        out = m * np.power(np.power(scaled, p).sum(axis=-1), 1.0 / p)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class MethodResult:
    """Shared shape of every routine's answer: point, natural responses, solver outcome."""

    x: tuple[float, ...]
    responses: tuple[float, ...]
    outcome: SolveOutcome


@dataclass(frozen=True)
class GlobalCriterionResult(MethodResult):
    p: int = 2
    criterion: float = math.nan


@dataclass(frozen=True)
class WeightedSumResult(MethodResult):
    weights: tuple[float, ...] = ()
    weak_pareto_only: bool = False


@dataclass(frozen=True)
class EpsilonResult(MethodResult):
    epsilons: tuple[float, ...] = ()
    active: tuple[bool, ...] = ()
    feasible: bool = True


@dataclass(frozen=True)
class LexStage:
    objective: str
    x: tuple[float, ...]
    responses: tuple[float, ...]
    optimum: float
    outcome: SolveOutcome


@dataclass(frozen=True)
class LexicographicResult(MethodResult):
    order: tuple[str, ...] = ()
    stages: tuple[LexStage, ...] = ()
    terminated_early: bool = False
    counters: RunCounters = field(default_factory=RunCounters)


@dataclass(frozen=True)
class SweepResult:
    """A parameter sweep: the labeled front plus per-point results and total counters."""

    front: Front
    results: tuple
    counters: RunCounters


def _criterion_fn(problem: MooProblem, utopia: UtopiaRecord, p: int) -> SmoothFunction:
    stars = np.array([utopia.best_minimized(i) for i in range(len(problem.objectives))])
    if np.any(stars == 0.0):
        zero = problem.objectives[int(np.argmin(np.abs(stars)))].name
        raise ValueError(f"deviation criterion undefined: optimum of {zero!r} is zero")

    def vg(x):
        vals = np.empty(len(problem.objectives))
        grads = np.empty((len(problem.objectives), 3))
        for i, obj in enumerate(problem.objectives):
            vals[i], grads[i] = obj.minimized(x)
        d = np.abs(vals - stars) / np.abs(stars)
        m = d.max()
        if m == 0.0:
            return 0.0, np.zeros(3)
        value = m * float(np.power(np.power(d / m, p).sum(), 1.0 / p))
        # dF/dd_i = (d_i / F)^(p-1), with d_i <= F guaranteed for p >= 1
        weights = np.power(d / value, p - 1)
        signs = np.sign(vals - stars) / np.abs(stars)
        grad = (weights * signs) @ grads
        return value, grad

    return SmoothFunction(vg, model_cost=len(problem.objectives), name=f"deviation p={p}")


def global_criterion(
    problem: MooProblem,
    p: int,
    config: SolverConfig | None = None,
    utopia: UtopiaRecord | None = None,
) -> GlobalCriterionResult:
    """Minimize the p-norm of relative deviations from the individual optima."""
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"p must be a positive integer, got {p!r}")
    config = config or SolverConfig()
    utopia = utopia or individual_optima(problem, config)
    outcome = multistart_minimize(_criterion_fn(problem, utopia, p), problem.constraints, config)
    return GlobalCriterionResult(
        x=outcome.x,
        responses=problem.responses_at(outcome.x),
        outcome=outcome,
        p=p,
        criterion=outcome.objective,
    )


def global_criterion_sweep(
    problem: MooProblem,
    p_values: Sequence[int] = DEFAULT_P_VALUES,
    config: SolverConfig | None = None,
    utopia: UtopiaRecord | None = None,
) -> SweepResult:
    """One criterion solve per p; dominated points are kept but flagged."""
    config = config or SolverConfig()
    utopia = utopia or individual_optima(problem, config)
    results = []
    counters = RunCounters()
    for p in p_values:
        res = global_criterion(problem, p, config, utopia)
        counters.add(res.outcome.counters)
        results.append(res)
    points = [
        ParetoPoint(r.x, r.responses, "global_criterion", f"p={r.p}") for r in results
    ]
    front = annotate_dominance(Front(tuple(points), problem.senses))
    return SweepResult(front, tuple(results), counters)


def _normalized_ranges(problem: MooProblem, bounds: NormalizationBounds):
    """Minimization-form (offset, width) per objective for the weighted sum."""
    out = []
    for obj, rng in zip(problem.objectives, bounds.ranges):
        lo_min_form = rng.lo if obj.sense is Sense.MINIMIZE else -rng.hi
        out.append((lo_min_form, rng.hi - rng.lo))
    return out


def weighted_sum(
    problem: MooProblem,
    weights: Sequence[float],
    normalization: NormalizationBounds | None = None,
    config: SolverConfig | None = None,
    utopia: UtopiaRecord | None = None,
) -> WeightedSumResult:
    """Minimize the weighted sum of normalized minimization-form objectives.

    Weights must be non-negative and sum to one. A zero weight is allowed for
    sweep endpoints, but the result is then only weakly Pareto optimal.
    """
    config = config or SolverConfig()
    weights = tuple(float(w) for w in weights)
    if len(weights) != len(problem.objectives):
        raise ValueError(f"{len(weights)} weights for {len(problem.objectives)} objectives")
    if any(w < 0 for w in weights):
        raise ValueError(f"negative weight in {weights}")
    if abs(math.fsum(weights) - 1.0) > _WEIGHT_SUM_TOL:
        raise ValueError(f"weights must sum to 1, got {math.fsum(weights)!r}")
    if normalization is None:
        utopia = utopia or individual_optima(problem, config)
        normalization = utopia.normalization_bounds()
    ranges = _normalized_ranges(problem, normalization)

    def vg(x):
        total = 0.0
        grad = np.zeros(3)
        for w, obj, (lo, width) in zip(weights, problem.objectives, ranges):
            f, g = obj.minimized(x)
            total += w * (f - lo) / width
            grad += (w / width) * g
        return total, grad

    fn = SmoothFunction(vg, model_cost=len(problem.objectives), name=f"weighted sum {weights}")
    outcome = multistart_minimize(fn, problem.constraints, config)
    return WeightedSumResult(
        x=outcome.x,
        responses=problem.responses_at(outcome.x),
        outcome=outcome,
        weights=weights,
        weak_pareto_only=any(w == 0.0 for w in weights),
    )


def weighted_sum_sweep(
    problem: MooProblem,
    steps: int = 11,
    config: SolverConfig | None = None,
    utopia: UtopiaRecord | None = None,
) -> SweepResult:
    """Sweep the first objective's weight over {0, 1/(steps-1), ..., 1}."""
    if steps < 2:
        raise ValueError(f"steps must be at least 2, got {steps}")
    if len(problem.objectives) != 2:
        raise ValueError("the weight sweep supports exactly two objectives")
    config = config or SolverConfig()
    utopia = utopia or individual_optima(problem, config)
    normalization = utopia.normalization_bounds()
    results = []
    counters = RunCounters()
    for k in range(steps):
        w = k / (steps - 1)
        res = weighted_sum(problem, (w, 1.0 - w), normalization, config)
        counters.add(res.outcome.counters)
        results.append(res)
    points = [
        ParetoPoint(r.x, r.responses, "weighted_sum", f"w={r.weights[0]:g}") for r in results
    ]
    front = annotate_dominance(Front(tuple(points), problem.senses))
    return SweepResult(front, tuple(results), counters)


def _epsilon_solve(problem, primary_idx, epsilons, config):
    others = [i for i in range(len(problem.objectives)) if i != primary_idx]
    if len(epsilons) != len(others):
        raise ValueError(f"{len(epsilons)} bounds for {len(others)} non-primary objectives")
    extra = []
    for i, eps in zip(others, epsilons):
        obj = problem.objectives[i]

        def vg(x, _obj=obj, _eps=eps):
            f, g = _obj.minimized(x)
            return f - _eps, g

        extra.append(
            SmoothFunction(vg, model_cost=1, scale=max(1.0, abs(eps)), name=f"{obj.name}<= {eps:g}")
        )
    constraints = ConstraintSet(
        problem.constraints.bounds,
        problem.constraints.inequalities + tuple(extra),
        problem.constraints.equalities,
    )
    outcome = multistart_minimize(_objective_fn(problem.objectives[primary_idx]), constraints, config)
    feasible = outcome.constraint_violation <= config.feas_tol
    active = []
    for i, eps in zip(others, epsilons):
        f, _ = problem.objectives[i].minimized(np.asarray(outcome.x))
        scale = max(1.0, abs(eps))
        active.append((f - eps) / scale >= -ACTIVE_TOL)
    return EpsilonResult(
        x=outcome.x,
        responses=problem.responses_at(outcome.x),
        outcome=outcome,
        epsilons=tuple(float(e) for e in epsilons),
        active=tuple(active),
        feasible=feasible,
    )


def epsilon_constraint(
    problem: MooProblem,
    primary: int | str,
    epsilons: Sequence[float],
    config: SolverConfig | None = None,
) -> EpsilonResult:
    """Optimize the primary objective with the others bounded above.

    Bounds apply to the minimization form of each non-primary objective (for a
    minimized objective that is simply its natural upper bound). Raises
    InfeasibleEpsilonError when the bounds admit no feasible point.
    """
    config = config or SolverConfig()
    primary_idx = problem.index_of(primary)
    result = _epsilon_solve(problem, primary_idx, epsilons, config)
    if not result.feasible:
        raise InfeasibleEpsilonError(
            f"bounds {result.epsilons} on the non-primary objectives are unattainable "
            f"(best violation {result.outcome.constraint_violation:.3g} scaled)"
        )
    return result


def epsilon_sweep(
    problem: MooProblem,
    primary: int | str,
    n_points: int = 11,
    config: SolverConfig | None = None,
    utopia: UtopiaRecord | None = None,
) -> SweepResult:
    """Uniform epsilon grid between the bounded objective's optimum and anti-optimum.

    Infeasible grid points are recorded as such, not fatal.
    """
    if n_points < 2:
        raise ValueError(f"n_points must be at least 2, got {n_points}")
    if len(problem.objectives) != 2:
        raise ValueError("the epsilon sweep supports exactly two objectives")
    config = config or SolverConfig()
    utopia = utopia or individual_optima(problem, config)
    primary_idx = problem.index_of(primary)
    other_idx = 1 - primary_idx
    lo = utopia.best_minimized(other_idx)
    entry = utopia.entries[other_idx]
    hi = entry.worst if entry.sense is Sense.MINIMIZE else -entry.worst
    grid = np.linspace(lo, hi, n_points)
    results = []
    counters = RunCounters()
    for eps in grid:
        res = _epsilon_solve(problem, primary_idx, (float(eps),), config)
        counters.add(res.outcome.counters)
        results.append(res)
    points = [
        ParetoPoint(
            r.x, r.responses, "epsilon_constraint", f"eps={r.epsilons[0]:.6g}", feasible=r.feasible
        )
        for r in results
    ]
    front = annotate_dominance(Front(tuple(points), problem.senses))
    return SweepResult(front, tuple(results), counters)


def lexicographic(
    problem: MooProblem,
    order: Sequence[int | str],
    config: SolverConfig | None = None,
    equality_tol: float = 1e-4,
) -> LexicographicResult:
    """Optimize objectives in preference order, pinning each stage's optimum.

    Stage i minimizes its objective subject to every earlier objective staying
    within a relative slack of its stage optimum. The sequence stops early when
    two consecutive stages return the same point within ``equality_tol`` on
    box-scaled variables.
    """
    config = config or SolverConfig()
    indices = [problem.index_of(o) for o in order]
    if not indices:
        raise ValueError("order must name at least one objective")
    if len(set(indices)) != len(indices):
        raise ValueError(f"order contains duplicate objectives: {list(order)}")
    lb = np.asarray(problem.constraints.bounds.lower)
    span = np.asarray(problem.constraints.bounds.span)
    stages: list[LexStage] = []
    extra: list[SmoothFunction] = []
    counters = RunCounters()
    prev_scaled = None
    terminated = False
    for idx in indices:
        obj = problem.objectives[idx]
        constraints = ConstraintSet(
            problem.constraints.bounds,
            problem.constraints.inequalities + tuple(extra),
            problem.constraints.equalities,
        )
        outcome = multistart_minimize(_objective_fn(obj), constraints, config)
        counters.add(outcome.counters)
        if outcome.constraint_violation > config.feas_tol:
            blockers = [c.name for c in extra]
            raise StageInfeasibleError(
                f"stage optimizing {obj.name!r} infeasible under prior constraints {blockers} "
                f"(violation {outcome.constraint_violation:.3g} scaled)"
            )
        stages.append(
            LexStage(
                objective=obj.name,
                x=outcome.x,
                responses=problem.responses_at(outcome.x),
                optimum=obj.sign * outcome.objective,
                outcome=outcome,
            )
        )
        scaled = (np.asarray(outcome.x) - lb) / span
        if prev_scaled is not None and float(np.max(np.abs(scaled - prev_scaled))) <= equality_tol:
            terminated = True
            break
        prev_scaled = scaled
        f_star = outcome.objective
        bound = f_star + LEX_SLACK_REL * abs(f_star)

        def vg(x, _obj=obj, _bound=bound):
            f, g = _obj.minimized(x)
            return f - _bound, g

        extra.append(
            SmoothFunction(vg, model_cost=1, scale=max(1.0, abs(f_star)), name=f"hold {obj.name}")
        )
    final = stages[-1]
    return LexicographicResult(
        x=final.x,
        responses=final.responses,
        outcome=final.outcome,
        order=tuple(problem.objectives[i].name for i in indices),
        stages=tuple(stages),
        terminated_early=terminated,
        counters=counters,
    )
