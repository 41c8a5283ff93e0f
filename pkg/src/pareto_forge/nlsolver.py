"""Local minimization under box bounds and smooth inequality constraints.

The engine beneath every scalarization routine: an augmented-Lagrangian outer
loop handles nonlinear inequalities, with a projected quasi-Newton (L-BFGS-B)
inner solve on the box. Variables are rescaled to the unit cube internally, so
all tolerances below are quoted on the scaled problem. Deterministic seeded
multistart mitigates local optima of nonconvex scalarizations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .dataset import Bounds

_RHO_INIT = 10.0
_RHO_GROWTH = 10.0
_RHO_MAX = 1e16
_RHO_RESTORED = 1e6


class EqualityConstraintError(ValueError):
    """Equality constraints are accepted in the data model but rejected by the solver."""


class NonFiniteEvaluationError(RuntimeError):
    """An objective or constraint produced a non-finite value or gradient."""

    def __init__(self, point: np.ndarray, name: str = ""):
        self.point = np.asarray(point, dtype=float).copy()
        label = f" in {name!r}" if name else ""
        super().__init__(f"non-finite evaluation{label} at point {self.point.tolist()}")


@dataclass(frozen=True)
class SmoothFunction:
    """A scalar function with gradient, both evaluated through ``value_and_grad``.

    ``model_cost`` is how many response-model evaluations one call represents;
    it drives the run counters. ``scale`` sets the unit in which a constraint's
    feasibility is measured (violation = positive part / scale).
    """

    value_and_grad: Callable[[np.ndarray], tuple[float, np.ndarray]]
    model_cost: int = 1
    scale: float = 1.0
    name: str = ""


@dataclass(frozen=True)
class ConstraintSet:
    """Box bounds plus smooth inequalities (satisfied when <= 0) and equalities."""

    bounds: Bounds
    inequalities: tuple[SmoothFunction, ...] = ()
    equalities: tuple[SmoothFunction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        object.__setattr__(self, "equalities", tuple(self.equalities))


@dataclass
class RunCounters:
    """Totals for one solve or one routine: inner iterations and model evaluations."""

    iterations: int = 0
    function_evals: int = 0
    gradient_evals: int = 0

    def add(self, other: "RunCounters") -> None:
        self.iterations += other.iterations
        self.function_evals += other.function_evals
        self.gradient_evals += other.gradient_evals


@dataclass(frozen=True)
class SolverConfig:
    n_starts: int = 8
    seed: int = 0
    kkt_tol: float = 1e-8
    feas_tol: float = 1e-6
    max_outer: int = 50
    max_inner: int = 200

    def __post_init__(self) -> None:
        if self.n_starts < 1:
            raise ValueError("n_starts must be at least 1")
        if self.kkt_tol <= 0 or self.feas_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class SolveOutcome:
    """Result of one (multi)start solve, in raw variable units."""

    x: tuple[float, float, float]
    objective: float
    converged: bool
    kkt_residual: float
    constraint_violation: float
    counters: RunCounters
    objective_at_start: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))


def stratified_starts(bounds: Bounds, n_starts: int, seed: int) -> np.ndarray:
    """Deterministic start points: the box center, then a stratified uniform sample."""
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    lb = np.asarray(bounds.lower)
    span = np.asarray(bounds.span)
    points = np.empty((n_starts, 3))
    points[0] = lb + 0.5 * span
    m = n_starts - 1
    if m:
        rng = np.random.default_rng(seed)
        unit = np.empty((m, 3))
        for j in range(3):
            strata = rng.permutation(m)
            unit[:, j] = (strata + rng.random(m)) / m
        points[1:] = lb + unit * span
    return points


def _projected_residual(s: np.ndarray, grad: np.ndarray) -> float:
    return float(np.max(np.abs(s - np.clip(s - grad, 0.0, 1.0))))


def _inner_solve(fun, s0: np.ndarray, gtol: float, maxiter: int):
    return _scipy_minimize(
        fun,
        s0,
        jac=True,
        method="L-BFGS-B",
        bounds=[(0.0, 1.0)] * s0.size,
        options={"maxiter": maxiter, "ftol": 1e-16, "gtol": gtol, "maxcor": 10},
    )


class _ScaledProblem:
    """Unit-cube view of the raw problem; every evaluation updates the counters."""

    def __init__(self, objective: SmoothFunction, ineqs: Sequence[SmoothFunction],
                 bounds: Bounds, counters: RunCounters):
        self.objective = objective
        self.ineqs = list(ineqs)
        self.lb = np.asarray(bounds.lower)
        self.ub = np.asarray(bounds.upper)
        self.span = self.ub - self.lb
        self.counters = counters

    def to_raw(self, s: np.ndarray) -> np.ndarray:
        return np.clip(self.lb + s * self.span, self.lb, self.ub)

    def to_unit(self, x: np.ndarray) -> np.ndarray:
        return np.clip((np.asarray(x, dtype=float) - self.lb) / self.span, 0.0, 1.0)

    def eval_objective(self, s: np.ndarray) -> tuple[float, np.ndarray]:
        x = self.to_raw(s)
        f, g = self.objective.value_and_grad(x)
        self.counters.function_evals += self.objective.model_cost
        self.counters.gradient_evals += self.objective.model_cost
        g = np.asarray(g, dtype=float)
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            raise NonFiniteEvaluationError(x, self.objective.name)
        return float(f), g * self.span

    def eval_constraint(self, i: int, s: np.ndarray) -> tuple[float, np.ndarray]:
        con = self.ineqs[i]
        x = self.to_raw(s)
        v, g = con.value_and_grad(x)
        self.counters.function_evals += con.model_cost
        self.counters.gradient_evals += con.model_cost
        g = np.asarray(g, dtype=float)
        if not np.isfinite(v) or not np.all(np.isfinite(g)):
            raise NonFiniteEvaluationError(x, con.name)
        return float(v) / con.scale, g * self.span / con.scale


def minimize(
    objective: SmoothFunction,
    constraints: ConstraintSet,
    start: Sequence[float],
    config: SolverConfig | None = None,
) -> SolveOutcome:
    """Minimize from one start point; see the module docstring for the algorithm.

    The returned point satisfies the box exactly. With ``converged`` True, the
    projected-gradient residual of the Lagrangian is at most ``kkt_tol`` and the
    scaled inequality violation at most ``feas_tol``.
    """
    config = config or SolverConfig()
    if constraints.equalities:
        raise EqualityConstraintError("equality constraints unsupported")
    counters = RunCounters()
    prob = _ScaledProblem(objective, constraints.inequalities, constraints.bounds, counters)
    start = np.asarray(start, dtype=float)
    if not constraints.bounds.contains(start, tol=1e-9):
        raise ValueError(f"start {start.tolist()} outside bounds")
    s = prob.to_unit(start)

    f_start, _ = prob.eval_objective(s)
    f_scale = max(1.0, abs(f_start))
    n_con = len(prob.ineqs)

    if n_con == 0:
        def fused(sv):
            f, g = prob.eval_objective(sv)
            return f / f_scale, g / f_scale

        res = _inner_solve(fused, s, gtol=0.1 * config.kkt_tol, maxiter=config.max_inner)
        counters.iterations += res.nit
        s = np.asarray(res.x)
        f_final, g_final = prob.eval_objective(s)
        residual = _projected_residual(s, g_final / f_scale)
        return SolveOutcome(
            x=tuple(prob.to_raw(s)),
            objective=f_final,
            converged=residual <= config.kkt_tol,
            kkt_residual=residual,
            constraint_violation=0.0,
            counters=counters,
            objective_at_start=f_start,
        )

    def auglag(s_init: np.ndarray, rho0: float, max_outer: int):
        """Multiplier loop from ``s_init``; returns (s, f, converged, residual, violation)."""
        lam = np.zeros(n_con)
        rho = rho0
        s_cur = s_init
        v_prev = np.inf
        f_cur, residual, violation = np.nan, np.inf, np.inf
        for outer in range(max_outer):
            lam_k, rho_k = lam.copy(), rho

            def fused(sv, _lam=lam_k, _rho=rho_k):
                f, g = prob.eval_objective(sv)
                f /= f_scale
                g = g / f_scale
                for i in range(n_con):
                    ci, gi = prob.eval_constraint(i, sv)
                    mult = max(0.0, _lam[i] + _rho * ci)
                    f += (mult * mult - _lam[i] * _lam[i]) / (2.0 * _rho)
                    g = g + mult * gi
                return f, g

            gtol = max(0.1 * config.kkt_tol, 1e-4 * 0.1 ** outer)
            res = _inner_solve(fused, s_cur, gtol=gtol, maxiter=config.max_inner)
            counters.iterations += res.nit
            s_cur = np.asarray(res.x)

            f_cur, g_obj = prob.eval_objective(s_cur)
            con_vals = np.empty(n_con)
            grad_lagr = g_obj / f_scale
            for i in range(n_con):
                ci, gi = prob.eval_constraint(i, s_cur)
                con_vals[i] = ci
                lam_i = max(0.0, lam[i] + rho * ci)
                grad_lagr = grad_lagr + lam_i * gi
            violation = float(max(0.0, con_vals.max(initial=0.0)))
            # shifted measure: feasibility plus complementarity, so an active
            # constraint approached from the feasible side still drives lambda home
            shifted = float(np.max(np.abs(np.maximum(con_vals, -lam / rho)), initial=0.0))
            lam = np.maximum(0.0, lam + rho * con_vals)
            residual = _projected_residual(s_cur, grad_lagr)
            if shifted <= config.feas_tol and residual <= config.kkt_tol:
                return s_cur, f_cur, True, residual, violation
            if shifted > 0.25 * v_prev:
                rho = min(rho * _RHO_GROWTH, _RHO_MAX)
            v_prev = shifted
        return s_cur, f_cur, False, residual, violation

    def restore(s_init: np.ndarray):
        """Phase-1 fallback: drive the squared constraint violation to zero on the box."""

        def fused(sv):
            total = 0.0
            grad = np.zeros_like(sv)
            for i in range(n_con):
                ci, gi = prob.eval_constraint(i, sv)
                pos = max(0.0, ci)
                total += pos * pos
                grad = grad + 2.0 * pos * gi
            return total, grad

        res = _inner_solve(fused, s_init, gtol=1e-12, maxiter=config.max_inner)
        counters.iterations += res.nit
        s_cur = np.asarray(res.x)
        violation = max(0.0, max(prob.eval_constraint(i, s_cur)[0] for i in range(n_con)))
        return s_cur, violation

    candidates = [auglag(s, _RHO_INIT, config.max_outer)]
    if candidates[0][4] > config.feas_tol:
        # The multiplier loop can stall in a locally-infeasible basin when the
        # feasible set is tiny (an epsilon bound at the exact optimum, say).
        s_r, v_r = restore(s)
        if v_r < candidates[0][4]:
            f_r, g_r = prob.eval_objective(s_r)
            candidates.append((s_r, f_r, False, _projected_residual(s_r, g_r / f_scale), v_r))
        if v_r <= config.feas_tol:
            candidates.append(auglag(s_r, _RHO_RESTORED, config.max_outer))

    def quality(cand):
        _, f, _, _, violation = cand
        feasible = violation <= config.feas_tol
        return (not feasible, f if feasible else (violation, f))

    s, f_final, converged, residual, violation = min(candidates, key=quality)
    return SolveOutcome(
        x=tuple(prob.to_raw(s)),
        objective=f_final,
        converged=converged,
        kkt_residual=residual,
        constraint_violation=violation,
        counters=counters,
        objective_at_start=f_start,
    )


def _improves(challenger: SolveOutcome, incumbent: SolveOutcome, feas_tol: float) -> bool:
    ca = challenger.constraint_violation <= feas_tol
    cb = incumbent.constraint_violation <= feas_tol
    if ca != cb:
        return ca
    if ca:
        return challenger.objective < incumbent.objective
    return (challenger.constraint_violation, challenger.objective) < (
        incumbent.constraint_violation,
        incumbent.objective,
    )


def multistart_minimize(
    objective: SmoothFunction,
    constraints: ConstraintSet,
    config: SolverConfig | None = None,
) -> SolveOutcome:
    """Best feasible outcome over seeded deterministic starts.

    Counters are summed over all starts. Among equal-quality starts the lowest
    start index wins, so results do not depend on evaluation scheduling.
    """
    config = config or SolverConfig()
    starts = stratified_starts(constraints.bounds, config.n_starts, config.seed)
    total = RunCounters()
    best: SolveOutcome | None = None
    for start in starts:
        outcome = minimize(objective, constraints, start, config)
        total.add(outcome.counters)
        if best is None or _improves(outcome, best, config.feas_tol):
            best = outcome
    assert best is not None
    feasible = best.constraint_violation <= config.feas_tol
    return replace(best, counters=total, converged=best.converged and feasible)
