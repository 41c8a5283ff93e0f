"""Dominance reasoning, front filtering, and cross-method front merging."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

FRONT_CSV_HEADER = ("method", "param", "vc", "fz", "t", "ra", "mrr")


class Sense(Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


@dataclass(frozen=True)
class ParetoPoint:
    """A labeled solution: design point, natural-unit responses, and provenance tags."""

    x: tuple[float, ...]
    responses: tuple[float, ...]
    method: str
    tag: str
    feasible: bool = True
    dominated: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "responses", tuple(float(v) for v in self.responses))


@dataclass(frozen=True)
class Front:
    """Ordered set of labeled points sharing one per-objective sense vector."""

    points: tuple[ParetoPoint, ...]
    senses: tuple[Sense, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "senses", tuple(self.senses))
        for p in self.points:
            if len(p.responses) != len(self.senses):
                raise ValueError(
                    f"point has {len(p.responses)} responses, front has {len(self.senses)} senses"
                )


def _min_form(values: Sequence[float], senses: Sequence[Sense]) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    sign = np.array([1.0 if s is Sense.MINIMIZE else -1.0 for s in senses])
    return v * sign


def _eps_array(eps, n: int) -> np.ndarray:
    arr = np.asarray(eps, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValueError(f"eps must be a scalar or length-{n} sequence")
    if np.any(arr < 0):
        raise ValueError("eps must be non-negative")
    return arr


def dominates(a: Sequence[float], b: Sequence[float], senses: Sequence[Sense], eps=0.0) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere.

    ``eps`` widens the equality band per objective for comparing solver outputs
    whose agreement is tolerance-limited; the default 0 is an exact comparison.
    """
    if len(a) != len(b) or len(a) != len(senses):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)} responses, {len(senses)} senses")
    e = _eps_array(eps, len(senses))
    va, vb = _min_form(a, senses), _min_form(b, senses)
    return bool(np.all(va <= vb + e) and np.any(va < vb - e))


def filter_nondominated(
    points: Sequence[ParetoPoint], senses: Sequence[Sense], eps=0.0
) -> list[ParetoPoint]:
    """Maximal mutually non-dominated subset, preserving input order.

    Exact duplicate response vectors collapse to their first occurrence.
    """
    survivors: list[ParetoPoint] = []
    seen: set[tuple[float, ...]] = set()
    for i, p in enumerate(points):
        if p.responses in seen:
            continue
        if any(
            dominates(q.responses, p.responses, senses, eps)
            for j, q in enumerate(points)
            if j != i
        ):
            continue
        seen.add(p.responses)
        survivors.append(replace(p, dominated=False))
    return survivors


def annotate_dominance(front: Front, eps=0.0) -> Front:
    """Return the same front with each point's ``dominated`` flag set; nothing is removed."""
    flagged = []
    for i, p in enumerate(front.points):
        dom = any(
            dominates(q.responses, p.responses, front.senses, eps)
            for j, q in enumerate(front.points)
            if j != i
        )
        flagged.append(replace(p, dominated=dom))
    return Front(tuple(flagged), front.senses)


def merge_fronts(fronts: Sequence[Front], eps=0.0) -> Front:
    """Concatenate fronts and re-filter for dominance, keeping method labels."""
    if not fronts:
        raise ValueError("nothing to merge")
    senses = fronts[0].senses
    for f in fronts[1:]:
        if f.senses != senses:
            raise ValueError(f"sense mismatch: {f.senses} vs {senses}")
    merged = [p for f in fronts for p in f.points]
    return Front(tuple(filter_nondominated(merged, senses, eps)), senses)


def front_to_csv_text(front: Front, include_infeasible: bool = False) -> str:
    """CSV rendering with the fixed ``method,param,vc,fz,t,ra,mrr`` schema.

    Requires three design variables and two responses (the case-study layout).
    """
    lines = [",".join(FRONT_CSV_HEADER)]
    for p in front.points:
        if not p.feasible and not include_infeasible:
            continue
        if len(p.x) != 3 or len(p.responses) != 2:
            raise ValueError("front CSV needs 3 design variables and 2 responses per point")
        cells = [p.method, p.tag] + [f"{v:.10g}" for v in (*p.x, *p.responses)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_front_csv(path: str | Path, front: Front, include_infeasible: bool = False) -> None:
    Path(path).write_text(front_to_csv_text(front, include_infeasible), encoding="utf-8")


def read_front_csv(path: str | Path, senses: Sequence[Sense]) -> Front:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != FRONT_CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(FRONT_CSV_HEADER)}")
        points = []
        for row in reader:
            if not row:
                continue
            method, tag, *nums = row
            vc, fz, t, ra, mrr = (float(v) for v in nums)
            points.append(ParetoPoint((vc, fz, t), (ra, mrr), method, tag))
    return Front(tuple(points), tuple(senses))
