"""Ordinary least squares fitting of the response models and fit diagnostics.

The models are linear in their coefficients, so the fit is plain OLS on the
monomial basis, solved through a numerically stable orthogonal factorization
with internal column scaling (raw-unit columns span 1 to ~1e5). Diagnostics are
the absolute percentage deviation (APD) per run, its mean (MAPD), and the
extreme predicted values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import ExperimentRecord
from .polymodel import PolyBasis, PolynomialModel, basis_eval, evaluate

CONDITION_WARN_THRESHOLD = 1e10

_RESPONSE_META = {"ra": ("Ra", "um"), "mrr": ("MRR", "mm^3/min")}


class RegressionError(ValueError):
    """Raised when a fit cannot be computed (too few records, rank deficiency)."""


@dataclass(frozen=True)
class FitDiagnostics:
    model: PolynomialModel
    predicted: tuple[float, ...]
    apd_per_row: tuple[float, ...]
    mapd: float
    max_predicted: float
    min_predicted: float
    condition_warning: bool
    condition_estimate: float | None = None


def apd(actual: float, predicted: float) -> float:
    """Absolute percentage deviation |actual - predicted| / |actual|, as a fraction."""
    if actual == 0:
        raise ValueError("APD undefined for a zero actual value")
    return abs(actual - predicted) / abs(actual)


def mapd(apds: Sequence[float]) -> float:
    """Arithmetic mean of APD values."""
    if len(apds) == 0:
        raise ValueError("MAPD of an empty list")
    return math.fsum(apds) / len(apds)


def _design_matrix(records: Sequence[ExperimentRecord], basis: PolyBasis) -> np.ndarray:
    pts = np.array([r.point for r in records], dtype=float)
    return basis_eval(basis, pts)


def _diagnose(model: PolynomialModel, records, response: str,
              condition_warning: bool = False, condition: float | None = None) -> FitDiagnostics:
    actual = np.array([getattr(r, response) for r in records], dtype=float)
    pts = np.array([r.point for r in records], dtype=float)
    predicted = np.asarray(evaluate(model, pts), dtype=float)
    apds = tuple(apd(a, p) for a, p in zip(actual, predicted))
    return FitDiagnostics(
        model=model,
        predicted=tuple(float(p) for p in predicted),
        apd_per_row=apds,
        mapd=mapd(apds),
        max_predicted=float(predicted.max()),
        min_predicted=float(predicted.min()),
        condition_warning=condition_warning,
        condition_estimate=condition,
    )


def model_diagnostics(records: Sequence[ExperimentRecord], model: PolynomialModel,
                      response: str) -> FitDiagnostics:
    """APD/MAPD diagnostics of a fixed (already fitted or published) model."""
    if response not in _RESPONSE_META:
        raise ValueError(f"response must be 'ra' or 'mrr', got {response!r}")
    return _diagnose(model, records, response)


def fit_ols(records: Sequence[ExperimentRecord], basis: PolyBasis, response: str) -> FitDiagnostics:
    """Least-squares fit of ``response`` over ``basis`` with full diagnostics.

    Coefficients minimize the sum of squared residuals; exposed coefficients are
    in raw units (the column scaling is undone after the solve).
    """
    if response not in _RESPONSE_META:
        raise ValueError(f"response must be 'ra' or 'mrr', got {response!r}")
    n, k = len(records), basis.n_terms
    if n < k:
        raise RegressionError(f"fewer records than coefficients: {n} < {k}")
    A = _design_matrix(records, basis)
    y = np.array([getattr(r, response) for r in records], dtype=float)
    col_scale = np.abs(A).max(axis=0)
    if np.any(col_scale == 0.0):
        raise RegressionError("design matrix is rank deficient (zero column)")
    coeffs_scaled, _, rank, svals = np.linalg.lstsq(A / col_scale, y, rcond=None)
    if rank < k:
        raise RegressionError(f"design matrix is rank deficient (rank {rank} < {k} terms)")
    condition = float(svals[0] / svals[-1])
    coeffs = tuple(coeffs_scaled / col_scale)
    name, units = _RESPONSE_META[response]
    model = PolynomialModel(basis, coeffs, name, units)
    return _diagnose(model, records, response,
                     condition_warning=condition > CONDITION_WARN_THRESHOLD,
                     condition=condition)


@dataclass(frozen=True)
class ComparisonRow:
    actual: tuple[float, float]
    predicted_a: tuple[float, float]
    predicted_b: tuple[float, float]
    apd_a: tuple[float, float]
    apd_b: tuple[float, float]


@dataclass(frozen=True)
class ModelComparison:
    """Side-by-side APD comparison of two (Ra, MRR) model pairs over a dataset."""

    label_a: str
    label_b: str
    rows: tuple[ComparisonRow, ...]
    mapd_a: tuple[float, float]
    mapd_b: tuple[float, float]
    max_predicted_a: tuple[float, float]
    min_predicted_a: tuple[float, float]
    max_predicted_b: tuple[float, float]
    min_predicted_b: tuple[float, float]
    winners: tuple[str, str]


def compare_models(
    records: Sequence[ExperimentRecord],
    pair_a: tuple[PolynomialModel, PolynomialModel],
    pair_b: tuple[PolynomialModel, PolynomialModel],
    label_a: str = "a",
    label_b: str = "b",
) -> ModelComparison:
    """Per-run predictions and APDs for both pairs, MAPD summary, and a winner per response.

    The winner of each response is the pair with the lower MAPD; equal MAPDs tie.
    """
    diag = {
        ("a", "ra"): _diagnose(pair_a[0], records, "ra"),
        ("a", "mrr"): _diagnose(pair_a[1], records, "mrr"),
        ("b", "ra"): _diagnose(pair_b[0], records, "ra"),
        ("b", "mrr"): _diagnose(pair_b[1], records, "mrr"),
    }
    rows = tuple(
        ComparisonRow(
            actual=(rec.ra, rec.mrr),
            predicted_a=(diag[("a", "ra")].predicted[i], diag[("a", "mrr")].predicted[i]),
            predicted_b=(diag[("b", "ra")].predicted[i], diag[("b", "mrr")].predicted[i]),
            apd_a=(diag[("a", "ra")].apd_per_row[i], diag[("a", "mrr")].apd_per_row[i]),
            apd_b=(diag[("b", "ra")].apd_per_row[i], diag[("b", "mrr")].apd_per_row[i]),
        )
        for i, rec in enumerate(records)
    )

    def winner(resp: str) -> str:
        ma, mb = diag[("a", resp)].mapd, diag[("b", resp)].mapd
        if ma < mb:
            return label_a
        if mb < ma:
            return label_b
        return "tie"

    return ModelComparison(
        label_a=label_a,
        label_b=label_b,
        rows=rows,
        mapd_a=(diag[("a", "ra")].mapd, diag[("a", "mrr")].mapd),
        mapd_b=(diag[("b", "ra")].mapd, diag[("b", "mrr")].mapd),
        max_predicted_a=(diag[("a", "ra")].max_predicted, diag[("a", "mrr")].max_predicted),
        min_predicted_a=(diag[("a", "ra")].min_predicted, diag[("a", "mrr")].min_predicted),
        max_predicted_b=(diag[("b", "ra")].max_predicted, diag[("b", "mrr")].max_predicted),
        min_predicted_b=(diag[("b", "ra")].min_predicted, diag[("b", "mrr")].min_predicted),
        winners=(winner("ra"), winner("mrr")),
    )


def comparison_csv_text(cmp: ModelComparison) -> str:
    """CSV mirroring the published comparison table layout: actuals, both pairs, both APDs."""
    a, b = cmp.label_a, cmp.label_b
    header = [
        "ra_actual", "mrr_actual",
        f"ra_{a}", f"mrr_{a}", f"ra_{b}", f"mrr_{b}",
        f"apd_ra_{a}", f"apd_mrr_{a}", f"apd_ra_{b}", f"apd_mrr_{b}",
    ]
    lines = [",".join(header)]
    for row in cmp.rows:
        cells = (*row.actual, *row.predicted_a, *row.predicted_b, *row.apd_a, *row.apd_b)
        lines.append(",".join(f"{v:.10g}" for v in cells))
    return "\n".join(lines) + "\n"
