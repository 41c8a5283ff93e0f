"""Polynomial response-surface models over (vc, fz, t) with analytic gradients.

Two fixed monomial bases are supported: a 7-term linear-plus-interaction form and
an 11-term full quadratic form with the triple product. Term order is part of the
contract; coefficients printed in the source study are shipped as fixtures.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping

import numpy as np


class PolyBasis(Enum):
    """Fixed monomial bases, identified by their JSON string value."""

    LINEAR_INTERACTION = "linear_interaction"
    FULL_QUADRATIC_TRIPLE = "full_quadratic_triple"

    @property
    def n_terms(self) -> int:
        return 7 if self is PolyBasis.LINEAR_INTERACTION else 11

    @property
    def term_names(self) -> tuple[str, ...]:
        if self is PolyBasis.LINEAR_INTERACTION:
            return ("1", "vc", "fz", "t", "vc*fz", "vc*t", "fz*t")
        return ("1", "vc", "fz", "t", "vc^2", "fz^2", "t^2", "vc*fz", "vc*t", "fz*t", "vc*fz*t")


def basis_eval(basis: PolyBasis, x) -> np.ndarray:
    """Monomial values at ``x`` in fixed term order.

    ``x`` is an array of shape (..., 3); the result has shape (..., n_terms), so
    whole grids of design points can be evaluated in one call.
    """
    x = np.asarray(x, dtype=float)
    vc, fz, t = x[..., 0], x[..., 1], x[..., 2]
    one = np.ones_like(vc)
    if basis is PolyBasis.LINEAR_INTERACTION:
        terms = (one, vc, fz, t, vc * fz, vc * t, fz * t)
    else:
        terms = (one, vc, fz, t, vc * vc, fz * fz, t * t, vc * fz, vc * t, fz * t, vc * fz * t)
    return np.stack(terms, axis=-1)


@dataclass(frozen=True)
class PolynomialModel:
    """A response model: coefficients over a fixed basis, plus response metadata."""

    basis: PolyBasis
    coefficients: tuple[float, ...]
    response: str
    units: str = ""

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.coefficients)
        if len(coeffs) != self.basis.n_terms:
            raise ValueError(
                f"{self.basis.value} needs {self.basis.n_terms} coefficients, got {len(coeffs)}"
            )
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("coefficients must all be finite")
        object.__setattr__(self, "coefficients", coeffs)

    def evaluate(self, x):
        return evaluate(self, x)

    def gradient(self, x):
        return gradient(self, x)


def evaluate(model: PolynomialModel, x):
    """Response value at ``x``: coefficients dotted with the basis monomials.

    Broadcasts like :func:`basis_eval`; a single 3-vector yields a scalar.
    """
    return basis_eval(model.basis, x) @ np.asarray(model.coefficients)


def gradient(model: PolynomialModel, x) -> np.ndarray:
    """Exact partial derivatives with respect to (vc, fz, t), shape (..., 3)."""
    x = np.asarray(x, dtype=float)
    vc, fz, t = x[..., 0], x[..., 1], x[..., 2]
    c = model.coefficients
    if model.basis is PolyBasis.LINEAR_INTERACTION:
        d_vc = c[1] + c[4] * fz + c[5] * t
        d_fz = c[2] + c[4] * vc + c[6] * t
        d_t = c[3] + c[5] * vc + c[6] * fz
    else:
        d_vc = c[1] + 2.0 * c[4] * vc + c[7] * fz + c[8] * t + c[10] * fz * t
        d_fz = c[2] + 2.0 * c[5] * fz + c[7] * vc + c[9] * t + c[10] * vc * t
        d_t = c[3] + 2.0 * c[6] * t + c[8] * vc + c[9] * fz + c[10] * vc * fz
    return np.stack(np.broadcast_arrays(d_vc, d_fz, d_t), axis=-1)


# Fixed-coefficient models exactly as printed in the source study. The 7-term pair
# ("eq21"/"eq22") is the baseline taken over from the original milling experiment;
# the 11-term pair ("eq23"/"eq24") is the improved quadratic fit. Printed values are
# rounded, so the 11-term pair differs slightly from a fresh refit of the same data.
_PUBLISHED: Mapping[str, tuple[PolyBasis, tuple[float, ...], str, str]] = {
    "ra_eq21": (
        PolyBasis.LINEAR_INTERACTION,
        (2.65599, -0.00726733, 1.70439, -0.012765, -0.00273646, 0.000505119, 1.47321),
        "Ra",
        "um",
    ),
    "mrr_eq22": (
        PolyBasis.LINEAR_INTERACTION,
        (7927.21, -43.31, -84934.4, -19818.0, 464.12, 108.295, 212917.0),
        "MRR",
        "mm^3/min",
    ),
    "ra_eq23": (
        PolyBasis.FULL_QUADRATIC_TRIPLE,
        (3.082776, -0.01425, 4.330794, 0.465279, 1.85e-05, -5.78704, -0.15278,
         -0.00862, -0.00142, -2.73511, 0.018687),
        "Ra",
        "um",
    ),
    "mrr_eq24": (
        PolyBasis.FULL_QUADRATIC_TRIPLE,
        (-2345.09, 10.37705, 24983.71, 7079.912, -0.01672, -34722.2, -4166.67,
         -64.9643, -13.6425, -66322.5, 1403.922),
        "MRR",
        "mm^3/min",
    ),
}

_PUBLISHED_PAIRS = {
    "eq21": ("ra_eq21", "mrr_eq22"),
    "eq23": ("ra_eq23", "mrr_eq24"),
}


def published_model(key: str) -> PolynomialModel:
    """One of the fixed-coefficient models: ra_eq21, mrr_eq22, ra_eq23 or mrr_eq24."""
    try:
        basis, coeffs, response, units = _PUBLISHED[key]
    except KeyError:
        raise ValueError(f"unknown model key {key!r}; expected one of {sorted(_PUBLISHED)}") from None
    return PolynomialModel(basis, coeffs, response, units)


def published_pair(set_key: str) -> tuple[PolynomialModel, PolynomialModel]:
    """The (Ra, MRR) model pair for a published set: ``eq21`` or ``eq23``."""
    try:
        ra_key, mrr_key = _PUBLISHED_PAIRS[set_key]
    except KeyError:
        raise ValueError(f"unknown model set {set_key!r}; expected one of {sorted(_PUBLISHED_PAIRS)}") from None
    return published_model(ra_key), published_model(mrr_key)


def model_to_dict(model: PolynomialModel) -> dict:
    return {
        "basis": model.basis.value,
        "response": model.response,
        "units": model.units,
        "coefficients": list(model.coefficients),
    }


def model_from_dict(data: Mapping) -> PolynomialModel:
    try:
        basis = PolyBasis(data["basis"])
        return PolynomialModel(basis, tuple(data["coefficients"]), str(data["response"]), str(data.get("units", "")))
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"bad model description: {exc}") from exc


def save_model(path: str | Path, model: PolynomialModel) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> PolynomialModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
