"""Numerical thresholds shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # a matrix counts as invertible when its 2-norm condition number is below this
    cond_max: float = 1e12
    # h is "identically zero" at a sample when its max-abs entry is below this
    singular_atol: float = 1e-10
    newton_tol: float = 1e-12
    newton_maxiter: int = 50
    equivalence_atol: float = 1e-9
    pointed_atol: float = 1e-10
    constancy_atol: float = 1e-9
    fit_residual: float = 1e-9


DEFAULT = Tolerances()
