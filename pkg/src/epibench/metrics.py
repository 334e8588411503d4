"""Coefficient of determination between numerical and reference solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, GridMismatchError
from .integrators import Trajectory

COMPARTMENTS = {"si": ("S", "I"), "sir": ("S", "I", "R")}


class ZeroVarianceError(DomainError):
    """The reference sequence is constant, so R^2 is undefined."""


def r_squared(reference: Sequence[float], predicted: Sequence[float]) -> float:
    """``1 - sum((y - y_hat)**2) / sum((y - mean(y))**2)``.

    ``reference`` holds the exact (or high-accuracy) values ``y`` and
    ``predicted`` the numerical ones.  Sums are accumulated with
    :func:`math.fsum` so long sequences do not lose digits to cancellation.
    """
    y = np.asarray(reference, dtype=float).ravel()
    y_hat = np.asarray(predicted, dtype=float).ravel()
    if y.shape != y_hat.shape:
        raise ValueError(f"length mismatch: {y.size} reference vs {y_hat.size} predicted values")
    if y.size < 2:
        raise ValueError("need at least two values")
    mean = math.fsum(y) / y.size
    ss_tot = math.fsum((y - mean) ** 2)
    if ss_tot == 0.0:
        raise ZeroVarianceError("reference values have zero variance; R^2 is undefined")
    ss_res = math.fsum((y - y_hat) ** 2)
    return 1.0 - ss_res / ss_tot


def round_half_even(value: float, places: int = 7) -> float:
    """Round the shortest decimal repr of ``value`` half-to-even."""
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class R2Report:
    model: str
    method: str
    h: float
    per_compartment: Mapping[str, float]
    n_points: int
    reference: str = ""
    extra: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        expected = COMPARTMENTS.get(self.model)
        if expected is None:
            raise ValueError(f"unknown model {self.model!r}")
        if tuple(self.per_compartment) != expected:
            raise ValueError(
                f"{self.model} report needs compartments {expected}, got {tuple(self.per_compartment)}"
            )
        for name, value in self.per_compartment.items():
            if not value <= 1.0:
                raise ValueError(f"R^2 for {name} exceeds 1: {value!r}")

    def rounded(self, places: int = 7) -> dict[str, float]:
        return {k: round_half_even(v, places) for k, v in self.per_compartment.items()}


def compare_trajectories(
    numerical: Trajectory,
    reference: Trajectory,
    model: str,
    method: str | None = None,
    h: float | None = None,
    reference_label: str = "",
) -> R2Report:
    """Per-compartment R^2 of ``numerical`` against ``reference``.

    Both trajectories must share their grid nodes (to 1e-12 relative) and
    state dimension.  Every node, including the initial one, is used.
    """
    if not numerical.grid.same_nodes(reference.grid):
        raise GridMismatchError(
            f"grids differ: n={numerical.grid.n} vs n={reference.grid.n} "
            f"on [{numerical.grid.t0}, {numerical.grid.b}] vs [{reference.grid.t0}, {reference.grid.b}]"
        )
    if numerical.dim != reference.dim:
        raise GridMismatchError(f"state dimensions differ: {numerical.dim} vs {reference.dim}")
    names = COMPARTMENTS[model]
    if len(names) != numerical.dim:
        raise GridMismatchError(f"{model} has {len(names)} compartments, trajectories have {numerical.dim}")
    values = {
        name: r_squared(reference.states[:, j], numerical.states[:, j])
        for j, name in enumerate(names)
    }
    return R2Report(
        model=model,
        method=method or numerical.method,
        h=numerical.grid.h if h is None else h,
        per_compartment=values,
        n_points=numerical.grid.n + 1,
        reference=reference_label or reference.method,
    )


def max_abs_error(numerical: Trajectory, reference: Trajectory) -> float:
    """Largest absolute deviation over all nodes and compartments."""
    return float(np.max(np.abs(numerical.states - reference.states)))
