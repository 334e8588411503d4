"""Accuracy sweeps: R^2 of each fixed-step method against a reference.

SI runs are scored against the closed-form solution; SIR runs against the
adaptive Dormand-Prince solution sampled on the method's own grid.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import kernels
from .integrators import Grid, Trajectory, make_grid
from .metrics import R2Report, compare_trajectories
from .models import ModelSpec, SiParams, si_exact_values
from .refsolver import AdaptiveConfig, reference_solve, sample


def exact_trajectory(params: SiParams, y0, grid: Grid) -> Trajectory:
    s0, i0 = (float(v) for v in y0)
    return Trajectory(grid, si_exact_values(params, s0, i0, grid.times), "exact")


def reference_for(params: ModelSpec, y0, grid: Grid, config: AdaptiveConfig | None = None) -> Trajectory:
    """Exact trajectory for SI, sampled adaptive solution otherwise."""
    if isinstance(params, SiParams):
        return exact_trajectory(params, y0, grid)
    dense = reference_solve(params.rhs, y0, grid.t0, grid.b, config)
    return sample(dense, grid)


def accuracy_sweep(
    params: ModelSpec,
    y0,
    methods: Sequence[str],
    step_sizes: Sequence[float],
    t0: float = 0.0,
    b: float = 14.0,
    backend: str | None = None,
    ref_config: AdaptiveConfig | None = None,
) -> list[R2Report]:
    """One :class:`R2Report` per (method, h), method-major order."""
    if not methods:
        raise ValueError("no methods given")
    if not step_sizes:
        raise ValueError("no step sizes given")
    y0 = np.asarray(y0, dtype=float)
    grids = [make_grid(t0, b, h) for h in step_sizes]
    dense = None
    if not isinstance(params, SiParams):
        # one adaptive solve serves every grid
        dense = reference_solve(params.rhs, y0, t0, b, ref_config)

    reports = []
    for method in methods:
        for h, grid in zip(step_sizes, grids):
            numerical = kernels.simulate(params, method, y0, grid, backend)
            if dense is None:
                reference = exact_trajectory(params, y0, grid)
                label = "exact"
            else:
                reference = sample(dense, grid)
                label = "dopri54"
            reports.append(
                compare_trajectories(numerical, reference, params.name, method, h, label)
            )
    return reports
