"""Fixed-step explicit one-step solvers on generic state vectors.

All solvers share the signature ``solve(rhs, y0, grid)`` where ``rhs(t, y)``
returns the derivative as an array of the same shape as ``y``.  They serve
any dimension; the model-specialised kernels in :mod:`epibench.kernels`
reproduce these loops bit-for-bit for SI and SIR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridError, NonFiniteStateError

Rhs = Callable[[float, np.ndarray], np.ndarray]

METHODS = ("euler", "rk4", "pc")


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``t0 + i*h`` for ``i = 0..n``; the last node is ``b``."""

    t0: float
    b: float
    n: int
    h: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.t0) and math.isfinite(self.b)) or not self.b > self.t0:
            raise GridError(f"need finite b > t0, got t0={self.t0!r}, b={self.b!r}")
        if int(self.n) != self.n or self.n < 1:
            raise GridError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "h", (self.b - self.t0) / self.n)

    @property
    def times(self) -> np.ndarray:
        t = self.t0 + np.arange(self.n + 1) * self.h
        t[-1] = self.b
        return t

    def same_nodes(self, other: "Grid", rtol: float = 1e-12) -> bool:
        if self.n != other.n:
            return False
        a, b = self.times, other.times
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
        return bool(np.max(np.abs(a - b)) <= rtol * scale)


def make_grid(t0: float, b: float, h_requested: float) -> Grid:
    """Build a grid whose step evenly divides ``[t0, b]``.

    ``n = round((b - t0) / h_requested)`` and the step is recomputed from
    ``n`` so the final node lands on ``b``.  A requested step that misses an
    integer count by more than ``1e-9`` (relative) is rejected.
    """
    if not (math.isfinite(h_requested) and h_requested > 0):
        raise GridError(f"step must be > 0, got {h_requested!r}")
    if not b > t0:
        raise GridError(f"need b > t0, got t0={t0!r}, b={b!r}")
    ratio = (b - t0) / h_requested
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 1e-9 * ratio:
        raise GridError(f"step {h_requested!r} does not divide [{t0!r}, {b!r}] (ratio {ratio!r})")
    return Grid(t0, b, n)


@dataclass(frozen=True)
class Trajectory:
    grid: Grid
    states: np.ndarray
    method: str

    def __post_init__(self):
        states = np.array(self.states, dtype=float)
        if states.ndim != 2 or states.shape[0] != self.grid.n + 1:
            raise ValueError(
                f"expected {self.grid.n + 1} states, got array of shape {states.shape}"
            )
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class RkStageBuffer:
    """The four slopes of one classical RK4 step."""

    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    k4: np.ndarray

    def increment(self, h: float) -> np.ndarray:
        return (h / 6.0) * (self.k1 + 2.0 * self.k2 + 2.0 * self.k3 + self.k4)


def euler_step(rhs: Rhs, t: float, y: np.ndarray, h: float) -> np.ndarray:
    return y + h * rhs(t, y)


def rk4_stages(rhs: Rhs, t: float, y: np.ndarray, h: float) -> RkStageBuffer:
    half = 0.5 * h
    k1 = np.asarray(rhs(t, y))
    k2 = np.asarray(rhs(t + half, y + half * k1))
    k3 = np.asarray(rhs(t + half, y + half * k2))
    k4 = np.asarray(rhs(t + h, y + h * k3))
    return RkStageBuffer(k1, k2, k3, k4)


def rk4_step(rhs: Rhs, t: float, y: np.ndarray, h: float) -> np.ndarray:
    return y + rk4_stages(rhs, t, y, h).increment(h)


def pc_step(rhs: Rhs, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """Euler predictor followed by a single trapezoidal corrector."""
    slope = np.asarray(rhs(t, y))
    predicted = y + h * slope
    return y + (0.5 * h) * (slope + rhs(t + h, predicted))


_STEPPERS = {"euler": euler_step, "rk4": rk4_step, "pc": pc_step}


def _solve(step, method: str, rhs: Rhs, y0, grid: Grid) -> Trajectory:
    y0 = np.array(y0, dtype=float).reshape(-1)
    states = np.empty((grid.n + 1, y0.size))
    states[0] = y0
    times = grid.times
    h = grid.h
    for k in range(grid.n):
        y1 = step(rhs, times[k], states[k], h)
        states[k + 1] = y1
        if not np.all(np.isfinite(y1)):
            raise NonFiniteStateError(k + 1, states[: k + 2].copy())
    return Trajectory(grid, states, method)


def euler_solve(rhs: Rhs, y0, grid: Grid) -> Trajectory:
    """Forward Euler, ``y[k+1] = y[k] + h*rhs(t[k], y[k])``."""
    return _solve(euler_step, "euler", rhs, y0, grid)


def rk4_solve(rhs: Rhs, y0, grid: Grid) -> Trajectory:
    """Classical fourth-order Runge-Kutta with weights 1, 2, 2, 1 over 6."""
    return _solve(rk4_step, "rk4", rhs, y0, grid)


def pc_solve(rhs: Rhs, y0, grid: Grid) -> Trajectory:
    """Heun predictor-corrector; the corrector is applied exactly once."""
    return _solve(pc_step, "pc", rhs, y0, grid)


def solve(method: str, rhs: Rhs, y0, grid: Grid) -> Trajectory:
    try:
        step = _STEPPERS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}") from None
    return _solve(step, method, rhs, y0, grid)
