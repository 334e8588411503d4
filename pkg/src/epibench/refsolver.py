"""Adaptive Dormand-Prince 5(4) reference solver with dense output.

This is the same embedded pair used by MATLAB's ``ode45``.  Steps are
accepted when the embedded error estimate satisfies
``|err_j| <= atol + rtol * max(|y_j|, |y_new_j|)`` for every component, and
the step size is updated with the elementary controller
``h_new = h * min(5, max(0.2, 0.9 * err**(-1/5)))``.

Dense output uses the standard fourth-order continuous extension of the
pair (Hairer, Norsett & Wanner, *Solving ODEs I*, II.6).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    MaxStepsExceededError,
    NonFiniteStateError,
    StepSizeUnderflowError,
)
from .integrators import Grid, Rhs, Trajectory

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
# fifth-order weights; also the last row of the tableau (FSAL)
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth minus fourth order weights
E1, E3, E4, E5, E6, E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)
D1, D3, D4, D5, D6, D7 = (
    -12715105075 / 11282082432,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)

SAFETY = 0.9
FACTOR_MIN = 0.2
FACTOR_MAX = 5.0


@dataclass(frozen=True)
class AdaptiveConfig:
    rtol: float = 1e-8
    atol: float = 1e-10
    h_init: float | None = None
    h_min: float | None = None
    h_max: float | None = None
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not 0 < self.rtol < 1:
            raise ValueError(f"rtol must lie in (0, 1), got {self.rtol!r}")
        if not self.atol > 0:
            raise ValueError(f"atol must be > 0, got {self.atol!r}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps!r}")
        bounds = (self.h_min, self.h_init, self.h_max)
        if all(b is not None for b in bounds) and not (0 < self.h_min <= self.h_init <= self.h_max):
            raise ValueError(f"need 0 < h_min <= h_init <= h_max, got {bounds}")

    def resolved(self, t0: float, b: float) -> "AdaptiveConfig":
        """Fill unset step bounds from the interval length."""
        span = b - t0
        return AdaptiveConfig(
            rtol=self.rtol,
            atol=self.atol,
            h_init=self.h_init if self.h_init is not None else 1e-3 * span,
            h_min=self.h_min if self.h_min is not None else 1e-12 * span,
            h_max=self.h_max if self.h_max is not None else span,
            max_steps=self.max_steps,
        )


@dataclass(frozen=True)
class DenseSolution:
    """Accepted steps of an adaptive solve plus per-step interpolants.

    ``t`` holds the ``m + 1`` accepted step endpoints, ``y`` the states there
    and ``coeffs`` an ``(m, 5, dim)`` array of interpolation coefficients.
    """

    t: np.ndarray
    y: np.ndarray
    coeffs: np.ndarray
    n_rejected: int = 0
    n_rhs: int = 0

    def __post_init__(self):
        for name in ("t", "y", "coeffs"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def b(self) -> float:
        return float(self.t[-1])

    @property
    def n_steps(self) -> int:
        return len(self.t) - 1

    def __call__(self, times) -> np.ndarray:
        """Evaluate the solution at scalar or array ``times``.

        Accepted step endpoints return the stored state exactly.
        """
        scalar = np.ndim(times) == 0
        tq = np.atleast_1d(np.asarray(times, dtype=float))
        if np.any(~np.isfinite(tq)) or np.any(tq < self.t[0]) or np.any(tq > self.t[-1]):
            raise DomainError(
                f"evaluation times must lie in [{self.t[0]!r}, {self.t[-1]!r}]"
            )
        idx = np.searchsorted(self.t, tq, side="right") - 1
        idx = np.clip(idx, 0, self.n_steps - 1)
        t_left = self.t[idx]
        step = self.t[idx + 1] - t_left
        theta = ((tq - t_left) / step)[:, None]
        theta1 = 1.0 - theta
        r = self.coeffs[idx]
        out = r[:, 0] + theta * (r[:, 1] + theta1 * (r[:, 2] + theta * (r[:, 3] + theta1 * r[:, 4])))
        hit_left = tq == t_left
        hit_right = tq == self.t[idx + 1]
        out[hit_left] = self.y[idx[hit_left]]
        out[hit_right] = self.y[idx[hit_right] + 1]
        return out[0] if scalar else out


def _error_norm(err, y_old, y_new, rtol, atol) -> float:
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def reference_solve(rhs: Rhs, y0, t0: float, b: float, config: AdaptiveConfig | None = None) -> DenseSolution:
    """Integrate ``y' = rhs(t, y)`` from ``t0`` to ``b`` adaptively.

    Raises
    ------
    StepSizeUnderflowError
        A rejected step would need ``h < h_min``.
    MaxStepsExceededError
        More than ``max_steps`` step attempts were made.
    NonFiniteStateError
        The state or derivative became non-finite.
    """
    if not b > t0:
        raise DomainError(f"need b > t0, got t0={t0!r}, b={b!r}")
    cfg = (config or AdaptiveConfig()).resolved(t0, b)
    rtol, atol = cfg.rtol, cfg.atol

    y = np.array(y0, dtype=float).reshape(-1)
    t = float(t0)
    k1 = np.asarray(rhs(t, y), dtype=float)
    n_rhs = 1
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(k1))):
        raise NonFiniteStateError(0, y[None, :].copy())

    ts = [t]
    ys = [y]
    coeffs = []
    h = min(cfg.h_init, cfg.h_max)
    n_rejected = 0
    attempts = 0

    while t < b:
        attempts += 1
        if attempts > cfg.max_steps:
            raise MaxStepsExceededError(f"exceeded {cfg.max_steps} steps at t={t!r}")
        last = t + h >= b or (b - (t + h)) < cfg.h_min
        if last:
            h = b - t

        k2 = rhs(t + C2 * h, y + h * (A21 * k1))
        k3 = rhs(t + C3 * h, y + h * (A31 * k1 + A32 * k2))
        k4 = rhs(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))
        k5 = rhs(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
        k6 = rhs(t + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
        y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        t_new = b if last else t + h
        k7 = np.asarray(rhs(t_new, y_new), dtype=float)
        n_rhs += 6

        if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(k7))):
            raise NonFiniteStateError(len(ts), np.array(ys + [y_new]))

        err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        err = _error_norm(err_vec, y, y_new, rtol, atol)

        if err <= 1.0:
            diff = y_new - y
            bspl = h * k1 - diff
            coeffs.append(
                np.stack(
                    [
                        y,
                        diff,
                        bspl,
                        diff - h * k7 - bspl,
                        h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7),
                    ]
                )
            )
            t, y, k1 = t_new, y_new, k7
            ts.append(t)
            ys.append(y)
            factor = FACTOR_MAX if err == 0.0 else min(FACTOR_MAX, max(FACTOR_MIN, SAFETY * err ** -0.2))
            h = min(h * factor, cfg.h_max)
        else:
            n_rejected += 1
            h = h * max(FACTOR_MIN, SAFETY * err ** -0.2)
            if h < cfg.h_min:
                raise StepSizeUnderflowError(f"step size {h!r} below h_min={cfg.h_min!r} at t={t!r}")

    return DenseSolution(np.array(ts), np.array(ys), np.array(coeffs), n_rejected, n_rhs)


def sample(dense: DenseSolution, grid: Grid) -> Trajectory:
    """Evaluate ``dense`` on every node of ``grid`` (method tag ``reference``)."""
    times = grid.times
    if times[0] < dense.t[0] or times[-1] > dense.t[-1]:
        raise DomainError(
            f"grid [{times[0]!r}, {times[-1]!r}] exceeds solution range "
            f"[{dense.t[0]!r}, {dense.t[-1]!r}]"
        )
    return Trajectory(grid, dense(times), "reference")


def reference_trajectory(rhs: Rhs, y0, grid: Grid, config: AdaptiveConfig | None = None) -> Trajectory:
    return sample(reference_solve(rhs, y0, grid.t0, grid.b, config), grid)


def max_relative_error(approx: np.ndarray, exact: np.ndarray) -> float:
    return float(np.max(np.abs(approx - exact) / np.abs(exact)))


__all__ = [
    "AdaptiveConfig",
    "DenseSolution",
    "reference_solve",
    "sample",
    "reference_trajectory",
    "max_relative_error",
]
