"""SI and SIR compartmental models.

Both systems conserve the total population ``N``.  Right-hand sides are
written so that the compartment derivatives cancel exactly in SI (the same
product is negated) and to within one rounding in SIR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Sequence, Union

import numpy as np

from .errors import DomainError

# Boys' boarding school influenza outbreak parameters (Murray, 2002).
DEFAULT_ALPHA = 2.18e-3
DEFAULT_BETA = 2.18e-3 * 202
DEFAULT_S0 = 762.0
DEFAULT_I0 = 1.0
DEFAULT_R0 = 0.0
DEFAULT_T0 = 0.0
DEFAULT_TEND = 14.0
DEFAULT_STEPS = (0.25, 0.10, 0.01)


def _check_finite_nonneg(name, value):
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class SiParams:
    """Transmission rate ``alpha`` in 1/(individual*day)."""

    alpha: float

    name: ClassVar[str] = "si"
    compartments: ClassVar[tuple[str, ...]] = ("S", "I")

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"alpha must be > 0, got {self.alpha!r}")

    @property
    def dim(self) -> int:
        return len(self.compartments)

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        return np.array(si_rhs(self, y))


@dataclass(frozen=True)
class SirParams:
    """Transmission rate ``alpha`` and recovery rate ``beta`` (1/day)."""

    alpha: float
    beta: float

    name: ClassVar[str] = "sir"
    compartments: ClassVar[tuple[str, ...]] = ("S", "I", "R")

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"alpha must be > 0, got {self.alpha!r}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise DomainError(f"beta must be >= 0, got {self.beta!r}")

    @property
    def dim(self) -> int:
        return len(self.compartments)

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        return np.array(sir_rhs(self, y))


ModelSpec = Union[SiParams, SirParams]


@dataclass(frozen=True)
class SiState:
    s: float
    i: float

    def __post_init__(self):
        _check_finite_nonneg("s", self.s)
        _check_finite_nonneg("i", self.i)

    def __iter__(self):
        return iter((self.s, self.i))

    @property
    def total(self) -> float:
        return self.s + self.i

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.i], dtype=float)


@dataclass(frozen=True)
class SirState:
    s: float
    i: float
    r: float

    def __post_init__(self):
        _check_finite_nonneg("s", self.s)
        _check_finite_nonneg("i", self.i)
        _check_finite_nonneg("r", self.r)

    def __iter__(self):
        return iter((self.s, self.i, self.r))

    @property
    def total(self) -> float:
        return self.s + self.i + self.r

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.i, self.r], dtype=float)


def si_rhs(params: SiParams, state: Sequence[float]) -> tuple[float, float]:
    """Return ``(dS/dt, dI/dt) = (-alpha*S*I, alpha*S*I)``.

    ``state`` may be an :class:`SiState` or any length-2 sequence, so solver
    outputs that dip slightly below zero can still be evaluated.
    """
    s, i = state
    flow = params.alpha * s * i
    return -flow, flow


def sir_rhs(params: SirParams, state: Sequence[float]) -> tuple[float, float, float]:
    """Return ``(-alpha*S*I, alpha*S*I - beta*I, beta*I)``."""
    s, i, _ = state
    infection = params.alpha * s * i
    recovery = params.beta * i
    return -infection, infection - recovery, recovery


def si_exact_values(params: SiParams, s0: float, i0: float, t) -> np.ndarray:
    """Closed-form SI solution evaluated at one or many times.

    Returns an array of shape ``(len(t), 2)`` (or ``(2,)`` for scalar ``t``)
    holding ``S(t)`` and ``I(t)``.

    Raises
    ------
    DomainError
        If ``i0 <= 0``: the constant ``c = S0 / (N - S0)`` is undefined.
    """
    _check_finite_nonneg("s0", s0)
    _check_finite_nonneg("i0", i0)
    if i0 == 0:
        raise DomainError("closed-form SI solution needs i0 > 0 (c = S0/(N-S0) is undefined)")
    t_arr = np.asarray(t, dtype=float)
    n_total = s0 + i0
    # N - S0 is i0 in exact arithmetic; use it directly.
    c = s0 / i0
    with np.errstate(over="ignore", invalid="ignore"):
        decay = np.exp(-params.alpha * t_arr * n_total)
        infected = n_total * i0 / (i0 + decay * s0)
        susceptible = n_total * decay * c / (1.0 + decay * c)
    # exp overflows for very negative t; fall back to the conserved complement.
    susceptible = np.where(np.isfinite(susceptible), susceptible, n_total - infected)
    return np.stack([susceptible, infected], axis=-1)


def si_exact(params: SiParams, s0: float, i0: float, t: float) -> SiState:
    s, i = si_exact_values(params, s0, i0, float(t))
    return SiState(float(s), float(i))


def default_params(model: str) -> ModelSpec:
    if model == "si":
        return SiParams(DEFAULT_ALPHA)
    if model == "sir":
        return SirParams(DEFAULT_ALPHA, DEFAULT_BETA)
    raise DomainError(f"unknown model {model!r}")


def default_initial_state(model: str) -> np.ndarray:
    if model == "si":
        return np.array([DEFAULT_S0, DEFAULT_I0])
    if model == "sir":
        return np.array([DEFAULT_S0, DEFAULT_I0, DEFAULT_R0])
    raise DomainError(f"unknown model {model!r}")
