"""Pure-compute run-time measurement of the stepping kernels.

Only the stepping loop sits inside the timed bracket: the output array is
allocated and the initial state written before the clock starts, and
nothing is serialised until all runs are done.  Timing uses
:func:`time.perf_counter_ns`, a monotonic high-resolution clock.
"""

from __future__ import annotations

import datetime as _dt
import math
import platform
import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels
from .errors import NonFiniteStateError
from .integrators import METHODS, Grid, make_grid
from .models import (
    DEFAULT_T0,
    DEFAULT_TEND,
    ModelSpec,
    default_initial_state,
    default_params,
)


@dataclass(frozen=True)
class BenchConfig:
    model: str
    method: str
    h: float
    warmup_runs: int = 3
    measured_runs: int = 11
    backend: str | None = None

    def __post_init__(self):
        if self.warmup_runs < 1:
            raise ValueError(f"warmup_runs must be >= 1, got {self.warmup_runs}")
        if self.measured_runs < 3:
            raise ValueError(f"measured_runs must be >= 3, got {self.measured_runs}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")


@dataclass(frozen=True)
class Problem:
    params: ModelSpec
    y0: tuple[float, ...]
    t0: float = DEFAULT_T0
    b: float = DEFAULT_TEND

    @property
    def model(self) -> str:
        return self.params.name

    def grid(self, h: float) -> Grid:
        return make_grid(self.t0, self.b, h)


def default_problem(model: str) -> Problem:
    return Problem(default_params(model), tuple(default_initial_state(model)))


def host_descriptor() -> str:
    return " | ".join(
        [
            platform.node() or "unknown-host",
            platform.machine() or "unknown-arch",
            platform.processor() or platform.machine() or "unknown-cpu",
            f"{platform.system()} {platform.release()}",
            f"{platform.python_implementation()} {platform.python_version()}",
        ]
    )


@dataclass(frozen=True)
class BenchRecord:
    config: BenchConfig
    backend: str
    times: tuple[float, ...]
    final_state: tuple[float, ...]
    host: str
    timestamp: str
    n_steps: int

    @property
    def model(self) -> str:
        return self.config.model

    @property
    def method(self) -> str:
        return self.config.method

    @property
    def h(self) -> float:
        return self.config.h

    @property
    def median(self) -> float:
        return statistics.median(self.times)

    @property
    def min(self) -> float:
        return min(self.times)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.times)

    @property
    def stddev(self) -> float:
        return statistics.stdev(self.times)

    @property
    def checksum(self) -> float:
        return math.fsum(self.final_state)


@dataclass(frozen=True)
class BenchFailure:
    config: BenchConfig
    error: str
    kind: str = field(default="error")


def time_solver(config: BenchConfig, problem: Problem) -> BenchRecord:
    """Time ``config.measured_runs`` kernel calls after ``warmup_runs`` warm-ups.

    Raises :class:`NonFiniteStateError` if any run produces a non-finite
    state; no record is returned in that case.
    """
    if problem.model != config.model:
        raise ValueError(f"config is for {config.model!r} but problem is {problem.model!r}")
    grid = problem.grid(config.h)
    kernel, args, out = kernels.prepare(
        problem.params, config.method, problem.y0, grid, config.backend
    )
    clock = time.perf_counter_ns

    for _ in range(config.warmup_runs):
        failed = kernel(*args)
        if failed >= 0:
            raise NonFiniteStateError(failed, out[: failed + 1].copy())

    samples = []
    for _ in range(config.measured_runs):
        start = clock()
        failed = kernel(*args)
        stop = clock()
        if failed >= 0:
            raise NonFiniteStateError(failed, out[: failed + 1].copy())
        samples.append((stop - start) * 1e-9)

    return BenchRecord(
        config=config,
        backend=config.backend or kernels.DEFAULT_BACKEND,
        times=tuple(samples),
        final_state=tuple(float(v) for v in out[-1]),
        host=host_descriptor(),
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        n_steps=grid.n,
    )


def run_benchmark_suite(
    methods: Sequence[str],
    models: Iterable[Union[str, Problem]],
    step_sizes: Sequence[float],
    warmup_runs: int = 3,
    measured_runs: int = 11,
    backend: str | None = None,
) -> list[Union[BenchRecord, BenchFailure]]:
    """Benchmark every (model, method, h) cell sequentially.

    Cells are visited model-major, then method, then step size.  A cell that
    fails is reported as a :class:`BenchFailure` in its slot and the suite
    carries on.
    """
    problems = [default_problem(m) if isinstance(m, str) else m for m in models]
    if not methods:
        raise ValueError("no methods given")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown methods {unknown}; expected a subset of {METHODS}")
    if not problems:
        raise ValueError("no models given")
    if not step_sizes:
        raise ValueError("no step sizes given")

    results: list[Union[BenchRecord, BenchFailure]] = []
    for problem in problems:
        for method in methods:
            for h in step_sizes:
                config = BenchConfig(problem.model, method, h, warmup_runs, measured_runs, backend)
                try:
                    results.append(time_solver(config, problem))
                except (NonFiniteStateError, ValueError) as exc:
                    results.append(BenchFailure(config, str(exc), type(exc).__name__))
    return results


def untimed_final_state(config: BenchConfig, problem: Problem) -> np.ndarray:
    return kernels.simulate(
        problem.params, config.method, problem.y0, problem.grid(config.h), config.backend
    ).final
