"""Golden-value and property checks behind ``epibench ... --check``.

Each check returns a :class:`CheckResult`; none of them raise on failure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bench, kernels
from .accuracy import accuracy_sweep, exact_trajectory
from .integrators import METHODS, make_grid
from .metrics import round_half_even
from .models import (
    DEFAULT_ALPHA,
    DEFAULT_I0,
    DEFAULT_S0,
    DEFAULT_STEPS,
    default_initial_state,
    default_params,
)
from .refsolver import AdaptiveConfig, max_relative_error, reference_solve, sample

# Published SI R^2 values (identical for S and I), keyed by method then h.
SI_GOLDEN = {
    "euler": {0.25: 0.9585463, 0.10: 0.9927564, 0.01: 0.9999239},
    "pc": {0.25: 0.9994189, 0.10: 0.9999798, 0.01: 1.0},
    "rk4": {0.25: 1.0, 0.10: 1.0, 0.01: 1.0},
}
GOLDEN_TOL = 5e-8
SIR_R2_FLOOR = 0.999999
CONSERVATION_RTOL = 1e-9
ORDER_STEPS = (0.2, 0.1, 0.05, 0.025)
ORDER_BANDS = {"euler": (0.8, 1.2), "pc": (1.7, 2.3), "rk4": (3.5, 4.5)}
EULER_STEP_EXPECTED = (761.58471, 1.41529)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} ({self.seconds:.3f}s)"

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "seconds": self.seconds}


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crashing check is a failing check
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, passed, detail, time.perf_counter() - start)


def _si_golden(method: str, backend=None) -> tuple[bool, str]:
    reports = accuracy_sweep(
        default_params("si"), default_initial_state("si"), [method], DEFAULT_STEPS, backend=backend
    )
    ok = True
    parts = []
    for rep in reports:
        golden = SI_GOLDEN[method][rep.h]
        for comp, value in rep.per_compartment.items():
            if method == "pc" and rep.h == 0.01:
                good = value >= 1.0 - GOLDEN_TOL
            elif method == "rk4":
                good = abs(value - 1.0) < GOLDEN_TOL
            else:
                good = abs(round_half_even(value) - golden) <= GOLDEN_TOL
            ok &= good
        parts.append(f"h={rep.h:g}: {rep.per_compartment['S']:.9f}")
    return ok, "; ".join(parts)


def check_sir_band(backend=None) -> tuple[bool, str]:
    reports = accuracy_sweep(
        default_params("sir"), default_initial_state("sir"), ["rk4"], DEFAULT_STEPS, backend=backend
    )
    worst = min(min(r.per_compartment.values()) for r in reports)
    return worst >= SIR_R2_FLOOR, f"min R^2 over S,I,R and h = {worst:.10f} (floor {SIR_R2_FLOOR})"


def check_conservation(backend=None) -> tuple[bool, str]:
    worst = 0.0
    for model in ("si", "sir"):
        params, y0 = default_params(model), default_initial_state(model)
        total = float(np.sum(y0))
        for method in METHODS:
            for h in DEFAULT_STEPS:
                tr = kernels.simulate(params, method, y0, make_grid(0.0, 14.0, h), backend)
                drift = float(np.max(np.abs(tr.states.sum(axis=1) - total))) / total
                worst = max(worst, drift)
    return worst <= CONSERVATION_RTOL, f"max relative drift {worst:.3e} (bound {CONSERVATION_RTOL:g})"


def convergence_orders(backend=None, floor: float = 1e-10) -> dict[str, float]:
    """Least-squares slope of log(max error) on log(h) for each method.

    Points whose error has fallen to ``floor * N`` are dropped as roundoff.
    """
    params, y0 = default_params("si"), default_initial_state("si")
    total = float(np.sum(y0))
    orders = {}
    for method in METHODS:
        hs, errs = [], []
        for h in ORDER_STEPS:
            grid = make_grid(0.0, 14.0, h)
            err = float(np.max(np.abs(
                kernels.simulate(params, method, y0, grid, backend).states
                - exact_trajectory(params, y0, grid).states
            )))
            if err > floor * total:
                hs.append(h)
                errs.append(err)
        orders[method] = float(np.polyfit(np.log(hs), np.log(errs), 1)[0]) if len(hs) >= 2 else float("nan")
    return orders


def check_orders(backend=None) -> tuple[bool, str]:
    orders = convergence_orders(backend)
    ok = all(lo <= orders[m] <= hi for m, (lo, hi) in ORDER_BANDS.items())
    return ok, ", ".join(f"{m}={orders[m]:.3f} in {ORDER_BANDS[m]}" for m in METHODS)


def rk4_si_step_exact(alpha, s, i, h) -> tuple[Fraction, Fraction]:
    """One RK4 step on SI in exact rational arithmetic.

    Evaluates the eight stage slopes written out per compartment, starting
    from the exact binary values of the float inputs.
    """
    a, s, i, h = (Fraction(v) for v in (alpha, s, i, h))
    k1s = -a * s * i
    k1i = a * s * i
    k2s = -a * (s + h * k1s / 2) * (i + h * k1i / 2)
    k2i = a * (s + h * k1s / 2) * (i + h * k1i / 2)
    k3s = -a * (s + h * k2s / 2) * (i + h * k2i / 2)
    k3i = a * (s + h * k2s / 2) * (i + h * k2i / 2)
    k4s = -a * (s + h * k3s) * (i + h * k3i)
    k4i = a * (s + h * k3s) * (i + h * k3i)
    return (
        s + h / 6 * (k1s + 2 * k2s + 2 * k3s + k4s),
        i + h / 6 * (k1i + 2 * k2i + 2 * k3i + k4i),
    )


def check_single_steps(backend=None) -> tuple[bool, str]:
    params = default_params("si")
    y0 = default_initial_state("si")
    grid = make_grid(0.0, 0.25, 0.25)
    euler = kernels.simulate(params, "euler", y0, grid, backend).final
    euler_dev = float(np.max(np.abs(euler - np.array(EULER_STEP_EXPECTED))))
    rk4 = kernels.simulate(params, "rk4", y0, grid, backend).final
    exact = rk4_si_step_exact(DEFAULT_ALPHA, DEFAULT_S0, DEFAULT_I0, 0.25)
    rk4_dev = max(abs(Fraction(float(v)) - e) / abs(e) for v, e in zip(rk4, exact))
    ok = euler_dev <= 1e-9 and rk4_dev <= 1e-12
    return ok, f"euler |dev|={euler_dev:.2e} (<=1e-9), rk4 rel dev={float(rk4_dev):.2e} (<=1e-12)"


def check_reference_vs_exact() -> tuple[bool, str]:
    params, y0 = default_params("si"), default_initial_state("si")
    config = AdaptiveConfig()
    grid = make_grid(0.0, 14.0, 0.25)
    ref = sample(reference_solve(params.rhs, y0, 0.0, 14.0, config), grid)
    err = max_relative_error(ref.states, exact_trajectory(params, y0, grid).states)
    bound = 100 * config.rtol
    return err <= bound, f"max relative error {err:.3e} (bound {bound:g})"


def accuracy_checks(backend=None) -> list[CheckResult]:
    return [
        _timed("si-euler-golden", lambda: _si_golden("euler", backend)),
        _timed("si-pc-golden", lambda: _si_golden("pc", backend)),
        _timed("si-rk4-golden", lambda: _si_golden("rk4", backend)),
        _timed("sir-rk4-reference-band", lambda: check_sir_band(backend)),
        _timed("conservation", lambda: check_conservation(backend)),
        _timed("convergence-order", lambda: check_orders(backend)),
        _timed("single-step-oracles", lambda: check_single_steps(backend)),
        _timed("reference-vs-exact", check_reference_vs_exact),
    ]


def benchmark_property_checks(records: list) -> list[CheckResult]:
    """Methodology properties over a completed benchmark suite."""
    good = [r for r in records if isinstance(r, bench.BenchRecord)]
    failures = [r for r in records if not isinstance(r, bench.BenchRecord)]
    cells = {(r.model, r.method, r.h): r for r in good}

    def positive():
        ok = not failures and all(r.median > 0 for r in good)
        return ok, f"{len(good)} records, {len(failures)} failed cells"

    def finer_is_slower():
        bad = [
            (m, meth) for (m, meth, h), r in cells.items()
            if h == 0.25 and (m, meth, 0.01) in cells and not cells[(m, meth, 0.01)].median > r.median
        ]
        return not bad, "all cells ordered" if not bad else f"violations: {bad}"

    def rk4_slower():
        bad = [
            (m, h) for (m, meth, h), r in cells.items()
            if meth == "euler" and (m, "rk4", h) in cells and not cells[(m, "rk4", h)].median > r.median
        ]
        return not bad, "all cells ordered" if not bad else f"violations: {bad}"

    def timed_equals_untimed():
        bad = []
        for r in good:
            problem = bench.default_problem(r.model)
            final = bench.untimed_final_state(r.config, problem)
            if tuple(float(v) for v in final) != r.final_state:
                bad.append((r.model, r.method, r.h))
        return not bad, "bit-identical" if not bad else f"mismatch: {bad}"

    return [
        _timed("bench-medians-positive", positive),
        _timed("bench-finer-step-slower", finer_is_slower),
        _timed("bench-rk4-slower-than-euler", rk4_slower),
        _timed("bench-timed-equals-untimed", timed_equals_untimed),
    ]
