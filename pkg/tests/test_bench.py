import statistics
import time

import numpy as np
import pytest

from epibench import bench, kernels
from epibench.bench import (
    BenchConfig,
    BenchFailure,
    BenchRecord,
    Problem,
    default_problem,
    run_benchmark_suite,
    time_solver,
    untimed_final_state,
)
from epibench.models import SiParams, SirParams


@pytest.mark.parametrize(
    "kwargs", [dict(warmup_runs=0), dict(measured_runs=2), dict(measured_runs=1), dict(method="ab2")]
)
def test_config_validation(kwargs):
    base = dict(model="si", method="euler", h=0.25)
    with pytest.raises(ValueError):
        BenchConfig(**{**base, **kwargs})


def test_euler_si_record(backend):
    cfg = BenchConfig("si", "euler", 0.25, backend=backend)
    rec = time_solver(cfg, default_problem("si"))
    assert rec.n_steps == 56
    assert len(rec.times) == 11
    assert all(t > 0 for t in rec.times)
    assert rec.median > 0
    assert rec.min <= rec.median <= rec.mean + 3 * rec.stddev
    assert rec.backend == backend
    assert rec.host == bench.host_descriptor()
    assert rec.checksum == pytest.approx(763.0, rel=1e-12)


@pytest.mark.parametrize("model", ["si", "sir"])
@pytest.mark.parametrize("method", ["euler", "rk4", "pc"])
def test_timed_equals_untimed(backend, model, method):
    cfg = BenchConfig(model, method, 0.1, warmup_runs=1, measured_runs=3, backend=backend)
    rec = time_solver(cfg, default_problem(model))
    assert rec.final_state == tuple(float(v) for v in untimed_final_state(cfg, default_problem(model)))


def test_model_problem_mismatch():
    with pytest.raises(ValueError):
        time_solver(BenchConfig("sir", "euler", 0.25), default_problem("si"))


def test_suite_cardinality_and_order():
    res = run_benchmark_suite(["euler", "rk4", "pc"], ["si"], [0.25, 0.1, 0.01], 1, 3)
    assert len(res) == 9
    assert [(r.method, r.h) for r in res] == [
        (m, h) for m in ("euler", "rk4", "pc") for h in (0.25, 0.1, 0.01)
    ]
    res = run_benchmark_suite(["euler", "rk4", "pc"], ["si", "sir"], [0.25, 0.1, 0.01], 1, 3)
    assert len(res) == 18
    assert all(isinstance(r, BenchRecord) for r in res)
    assert [r.model for r in res] == ["si"] * 9 + ["sir"] * 9


@pytest.mark.parametrize(
    "args",
    [([], ["si"], [0.25]), (["euler"], [], [0.25]), (["euler"], ["si"], []), (["nope"], ["si"], [0.25])],
)
def test_suite_rejects_bad_lists(args):
    with pytest.raises(ValueError):
        run_benchmark_suite(*args)


def test_failures_are_aggregated():
    blowup = Problem(SiParams(1e6), (762.0, 1.0))
    res = run_benchmark_suite(["euler", "rk4"], [blowup, "sir"], [0.25], 1, 3)
    assert len(res) == 4
    assert isinstance(res[0], BenchFailure) and res[0].kind == "NonFiniteStateError"
    assert isinstance(res[1], BenchFailure)
    assert all(isinstance(r, BenchRecord) for r in res[2:])


def test_bad_step_is_a_cell_failure():
    res = run_benchmark_suite(["euler"], ["si"], [0.3, 0.25], 1, 3)
    assert isinstance(res[0], BenchFailure) and res[0].kind == "GridError"
    assert isinstance(res[1], BenchRecord)


def test_custom_problem():
    prob = Problem(SirParams(1e-3, 0.1), (99.0, 1.0, 0.0), 0.0, 10.0)
    rec = time_solver(BenchConfig("sir", "rk4", 0.5, 1, 3), prob)
    assert rec.n_steps == 20
    assert sum(rec.final_state) == pytest.approx(100.0, rel=1e-12)


def test_clock_is_monotonic():
    assert time.get_clock_info("perf_counter").monotonic
    samples = [time.perf_counter_ns() for _ in range(1000)]
    assert all(b >= a for a, b in zip(samples, samples[1:]))


def test_timing_excludes_allocation(monkeypatch):
    """The timed bracket wraps only the kernel call."""
    calls = []
    real_prepare = kernels.prepare

    def spy_prepare(*a, **k):
        kernel, args, out = real_prepare(*a, **k)

        def wrapped(*xs):
            calls.append(("kernel", time.perf_counter_ns()))
            return kernel(*xs)

        calls.append(("prepared", time.perf_counter_ns()))
        return wrapped, args, out

    monkeypatch.setattr(kernels, "prepare", spy_prepare)
    time_solver(BenchConfig("si", "euler", 0.25, 1, 3), default_problem("si"))
    assert [c[0] for c in calls] == ["prepared"] + ["kernel"] * 4


def test_medians_reproducible_within_5x():
    def medians():
        res = run_benchmark_suite(["euler", "rk4"], ["si"], [0.1, 0.01], 2, 7)
        return [r.median for r in res]

    first, second = medians(), medians()
    for a, b in zip(first, second):
        assert max(a, b) / min(a, b) < 5


def test_finer_step_and_rk4_are_slower():
    res = {(r.method, r.h): r.median for r in run_benchmark_suite(["euler", "rk4"], ["sir"], [0.25, 0.01])}
    assert res[("euler", 0.01)] > res[("euler", 0.25)]
    assert res[("rk4", 0.01)] > res[("rk4", 0.25)]
    assert res[("rk4", 0.25)] > res[("euler", 0.25)]
    assert res[("rk4", 0.01)] > res[("euler", 0.01)]


def test_statistics_match_stdlib():
    rec = time_solver(BenchConfig("si", "pc", 0.1, 1, 5), default_problem("si"))
    assert rec.median == statistics.median(rec.times)
    assert rec.stddev == statistics.stdev(rec.times)
    assert rec.checksum == pytest.approx(float(np.sum(rec.final_state)))
