"""Command-line interface: ``epibench solve|accuracy|bench``.

Settings are resolved in three layers: built-in defaults (the boarding
school influenza parameters), then a TOML config file given with
``--config``, then command-line flags.  Later layers win.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 a ``--check``
golden-value or property violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, bench, checks, kernels, report
from .accuracy import accuracy_sweep
from .errors import DomainError, GridError, NumericalFailure
from .integrators import METHODS, Trajectory, make_grid
from .models import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_I0,
    DEFAULT_R0,
    DEFAULT_S0,
    DEFAULT_STEPS,
    DEFAULT_T0,
    DEFAULT_TEND,
    SiParams,
    SirParams,
    si_exact_values,
)
from .refsolver import reference_trajectory
from .svg import line_chart

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_CHECK = 0, 1, 2, 3
MODELS = ("si", "sir")
FORMATS = ("csv", "json", "table")

DEFAULTS = {
    "model": ["si"],
    "method": None,  # per-command default
    "h": None,
    "alpha": DEFAULT_ALPHA,
    "beta": DEFAULT_BETA,
    "s0": DEFAULT_S0,
    "i0": DEFAULT_I0,
    "r0": DEFAULT_R0,
    "t0": DEFAULT_T0,
    "tend": DEFAULT_TEND,
    "out": None,
    "format": None,
    "backend": None,
    "warmup_runs": 3,
    "measured_runs": 11,
    "check": False,
    "plot": True,
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str
    method: str
    alpha: float = DEFAULT_ALPHA
    beta: float | None = DEFAULT_BETA
    s0: float = DEFAULT_S0
    i0: float = DEFAULT_I0
    r0: float | None = DEFAULT_R0
    t0: float = DEFAULT_T0
    b: float = DEFAULT_TEND
    h: float = 0.25
    out: Path | None = None
    fmt: str = "csv"
    backend: str | None = None
    plot: bool = True

    def __post_init__(self):
        if self.model not in MODELS:
            raise UsageError(f"unknown model {self.model!r}")
        if self.model == "sir" and (self.beta is None or self.r0 is None):
            raise UsageError("the sir model needs beta and r0")
        if self.model == "si" and (self.beta is not None or self.r0 is not None):
            raise UsageError("beta and r0 only apply to the sir model")

    @property
    def params(self):
        try:
            if self.model == "si":
                return SiParams(self.alpha)
            return SirParams(self.alpha, self.beta)
        except DomainError as exc:
            raise UsageError(str(exc)) from exc

    @property
    def y0(self) -> np.ndarray:
        values = [self.s0, self.i0] + ([self.r0] if self.model == "sir" else [])
        for name, v in zip(("s0", "i0", "r0"), values):
            if not (np.isfinite(v) and v >= 0):
                raise UsageError(f"{name} must be a finite count >= 0, got {v!r}")
        return np.array(values, dtype=float)


# ---------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _step(text: str) -> float:
    try:
        value = Decimal(str(text))
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"invalid step size {text!r}") from None
    if not value.is_finite() or value <= 0:
        raise argparse.ArgumentTypeError(f"step size must be > 0, got {text!r}")
    return float(value)


def _listing(values) -> list[str]:
    """Flatten repeated and comma-separated flag values."""
    if values is None:
        return []
    if isinstance(values, str):
        values = [values]
    out = []
    for v in values:
        out.extend(p.strip() for p in str(v).split(",") if p.strip())
    return out


def _common(parser: argparse.ArgumentParser, multi: bool) -> None:
    S = argparse.SUPPRESS
    parser.add_argument("--config", metavar="FILE", default=S,
                        help="TOML file of settings; flags override it, it overrides built-in defaults")
    parser.add_argument("--model", action="append", default=S, metavar="si|sir",
                        help="model(s); repeat or comma-separate" if multi else "model (si or sir)")
    parser.add_argument("--method", action="append", default=S,
                        help="method(s): euler, rk4, pc" + ("" if multi else ", reference"))
    parser.add_argument("--h", action="append", type=_step, default=S, metavar="STEP",
                        help="step size(s); must divide [t0, tend]")
    parser.add_argument("--alpha", type=float, default=S, help="transmission rate (default 2.18e-3)")
    parser.add_argument("--beta", type=float, default=S, help="recovery rate, sir only (default 2.18e-3*202)")
    parser.add_argument("--s0", type=float, default=S, help="initial susceptibles (default 762)")
    parser.add_argument("--i0", type=float, default=S, help="initial infected (default 1)")
    parser.add_argument("--r0", type=float, default=S, help="initial recovered, sir only (default 0)")
    parser.add_argument("--t0", type=float, default=S, help="start time in days (default 0)")
    parser.add_argument("--tend", type=float, default=S, help="end time in days (default 14)")
    parser.add_argument("--out", default=S, metavar="DIR", help="write output files into DIR")
    parser.add_argument("--format", choices=FORMATS, default=S, help="stdout format")
    parser.add_argument("--backend", choices=kernels.available_backends(), default=S,
                        help=f"stepping kernels (default {kernels.DEFAULT_BACKEND})")
    parser.add_argument("--check", action="store_true", default=S,
                        help="run the golden-value/property checks; exit 3 on any failure")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="epibench",
        description=__doc__.split("\n\n")[0],
        epilog="Precedence: command-line flags > --config file > built-in defaults.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="integrate one model and emit the trajectory (CSV/JSON) and an SVG plot")
    _common(p, multi=False)
    p.add_argument("--no-plot", dest="plot", action="store_false", default=argparse.SUPPRESS,
                   help="skip the SVG plot")

    p = sub.add_parser("accuracy", help="R^2 of each method against the exact/reference solution")
    _common(p, multi=True)

    p = sub.add_parser("bench", help="time the stepping kernels")
    _common(p, multi=True)
    p.add_argument("--warmup-runs", type=int, default=argparse.SUPPRESS)
    p.add_argument("--measured-runs", type=int, default=argparse.SUPPRESS, help="at least 3")
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    data = {k.replace("-", "_"): v for k, v in data.items()}
    for alias, key in (("methods", "method"), ("models", "model"), ("steps", "h"), ("b", "tend")):
        if alias in data:
            data[key] = data.pop(alias)
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return data


def resolve_settings(ns: argparse.Namespace) -> tuple[dict, set[str]]:
    """Merge defaults, config file and flags; return settings and explicitly set keys."""
    settings = dict(DEFAULTS)
    explicit = set()
    if getattr(ns, "config", None):
        file_values = _load_config(ns.config)
        settings.update(file_values)
        explicit |= set(file_values)
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    settings.update(flags)
    explicit |= set(flags)

    settings["model"] = _listing(settings["model"])
    if settings["method"] is not None:
        settings["method"] = _listing(settings["method"])
    if settings["h"] is not None:
        hs = settings["h"] if isinstance(settings["h"], list) else [settings["h"]]
        settings["h"] = [_step(v) if isinstance(v, str) else float(v) for v in hs]
    for key in ("alpha", "beta", "s0", "i0", "r0", "t0", "tend"):
        try:
            settings[key] = float(settings[key])
        except (TypeError, ValueError):
            raise UsageError(f"{key} must be a number, got {settings[key]!r}") from None
    return settings, explicit


def _run_config(
    settings: dict, explicit: set[str], model: str, method: str, h: float, strict: bool = True
) -> RunConfig:
    is_sir = model == "sir"
    if not is_sir and strict:
        for key in ("beta", "r0"):
            if key in explicit:
                raise UsageError(f"--{key} only applies to the sir model")
    cfg = RunConfig(
        model=model,
        method=method,
        alpha=settings["alpha"],
        beta=settings["beta"] if is_sir else None,
        s0=settings["s0"],
        i0=settings["i0"],
        r0=settings["r0"] if is_sir else None,
        t0=settings["t0"],
        b=settings["tend"],
        h=h,
        out=Path(settings["out"]) if settings["out"] else None,
        fmt=settings["format"] or "csv",
        backend=settings["backend"],
        plot=bool(settings["plot"]),
    )
    cfg.y0  # validate counts early
    return cfg


def _grid(cfg: RunConfig):
    try:
        return make_grid(cfg.t0, cfg.b, cfg.h)
    except GridError as exc:
        raise UsageError(str(exc)) from exc


def _models(settings) -> list[str]:
    models = settings["model"] or ["si"]
    bad = [m for m in models if m not in MODELS]
    if bad:
        raise UsageError(f"unknown model(s) {bad}; expected {MODELS}")
    return models


def _methods(settings, default: Sequence[str], allowed: Sequence[str]) -> list[str]:
    methods = list(default) if settings["method"] is None else settings["method"]
    if not methods:
        raise UsageError("empty method list")
    bad = [m for m in methods if m not in allowed]
    if bad:
        raise UsageError(f"unknown method(s) {bad}; expected {tuple(allowed)}")
    return methods


def _write(out: Path, name: str, text: str) -> Path:
    try:
        out.mkdir(parents=True, exist_ok=True)
        path = out / name
        path.write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out / name}: {exc}") from exc
    return path


# ---------------------------------------------------------------- commands

def trajectory_rows(tr: Trajectory, compartments: Sequence[str]) -> list[dict]:
    rows = []
    for t, state in zip(tr.times, tr.states):
        row = {"t": float(t)}
        row.update({c: float(v) for c, v in zip(compartments, state)})
        rows.append(row)
    return rows


def _trajectory_table(rows: list[dict], fields: Sequence[str]) -> str:
    lines = ["  ".join(f"{f:>14}" for f in fields)]
    for row in rows:
        lines.append("  ".join(f"{row[f]:>14.6f}" for f in fields))
    return "\n".join(lines) + "\n"


def cmd_solve(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    params = cfg.params
    grid = _grid(cfg)
    y0 = cfg.y0
    if cfg.method == "reference":
        tr = reference_trajectory(params.rhs, y0, grid)
    else:
        tr = kernels.simulate(params, cfg.method, y0, grid, cfg.backend)

    fields = ["t", *params.compartments]
    rows = trajectory_rows(tr, params.compartments)
    text = {
        "csv": lambda: report.rows_to_csv(rows, fields),
        "json": lambda: report.rows_to_json(rows),
        "table": lambda: _trajectory_table(rows, fields),
    }[cfg.fmt]()

    stem = f"{cfg.model}_{cfg.method}_h{report.format_h(grid.h)}"
    if cfg.out is None:
        stdout.write(text)
        return EXIT_OK
    _write(cfg.out, f"{stem}.{'txt' if cfg.fmt == 'table' else cfg.fmt}", text)
    if cfg.plot:
        overlays = {}
        if isinstance(params, SiParams):
            try:
                exact = si_exact_values(params, y0[0], y0[1], grid.times)
            except DomainError as exc:
                print(f"epibench: warning: exact-solution overlay suppressed: {exc}", file=sys.stderr)
            else:
                overlays = {"S exact": exact[:, 0], "I exact": exact[:, 1]}
        series = {c: tr.states[:, j] for j, c in enumerate(params.compartments)}
        title = f"{cfg.model.upper()} model, {report.METHOD_LABELS[cfg.method]} method, h={report.format_h(grid.h)}"
        _write(cfg.out, f"{stem}.svg", line_chart(grid.times, series, title, overlays))
    return EXIT_OK


def _emit_checks(results, fmt, stdout, out) -> bool:
    passed = all(r.passed for r in results)
    summary = {"passed": passed, "checks": [r.as_dict() for r in results]}
    if fmt == "json":
        stdout.write(json.dumps(summary, indent=2) + "\n")
    else:
        for r in results:
            stdout.write(r.line() + "\n")
        stdout.write(f"{'ALL CHECKS PASSED' if passed else 'CHECKS FAILED'}\n")
    if out is not None:
        _write(out, "checks.json", json.dumps(summary, indent=2) + "\n")
    return passed


def cmd_accuracy(settings: dict, explicit: set[str], stdout=None) -> int:
    stdout = stdout or sys.stdout
    fmt = settings["format"] or "table"
    out = Path(settings["out"]) if settings["out"] else None
    steps = settings["h"] or list(DEFAULT_STEPS)
    methods = _methods(settings, METHODS, METHODS)
    for model in _models(settings):
        strict = len(settings["model"] or ["si"]) == 1
        cfgs = [_run_config(settings, explicit, model, methods[0], h, strict) for h in steps]
        for cfg in cfgs:
            _grid(cfg)
        cfg = cfgs[0]
        try:
            reports = accuracy_sweep(cfg.params, cfg.y0, methods, steps, cfg.t0, cfg.b, cfg.backend)
        except DomainError as exc:
            raise UsageError(f"{model}: {exc}") from exc
        table = report.render_accuracy_table(reports)
        stdout.write({"table": table.text, "csv": table.csv, "json": table.json()}[fmt])
        if out is not None:
            _write(out, f"accuracy_{model}.csv", table.csv)
            _write(out, f"accuracy_{model}.json", table.json())
            _write(out, f"accuracy_{model}.txt", table.text)
    if settings["check"]:
        if not _emit_checks(checks.accuracy_checks(settings["backend"]), fmt, stdout, out):
            return EXIT_CHECK
    return EXIT_OK


def cmd_bench(settings: dict, explicit: set[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    fmt = settings["format"] or "table"
    out = Path(settings["out"]) if settings["out"] else None
    steps = settings["h"] or list(DEFAULT_STEPS)
    methods = _methods(settings, METHODS, METHODS)
    models = settings["model"] if "model" in explicit else list(MODELS)
    models = _models({"model": models})
    try:
        warmup = int(settings["warmup_runs"])
        measured = int(settings["measured_runs"])
        bench.BenchConfig(models[0], methods[0], steps[0], warmup, measured)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc

    problems = []
    for model in models:
        cfg = _run_config(settings, explicit, model, methods[0], steps[0], strict=len(models) == 1)
        for h in steps:
            _grid(RunConfig(**{**cfg.__dict__, "h": h}))
        problems.append(bench.Problem(cfg.params, tuple(cfg.y0), cfg.t0, cfg.b))

    results = bench.run_benchmark_suite(methods, problems, steps, warmup, measured, settings["backend"])
    records = [r for r in results if isinstance(r, bench.BenchRecord)]
    failures = [r for r in results if isinstance(r, bench.BenchFailure)]
    for f in failures:
        stderr.write(f"cell failed: {f.config.model}/{f.config.method}/h={f.config.h:g}: {f.error}\n")
    for r in records:
        if r.median / r.min > 3:
            stderr.write(
                f"warning: {r.model}/{r.method}/h={r.h:g} median/min = {r.median / r.min:.1f} > 3; "
                "host may be loaded\n"
            )

    summary_rows, long_rows = report.runtime_rows(records)
    for model in models:
        subset = [r for r in records if r.model == model]
        if not subset:
            continue
        table = report.render_runtime_table(subset)
        if fmt == "table":
            stdout.write(table.text)
    if fmt == "csv":
        stdout.write(report.rows_to_csv(summary_rows, report.RUNTIME_SUMMARY_FIELDS))
    elif fmt == "json":
        stdout.write(report.rows_to_json(summary_rows))
    if out is not None:
        _write(out, "runtime_summary.csv", report.rows_to_csv(summary_rows, report.RUNTIME_SUMMARY_FIELDS))
        _write(out, "runtime_long.csv", report.rows_to_csv(long_rows, report.RUNTIME_LONG_FIELDS))
        _write(out, "runtime_summary.json", report.rows_to_json(summary_rows))
        _write(out, "runtime_long.json", report.rows_to_json(long_rows))
        texts = [report.render_runtime_table([r for r in records if r.model == m]).text
                 for m in models if any(r.model == m for r in records)]
        _write(out, "runtime.txt", "\n".join(texts))

    if settings["check"]:
        if not _emit_checks(checks.benchmark_property_checks(results), fmt, stdout, out):
            return EXIT_CHECK
    return EXIT_NUMERICAL if failures else EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        settings, explicit = resolve_settings(ns)
        if ns.command == "solve":
            models = _models(settings)
            if len(models) != 1:
                raise UsageError("solve takes exactly one --model")
            methods = _methods(settings, ["rk4"], (*METHODS, "reference"))
            steps = settings["h"] or [0.25]
            if len(methods) != 1 or len(steps) != 1:
                raise UsageError("solve takes exactly one --method and one --h")
            cfg = _run_config(settings, explicit, models[0], methods[0], steps[0])
            return cmd_solve(cfg)
        if ns.command == "accuracy":
            return cmd_accuracy(settings, explicit)
        return cmd_bench(settings, explicit)
    except UsageError as exc:
        print(f"epibench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"epibench: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
