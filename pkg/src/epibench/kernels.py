"""Model-specialised stepping kernels with backend selection.

The compiled backend (``_ckernels``, built from Cython) is used when it
imports; otherwise the pure-Python kernels are used.  Setting the
environment variable ``EPIBENCH_PURE_PYTHON=1`` forces the fallback.
Both backends produce bit-identical trajectories.
"""

from __future__ import annotations

import os
from typing import Callable

import numpy as np

from . import _pykernels
from .errors import NonFiniteStateError
from .integrators import METHODS, Grid, Trajectory
from .models import ModelSpec, SiParams, SirParams

_BACKENDS = {"python": _pykernels}

if not os.environ.get("EPIBENCH_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        _BACKENDS["compiled"] = _ckernels

DEFAULT_BACKEND = "compiled" if "compiled" in _BACKENDS else "python"


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def _backend(name: str | None):
    name = name or DEFAULT_BACKEND
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} unavailable; available: {available_backends()}"
        ) from None


def prepare(params: ModelSpec, method: str, y0, grid: Grid, backend: str | None = None):
    """Return ``(kernel, args, out)`` ready for a single kernel call.

    ``kernel(*args)`` fills ``out`` in place.  Everything that is not
    stepping (allocation, parameter unpacking) happens here so that a
    caller can time the call alone.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    module = _backend(backend)
    if isinstance(params, SiParams):
        rates = (params.alpha,)
    elif isinstance(params, SirParams):
        rates = (params.alpha, params.beta)
    else:
        raise TypeError(f"unsupported model parameters {params!r}")
    kernel: Callable[..., int] = getattr(module, f"{params.name}_{method}")
    y0 = np.asarray(y0, dtype=float).reshape(-1)
    if y0.size != params.dim:
        raise ValueError(f"{params.name} needs a {params.dim}-component state, got {y0.size}")
    out = np.empty((grid.n + 1, params.dim), dtype=np.float64)
    out[0] = y0
    return kernel, (*rates, grid.h, out), out


def simulate(params: ModelSpec, method: str, y0, grid: Grid, backend: str | None = None) -> Trajectory:
    """Integrate ``params`` on ``grid`` with a specialised kernel."""
    kernel, args, out = prepare(params, method, y0, grid, backend)
    failed = kernel(*args)
    if failed >= 0:
        raise NonFiniteStateError(failed, out[: failed + 1].copy())
    return Trajectory(grid, out, method)
