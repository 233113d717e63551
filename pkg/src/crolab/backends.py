"""Backend selection: compiled kernel when available, pure Python otherwise.

Both backends implement the identical algorithm (same generator, same draw
order, same arithmetic), so results are bit-identical; the compiled kernel
is simply orders of magnitude faster.  Set CROLAB_BACKEND=python or
CROLAB_BACKEND=c to force a choice at import time.
"""

from __future__ import annotations

import os
import time
from typing import Optional

from . import engine
from .benchmarks import FUNCTION_CODES, BenchmarkFunction
from .distributions import KIND_CODES, PerturbationSpec
from .engine import Parameters, RunResult

try:
    from . import _kernel
except ImportError:  # pragma: no cover - depends on the build
    _kernel = None

_FORCED = os.environ.get("CROLAB_BACKEND", "").strip().lower()
if _FORCED == "python":
    _ACTIVE = "python"
elif _FORCED == "c":
    if _kernel is None:
        raise ImportError("CROLAB_BACKEND=c but the compiled kernel is not built")
    _ACTIVE = "c"
else:
    _ACTIVE = "c" if _kernel is not None else "python"


def backend_name() -> str:
    """Name of the backend used by default ("c" or "python")."""
    return _ACTIVE


def available_backends() -> tuple[str, ...]:
    return ("c", "python") if _kernel is not None else ("python",)


def run_cell(problem: BenchmarkFunction, params: Parameters,
             perturbation: PerturbationSpec, seed: int, fe_limit: int,
             audit: bool = False, trace_stride: int = 0,
             backend: Optional[str] = None) -> RunResult:
    """One seeded optimization run on the selected backend."""
    params.validate()
    which = backend or _ACTIVE
    if which == "python":
        state = engine.initialize(params, problem, perturbation, seed)
        return engine.run(state, fe_limit, audit=audit, trace_stride=trace_stride)
    if _kernel is None:
        raise ValueError("compiled backend requested but not built")
    started = time.perf_counter()
    best, best_struct, fe_used, drift, trace, counts, accepts = _kernel.run_cell(
        FUNCTION_CODES[problem.id], problem.dim, problem.lower, problem.upper,
        problem.noisy, KIND_CODES[perturbation.kind], perturbation.scale,
        params.pop_size, params.en_buff, params.ini_ke, params.coll_rate,
        params.loss_rate, params.dec_thres, params.syn_thres,
        seed, fe_limit, audit, trace_stride,
    )
    wall_ms = (time.perf_counter() - started) * 1e3
    names = engine.REACTION_TYPES
    return RunResult(
        best_value=best, best_struct=best_struct, fe_used=fe_used,
        wall_ms=wall_ms, max_energy_drift=drift, trace=trace,
        reaction_counts=dict(zip(names, counts)),
        accepted_counts=dict(zip(names, accepts)),
    )


def sample_values(perturbation: PerturbationSpec, n: int, seed: int,
                  backend: Optional[str] = None) -> list[float]:
    """n perturbation draws from a fresh seeded stream."""
    which = backend or _ACTIVE
    if which == "python" or _kernel is None or perturbation.location != 0.0:
        from .distributions import sample_many
        return sample_many(perturbation, n, seed)
    return _kernel.sample_batch(KIND_CODES[perturbation.kind], perturbation.scale, n, seed)
