"""Monte Carlo execution of the optimal threshold policy.

Two independently coded samplers of the completion time:

* ``stream`` feeds i.i.d. uniforms one at a time through the acceptance
  window ``[x, x + t_{n-k} (1 - x)]``;
* ``shortcut`` skips the rejected observations, drawing each inter-selection
  gap as a geometric variable with parameter ``t_{n-k} (1 - x)`` and the
  accepted value uniformly on the window.

The scalar functions here are reference implementations that accept any
object with a ``random()`` method and can record a :class:`PolicyTrace`.
Bulk runs go through :func:`monte_carlo`, which dispatches to the compiled or
numpy kernels in fixed-size chunks and merges chunk summaries in index order,
so results do not depend on the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateWindowError, RunawayError
from .kernels import get_backend
from .recursion import BetaThresholdTable
from .stats import SimulationSummary

__all__ = [
    "MODES",
    "OBSERVATION_CAP",
    "CHUNK_SIZE",
    "PolicyState",
    "PolicyTrace",
    "StreamConfig",
    "simulate_stream",
    "simulate_shortcut",
    "run_chunks",
    "replication_kernel",
    "summarize_chunks",
    "sample_times",
    "monte_carlo",
]

MODES = ("stream", "shortcut")
OBSERVATION_CAP = 10**9
CHUNK_SIZE = 8192


@dataclass
class PolicyState:
    """Selections made, last accepted value and clock of one replication."""

    n: int
    k: int = 0
    last_value: float = 0.0
    time: int = 0

    def window(self, t) -> float:
        """Acceptance-window length ``t[n-k] * (1 - last_value)``."""
        return t[self.n - self.k] * (1.0 - self.last_value)


@dataclass
class PolicyTrace:
    times: list = field(default_factory=list)
    values: list = field(default_factory=list)
    windows: list = field(default_factory=list)

    def record(self, time, value, window):
        self.times.append(time)
        self.values.append(value)
        self.windows.append(window)


@dataclass(frozen=True)
class StreamConfig:
    seed: int = 42
    replications: int = 10_000
    mode: str = "shortcut"

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def _check_n(n: int, table: BetaThresholdTable) -> None:
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n={n} outside the table range 1..{table.n_max}")


def _stream_replication(n, t, rng, blocks=1, trace=None, cap=OBSERVATION_CAP):
    # Shared by the plain policy (blocks=1) and the blocking policy, which
    # runs the n-policy inside value blocks [b/m, (b+1)/m) one after another.
    time = 0
    for blk in range(blocks):
        state = PolicyState(n)
        while state.k < n:
            time += 1
            if time > cap:
                raise RunawayError(f"replication exceeded {cap} observations")
            u = rng.random()
            um = u * blocks
            b = math.floor(um)
            if b != blk:
                continue
            y = um - b
            lam = state.window(t)
            if state.last_value <= y <= state.last_value + lam:
                if trace is not None:
                    trace.record(time, u, lam / blocks)
                state.last_value = y
                state.k += 1
                state.time = time
    return time


def simulate_stream(n: int, table: BetaThresholdTable, rng, trace: Optional[PolicyTrace] = None) -> int:
    """Completion time of one replication, drawing observations one by one."""
    _check_n(n, table)
    return _stream_replication(n, table.t, rng, trace=trace)


def simulate_shortcut(n: int, table: BetaThresholdTable, rng, trace: Optional[PolicyTrace] = None) -> int:
    """Completion time of one replication, sampling geometric gaps directly."""
    _check_n(n, table)
    t = table.t
    state = PolicyState(n)
    while state.k < n:
        lam = state.window(t)
        if not lam > 0.0:
            raise DegenerateWindowError(f"window underflow at k={state.k}")
        u = rng.random()
        while u == 0.0:
            u = rng.random()
        gap = 1 if lam >= 1.0 else int(math.ceil(math.log(u) / math.log1p(-lam)))
        state.time += gap
        state.last_value = state.last_value + rng.random() * lam
        state.k += 1
        if trace is not None:
            trace.record(state.time, state.last_value, lam)
    return state.time


def _raise_on_flags(arr: np.ndarray) -> None:
    if arr.size and arr.min() < 0:
        if (arr == -1).any():
            raise RunawayError(f"replication exceeded {OBSERVATION_CAP} observations")
        raise DegenerateWindowError("acceptance window underflowed to zero")


def run_chunks(
    kernel: Callable[[int, int], np.ndarray],
    count: int,
    threads: int = 1,
    chunk: int = CHUNK_SIZE,
):
    """Evaluate ``kernel(start, size)`` over fixed chunks; results in chunk order."""
    spans = [(s, min(chunk, count - s)) for s in range(0, count, chunk)]

    def job(span):
        out = kernel(*span)
        _raise_on_flags(out)
        return out

    if threads <= 1 or len(spans) == 1:
        return [job(s) for s in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(job, spans))


def replication_kernel(n, table, cfg, backend=None):
    """``(start, size) -> completion times`` for the configured mode and backend."""
    impl = get_backend(backend)
    t = np.ascontiguousarray(table.t)
    if cfg.mode == "stream":
        return lambda start, size: impl.stream_times(t, n, 1, cfg.seed, start, size, OBSERVATION_CAP)
    return lambda start, size: impl.shortcut_times(t, n, cfg.seed, start, size)


def sample_times(n: int, table: BetaThresholdTable, cfg: StreamConfig, threads: int = 1, backend=None) -> np.ndarray:
    """Completion times of replications ``0 .. cfg.replications-1``, in index order."""
    _check_n(n, table)
    parts = run_chunks(replication_kernel(n, table, cfg, backend), cfg.replications, threads)
    return np.concatenate(parts)


def summarize_chunks(parts) -> SimulationSummary:
    return SimulationSummary.merge_all(SimulationSummary.from_samples(p) for p in parts)


def monte_carlo(n: int, table: BetaThresholdTable, cfg: StreamConfig, threads: int = 1, backend=None) -> SimulationSummary:
    """Summary of ``cfg.replications`` completion times in the configured mode."""
    _check_n(n, table)
    parts = run_chunks(replication_kernel(n, table, cfg, backend), cfg.replications, threads)
    return summarize_chunks(parts)
