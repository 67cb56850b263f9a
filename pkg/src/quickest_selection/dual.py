"""Suboptimal policies and the size-focused dual problem.

The blocking policy splits [0, 1] into ``m`` value blocks and runs the optimal
``n``-policy inside each block in turn, on feasible values rescaled to
[0, 1]. Each block costs ``m * beta(n)`` observations on average, so the
policy selects ``m * n`` increasing values in ``m^2 beta(n)`` expected time,
which can only exceed ``beta(m n)``.

The size-focused problem fixes the number of observations ``n`` and maximizes
the expected number ``ell(n)`` of increasing selections. Its value function
``u_i(x)`` (``i`` observations left, last selected value ``x``) solves

    u_i(x) = x u_{i-1}(x) + int_x^1 max(1 + u_{i-1}(y), u_{i-1}(x)) dy,   u_0 = 0,

and ``ell(n) = u_n(0)``. Time-focused quantities bound ``ell`` from both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import get_backend
from .recursion import BetaThresholdTable
from .simulation import OBSERVATION_CAP, StreamConfig, _stream_replication, run_chunks, summarize_chunks
from .stats import SimulationSummary

__all__ = [
    "BlockingConfig",
    "SizeFocusedValueGrid",
    "simulate_blocking",
    "simulate_blocking_once",
    "size_focused_dp",
    "simulate_size_focused",
    "chebyshev_lower_bound",
    "chebyshev_argmax",
    "check_blocking_inequality",
    "blocking_violations",
]


@dataclass(frozen=True)
class BlockingConfig:
    m: int
    n: int
    replications: int = 10_000
    seed: int = 42

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")


def simulate_blocking_once(m: int, n: int, table: BetaThresholdTable, rng, trace=None) -> int:
    """Observations used by one run of the blocking policy (reference implementation)."""
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n={n} outside the table range 1..{table.n_max}")
    return _stream_replication(n, table.t, rng, blocks=m, trace=trace)


def simulate_blocking(cfg: BlockingConfig, table: BetaThresholdTable, threads: int = 1, backend=None) -> SimulationSummary:
    """Summary of the total observations the blocking policy needs for ``m n`` selections."""
    if cfg.n > table.n_max:
        raise ValueError(f"n={cfg.n} exceeds table n_max={table.n_max}")
    impl = get_backend(backend)
    t = np.ascontiguousarray(table.t)

    def kernel(start, size):
        return impl.stream_times(t, cfg.n, cfg.m, cfg.seed, start, size, OBSERVATION_CAP)

    return summarize_chunks(run_chunks(kernel, cfg.replications, threads))


@dataclass(frozen=True, eq=False)
class SizeFocusedValueGrid:
    """``values[i, j] = u_i(j / (grid_size - 1))``; ``ell[i] = u_i(0)``, ``ell[0] = 0``."""

    grid_size: int
    horizon: int
    values: np.ndarray
    ell: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_size)


def _dp_step(prev: np.ndarray, x: np.ndarray) -> np.ndarray:
    # Trapezoid rule on the grid for y -> max(1 + prev(y), prev(x_j)) over
    # [x_j, 1]. prev is nonincreasing, so the integrand equals 1 + prev(y) up
    # to the last grid index p_j with 1 + prev >= prev(x_j), and prev(x_j)
    # after it; only the segment [p_j, p_j + 1] mixes the two.
    size = prev.size
    # sums are kept in units of h/2 and divided once, so integer rows stay exact
    denom = 2.0 * (size - 1)
    w = 1.0 + prev
    cum = np.concatenate(([0.0], np.cumsum(w[:-1] + w[1:])))
    # -w is nondecreasing; count of grid points with w >= prev[j], minus one
    p = np.searchsorted(-w, -prev, side="right") - 1
    j = np.arange(size)
    p = np.maximum(p, j)
    tail_pts = size - 1 - p
    mixed = np.where(tail_pts > 0, w[p] + prev, 0.0)
    flat = 2.0 * prev * np.maximum(tail_pts - 1, 0)
    return x * prev + (cum[p] - cum[j] + mixed + flat) / denom


def size_focused_dp(horizon: int, grid_size: int = 10_000) -> SizeFocusedValueGrid:
    """Backward induction for the size-focused value function on a uniform grid."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    x = np.linspace(0.0, 1.0, grid_size)
    values = np.zeros((horizon + 1, grid_size))
    for i in range(1, horizon + 1):
        values[i] = _dp_step(values[i - 1], x)
    ell = values[:, 0].copy()
    values.setflags(write=False)
    ell.setflags(write=False)
    return SizeFocusedValueGrid(grid_size=grid_size, horizon=horizon, values=values, ell=ell)


def simulate_size_focused(horizon: int, grid: SizeFocusedValueGrid, cfg: StreamConfig, threads: int = 1, backend=None) -> SimulationSummary:
    """Selected-count summary for the policy greedy with respect to ``grid``.

    With ``i`` observations left and last value ``x``, an observation
    ``y > x`` is accepted iff ``1 + u_{i-1}(y) >= u_{i-1}(x)``, both read at
    the nearest grid point. ``cfg.mode`` is ignored.
    """
    if not 1 <= horizon <= grid.horizon:
        raise ValueError(f"horizon={horizon} outside 1..{grid.horizon}")
    impl = get_backend(backend)
    values = np.ascontiguousarray(grid.values)

    def kernel(start, size):
        return impl.size_focused_counts(values, horizon, cfg.seed, start, size)

    return summarize_chunks(run_chunks(kernel, cfg.replications, threads))


def chebyshev_argmax(n: int, table: BetaThresholdTable):
    """Best ``(r, bound)`` for ``r (1 - v(r) / (n - beta(r))^2)`` over ``beta(r) < n``.

    Following the ``r``-target optimal time-focused policy for ``n``
    observations yields ``r`` selections with probability at least
    ``1 - v(r)/(n - beta(r))^2`` by Chebyshev's inequality. Returns
    ``(0, 0.0)`` when no ``r`` in the table qualifies.
    """
    best_r, best = 0, 0.0
    for r in range(1, table.n_max + 1):
        b = float(table.beta[r])
        if b >= n:
            break
        val = r * (1.0 - float(table.v[r]) / (n - b) ** 2)
        if val > best:
            best_r, best = r, val
    return best_r, best


def chebyshev_lower_bound(n: int, table: BetaThresholdTable) -> float:
    """Lower bound on ``ell(n)`` from the optimal time-focused policy."""
    return chebyshev_argmax(n, table)[1]


def check_blocking_inequality(m: int, n: int, table: BetaThresholdTable) -> bool:
    """Whether ``beta(m n) <= min(m^2 beta(n), n^2 beta(m))`` up to 1e-9 relative."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    if m * n > table.n_max:
        raise IndexError(f"m*n={m * n} exceeds table n_max={table.n_max}")
    bound = min(m * m * float(table.beta[n]), n * n * float(table.beta[m]))
    return float(table.beta[m * n]) <= bound * (1.0 + 1e-9)


def blocking_violations(table: BetaThresholdTable, limit: int | None = None):
    """All ``(m, n)`` with ``m n <= limit`` violating the blocking inequality."""
    limit = table.n_max if limit is None else limit
    bad = []
    for m in range(1, limit + 1):
        for n in range(1, limit // m + 1):
            if not check_blocking_inequality(m, n, table):
                bad.append((m, n))
    return bad

