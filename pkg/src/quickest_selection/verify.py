"""Deterministic checks of the bounds and asymptotics, used by ``verify``."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dual import blocking_violations, chebyshev_lower_bound, size_focused_dp
from .recursion import DEFAULT_CONFIG, BetaThresholdTable, build_tables, delta_via_ghat, foc_residual

_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class Tolerances:
    rel_slack: float
    dp_slack_units: float  # multiples of 1/grid_size


PROFILES = {
    "standard": Tolerances(rel_slack=1e-9, dp_slack_units=2.0),
    "strict": Tolerances(rel_slack=0.0, dp_slack_units=0.0),
}


@dataclass(frozen=True)
class Check:
    name: str
    status: str  # "pass", "fail" or "skip"
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def line(self) -> str:
        return f"{self.status.upper():4} {self.name}" + (f": {self.detail}" if self.detail else "")


def _check(name, passed, detail):
    return Check(name, "pass" if passed else "fail", detail)


def _first(mask):
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else None


def check_bounds(table: BetaThresholdTable, tol: Tolerances) -> Check:
    n = np.arange(2, table.n_max + 1, dtype=np.float64)
    if n.size == 0:
        return Check("mean_bounds", "skip", "needs n_max >= 2")
    beta = table.beta[2:]
    lower = 0.5 * n * n
    upper = lower + n * np.log(n)
    bad = (beta < lower * (1 - tol.rel_slack)) | (beta > upper * (1 + tol.rel_slack))
    i = _first(bad)
    if i is None:
        return _check("mean_bounds", True, f"n^2/2 <= beta(n) <= n^2/2 + n ln n for 2 <= n <= {table.n_max}")
    return _check("mean_bounds", False, f"violated at n={i + 2}: beta={float(beta[i])!r}, bounds=[{float(lower[i])!r}, {float(upper[i])!r}]")


def check_convexity(table: BetaThresholdTable) -> Check:
    d = table.delta[1:]
    if d.size < 2:
        return Check("convexity", "skip", "needs n_max >= 3")
    i = _first(np.diff(d) < 0)
    if i is None:
        return _check("convexity", True, f"delta(n) nondecreasing for 1 <= n < {table.n_max}")
    return _check("convexity", False, f"delta({i + 2}) < delta({i + 1})")


def check_delta_identity(table: BetaThresholdTable) -> Check:
    ns = [n for n in (1, 10, 100, 1000) if n < table.n_max]
    if not ns:
        return Check("delta_identity", "skip", "needs n_max >= 2")
    worst = max(abs(delta_via_ghat(float(table.beta[n])) - table.delta[n]) / table.delta[n] for n in ns)
    return _check("delta_identity", worst <= 1e-9, f"max relative gap {worst:.3g} at n in {ns}")


def check_threshold_roots(table: BetaThresholdTable) -> Check:
    if table.n_max < 2:
        return Check("threshold_roots", "skip", "needs n_max >= 2")
    tol = DEFAULT_CONFIG.root_tol
    worst = 0.0
    for n in range(1, table.n_max):
        x = float(table.beta[n])
        t = float(table.t[n + 1])
        allowed = 10 * tol * t / (1 - t) ** 2 + 8 * _EPS / x
        ratio = abs(foc_residual(t, x)) / allowed
        if ratio > 1.0:
            return _check("threshold_roots", False, f"first-order residual too large at n={n + 1}")
        if t > math.sqrt(2.0 / x):
            return _check("threshold_roots", False, f"t({n + 1}) exceeds sqrt(2/beta({n}))")
        worst = max(worst, ratio)
    return _check("threshold_roots", True, f"residuals within {worst:.2g} of allowance; t(n+1) <= sqrt(2/beta(n))")


def check_beta2(table: BetaThresholdTable) -> Check:
    if table.n_max < 2:
        return Check("beta2", "skip", "needs n_max >= 2")
    b = float(table.beta[2])
    return _check("beta2", 3.14 < b < 3.15, f"beta(2) = {b!r}")


def _decades(n_max):
    return [10**k for k in range(2, 6) if 10**k <= n_max]


def check_threshold_asymptotic(table: BetaThresholdTable) -> Check:
    decades = _decades(table.n_max)
    if len(decades) < 2:
        return Check("threshold_asymptotic", "skip", "needs n_max >= 1000")
    gaps = [abs(n * table.t[n] - 2.0) for n in decades]
    ok = all(a > b for a, b in zip(gaps, gaps[1:]))
    detail = ", ".join(f"|n t_n - 2|={g:.3g} at n={n}" for n, g in zip(decades, gaps))
    if 10_000 in decades:
        ok = ok and gaps[decades.index(10_000)] <= 0.01
    return _check("threshold_asymptotic", ok, detail)


def check_variance(table: BetaThresholdTable, var_n: int) -> Check:
    decades = _decades(table.n_max)
    if var_n > table.n_max or len(decades) < 2:
        return Check("variance_asymptotic", "skip", f"needs n_max >= max(var_n={var_n}, 1000)")
    ratio = lambda n: 3.0 * table.v[n] / float(n) ** 3  # noqa: E731
    r = ratio(var_n)
    lo, hi = abs(ratio(decades[-1]) - 1), abs(ratio(100) - 1)
    ok = 0.9 <= r <= 1.1 and lo < hi
    return _check(
        "variance_asymptotic",
        ok,
        f"3v(n)/n^3={r:.6f} at n={var_n}; |ratio-1|={hi:.3g} at n=100, {lo:.3g} at n={decades[-1]}",
    )


def check_blocking(table: BetaThresholdTable) -> Check:
    bad = blocking_violations(table)
    if bad:
        return _check("blocking_inequality", False, f"violated at (m, n)={bad[0]}")
    return _check("blocking_inequality", True, f"all m*n <= {table.n_max}")


def check_dual(horizon: int, grid_size: int, table: BetaThresholdTable, tol: Tolerances):
    grid = size_focused_dp(horizon, grid_size)
    slack = tol.dp_slack_units / grid_size
    ell = grid.ell
    out = []
    n = np.arange(1, horizon + 1)
    i = _first(ell[1:] > np.sqrt(2.0 * n) + slack)
    out.append(
        _check("dual_upper_bound", i is None, f"ell(n) <= sqrt(2n) for n <= {horizon}" if i is None else f"ell({i + 1})={float(ell[i + 1])!r} > sqrt({2 * (i + 1)})")
    )
    exact = ell[1] == 1.0 and (horizon < 2 or abs(ell[2] - 1.5) <= 1e-3)
    out.append(_check("dual_small_cases", exact, f"ell(1)={float(ell[1])!r}" + (f", ell(2)={float(ell[2])!r}" if horizon >= 2 else "")))
    ns = [m for m in (50, 100) if m <= horizon]
    if not ns:
        out.append(Check("chebyshev_vs_dp", "skip", "needs horizon >= 50"))
    else:
        parts, ok = [], True
        for m in ns:
            c = chebyshev_lower_bound(m, table)
            ok = ok and 0 < c <= ell[m] + slack
            parts.append(f"n={m}: {c:.4f} <= {ell[m]:.4f}")
        out.append(_check("chebyshev_vs_dp", ok, "; ".join(parts)))
    return out


def run_checks(
    n_max: int = 10_000,
    var_n: int = 5000,
    grid_size: int = 10_000,
    profile: str = "standard",
    table: Optional[BetaThresholdTable] = None,
):
    """Run every check; ``table`` overrides the freshly built one (fault injection)."""
    tol = PROFILES[profile]
    if table is None:
        table = build_tables(n_max)
    horizon = min(100, table.n_max)
    checks = [
        check_bounds(table, tol),
        check_convexity(table),
        check_delta_identity(table),
        check_threshold_roots(table),
        check_beta2(table),
        check_threshold_asymptotic(table),
        check_variance(table, var_n),
        check_blocking(table),
    ]
    checks.extend(check_dual(horizon, grid_size, table, tol))
    return checks
