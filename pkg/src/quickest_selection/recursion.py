"""Exact optimal values, thresholds and variances for quickest increasing-subsequence selection.

The one-step cost of accepting the next observation below a threshold ``t``
when the remaining problem costs ``x`` (in rescaled time) is

    g(x, t) = 1/t + (x/t) * log(1/(1-t))

and the optimal mean satisfies ``beta(n+1) = min_t g(beta(n), t)`` with
``beta(1) = 1``. The minimizer is the optimal threshold ``t_{n+1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "SolverConfig",
    "BetaThresholdTable",
    "g_value",
    "ghat_value",
    "foc_residual",
    "solve_H",
    "G_value",
    "exact_variance_step",
    "scaled_variance_step",
    "delta_via_ghat",
    "build_tables",
]

# Lower/upper ends of the bisection bracket on (0, 1).
_EPS = 1e-15
# Below this t the power series are used instead of the closed forms.
_SERIES_CUTOFF = 0.25
_SERIES_TERMS = 80


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances for the threshold root solve."""

    root_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not 0.0 < self.root_tol < 1e-6:
            raise ValueError(f"root_tol must lie in (0, 1e-6), got {self.root_tol!r}")
        if self.max_iter < 64:
            raise ValueError(f"max_iter must be >= 64, got {self.max_iter!r}")


DEFAULT_CONFIG = SolverConfig()


def _neglog1m(t: float) -> float:
    """-log(1 - t), accurate for small t."""
    return -math.log1p(-t)


def _series(coeffs, t: float) -> float:
    # Horner on sum_k coeffs[k] * t**k, highest order first.
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


# log(1-t) + t/(1-t) = sum_{i>=2} (i-1)/i t^i
_FOC_COEFFS = [0.0, 0.0] + [(i - 1) / i for i in range(2, _SERIES_TERMS + 2)]
# -log(1-t)/t - 1 = sum_{k>=1} t^k/(k+1)
_GHAT_COEFFS = [0.0] + [1.0 / (k + 1) for k in range(1, _SERIES_TERMS + 1)]


def _var_r_coeffs(terms):
    # Var[R(t)] = sum_k t^k (1 - 2 H_{k+1} / (k+2)); the k=0,1 terms vanish.
    out = []
    harmonic = 0.0
    for k in range(terms):
        harmonic += 1.0 / (k + 1)
        out.append(1.0 - 2.0 * harmonic / (k + 2))
    out[0] = out[1] = 0.0
    return out


_VAR_R_COEFFS = _var_r_coeffs(_SERIES_TERMS + 40)
_GAP_COEFFS = [0.0] + [k / (k + 1) for k in range(1, _SERIES_TERMS + 1)]


def _check_open_unit(t: float) -> None:
    if not 0.0 < t < 1.0:
        raise DomainError(f"threshold must lie in (0, 1), got {t!r}")


def g_value(x: float, t: float) -> float:
    """One-step expected cost ``1/t + (x/t) log(1/(1-t))``."""
    _check_open_unit(t)
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    return (1.0 + x * _neglog1m(t)) / t


def ghat_value(x: float, t: float) -> float:
    """``g(x, t) - x``, evaluated without the cancellation of the difference."""
    _check_open_unit(t)
    if t < _SERIES_CUTOFF:
        q = _series(_GHAT_COEFFS, t)
    else:
        q = _neglog1m(t) / t - 1.0
    return 1.0 / t + x * q


def foc_residual(t: float, x: float) -> float:
    """``log(1-t) + t/(1-t) - 1/x``; zero at the minimizer of g(x, .)."""
    if t < _SERIES_CUTOFF:
        lhs = _series(_FOC_COEFFS, t)
    else:
        lhs = math.log1p(-t) + t / (1.0 - t)
    return lhs - 1.0 / x


def solve_H(x: float, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Minimizing threshold of ``g(x, .)``.

    Bisects the first-order condition on ``(eps, 1 - eps)`` until the bracket
    is narrow, then finishes with Newton steps started from the right end of
    the bracket. The residual is increasing and convex in ``t``, so Newton
    from the right decreases monotonically onto the root.
    """
    if not x >= 1.0:
        raise DomainError(f"x must be >= 1, got {x!r}")
    lo, hi = _EPS, 1.0 - _EPS
    it = 0
    while hi - lo > 1e-6 * hi:
        if it >= cfg.max_iter:
            raise ConvergenceError(f"bisection for H({x!r}) did not converge in {cfg.max_iter} steps")
        mid = 0.5 * (lo + hi)
        if foc_residual(mid, x) > 0.0:
            hi = mid
        else:
            lo = mid
        it += 1
    t = hi
    while True:
        if it >= cfg.max_iter:
            raise ConvergenceError(f"Newton for H({x!r}) did not converge in {cfg.max_iter} steps")
        step = foc_residual(t, x) * (1.0 - t) ** 2 / t
        t_new = t - step
        if not lo <= t_new <= hi:
            t_new = 0.5 * (lo + hi)
        it += 1
        if abs(t_new - t) <= cfg.root_tol:
            return t_new
        t = t_new


def G_value(x: float, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Minimum over t of ``g(x, t)``."""
    return g_value(x, solve_H(x, cfg))


def delta_via_ghat(beta_n: float, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """``beta(n+1) - beta(n)`` as the minimum of ``ghat(beta_n, .)``.

    ``ghat`` differs from ``g`` by the constant ``x``, so it shares the
    minimizer ``solve_H(beta_n)``.
    """
    return ghat_value(beta_n, solve_H(beta_n, cfg))


def _var_r(t: float) -> float:
    if t < _SERIES_CUTOFF:
        return _series(_VAR_R_COEFFS, t)
    er = _neglog1m(t) / t
    return 1.0 / (1.0 - t) - er * er


def _er2_minus_er(t: float) -> float:
    # E[R^2] - E[R] = 1/(1-t) + log(1-t)/t = sum_{k>=1} k/(k+1) t^k
    if t < _SERIES_CUTOFF:
        return _series(_GAP_COEFFS, t)
    return 1.0 / (1.0 - t) - _neglog1m(t) / t


def _check_step_args(t, m_prev, v_prev):
    if not 0.0 < t <= 1.0:
        raise DomainError(f"threshold must lie in (0, 1], got {t!r}")
    if t == 1.0 and (m_prev > 0.0 or v_prev > 0.0):
        raise DomainError("E[R(1)^2] diverges; the variance step is undefined at t = 1")


def exact_variance_step(t: float, m_prev: float, v_prev: float) -> float:
    """Variance of the completion time one level up from ``(m_prev, v_prev)``.

    With threshold ``t`` the first selection takes a geometric(``t``) number
    ``gamma`` of observations and lands at ``U`` uniform on ``[0, t]``. The
    remaining ``n - 1`` selections see only observations above ``U``, so
    their cost is a sum of ``T`` i.i.d. geometric(``1 - U``) gaps, where
    ``T`` has mean ``m_prev`` and variance ``v_prev``. Conditioning on ``U``
    with ``R = 1/(1 - U)``::

        Var = Var[gamma] + E[R^2] v_prev + Var[R] m_prev^2 + (E[R^2] - E[R]) m_prev

    The last term is the gap noise; :func:`scaled_variance_step` drops it.
    """
    _check_step_args(t, m_prev, v_prev)
    if t == 1.0:
        return 0.0
    return scaled_variance_step(t, m_prev, v_prev) + _er2_minus_er(t) * m_prev


def scaled_variance_step(t: float, m_prev: float, v_prev: float) -> float:
    """Variance of ``gamma(t) + R(t) T``, i.e. the remaining time taken as ``T`` rescaled by ``R``.

    Equals ``Var[gamma] + E[R^2](v_prev + m_prev^2) - (E[R] m_prev)^2``,
    evaluated as ``Var[gamma] + E[R^2] v_prev + Var[R] m_prev^2`` to keep
    precision for small ``t``. Ignoring the gap noise makes this an
    underestimate of the true step by ``O(m_prev t)``; it shares the
    ``n^3/3`` leading order.
    """
    _check_step_args(t, m_prev, v_prev)
    if t == 1.0:
        return 0.0
    var_geom = (1.0 - t) / (t * t)
    return var_geom + v_prev / (1.0 - t) + _var_r(t) * m_prev * m_prev


@dataclass(frozen=True, eq=False)
class BetaThresholdTable:
    """Per-n optimal means, thresholds and variances.

    Arrays are 1-indexed: ``beta[n]`` is the optimal mean for length ``n``
    and index 0 holds NaN. ``delta[n] = beta[n+1] - beta[n]`` for
    ``1 <= n < n_max``. All arrays are read-only.
    """

    n_max: int
    beta: np.ndarray
    t: np.ndarray
    v: np.ndarray
    delta: np.ndarray

    def row(self, n: int) -> dict:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"n={n} outside 1..{self.n_max}")
        delta = float(self.delta[n]) if n < self.n_max else None
        return {
            "n": n,
            "beta": float(self.beta[n]),
            "t": float(self.t[n]),
            "v": float(self.v[n]),
            "lower": 0.5 * n * n,
            "upper": 0.5 * n * n + n * math.log(n),
            "delta": delta,
        }

    def rows(self):
        for n in range(1, self.n_max + 1):
            yield self.row(n)

    @classmethod
    def from_arrays(cls, beta, t, v) -> "BetaThresholdTable":
        """Wrap 1-indexed arrays (index 0 ignored) into a read-only table."""
        beta = np.array(beta, dtype=np.float64)
        t = np.array(t, dtype=np.float64)
        v = np.array(v, dtype=np.float64)
        n_max = len(beta) - 1
        if n_max < 1 or len(t) != n_max + 1 or len(v) != n_max + 1:
            raise ValueError("beta, t, v must share length n_max + 1 with n_max >= 1")
        beta[0] = t[0] = v[0] = np.nan
        delta = np.full(n_max, np.nan)
        delta[1:] = beta[2:] - beta[1:-1]
        for arr in (beta, t, v, delta):
            arr.setflags(write=False)
        return cls(n_max=n_max, beta=beta, t=t, v=v, delta=delta)


def build_tables(n_max: int, cfg: SolverConfig = DEFAULT_CONFIG) -> BetaThresholdTable:
    """Run the mean/threshold/variance recursions up to ``n_max``."""
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    beta = np.empty(n_max + 1)
    t = np.empty(n_max + 1)
    v = np.empty(n_max + 1)
    beta[1], t[1], v[1] = 1.0, 1.0, 0.0
    for n in range(1, n_max):
        b = float(beta[n])
        tn = solve_H(b, cfg)
        t[n + 1] = tn
        beta[n + 1] = g_value(b, tn)
        v[n + 1] = exact_variance_step(tn, b, float(v[n]))
    return BetaThresholdTable.from_arrays(beta, t, v)
