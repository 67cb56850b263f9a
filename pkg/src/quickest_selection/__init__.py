"""Quickest online selection of an increasing subsequence of given length.

Exact optimal means ``beta(n)``, thresholds ``t_n`` and variances ``v(n)`` of
the completion time, Monte Carlo execution of the optimal threshold policy,
and the blocking and size-focused dual comparisons.
"""

from .dual import (
    BlockingConfig,
    SizeFocusedValueGrid,
    blocking_violations,
    chebyshev_argmax,
    chebyshev_lower_bound,
    check_blocking_inequality,
    simulate_blocking,
    simulate_blocking_once,
    simulate_size_focused,
    size_focused_dp,
)
from .errors import ConvergenceError, DegenerateWindowError, DomainError, RunawayError
from .kernels import BACKEND
from .recursion import (
    BetaThresholdTable,
    SolverConfig,
    G_value,
    build_tables,
    delta_via_ghat,
    exact_variance_step,
    g_value,
    solve_H,
)
from .rng import ReplicationStream
from .simulation import (
    PolicyState,
    PolicyTrace,
    StreamConfig,
    monte_carlo,
    sample_times,
    simulate_shortcut,
    simulate_stream,
)
from .stats import SimulationSummary

__version__ = "0.1.0"
