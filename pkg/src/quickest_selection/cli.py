"""Command-line front end.

Exit codes: 0 success, 1 failed verification, 2 bad arguments, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .dual import BlockingConfig, chebyshev_argmax, simulate_blocking, simulate_size_focused, size_focused_dp
from .kernels import BACKENDS
from .recursion import BetaThresholdTable, build_tables
from .simulation import MODES, StreamConfig, replication_kernel, run_chunks, summarize_chunks
from .verify import PROFILES, run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
DEFAULT_SEED = 42
TABLE_FIELDS = ("n", "beta", "t", "v", "lower", "upper", "delta")
FAULTS = ("beta-upper", "convexity")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _fmt(value) -> str:
    # repr gives the shortest string that parses back to the same double
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _render(records, fields, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for rec in records:
        writer.writerow([_fmt(rec[f]) for f in fields])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> int:
    try:
        if out is None or out == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(out, "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_tables(args) -> int:
    table = build_tables(args.n_max)
    return _emit(_render(list(table.rows()), TABLE_FIELDS, args.format), args.out)


def _z(diff: float, se: float) -> float:
    if diff == 0.0:
        return 0.0
    return diff / se if se > 0 else float("inf") if diff > 0 else float("-inf")


def cmd_simulate(args) -> int:
    table = build_tables(args.n)
    cfg = StreamConfig(seed=args.seed, replications=args.reps, mode=args.mode)
    parts = run_chunks(replication_kernel(args.n, table, cfg, args.backend), cfg.replications, args.threads)
    summary = summarize_chunks(parts)
    beta, v = float(table.beta[args.n]), float(table.v[args.n])
    rec = {"n": args.n, "mode": args.mode, "seed": args.seed, "replications": args.reps}
    rec.update(summary.to_dict())
    rec.update(
        beta=beta,
        v=v,
        z_mean=_z(summary.mean - beta, summary.std_error),
        z_variance=_z(summary.variance - v, summary.variance_std_error),
    )
    if args.dump_samples:
        samples = np.concatenate(parts)
        code = _emit("".join(f"{int(s)}\n" for s in samples), args.dump_samples)
        if code:
            return code
    return _emit(_render([rec], list(rec), args.format), args.out)


def cmd_blocking(args) -> int:
    table = build_tables(args.m * args.n)
    cfg = BlockingConfig(m=args.m, n=args.n, replications=args.reps, seed=args.seed)
    s = simulate_blocking(cfg, table, threads=args.threads, backend=args.backend)
    rec = {"m": args.m, "n": args.n, "seed": args.seed, "replications": args.reps}
    rec.update(s.to_dict())
    rec.update(
        beta_mn=float(table.beta[args.m * args.n]),
        blocking_mean=args.m**2 * float(table.beta[args.n]),
    )
    return _emit(_render([rec], list(rec), args.format), args.out)


def cmd_dual(args) -> int:
    grid = size_focused_dp(args.horizon, args.grid)
    table = build_tables(max(2, int(np.sqrt(2.0 * args.horizon)) + 2))
    records = []
    for n in range(1, args.horizon + 1):
        r, cheb = chebyshev_argmax(n, table)
        records.append({"n": n, "ell": float(grid.ell[n]), "sqrt_2n": float(np.sqrt(2.0 * n)), "chebyshev": cheb, "chebyshev_r": r})
    fields = ["n", "ell", "sqrt_2n", "chebyshev", "chebyshev_r"]
    if args.reps:
        s = simulate_size_focused(args.horizon, grid, StreamConfig(seed=args.seed, replications=args.reps), threads=args.threads, backend=args.backend)
        records[-1].update(sim_mean=s.mean, sim_std_error=s.std_error)
        for rec in records[:-1]:
            rec.update(sim_mean=None, sim_std_error=None)
        fields += ["sim_mean", "sim_std_error"]
    return _emit(_render(records, fields, args.format), args.out)


def _corrupt(table: BetaThresholdTable, fault: str) -> BetaThresholdTable:
    beta = table.beta.copy()
    mid = max(2, table.n_max // 2)
    if fault == "beta-upper":
        beta[mid] = 2.0 * beta[mid]
    else:
        beta[mid] = beta[mid - 1] + 0.25 * (beta[mid] - beta[mid - 1])
    return BetaThresholdTable.from_arrays(beta, table.t, table.v)


def cmd_verify(args) -> int:
    table = None
    if args.inject_fault:
        table = _corrupt(build_tables(args.n_max), args.inject_fault)
    checks = run_checks(args.n_max, args.var_n, args.grid, args.tol_profile, table=table)
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.ok]
    if failed:
        print(f"FAILED: {', '.join(failed)}")
        return EXIT_FAIL
    print("all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quickest-selection", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def out_opts(p, default_format):
        p.add_argument("--format", choices=("csv", "json"), default=default_format)
        p.add_argument("--out", metavar="PATH", help="output file (default stdout)")

    def sim_opts(p):
        p.add_argument("--reps", type=_positive, default=10_000)
        p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
        p.add_argument("--threads", type=_positive, default=1)
        p.add_argument("--backend", choices=sorted(BACKENDS), default=None, help="kernel backend (default: compiled if built)")

    p = sub.add_parser("tables", help="optimal means, thresholds and variances for n = 1..N_MAX")
    p.add_argument("n_max", type=_positive)
    out_opts(p, "csv")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("simulate", help="Monte Carlo of the optimal policy's completion time")
    p.add_argument("n", type=_positive)
    p.add_argument("--mode", choices=MODES, default="shortcut")
    sim_opts(p)
    p.add_argument("--dump-samples", metavar="PATH", help="write raw completion times, one per line")
    out_opts(p, "json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("blocking", help="Monte Carlo of the m-block suboptimal policy")
    p.add_argument("m", type=_positive)
    p.add_argument("n", type=_positive)
    sim_opts(p)
    out_opts(p, "json")
    p.set_defaults(func=cmd_blocking)

    p = sub.add_parser("dual", help="size-focused value ell(n) with its upper and Chebyshev bounds")
    p.add_argument("horizon", type=_positive)
    p.add_argument("--grid", type=_positive, default=10_000)
    p.add_argument("--reps", type=int, default=0, help="also simulate the grid policy at the horizon")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--backend", choices=sorted(BACKENDS), default=None)
    out_opts(p, "csv")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("verify", help="run all deterministic bound and asymptotic checks")
    p.add_argument("--n-max", type=_positive, default=10_000)
    p.add_argument("--var-n", type=_positive, default=5000)
    p.add_argument("--grid", type=_positive, default=10_000)
    p.add_argument("--tol-profile", choices=sorted(PROFILES), default="standard")
    p.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "grid", 2) < 2:
        print("error: --grid must be >= 2", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
