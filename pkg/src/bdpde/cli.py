"""Command-line harness: single runs, convergence sweeps, method comparisons,
and the deterministic reference, all exported as CSV.

Every CSV starts with a comment line echoing the exact invocation and seed so
a file can be reproduced byte-for-byte.
"""

from __future__ import annotations

import argparse
import os
import platform
import shlex
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path
from statistics import mean

import numpy as np

import bdpde
from bdpde import metrics, problems, reference, solver
from bdpde.errors import ConfigurationError

THREADS_ENV = "BDPDE_THREADS"


def _invocation() -> str:
    return shlex.join([Path(sys.argv[0]).name] + sys.argv[1:])


def _write_csv(path: Path, header_comment: str, body_writer) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(f"# {header_comment}\n")
        body_writer(fh)
    os.replace(tmp, path)


def _load_config_file(path: str) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bdpde", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--problem", choices=["benchmark1d", "allen-cahn"])
        sp.add_argument("--dim", type=int, default=None)
        sp.add_argument("--n0", type=float, nargs="+", default=[10000])
        sp.add_argument("--tau", type=float, nargs="+", default=[0.1])
        sp.add_argument("--h", type=float, nargs="+", default=[0.1])
        sp.add_argument("--T", type=float, default=10.0)
        sp.add_argument("--na", type=float, default=3.0)
        sp.add_argument("--seed", "--seeds", type=int, nargs="+", default=[1], dest="seeds")
        sp.add_argument("--method", nargs="+", choices=list(solver.METHODS), default=["birth_death"])
        sp.add_argument("--out", default=".")
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--strict", action="store_true")
        sp.add_argument("--config", default=None, help="key=value file; flags win")
        sp.add_argument("--ref-tau", type=float, default=reference.DEFAULT_TAU)

    for name in ("run", "convergence", "compare", "reference"):
        sp = sub.add_parser(name)
        common(sp)
    return p


def _apply_config_file(args: argparse.Namespace, argv: list[str]) -> None:
    """Fill settings from the key=value file for flags absent on the command line."""
    if not args.config:
        return
    given = {a.split("=")[0].lstrip("-") for a in argv if a.startswith("--")}
    kv = _load_config_file(args.config)
    casts = {
        "problem": str, "dim": int, "T": float, "na": float, "out": str,
        "threads": int, "ref-tau": float,
    }
    lists = {"n0": float, "tau": float, "h": float, "seed": int, "method": str}
    for key, raw in kv.items():
        if key in given or (key == "seed" and "seeds" in given):
            continue
        if key in casts:
            setattr(args, key.replace("-", "_"), casts[key](raw))
        elif key in lists:
            dest = "seeds" if key == "seed" else key
            setattr(args, dest, [lists[key](tok) for tok in raw.split()])
        else:
            raise ConfigurationError(f"unknown config key {key!r} in {args.config}")


def _threads(args) -> int:
    if args.threads is not None:
        return max(args.threads, 1)
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(int(env), 1)
    return os.cpu_count() or 1


def _reference_evaluator(args, report_times):
    """Spectral snapshots for the 1-D benchmark wrapped as (points, t) -> values."""
    snaps = reference.benchmark_reference(args.T, tau=args.ref_tau, snapshot_times=report_times)

    def evaluate(points, t):
        key = min(snaps, key=lambda tq: abs(tq - t))
        if abs(key - t) > 1e-9:
            raise ConfigurationError(f"no reference snapshot at t={t}")
        return snaps[key].evaluate(points)

    return evaluate


@lru_cache(maxsize=4)
def _cached_reference(T: float, ref_tau: float, times: tuple[float, ...]):
    return reference.benchmark_reference(T, tau=ref_tau, snapshot_times=list(times))


def _single_run(problem_name, dim, n0, tau, h, T, na, seed, method, report_times, ref_tau):
    """One solver run; executed in a worker process for sweeps."""
    problem = problems.by_name(problem_name, dim)
    cfg = solver.SolverConfig(
        tau=tau, h=h, T=T, n0=int(n0), n_a=na, seed=seed, method=method, report_times=report_times
    )
    ref = None
    if problem.dim == 1:
        snaps = _cached_reference(T, ref_tau, tuple(cfg.resolved_report_times()))
        ref = lambda points, t: snaps[min(snaps, key=lambda tq: abs(tq - t))].evaluate(points)
    return solver.run(problem, cfg, reference=ref)


def _meta(outdir: Path, args) -> None:
    lines = [
        f"invocation: {_invocation()}",
        f"version: bdpde {bdpde.__version__}",
        f"python: {platform.python_version()} numpy: {np.__version__}",
        f"threads: {_threads(args)} (env {THREADS_ENV}={os.environ.get(THREADS_ENV, '')!r})",
    ]
    for key, value in sorted(vars(args).items()):
        if key not in ("command", "config"):
            lines.append(f"{key}: {value}")
    (outdir / "meta.txt").write_text("\n".join(lines) + "\n")


def cmd_run(args) -> int:
    if len(args.n0) != 1 or len(args.tau) != 1 or len(args.h) != 1 or len(args.seeds) != 1:
        raise ConfigurationError("run takes exactly one n0, tau, h and seed")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    seed = args.seeds[0]
    record = _single_run(
        args.problem, args.dim, args.n0[0], args.tau[0], args.h[0], args.T, args.na,
        seed, args.method[0], None, args.ref_tau,
    )
    note = f"{_invocation()} seed={seed}"
    _write_csv(outdir / "run.csv", note, record.dump_csv)
    if record.errors:

        def dump_errors(fh):
            fh.write("time,error\n")
            for t, e in record.errors:
                fh.write(f"{t!r},{e!r}\n")

        _write_csv(outdir / "errors.csv", note, dump_errors)
    problem = problems.by_name(args.problem, args.dim)
    if problem.dim >= 2:
        proj = metrics.project_2d(
            record.final_ensemble, args.h[0], solver.DEFAULT_PROJECTION_BOUNDS
        )
        _write_csv(outdir / "projection.csv", note, proj.dump_csv)
    else:

        def dump_reconstruction(fh):
            fh.write("x,u\n")
            lo, hi = solver.DEFAULT_AUDIT_WINDOW
            h = args.h[0]
            ks = np.arange(np.floor(lo / h), np.ceil(hi / h))
            xs = (ks + 0.5) * h
            for x, u in zip(xs, record.final_grid.values_at(xs)):
                fh.write(f"{float(x)!r},{float(u)!r}\n")

        _write_csv(outdir / "reconstruction.csv", note, dump_reconstruction)
    _meta(outdir, args)
    return 0


def _sweep(args, grid_points, pool_size):
    """Run the cross product of (point, seed) in a process pool."""
    jobs = []
    with ProcessPoolExecutor(max_workers=pool_size) as pool:
        for point in grid_points:
            n0, tau, h, method = point
            for seed in args.seeds:
                fut = pool.submit(
                    _run_entry, args.problem, args.dim, n0, tau, h, args.T, args.na,
                    seed, method, args.ref_tau,
                )
                jobs.append((point, seed, fut))
        return [(point, seed, fut.result()) for point, seed, fut in jobs]


def _run_entry(problem_name, dim, n0, tau, h, T, na, seed, method, ref_tau):
    record = _single_run(problem_name, dim, n0, tau, h, T, na, seed, method, [T], ref_tau)
    return record.final_error(), record.total_wall_ms()


def cmd_convergence(args) -> int:
    varying = [name for name, vals in (("n0", args.n0), ("tau", args.tau), ("h", args.h)) if len(vals) > 1]
    if len(varying) > 1:
        raise ConfigurationError(f"exactly one of n0/tau/h may vary, got {varying}")
    axis = varying[0] if varying else "n0"
    values = getattr(args, axis)
    points = []
    for v in values:
        points.append(
            (
                v if axis == "n0" else args.n0[0],
                v if axis == "tau" else args.tau[0],
                v if axis == "h" else args.h[0],
                args.method[0],
            )
        )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    results = _sweep(args, points, _threads(args))
    note = f"{_invocation()} seeds={args.seeds}"

    def dump(fh):
        fh.write("parameter,seed,error,wall_ms\n")
        for (point, seed, (err, wall)) in results:
            value = dict(zip(("n0", "tau", "h"), point[:3]))[axis]
            fh.write(f"{value!r},{seed},{err!r},{wall!r}\n")

    _write_csv(outdir / "convergence.csv", note, dump)

    by_value: dict[float, list[float]] = {}
    for (point, _seed, (err, _wall)) in results:
        value = dict(zip(("n0", "tau", "h"), point[:3]))[axis]
        by_value.setdefault(value, []).append(err)
    pairs = [(v, mean(errs)) for v, errs in sorted(by_value.items())]
    if axis == "n0":
        orders = metrics.convergence_order(pairs, error_falls_as_parameter_grows=True) if len(pairs) > 1 else []
    else:
        pairs = sorted(pairs, reverse=True)
        orders = metrics.convergence_order(pairs, error_falls_as_parameter_grows=False) if len(pairs) > 1 else []

    def dump_orders(fh):
        fh.write("parameter_from,parameter_to,order\n")
        for (v0, _), (v1, _), order in zip(pairs, pairs[1:], orders):
            fh.write(f"{v0!r},{v1!r},{order!r}\n")

    _write_csv(outdir / "orders.csv", note, dump_orders)
    _meta(outdir, args)
    return 0


def cmd_compare(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    points = [(n0, args.tau[0], args.h[0], method) for method in args.method for n0 in args.n0]
    results = _sweep(args, points, _threads(args))
    note = f"{_invocation()} seeds={args.seeds}"

    def dump(fh):
        fh.write("method,n0,seed,error,wall_ms\n")
        for ((n0, _tau, _h, method), seed, (err, wall)) in results:
            fh.write(f"{method},{int(n0)},{seed},{err!r},{wall!r}\n")

    _write_csv(outdir / "efficiency.csv", note, dump)
    _meta(outdir, args)
    return 0


def cmd_reference(args) -> int:
    if args.problem not in (None, "benchmark1d"):
        raise ConfigurationError("the deterministic reference only exists for benchmark1d")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    import warnings as _warnings

    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always", reference.BoundaryContaminationWarning)
        snaps = reference.benchmark_reference(args.T, tau=args.ref_tau, snapshot_times=[args.T])
        contaminated = any(
            issubclass(w.category, reference.BoundaryContaminationWarning) for w in caught
        )
    note = f"{_invocation()} seed=0"

    def dump(fh):
        fh.write("time,x,u\n")
        for t in sorted(snaps):
            state = snaps[t]
            for x, u in zip(state.grid(), state.values):
                fh.write(f"{t!r},{float(x)!r},{float(u)!r}\n")

    _write_csv(outdir / "reference.csv", note, dump)
    _meta(outdir, args)
    if contaminated:
        print("warning: boundary contamination detected", file=sys.stderr)
        if args.strict:
            return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args, argv)
        if args.command != "reference" and not args.problem:
            parser.error("--problem is required")
        handler = {
            "run": cmd_run,
            "convergence": cmd_convergence,
            "compare": cmd_compare,
            "reference": cmd_reference,
        }[args.command]
        t0 = time.perf_counter()
        code = handler(args)
        print(f"{args.command}: done in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
        return code
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
