"""Command-line harness: solve, check-schedule, rate, gen-data.

``solve`` writes one CSV per seed (schema:
``method,schedule,seed,k,epoch,primal,dual,gap,feas,dual_violation,time_ms``,
empty cell = undefined) plus a summary CSV with the final gap and the
fitted tail slope per seed.  Identical invocations produce identical
CSVs except for the wall-time column, which is excluded from the
determinism guarantee.  ``RANDPD_THREADS`` controls seed-level
parallelism (default 1); per-seed PRNG streams make the output
independent of the execution order.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import baselines, dataio, frpd, metrics, srpd
from .blockmat import BlockMatrix
from .problems import build_lad, build_svm, constants
from .schedules import FRPD_TAGS, SRPD_TAGS, check_conditions, make_schedule
from .problems import ProblemConstants

__all__ = ["main", "build_parser"]

_METHOD_SCHEDULES = {"frpd": FRPD_TAGS, "srpd": SRPD_TAGS}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randpd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="run a solver and write CSV traces")
    ps.add_argument("--config", help="JSON file with the flags below as keys")
    ps.add_argument("--problem", choices=["svm", "lad"])
    ps.add_argument("--data", help="LIBSVM file (svm) or saved instance (lad)")
    ps.add_argument("--gen", help="DxP, generate a synthetic instance")
    ps.add_argument("--density", type=float, default=0.1)
    ps.add_argument("--noise-scale", type=float, default=0.1)
    ps.add_argument("--x-support", type=float, default=0.05)
    ps.add_argument("--gen-seed", type=int, default=0)
    ps.add_argument("--lam", default="auto", help="regularizer; auto = 1e-4 (svm) or 1/d (lad)")
    ps.add_argument("--method", choices=["frpd", "srpd", "pdhg", "spdhg"])
    ps.add_argument("--schedule", choices=list(FRPD_TAGS + SRPD_TAGS))
    ps.add_argument("--c", default="auto")
    ps.add_argument("--rho0", default="auto")
    ps.add_argument("--blocks", type=int, default=32, help="primal (column) blocks n")
    ps.add_argument("--dual-blocks", type=int, default=32, help="dual (row) blocks m")
    ps.add_argument("--epochs", type=int, default=300)
    ps.add_argument("--seeds", "--seed", default="1", help="comma-separated seed list")
    ps.add_argument("--checkpoint-every", type=int, default=1)
    ps.add_argument("--tau", type=float, help="pdhg/spdhg primal step (default 5/||K||)")
    ps.add_argument("--sigma-step", type=float, help="pdhg/spdhg dual step (default 5/||K||)")
    ps.add_argument("--theta", type=float, default=1.0)
    ps.add_argument("--eta-zero", action="store_true", help="frpd: skip the multiplier update")
    ps.add_argument("--out", required=False, help="output path prefix")

    pc = sub.add_parser("check-schedule", help="verify the parameter condition system")
    pc.add_argument("--schedule", required=True, choices=list(FRPD_TAGS + SRPD_TAGS))
    pc.add_argument("--c", default="auto")
    pc.add_argument("--rho0", default="auto")
    pc.add_argument("--m", type=int, default=32, help="dual blocks of the synthetic constants")
    pc.add_argument("--n", type=int, default=32, help="primal blocks of the synthetic constants")
    pc.add_argument("--lbar", type=float, default=1.0, help="weighted operator-norm square")
    pc.add_argument("--lh", type=float, default=0.0, help="smooth-term constant")
    pc.add_argument("--mu-f", type=float, default=0.0)
    pc.add_argument("--mu-g", type=float, default=0.0)
    pc.add_argument("--horizon", type=int, default=10_000)

    pr = sub.add_parser("rate", help="fit a log-log slope on a trace column")
    pr.add_argument("csv")
    pr.add_argument("--column", default="gap",
                    choices=["primal", "dual", "gap", "feas", "dual_violation"])
    pr.add_argument("--tail", type=float, default=0.5)
    pr.add_argument("--x", default="k", choices=["k", "epoch"])

    pg = sub.add_parser("gen-data", help="generate and save a synthetic instance")
    pg.add_argument("--rows", type=int, required=True)
    pg.add_argument("--cols", type=int, required=True)
    pg.add_argument("--density", type=float, default=0.1)
    pg.add_argument("--noise-scale", type=float, default=0.1)
    pg.add_argument("--x-support", type=float, default=0.05)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--out", required=True)
    return parser


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _load_config(args: argparse.Namespace, argv) -> argparse.Namespace:
    """Fill flags from a JSON file; explicit command-line flags win."""
    if not args.config:
        return args
    with open(args.config) as fh:
        cfg = json.load(fh)
    given = set(argv or [])
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValueError(f"unknown config key {key!r}")
        if f"--{key}" not in given:
            setattr(args, attr, value)
    return args


def _build_problem(args):
    if args.problem == "svm":
        if args.data:
            with open(args.data) as fh:
                dataset = dataio.parse_libsvm(fh)
        elif args.gen:
            m, p = _parse_dims(args.gen)
            dataset = dataio.gen_svm(m, p, seed=args.gen_seed)
        else:
            raise ValueError("svm needs --data or --gen")
        lam = 1e-4 if args.lam == "auto" else float(args.lam)
        return build_svm(dataset, lam, n_blocks=min(args.blocks, dataset.n_features),
                         m_blocks=min(args.dual_blocks, dataset.n_samples))
    if args.problem == "lad":
        if args.data:
            K_raw, b, _ = dataio.load_lad_instance(args.data)
        elif args.gen:
            d, p = _parse_dims(args.gen)
            K_raw, b, _ = dataio.gen_lad(
                d, p, density=args.density, noise_scale=args.noise_scale,
                x_support=args.x_support, seed=args.gen_seed,
            )
        else:
            raise ValueError("lad needs --data or --gen")
        d, p = K_raw.shape
        lam = 1.0 / d if args.lam == "auto" else float(args.lam)
        K = BlockMatrix(
            K_raw,
            dataio.partition(d, min(args.dual_blocks, d)),
            dataio.partition(p, min(args.blocks, p)),
        )
        return build_lad(K, b, lam)
    raise ValueError("--problem is required")


def _parse_dims(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise ValueError(f"--gen expects DxP, got {text!r}") from None


def _one_seed_run(spec, args, seed: int):
    method = args.method
    if method in ("frpd", "srpd"):
        if not args.schedule:
            raise ValueError(f"--schedule is required for {method}")
        if args.schedule not in _METHOD_SCHEDULES[method]:
            raise ValueError(
                f"method {method} pairs with schedules {_METHOD_SCHEDULES[method]}, "
                f"got {args.schedule}"
            )
        consts = constants(spec)
        sched = make_schedule(args.schedule, consts, c=_num_or_auto(args.c),
                              rho0=_num_or_auto(args.rho0))
        runner = frpd.run if method == "frpd" else srpd.run
        kwargs = {}
        if method == "frpd" and args.eta_zero:
            kwargs["eta_zero"] = True
        trace, _ = runner(
            spec, sched, epochs=args.epochs, seed=seed,
            checkpoint_every=args.checkpoint_every, **kwargs,
        )
        return trace
    norm_K = float(np.sqrt(spec.K.opnorm_sq))
    tau = args.tau if args.tau is not None else 5.0 / norm_K
    sigma = args.sigma_step if args.sigma_step is not None else 5.0 / norm_K
    cfg = baselines.PDHGConfig(tau=tau, sigma=sigma, theta=args.theta)
    if method == "pdhg":
        trace, _ = baselines.pdhg_run(
            spec, cfg, epochs=args.epochs, checkpoint_every=args.checkpoint_every
        )
        return trace
    if method == "spdhg":
        trace, _ = baselines.spdhg_run(
            spec, cfg, epochs=args.epochs, seed=seed,
            checkpoint_every=args.checkpoint_every,
        )
        return trace
    raise ValueError("--method is required")


def _num_or_auto(v):
    if isinstance(v, str) and v != "auto":
        return float(v)
    return v


def write_trace_csv(path: str, trace) -> None:
    with open(path, "w") as fh:
        fh.write(metrics.CSV_HEADER + "\n")
        for rec in trace:
            fh.write(rec.csv_row() + "\n")


def read_trace_csv(path: str):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != metrics.CSV_HEADER:
        raise ValueError(f"{path}: unexpected CSV header")
    return [metrics.TraceRecord.from_csv_row(line) for line in lines[1:]]


def _cmd_solve(args, argv=None) -> int:
    try:
        args = _load_config(args, argv)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    if not args.out:
        return _fail("--out is required")
    seeds = [int(s) for s in str(args.seeds).split(",") if s != ""]
    if not seeds:
        return _fail("--seeds must name at least one seed")
    try:
        spec = _build_problem(args)
    except (ValueError, OSError) as exc:
        return _fail(str(exc))
    workers = max(int(os.environ.get("RANDPD_THREADS", "1")), 1)
    try:
        if workers == 1:
            traces = [_one_seed_run(spec, args, seed) for seed in seeds]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                traces = list(pool.map(lambda s: _one_seed_run(spec, args, s), seeds))
    except ValueError as exc:
        return _fail(str(exc))
    except FloatingPointError as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return 1
    summary_lines = ["method,schedule,seed,final_gap,slope"]
    for seed, trace in zip(seeds, traces):
        path = f"{args.out}_seed{seed}.csv"
        write_trace_csv(path, trace)
        ks = [rec.k for rec in trace]
        gaps = [rec.gap for rec in trace]
        slope = ""
        try:
            slope = repr(metrics.fit_rate(ks, gaps).slope)
        except ValueError:
            pass
        rec0 = trace[-1]
        summary_lines.append(
            f"{rec0.method},{rec0.schedule},{seed},{repr(rec0.gap)},{slope}"
        )
        print(f"wrote {path} ({len(trace)} checkpoint rows)")
    summary_path = f"{args.out}_summary.csv"
    with open(summary_path, "w") as fh:
        fh.write("\n".join(summary_lines) + "\n")
    print(f"wrote {summary_path}")
    return 0


def _cmd_check_schedule(args) -> int:
    consts = ProblemConstants.uniform(
        m=args.m, n=args.n, L_bar_sigma=args.lbar, Lh_sigma=args.lh,
        mu_f=args.mu_f, mu_g=args.mu_g,
    )
    try:
        sched = make_schedule(args.schedule, consts, c=_num_or_auto(args.c),
                              rho0=_num_or_auto(args.rho0))
    except ValueError as exc:
        return _fail(str(exc))
    report = check_conditions(sched, args.horizon)
    print(report)
    return 0 if report.passed else 1


def _cmd_rate(args) -> int:
    try:
        trace = read_trace_csv(args.csv)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    xs = [rec.k if args.x == "k" else rec.epoch for rec in trace]
    vals = [getattr(rec, args.column) for rec in trace]
    pairs = [(x, v) for x, v in zip(xs, vals) if v is not None]
    try:
        fit = metrics.fit_rate([p[0] for p in pairs], [p[1] for p in pairs], args.tail)
    except ValueError as exc:
        return _fail(str(exc))
    print(
        f"{args.column}: slope {fit.slope:.4f} over {args.x} in [{fit.k_lo}, {fit.k_hi}]"
        f" (intercept {fit.intercept:.4f}, residual {fit.residual:.3g})"
    )
    return 0


def _cmd_gen_data(args) -> int:
    try:
        K, b, x_nat = dataio.gen_lad(
            args.rows, args.cols, density=args.density,
            noise_scale=args.noise_scale, x_support=args.x_support, seed=args.seed,
        )
    except ValueError as exc:
        return _fail(str(exc))
    dataio.save_lad_instance(args.out, K, b, x_nat)
    print(f"wrote {args.out} ({K.shape[0]}x{K.shape[1]}, nnz {K.nnz})")
    return 0


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return _cmd_solve(args, argv)
    if args.command == "check-schedule":
        return _cmd_check_schedule(args)
    if args.command == "rate":
        return _cmd_rate(args)
    if args.command == "gen-data":
        return _cmd_gen_data(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
