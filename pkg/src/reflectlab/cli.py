"""``reflectlab`` command line.

Exit status: 0 on success, 1 when the inputs are well formed but invalid for
the computation (bad distribution spec, violated precondition, unwritable
output), 2 on usage errors.  Randomized subcommands require ``--seed`` and
echo it in their output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import criteria as crit
from . import output
from .distributions import make_distribution
from .errors import DomainError, ReflectLabError
from .montecarlo import ExperimentSpec, divergence_scan, run_passage_experiment
from .rng import RngStream
from .validation import (dual_identity_test, ladder_check, martingale_algebra, mirror_identity_test,
                         optional_stopping_check, recursion_check, z_mean_check)
from .walker import Boundary, ladder_decompose, passage_time, simulate_path


# ---------------------------------------------------------------------------
# argument types


def _finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    g = fmt.add_mutually_exclusive_group()
    g.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON output")
    g.add_argument("--csv", dest="fmt", action="store_const", const="csv", help="CSV output")
    g.add_argument("--human", dest="fmt", action="store_const", const="human", help="text table (default)")

    dist = argparse.ArgumentParser(add_help=False)
    dist.add_argument("--dist", required=True, help='step law, e.g. "normal(mu=0,sigma=1)"')

    seed = argparse.ArgumentParser(add_help=False)
    seed.add_argument("--seed", type=_seed, required=True, help="master seed (64-bit)")
    seed.add_argument("--stream-index", type=_nonneg_int, default=0, help="stream index under the seed")

    p = argparse.ArgumentParser(prog="reflectlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"reflectlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[fmt, dist], help="finiteness verdicts for (dist, kappa)")
    c.add_argument("--kappa", type=_finite_float, required=True)

    c = sub.add_parser("criteria", parents=[fmt, dist], help="evaluate one criterion quantity")
    c.add_argument("--quantity", required=True,
                   choices=["a_plus", "j_minus", "w", "i_kappa", "lambda_star", "erickson"])
    c.add_argument("--x", type=_finite_float, help="argument of a_plus or w")
    c.add_argument("--kappa", type=_finite_float)
    c.add_argument("--lambda", dest="lam", type=_finite_float)
    c.add_argument("--cutoff", type=_finite_float)
    c.add_argument("--method", default="auto", choices=["auto", "analytic", "numeric"])

    c = sub.add_parser("simulate", parents=[fmt, dist, seed], help="one reflected path")
    c.add_argument("--steps", type=_positive_int, required=True)
    c.add_argument("--emit-path", type=Path, help="write n, x, s, s_star, r rows to this CSV")
    c.add_argument("--figure", type=Path, help="write a figure of the path")
    c.add_argument("--kappa", type=_finite_float, help="overlay boundary exponent in the figure")
    c.add_argument("--r", type=_finite_float, help="overlay boundary level in the figure")

    c = sub.add_parser("passage", parents=[fmt, dist, seed], help="one passage time")
    c.add_argument("--kappa", type=_finite_float, required=True)
    c.add_argument("--r", type=_finite_float, required=True)
    c.add_argument("--cap", type=_positive_int, required=True)

    c = sub.add_parser("ladder", parents=[fmt, dist, seed], help="ladder epochs and excursion depths")
    c.add_argument("--steps", type=_positive_int, required=True)

    c = sub.add_parser("validate", parents=[fmt, dist, seed], help="run a verification suite")
    c.add_argument("--suite", required=True, choices=["martingale", "mirror", "ladder", "recursion"])
    c.add_argument("--reps", type=_positive_int, help="replications (suite default if omitted)")
    c.add_argument("--n", type=_positive_int, help="path length (suite default if omitted)")

    c = sub.add_parser("experiment", parents=[fmt], help="passage-time experiment from a JSON config")
    c.add_argument("--config", type=Path, required=True)
    c.add_argument("--seed", type=_seed, required=True, help="master seed; must match the config's if it has one")
    c.add_argument("--out", type=Path, help="results CSV path")
    c.add_argument("--figure", type=Path, help="figure path (capped mean and censoring against cap)")
    c.add_argument("--workers", type=_positive_int, help="worker processes")
    return p


# ---------------------------------------------------------------------------
# subcommands


def _emit(text: str, out):
    out.write(text if text.endswith("\n") else text + "\n")


def _classify_row(rep):
    return (rep.dist, rep.kappa, rep.tau_all_r_as_finite.verdict.value,
            rep.limsup_Rn_over_nk_finite.verdict.value, rep.liminf_Sn_over_nk_neg_infinite.verdict.value,
            rep.fired_clause, rep.liminf_clause or "",
            "" if rep.kappa1_drift_threshold is None else rep.kappa1_drift_threshold,
            "" if rep.r0_bound is None else rep.r0_bound,
            "" if rep.lambda_star is None else rep.lambda_star)


_CLASSIFY_HEADER = ("dist", "kappa", "tau_all_r_as_finite", "limsup_Rn_over_nk_finite",
                    "liminf_Sn_over_nk_neg_infinite", "fired_clause", "liminf_clause",
                    "kappa1_drift_threshold", "r0_bound", "lambda_star")


def cmd_classify(args, out):
    dist = make_distribution(args.dist)
    rep = crit.classify(dist, args.kappa)
    if args.fmt == "json":
        _emit(output.dumps(output.envelope("classify", rep.to_dict(), dist=dist.spec)), out)
    elif args.fmt == "csv":
        _emit(output.rows_to_csv(_CLASSIFY_HEADER, [_classify_row(rep)]), out)
    else:
        lines = [f"reflectlab {__version__}  classify  dist={dist.spec}  kappa={args.kappa:g}"]
        for name in ("tau_all_r_as_finite", "limsup_Rn_over_nk_finite", "liminf_Sn_over_nk_neg_infinite"):
            v = getattr(rep, name)
            lines.append(f"  {name:32s} {v.verdict.value:12s} ({v.source.value})")
        lines.append(f"  {'fired_clause':32s} {rep.fired_clause}")
        lines.append(f"  {'liminf_clause':32s} {rep.liminf_clause}")
        for name in ("kappa1_drift_threshold", "r0_bound", "lambda_star"):
            if getattr(rep, name) is not None:
                lines.append(f"  {name:32s} {getattr(rep, name):.17g}")
        lines += [f"  note: {n}" for n in rep.notes]
        _emit("\n".join(lines), out)


def cmd_criteria(args, out):
    dist = make_distribution(args.dist)
    q = args.quantity

    def need(name):
        v = getattr(args, name)
        if v is None:
            raise DomainError(f"--quantity {q} needs --{'lambda' if name == 'lam' else name}")
        return v

    method = args.method
    if q == "a_plus":
        value = crit.a_plus(dist, need("x"))
    elif q == "w":
        value = crit.w_func(dist, need("x"))
    elif q == "i_kappa":
        value = crit.i_kappa(dist, need("kappa"), need("lam"), need("cutoff"))
    elif q == "lambda_star":
        value = crit.lambda_star(dist, need("kappa"), method=method).to_dict()
    elif q == "j_minus":
        value = crit.j_minus(dist, method=method).to_dict()
    else:
        value = crit.erickson_integral(dist, need("kappa"), method=method).to_dict()
    params = {k: getattr(args, k) for k in ("x", "kappa", "lam", "cutoff") if getattr(args, k) is not None}
    if args.fmt == "json":
        _emit(output.dumps(output.envelope("criteria", value, dist=dist.spec, quantity=q, params=params)), out)
        return
    if isinstance(value, dict):
        shown = value.get("verdict", value.get("value"))
        source = value["source"]
    else:
        shown, source = value, "Quadrature"
    if args.fmt == "csv":
        _emit(output.rows_to_csv(("dist", "quantity", "value", "source"), [(dist.spec, q, shown, source)]), out)
    else:
        shown_text = output.fmt_float(shown) if isinstance(shown, float) else shown
        _emit(f"{q}({dist.spec}{''.join(f', {k}={v:g}' for k, v in params.items())}) = {shown_text}  [{source}]", out)


def _stream(args):
    return RngStream(args.seed, args.stream_index)


def cmd_simulate(args, out):
    dist = make_distribution(args.dist)
    path = simulate_path(dist, args.steps, _stream(args))
    if args.emit_path is not None:
        args.emit_path.write_text(output.path_csv(path))
    if args.figure is not None:
        from .plotting import path_figure
        boundary = Boundary(args.r, args.kappa) if args.r is not None and args.kappa is not None else None
        path_figure(path, args.figure, boundary)
    summary = {"n": path.n_steps, "s_n": float(path.s[-1]), "s_star_n": float(path.s_star[-1]),
               "r_n": float(path.reflected[-1]), "max_r": float(np.max(path.reflected))}
    if args.fmt == "json":
        _emit(output.dumps(output.envelope("simulate", summary, seed=args.seed, dist=dist.spec,
                                           stream_index=args.stream_index)), out)
    elif args.fmt == "csv":
        _emit(output.rows_to_csv(("dist", "seed", "stream_index", *summary),
                                 [(dist.spec, args.seed, args.stream_index, *summary.values())]), out)
    else:
        _emit(f"# reflectlab {__version__} simulate dist={dist.spec} seed={args.seed} "
              f"stream={args.stream_index}\n" + output.table(list(summary), [list(summary.values())]), out)


def cmd_passage(args, out):
    dist = make_distribution(args.dist)
    boundary = Boundary(args.r, args.kappa)
    res = passage_time(dist, boundary, args.cap, _stream(args))
    record = {"outcome": str(res), "kind": res.kind, "n": res.n, "exceed_value": res.exceed_value,
              "boundary_value": res.boundary_value, "r": args.r, "kappa": args.kappa, "cap": args.cap}
    if args.fmt == "json":
        _emit(output.dumps(output.envelope("passage", record, seed=args.seed, dist=dist.spec,
                                           stream_index=args.stream_index)), out)
    elif args.fmt == "csv":
        _emit(output.rows_to_csv(("dist", "seed", "stream_index", *record),
                                 [(dist.spec, args.seed, args.stream_index,
                                   *("" if v is None else v for v in record.values()))]), out)
    else:
        extra = (f" R={output.fmt_float(res.exceed_value)} boundary={output.fmt_float(res.boundary_value)}"
                 if res.finite else "")
        _emit(f"{res}{extra} dist={dist.spec} kappa={args.kappa:g} r={args.r:g} seed={args.seed} "
              f"stream={args.stream_index}", out)


def cmd_ladder(args, out):
    dist = make_distribution(args.dist)
    path = simulate_path(dist, args.steps, _stream(args))
    lad = ladder_decompose(path)
    record = {"n": path.n_steps, "ladder_times": list(lad.ladder_times), "depths": list(lad.depths),
              "complete": lad.complete, "open_depth": lad.open_depth}
    if args.fmt == "json":
        _emit(output.dumps(output.envelope("ladder", record, seed=args.seed, dist=dist.spec,
                                           stream_index=args.stream_index)), out)
    elif args.fmt == "csv":
        _emit(output.rows_to_csv(("k", "ladder_time", "depth"),
                                 [(k, t, d) for k, (t, d) in enumerate(zip(lad.ladder_times, lad.depths), 1)]), out)
    else:
        head = (f"# reflectlab {__version__} ladder dist={dist.spec} seed={args.seed} "
                f"stream={args.stream_index} complete={lad.complete}\n")
        _emit(head + output.table(("k", "T_k", "D_k"),
                                  [(k, t, d) for k, (t, d) in enumerate(zip(lad.ladder_times, lad.depths), 1)]),
              out)


_SUITE_DEFAULTS = {"martingale": (10_000, 100), "mirror": (10_000, 50), "ladder": (1000, 1000),
                   "recursion": (1000, 1000)}


def run_suite(suite: str, dist, seed: int, reps=None, n=None):
    d_reps, d_n = _SUITE_DEFAULTS[suite]
    reps, n = reps or d_reps, n or d_n
    root = RngStream(seed, 0)
    if suite == "martingale":
        grid = np.linspace(0.0, 10.0, 30)
        reports = [martingale_algebra(dist, grid), z_mean_check(dist, n, reps, root.child(0)),
                   optional_stopping_check(dist, Boundary(0.5 * math.sqrt(dist.metadata.variance), 0.5),
                                           n, reps, root.child(1))]
    elif suite == "mirror":
        reports = []
        for k, m in enumerate(sorted({1, 10, n})):
            reports.append(mirror_identity_test(dist, m, reps, root.child(2 * k)))
            reports.append(dual_identity_test(dist, m, reps, root.child(2 * k + 1)))
    elif suite == "ladder":
        reports = [ladder_check(dist, n, reps, root)]
    else:
        reports = [recursion_check(dist, n, reps, root)]
    return reports


def cmd_validate(args, out):
    dist = make_distribution(args.dist)
    reports = run_suite(args.suite, dist, args.seed, args.reps, args.n)
    records = [r.to_dict() for r in reports]
    if args.fmt == "json":
        _emit(output.dumps(output.envelope("validate", records, seed=args.seed, dist=dist.spec,
                                           suite=args.suite)), out)
    elif args.fmt == "csv":
        _emit(output.rows_to_csv(("suite", "name", "passed", "statistic"),
                                 [(args.suite, r.name, r.passed, r.statistic) for r in reports]), out)
    else:
        head = f"# reflectlab {__version__} validate suite={args.suite} dist={dist.spec} seed={args.seed}\n"
        _emit(head + output.table(("check", "passed", "statistic"),
                                  [(r.name, r.passed, r.statistic) for r in reports]), out)


def _load_config(path: Path, seed: int) -> ExperimentSpec:
    try:
        cfg = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DomainError(f"config {path} is not valid JSON: {e.msg} (line {e.lineno})") from None
    if not isinstance(cfg, dict):
        raise DomainError("config must be a JSON object")
    if "seed" in cfg and int(cfg["seed"]) != seed:
        raise DomainError(f"--seed {seed} does not match the config seed {cfg['seed']}")
    cfg = dict(cfg, seed=seed)
    return ExperimentSpec.from_config(cfg)


def cmd_experiment(args, out):
    spec = _load_config(args.config, args.seed)
    result = run_passage_experiment(spec, args.workers)
    scan = divergence_scan(spec, result=result) if len(spec.caps) >= 3 else []
    csv_text = output.experiment_csv(result.rows)
    if args.out is not None:
        args.out.write_text(csv_text)
    if args.figure is not None:
        from .plotting import experiment_figure
        experiment_figure(result, args.figure)
    fmt = args.fmt or ("human" if args.out is not None else "csv")
    if fmt == "csv":
        _emit(csv_text, out)
    elif fmt == "json":
        rows = [dict(zip(output.CSV_COLUMNS, row.as_tuple())) for row in result.rows]
        body = {"rows": rows, "classification": result.classification.to_dict(),
                "scan": [{"r": s.r, "label": s.label, "growth_per_decade": s.growth_per_decade} for s in scan]}
        _emit(output.dumps(output.envelope("experiment", body, seed=spec.master_seed,
                                           dist=result.rows[0].dist if result.rows else spec.dist_spec,
                                           kappa=spec.kappa, caps=list(spec.caps), reps=spec.replications)), out)
    else:
        head = (f"# reflectlab {__version__} experiment dist={spec.dist_spec} kappa={spec.kappa:g} "
                f"reps={spec.replications} seed={spec.master_seed} verdict="
                f"{result.classification.tau_all_r_as_finite.verdict.value} ({result.classification.fired_clause})\n")
        cols = ("r", "cap", "censored_frac", "mean_tau_capped", "stderr_mean", "q50", "q90", "q99")
        text = head + output.table(cols, [[getattr(r, c) for c in cols] for r in result.rows])
        for s in scan:
            text += f"r={s.r:g}: {s.label} (capped-mean growth per decade {s.growth_per_decade:.3g})\n"
        _emit(text, out)


COMMANDS = {"classify": cmd_classify, "criteria": cmd_criteria, "simulate": cmd_simulate,
            "passage": cmd_passage, "ladder": cmd_ladder, "validate": cmd_validate,
            "experiment": cmd_experiment}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        COMMANDS[args.command](args, out)
    except ReflectLabError as e:
        print(f"reflectlab: error: {e}", file=err)
        return 1
    except OSError as e:
        print(f"reflectlab: error: {e.strerror or e}: {e.filename or ''}".rstrip(": "), file=err)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
