"""Command-line interface.

Subcommands: ``gen``, ``analyze``, ``verify``, ``weighted`` and ``sweep``.

Exit codes: 0 success, 1 I/O or parse error, 2 usage error, 3 failed
identity verification.
"""

import argparse
import math
import sys

import numpy as np

from . import report as rep
from .errors import DomainError, NumericalError, ParseError
from .geometry import McConfig
from .kernels import WeightFunction, cross_check_weighted, kernel_mean, kernel_mean_appendix_variant
from .oracles import weighted_discrepancy_mc
from .pointsets import KINDS, GeneratorSpec, format_csv, generate, load_csv
from .quality import (McCheck, analyze, invariance_residual, sum_of_distances,
                      weighted_kernel_sum, weighted_wce, worst_case_error)
from .special import DEFAULT_NODES, distance_constant, mean_distance

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3

DEFAULT_MC_SAMPLES = 10 ** 6
Z_LIMIT = 3.0
APPENDIX_TOL = 1e-10
# kinds with a free N
SWEEP_KINDS = ("random", "fibonacci")


class UsageError(Exception):
    pass


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text):
    value = int(text, 0)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _non_negative(text):
    value = int(float(text)) if "e" in text.lower() else int(text, 0)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def _add_source(p):
    src = p.add_argument_group("point source (a file, or a generator)")
    src.add_argument("input", nargs="?", help="point file (CSV with '# d=<d>' header)")
    src.add_argument("--kind", choices=KINDS, help="generate the points instead of reading a file")
    src.add_argument("--d", type=_positive, default=2, help="sphere dimension for --kind (default 2)")
    src.add_argument("--n", type=_positive, help="number of points for --kind")
    src.add_argument("--point-seed", type=_seed,
                     help="seed for --kind random (default: the value of --seed)")
    src.add_argument("--renormalize", action="store_true",
                     help="rescale file points whose norm is within 1e-6 of one")


def _add_common(p, mc_default):
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--nodes", type=_positive, default=DEFAULT_NODES,
                   help=f"quadrature nodes per axis (default {DEFAULT_NODES})")
    p.add_argument("--mc-samples", type=_non_negative, default=mc_default,
                   help=f"Monte Carlo samples (default {mc_default})")
    p.add_argument("--seed", type=_seed, default=0, help="Monte Carlo seed (default 0)")
    p.add_argument("--workers", type=_positive, default=1,
                   help="threads for Monte Carlo chunks and pair sums; output does not depend on it")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spherequal",
        description="Sum of distances, cap L2 discrepancy and worst-case error of points on S^d.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a point set and write it as CSV")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--d", type=_positive, default=2)
    p.add_argument("--n", type=_positive)
    p.add_argument("--seed", type=_seed, default=0, help="seed for --kind random")
    p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("analyze", help="quality measures of a point set")
    _add_source(p)
    _add_common(p, 0)
    p.add_argument("--weight", action="append", default=[],
                   help="weight spec 'one' or 'poly:c0,c1,...' (repeatable)")
    p.add_argument("--timing", action="store_true", help="include per-stage timings")

    p = sub.add_parser("verify", help="check the invariance identities against Monte Carlo")
    _add_source(p)
    _add_common(p, DEFAULT_MC_SAMPLES)
    p.add_argument("--weight", help="also check the weighted identity with this weight")
    p.add_argument("--strict-appendix", action="store_true",
                   help="fail (exit 3) when the closed kernel-mean variant disagrees")

    p = sub.add_parser("weighted", help="weighted-kernel analysis of a point set")
    _add_source(p)
    _add_common(p, DEFAULT_MC_SAMPLES)
    p.add_argument("--weight", action="append", required=True,
                   help="weight spec 'one' or 'poly:c0,c1,...' (repeatable)")

    p = sub.add_parser("sweep", help="quality measures over a geometric range of N")
    p.add_argument("--kind", choices=SWEEP_KINDS, required=True)
    p.add_argument("--d", type=_positive, default=2)
    p.add_argument("--n-min", type=_positive, default=16)
    p.add_argument("--n-max", type=_positive, default=4096)
    p.add_argument("--factor", type=_positive, default=2, help="ratio between consecutive N (default 2)")
    p.add_argument("--seed", type=_seed, default=0, help="seed for --kind random")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out")
    p.add_argument("--workers", type=_positive, default=1)
    return parser


def _points(args):
    if args.kind is not None:
        if args.input is not None:
            raise UsageError("give either a point file or --kind, not both")
        seed = args.seed if args.point_seed is None else args.point_seed
        return generate(GeneratorSpec(args.kind, args.d, args.n, seed))
    if args.input is None:
        raise UsageError("a point file or --kind is required")
    return load_csv(args.input, renormalize=args.renormalize)


def _weights(specs):
    return [WeightFunction.parse(s) for s in specs]


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _mc(args):
    if args.mc_samples == 0:
        return None
    return McConfig(samples=args.mc_samples, seed=args.seed, workers=args.workers)


# -- subcommands -------------------------------------------------------------

def run_gen(args):
    P = generate(GeneratorSpec(args.kind, args.d, args.n, args.seed))
    _emit(args, format_csv(P))
    return EXIT_OK


def run_analyze(args):
    P = _points(args)
    report = analyze(P, weights=_weights(args.weight), cfg=_mc(args), nodes=args.nodes,
                     timing=args.timing, workers=args.workers)
    if args.format == "json":
        text = rep.to_json(rep.quality_report_dict(report))
    elif args.format == "csv":
        text = rep.to_csv([rep.quality_report_row(report)])
    else:
        text = rep.to_text(rep.quality_report_row(report).items())
    _emit(args, text)
    return EXIT_OK


def _appendix_comparison(d, v, nodes, strict):
    mean = kernel_mean(d, v, nodes)
    variant = kernel_mean_appendix_variant(d, v, nodes)
    variant_v = kernel_mean_appendix_variant(d, v, nodes, form="antiderivative")
    deviation = variant - mean
    mismatch = abs(deviation) > APPENDIX_TOL
    return {
        "weight": v.label,
        "kernel_mean": mean,
        "appendix_variant": variant,
        "appendix_variant_antiderivative_form": variant_v,
        "deviation": deviation,
        "mismatch": mismatch,
        "severity": ("error" if strict else "info") if mismatch else "none",
    }


def run_verify(args):
    if args.mc_samples < 1000:
        raise UsageError("verify needs --mc-samples >= 1000")
    P = _points(args)
    cfg = McConfig(samples=args.mc_samples, seed=args.seed, workers=args.workers)
    checks = []
    res = invariance_residual(P, cfg)
    checks.append({"identity": "unweighted", "weight": None, "residual": res.residual,
                   "std_error": res.std_error, "z_score": res.z_score,
                   "passed": abs(res.z_score) <= Z_LIMIT})
    v = WeightFunction.parse(args.weight) if args.weight else None
    if v is not None:
        if P.d < 2:
            raise UsageError("the weighted identity needs d >= 2")
        res = invariance_residual(P, cfg, v=v, nodes=args.nodes)
        checks.append({"identity": "weighted", "weight": v.label, "residual": res.residual,
                       "std_error": res.std_error, "z_score": res.z_score,
                       "passed": abs(res.z_score) <= Z_LIMIT})
    appendix = _appendix_comparison(P.d, v or WeightFunction.one(), args.nodes, args.strict_appendix)
    passed = all(c["passed"] for c in checks) and appendix["severity"] != "error"
    doc = {"schema_version": rep.SCHEMA_VERSION, "command": "verify", "d": P.d, "n": P.n,
           "mc_samples": cfg.samples, "seed": cfg.seed, "z_limit": Z_LIMIT,
           "checks": checks, "appendix": appendix, "passed": passed}

    if args.format == "json":
        text = rep.to_json(doc)
    elif args.format == "csv":
        text = rep.to_csv([{k: c[k] for k in ("identity", "weight", "residual", "std_error",
                                             "z_score", "passed")} for c in checks])
    else:
        pairs = [("d", P.d), ("n", P.n), ("mc_samples", cfg.samples), ("seed", cfg.seed)]
        for c in checks:
            tag = c["identity"] if c["weight"] is None else f"{c['identity']}[{c['weight']}]"
            pairs += [(f"{tag}.residual", c["residual"]), (f"{tag}.std_error", c["std_error"]),
                      (f"{tag}.z_score", c["z_score"]), (f"{tag}.passed", c["passed"])]
        pairs += [(f"appendix.{k}", appendix[k]) for k in
                  ("weight", "kernel_mean", "appendix_variant", "deviation", "mismatch", "severity")]
        pairs.append(("passed", passed))
        text = rep.to_text(pairs)
    _emit(args, text)
    return EXIT_OK if passed else EXIT_VERIFY


def _probe_pair(P):
    """First pair of distinct points, or None."""
    X = P.points
    for k in range(1, P.n):
        if np.linalg.norm(X[k] - X[0]) > 1e-12:
            return X[0], X[k]
    return None


def run_weighted(args):
    P = _points(args)
    if P.d < 2:
        raise UsageError("weighted kernels need d >= 2")
    cfg = _mc(args)
    entries = []
    pair = _probe_pair(P)
    for v in _weights(args.weight):
        ksum = weighted_kernel_sum(P, v, args.nodes)
        kmean = kernel_mean(P.d, v, args.nodes)
        entry = {
            "weight": v.label,
            "weighted_wce": weighted_wce(P, v, args.nodes),
            "kernel_sum": ksum,
            "kernel_mean": kmean,
            "kernel_mean_appendix": kernel_mean_appendix_variant(P.d, v, args.nodes),
            "route_check": None,
            "mc_check": None,
        }
        if pair is not None:
            entry["route_check"] = cross_check_weighted(P.d, pair[0], pair[1], v, args.nodes).as_dict()
        if cfg is not None:
            est = weighted_discrepancy_mc(P, v, cfg)
            check = McCheck.from_estimate("weighted_discrepancy_sq", est, entry["weighted_wce"] ** 2)
            entry["mc_check"] = {"estimate": check.estimate, "std_error": check.std_error,
                                 "closed_value": check.closed_value, "z_score": check.z_score,
                                 "samples": check.samples}
        entries.append(entry)
    doc = {"schema_version": rep.SCHEMA_VERSION, "command": "weighted", "d": P.d, "n": P.n,
           "nodes": args.nodes, "wce": worst_case_error(P),
           "weights": entries}
    if args.format == "json":
        text = rep.to_json(doc)
    else:
        rows = []
        for e in entries:
            row = {k: e[k] for k in ("weight", "weighted_wce", "kernel_sum", "kernel_mean",
                                     "kernel_mean_appendix")}
            rc = e["route_check"] or {}
            row["route_deviation"] = rc.get("deviation")
            mc = e["mc_check"] or {}
            row["mc_estimate"] = mc.get("estimate")
            row["mc_std_error"] = mc.get("std_error")
            row["mc_z_score"] = mc.get("z_score")
            rows.append(row)
        text = rep.to_csv(rows) if args.format == "csv" else rep.table_text(rows)
    _emit(args, text)
    return EXIT_OK


def sweep_grid(n_min, n_max, factor):
    if n_max < n_min:
        raise UsageError("--n-max must be at least --n-min")
    if factor < 2 and n_max > n_min:
        raise UsageError("--factor must be at least 2")
    grid = [n_min]
    while factor >= 2 and grid[-1] * factor <= n_max:
        grid.append(grid[-1] * factor)
    return grid


def loglog_slope(ns, values):
    """Least-squares slope of ``log(values)`` against ``log(ns)``; None if undefined."""
    if len(ns) < 2 or any(not (v > 0.0) for v in values):
        return None
    slope, _ = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(values, float)), 1)
    return float(slope)


def run_sweep(args):
    rows = []
    for n in sweep_grid(args.n_min, args.n_max, args.factor):
        P = generate(GeneratorSpec(args.kind, args.d, n, args.seed))
        s = sum_of_distances(P, workers=args.workers)
        gap = mean_distance(P.d) - s
        rows.append({"n": P.n, "sum_of_distances": s, "energy_gap": gap,
                     "wce": math.sqrt(max(0.0, distance_constant(P.d) * gap))})
    slope = loglog_slope([r["n"] for r in rows], [r["wce"] for r in rows])
    doc = {"schema_version": rep.SCHEMA_VERSION, "command": "sweep", "kind": args.kind,
           "d": args.d, "seed": args.seed, "rows": rows, "slope": slope,
           "slope_available": slope is not None}
    if args.format == "json":
        text = rep.to_json(doc)
    elif args.format == "csv":
        text = rep.to_csv(rows)
    else:
        text = rep.table_text(rows) + (f"slope  {slope!r}\n" if slope is not None
                                       else "slope  n/a\n")
    _emit(args, text)
    return EXIT_OK


COMMANDS = {"gen": run_gen, "analyze": run_analyze, "verify": run_verify,
            "weighted": run_weighted, "sweep": run_sweep}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"spherequal {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"spherequal: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        # a computed quantity broke a mathematical bound: the numerics failed
        print(f"spherequal: {exc}", file=sys.stderr)
        return EXIT_VERIFY

if __name__ == "__main__":
    sys.exit(main())
