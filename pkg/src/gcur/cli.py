"""Command-line entry point: ``gcur {generate,decompose,experiment,bounds}``.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""
import argparse
import json
import os
import sys
import time

from gcur import bounds as bnd
from gcur.errors import InputError, NumericalError
from gcur.experiments import PRESETS, ExperimentConfig, generate, read_summary, run_experiment
from gcur.factors import relative_error
from gcur.mmio import MatrixMarketSource, read_matrix_market, write_matrix_market
from gcur.pair import cur_pair, cur_pair_pass_efficient
from gcur.sketch import DEFAULT_BLOCK_SIZE, SketchPlan
from gcur.triplet import cur_triplet, cur_triplet_pass_efficient

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
_NAMES = {"pair": ("A", "B"), "triplet": ("A", "B", "G")}


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _norms(choice):
    return ("spectral", "frobenius") if choice == "both" else (choice,)


def _add_common(p):
    p.add_argument("--mode", choices=("pair", "triplet"), default="pair")
    p.add_argument("--oversample", "-p", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="gcur", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write random low-rank test matrices")
    _add_common(g)
    g.add_argument("--dims", type=_int_list, default=None,
                   help="pair: m,d,n  triplet: m,n,t,d (default: desk-scale preset)")
    g.add_argument("--rank", "-k", type=int, default=None, help="true rank (default: preset)")
    g.add_argument("--format", choices=("array", "coordinate"), default="array")

    d = sub.add_parser("decompose", help="CUR-decompose Matrix Market inputs")
    _add_common(d)
    d.add_argument("inputs", nargs="+", help="A B (pair) or A B G (triplet)")
    d.add_argument("--rank", "-k", type=int, required=True)
    d.add_argument("--pass-efficient", action="store_true")
    d.add_argument("--indices-only", action="store_true")
    d.add_argument("--norm", choices=("spectral", "frobenius", "both"), default="both")
    d.add_argument("--block-size", type=int, default=DEFAULT_BLOCK_SIZE)

    e = sub.add_parser("experiment", help="run a k-sweep over seeds and write CSVs")
    _add_common(e)
    e.add_argument("--config", help="JSON ExperimentConfig file")
    e.add_argument("--preset", choices=sorted(PRESETS), default=None)
    e.add_argument("--rank", "-k", type=_int_list, default=None, help="k values, comma-separated")
    e.add_argument("--true-rank", type=int, default=None)
    e.add_argument("--dims", type=_int_list, default=None)
    e.add_argument("--seeds", type=int, default=None, help="number of seeds (0..N-1)")
    e.add_argument("--algorithms", default=None, help="comma list of rand,pass_efficient")
    e.add_argument("--norm", choices=("spectral", "frobenius", "both"), default=None)

    b = sub.add_parser("bounds", help="evaluate expectation bounds (optionally vs Monte-Carlo)")
    _add_common(b)
    b.add_argument("inputs", nargs="+")
    b.add_argument("--rank", "-k", type=int, required=True)
    b.add_argument("--norm", choices=("spectral", "frobenius", "both"), default="spectral")
    b.add_argument("--monte-carlo", type=int, default=0, metavar="N",
                   help="also report mean observed errors over N seeds")
    return parser


def _load_inputs(paths, mode):
    names = _NAMES[mode]
    if len(paths) != len(names):
        raise InputError(f"{mode} mode needs {len(names)} inputs ({', '.join(names)}), got {len(paths)}")
    return [read_matrix_market(p) for p in paths]


def cmd_generate(args):
    preset = PRESETS["desk-pair" if args.mode == "pair" else "desk-triplet"]
    dims = args.dims or list(preset["dims"].values())
    r = args.rank or preset["true_rank"]
    mats = generate(args.mode, dims, r, args.seed)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    for name, mat in zip(_NAMES[args.mode], mats):
        path = os.path.join(out, f"{name}.mtx")
        write_matrix_market(path, mat, fmt=args.format,
                            comment=f"rank-{r} Gaussian product, seed {args.seed}")
        print(f"wrote {path} ({mat.shape[0]}x{mat.shape[1]})")
    return EXIT_OK


def _check_shapes(mode, shapes, paths):
    names = _NAMES[mode]
    if mode == "pair":
        if shapes[0][1] != shapes[1][1]:
            raise InputError(f"A ({paths[0]}) and B ({paths[1]}) differ in column count: "
                             f"{shapes[0][1]} vs {shapes[1][1]}")
    else:
        if shapes[0][0] != shapes[1][0]:
            raise InputError(f"A ({paths[0]}) and B ({paths[1]}) differ in row count: "
                             f"{shapes[0][0]} vs {shapes[1][0]}")
        if shapes[0][1] != shapes[2][1]:
            raise InputError(f"A ({paths[0]}) and G ({paths[2]}) differ in column count: "
                             f"{shapes[0][1]} vs {shapes[2][1]}")
    return names


def cmd_decompose(args):
    mode = args.mode
    names = _NAMES[mode]
    if len(args.inputs) != len(names):
        raise InputError(f"{mode} mode needs {len(names)} inputs, got {len(args.inputs)}")
    if args.indices_only and not args.pass_efficient:
        raise InputError("--indices-only requires --pass-efficient")
    plan = SketchPlan(args.rank, args.oversample, args.seed)
    out = args.out or "."

    if args.pass_efficient:
        srcs = [MatrixMarketSource(p, args.block_size) for p in args.inputs]
        _check_shapes(mode, [s.shape for s in srcs], args.inputs)
        fn = cur_pair_pass_efficient if mode == "pair" else cur_triplet_pass_efficient
        t0 = time.perf_counter()
        res, rep = fn(*srcs, plan, indices_only=args.indices_only)
        wall = time.perf_counter() - t0
        passes = rep.per_source
        algorithm = "pass_efficient"
    else:
        mats = _load_inputs(args.inputs, mode)
        _check_shapes(mode, [m.shape for m in mats], args.inputs)
        fn = cur_pair if mode == "pair" else cur_triplet
        t0 = time.perf_counter()
        res = fn(*mats, plan)
        wall = time.perf_counter() - t0
        passes = None
        algorithm = "rand"

    facs = {"A": res.a_factors, "B": res.b_factors}
    if mode == "triplet":
        facs["G"] = res.g_factors
    os.makedirs(out, exist_ok=True)
    indices = {name: {"col_idx": (f.col_idx + 1).tolist(), "row_idx": (f.row_idx + 1).tolist()}
               for name, f in facs.items()}
    with open(os.path.join(out, "indices.json"), "w") as fh:
        json.dump(indices, fh, indent=2)

    report = {"mode": mode, "algorithm": algorithm, "k": plan.k, "p": plan.p, "l": plan.l,
              "seed": plan.seed, "wall_time": wall, "indices_only": bool(args.indices_only),
              "pass_count": None if passes is None else max(passes.values()),
              "passes_per_matrix": passes, "index_base": 1}
    if not args.indices_only:
        mats = _load_inputs(args.inputs, mode) if args.pass_efficient else mats
        errors = {}
        for name, src in zip(names, mats):
            f = facs[name]
            for part in ("c", "m", "r"):
                write_matrix_market(os.path.join(out, f"{part.upper()}_{name}.mtx"), getattr(f, part))
            errors[name] = {nk: relative_error(src, f, nk) for nk in _norms(args.norm)}
        report["relative_errors"] = errors
    with open(os.path.join(out, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2)
    print(json.dumps(report, indent=2))
    return EXIT_OK


def _experiment_config(args):
    """Config file (or preset) with command-line overrides applied on top."""
    if args.config:
        with open(args.config) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"{args.config}: invalid JSON ({exc})") from None
    else:
        raw = {"preset": args.preset or ("desk-pair" if args.mode == "pair" else "desk-triplet")}
    mode = raw.get("mode") or PRESETS.get(raw.get("preset"), {}).get("mode", args.mode)
    if args.dims:
        keys = ("m", "d", "n") if mode == "pair" else ("m", "n", "t", "d")
        if len(args.dims) != len(keys):
            raise InputError(f"--dims needs {len(keys)} values ({','.join(keys)})")
        raw["dims"] = dict(zip(keys, args.dims))
    if args.true_rank is not None:
        raw["true_rank"] = args.true_rank
    if args.rank is not None:
        raw["ks"] = args.rank
    raw.setdefault("ks", [60, 80, 100, 120])
    if args.seeds is not None:
        raw["seeds"] = list(range(args.seeds))
    if args.algorithms:
        raw["algorithms"] = [a.strip() for a in args.algorithms.split(",")]
    if args.norm:
        raw["norm"] = args.norm
    raw.setdefault("p", args.oversample)
    if args.out:
        raw["out"] = args.out
    return ExperimentConfig.from_dict(raw)


def cmd_experiment(args):
    config = _experiment_config(args)
    records, summary = run_experiment(config)
    failed = sum(r.status != "ok" for r in records)
    print(f"{len(records)} runs ({failed} failed) written to {config.out}")
    for row in read_summary(config.out):
        errs = ", ".join(f"{k[9:]}={v:.3e}" for k, v in row.items() if k.startswith("mean_err_"))
        print(f"  {row['algorithm']:>14} k={row['k']:<4d} {errs}  t={row['mean_wall_time']:.3f}s")
    return EXIT_OK


def cmd_bounds(args):
    mats = _load_inputs(args.inputs, args.mode)
    k, p = args.rank, args.oversample
    out = {}
    for nk in _norms(args.norm):
        if args.mode == "pair":
            reps = bnd.pair_bounds_for(*mats, k, p, nk)
            out[nk] = {"alg2": reps["alg2"].to_dict()}
            if "alg3" in reps:
                out[nk]["alg3"] = {lbl: r.to_dict() for lbl, r in reps["alg3"].items()}
        elif nk == "spectral":
            reps = bnd.triplet_bounds_for(*mats, k, p)
            out[nk] = {"alg4": {lbl: r.to_dict() for lbl, r in reps.items()}}
    if args.monte_carlo > 0:
        seeds = [args.seed + s for s in range(args.monte_carlo)]
        out["observed_mean"] = _monte_carlo(args.mode, mats, k, p, seeds, _norms(args.norm))
    print(json.dumps(out, indent=2, default=float))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "bounds.json"), "w") as fh:
            json.dump(out, fh, indent=2, default=float)
    return EXIT_OK


def _monte_carlo(mode, mats, k, p, seeds, norms):
    names = _NAMES[mode]
    out = {}
    algs = {"pair": {"alg2": cur_pair, "alg3": lambda *a: cur_pair_pass_efficient(*a)[0]},
            "triplet": {"alg4": cur_triplet, "alg5": lambda *a: cur_triplet_pass_efficient(*a)[0]}}
    for alg, fn in algs[mode].items():
        def run(seed, fn=fn):
            res = fn(*mats, SketchPlan(k, p, seed))
            facs = [res.a_factors, res.b_factors] + ([res.g_factors] if mode == "triplet" else [])
            return {n: (src, f) for n, src, f in zip(names, mats, facs)}
        out[alg] = {nk: bnd.mean_observed_errors(run, seeds, nk) for nk in norms}
    return out


COMMANDS = {"generate": cmd_generate, "decompose": cmd_decompose,
            "experiment": cmd_experiment, "bounds": cmd_bounds}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"gcur: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"gcur: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"gcur: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
