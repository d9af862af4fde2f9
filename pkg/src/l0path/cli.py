"""Command-line interface: ``l0path gen|solve|oracle|bench|select|plot``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .bench import ALGORITHMS, run_bench, summary_rows
from .csbr import StoppingRule, csbr
from .dictionary import Dictionary, Observation
from .errors import CapExceeded, L0PathError, NonDecreasingLambda, RankDeficient
from .l0pd import l0pd
from .oracle import Report, check_dominance, check_theorem1, check_theorem2, exact_paths
from .path import PathResult, segment_table
from .problems import PRESETS, SMALL_KINDS, draw_instance, scenario, small_instance
from .sbr import sbr
from .selection import ic_select, mdlc_select
from .svg import l0_curve_svg, mean_j_svg, path_curve_svg

log = logging.getLogger("l0path")

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4


def _stop(args) -> StoppingRule:
    return StoppingRule(lambda_stop=args.lambda_stop, k_stop=args.k_stop, eps_stop=args.eps_stop)


def _load_problem(args):
    A = Dictionary(io.read_matrix_csv(args.A))
    y = Observation(io.read_vector_csv(args.y))
    return A, y


# -- gen ----------------------------------------------------------------------
def cmd_gen(args) -> int:
    sc = scenario(args.scenario, args.seed)
    man = io.RunManifest(io.command_line(), scenario=sc.to_dict(), seeds=[args.seed, args.trial])
    with man.phase("generate"):
        inst = draw_instance(sc, args.trial)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    with man.phase("write"):
        io.write_matrix_csv(out / "A.csv", inst.dictionary.columns)
        io.write_matrix_csv(out / "y.csv", inst.y.y)
        io.write_matrix_csv(out / "xstar.csv", inst.x_star)
    meta = {"manifest": man.to_dict(), "support_star": list(inst.support_star),
            "sigma_n_sq": inst.sigma_n_sq, "m": inst.dictionary.m, "n": inst.dictionary.n}
    io.write_json(out / "meta.json", meta)
    print(f"wrote {out}/A.csv ({inst.dictionary.m}x{inst.dictionary.n}), y.csv, xstar.csv, meta.json")
    return EXIT_OK


# -- solve --------------------------------------------------------------------
def cmd_solve(args) -> int:
    A, y = _load_problem(args)
    man = io.RunManifest(io.command_line(), algorithm=args.algo)
    if args.algo == "sbr":
        if args.lam is None:
            raise argparse.ArgumentTypeError("--lambda is required with --algo sbr")
        with man.phase("solve"):
            out = sbr(A, y, args.lam, trace=args.trace is not None)
        st = out.state
        result = {"manifest": man.to_dict(), "m": A.m, "lambda": args.lam, "support": list(st.support),
                  "error": st.error, "amplitudes": st.amplitudes()[list(st.support)],
                  "delta_e_add": out.delta_e_add, "ell_add": out.ell_add, "replacements": out.replacements}
        if args.trace is not None:
            with open(args.trace, "w") as fh:
                for move, atom, val in out.trace:
                    fh.write(json.dumps({"move": move, "atom": int(atom), "J": float(val)}) + "\n")
        print(f"lambda={args.lam:g}  |S|={st.card}  E(S)={st.error:.6g}  S={list(st.support)}")
    else:
        stop = _stop(args)
        man.stopping_rule = stop.to_dict()
        with man.phase("solve"):
            if args.algo == "csbr":
                path = csbr(A, y, stop)
                poly = None
            else:
                poly, path = l0pd(A, y, stop)
        result = {"manifest": man.to_dict(), "m": A.m, "path": path.to_dict()}
        if poly is not None and args.polygon:
            io.write_json(args.polygon, poly.to_dict())
        print(segment_table(path))
    if args.out:
        io.write_json(args.out, result)
    return EXIT_OK


# -- oracle -------------------------------------------------------------------
def _oracle_checks(A, y, which) -> Report:
    paths = exact_paths(A, y)
    rep = Report()
    if which in ("theorems", "all"):
        rep.merge(check_theorem1(paths))
        rep.merge(check_theorem2(paths))
    if which in ("dominance", "all"):
        Ad, yd = Dictionary(A), Observation(y)
        rep.merge(check_dominance(paths, csbr(Ad, yd)))
        rep.merge(check_dominance(paths, l0pd(Ad, yd)[1]))
    return rep


def cmd_oracle(args) -> int:
    if args.replay:
        data = io.read_json(args.replay)
        A, y = np.asarray(data["A"], dtype=float), np.asarray(data["y"], dtype=float)
        rep = _oracle_checks(A, y, data.get("check", args.check))
        for v in rep.violations:
            print(v)
        print(f"replay: {len(rep.violations)} violation(s)")
        return EXIT_OK if rep.ok else EXIT_VERIFY
    if args.n > 14:
        print(f"error: exhaustive enumeration needs n <= 14, got {args.n}", file=sys.stderr)
        return EXIT_USAGE
    total = Report()
    failed = 0
    for t in range(args.trials):
        inst = small_instance(args.dict, args.m, args.n, args.seed, t)
        A, y = inst.dictionary.columns, inst.y.y
        rep = _oracle_checks(A, y, args.check)
        total.merge(rep, prefix=f"trial {t}: ")
        if not rep.ok:
            failed += 1
            dump = Path(args.dump_dir) / f"oracle_fail_seed{args.seed}_trial{t}.json"
            dump.parent.mkdir(parents=True, exist_ok=True)
            io.write_json(dump, {"A": A, "y": y, "check": args.check, "violations": rep.violations})
            print(f"trial {t}: {len(rep.violations)} violation(s); instance written to {dump}")
    for k, v in sorted(total.stats.items()):
        print(f"{k}: {v}")
    print(f"{args.trials - failed}/{args.trials} instances passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


# -- bench --------------------------------------------------------------------
def cmd_bench(args) -> int:
    sc = scenario(args.scenario, args.seed)
    algos = ALGORITHMS if args.algo == "both" else (args.algo,)
    man = io.RunManifest(io.command_line(), algorithm=",".join(algos), scenario=sc.to_dict(),
                         seeds=[args.seed, args.first_trial, args.trials])
    with man.phase("bench"):
        results = run_bench(sc, algos, args.trials, args.first_trial)
    doc = {"manifest": man.to_dict(), "scenario": sc.to_dict(), "results": results}
    rows = summary_rows(sc, results)
    for row in rows:
        print("  ".join(f"{c:>14}" for c in row))
    if args.out:
        io.write_json(args.out, doc)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
    if args.plot:
        write_bench_plots(json.loads(io.dumps(doc)), Path(args.plot))
    return EXIT_OK


def write_bench_plots(doc: dict, out: Path) -> None:
    """Mean J per algorithm plus one l0-curve per trial, all read from a bench result."""
    out.mkdir(parents=True, exist_ok=True)
    name = doc["scenario"]["name"]
    res = doc["results"]
    first = next(iter(res.values()))
    grid = np.mean([r["grid"] for r in first["trials"]], axis=0)
    curves = {a: v["mean"]["mean_j"] for a, v in res.items()}
    (out / f"mean_j_{name}.svg").write_text(mean_j_svg(grid, curves, f"Scenario {name}"))
    for a, v in res.items():
        for rec in v["trials"]:
            c = rec["curve"]
            svg = l0_curve_svg(c["lambdas"], c["cards"], c["errors"], a)
            (out / f"curve_{name}_{a}_t{rec['trial']}.svg").write_text(svg)


# -- select -------------------------------------------------------------------
def _read_path(file):
    data = io.read_json(file)
    return PathResult.from_dict(data["path"]), int(data["m"])


def cmd_select(args) -> int:
    path, m = _read_path(args.path)
    if args.criterion == "mdlc":
        j = mdlc_select(path, m)
    else:
        j = ic_select(path, m, args.criterion)
    s = path.supports[j]
    hi = float("inf") if j == 0 else path.lambdas[j - 1]
    print(f"{args.criterion}: segment {j}  lambda in ({path.lambdas[j]:g}, {hi:g}]  |S|={len(s)}  "
          f"E(S)={path.errors[j]:.6g}  S={list(s)}")
    if args.out:
        io.write_json(args.out, {"criterion": args.criterion, "segment": j, "support": list(s),
                                 "error": path.errors[j], "amplitudes": path.coefs[j]})
    return EXIT_OK


# -- plot ---------------------------------------------------------------------
def cmd_plot(args) -> int:
    data = io.read_json(args.input)
    if "path" in data:
        svg = path_curve_svg(PathResult.from_dict(data["path"]))
    elif "results" in data:
        res = data["results"]
        first = next(iter(res.values()))
        grid = np.mean([r["grid"] for r in first["trials"]], axis=0)
        svg = mean_j_svg(grid, {a: v["mean"]["mean_j"] for a, v in res.items()},
                         f"Scenario {data['scenario']['name']}")
    else:
        raise ValueError(f"{args.input}: neither a solve nor a bench result")
    Path(args.out).write_text(svg)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="l0path", description="Approximate l0-penalized regularization paths.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="draw one benchmark instance and write it as CSV")
    g.add_argument("--scenario", required=True, choices=sorted(PRESETS))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--trial", type=int, default=0)
    g.add_argument("--out", "--outdir", dest="outdir", default=".")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run SBR, CSBR or l0-PD on CSV data")
    s.add_argument("--algo", required=True, choices=("sbr", "csbr", "l0pd"))
    s.add_argument("--A", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--lambda-stop", type=float, default=0.0)
    s.add_argument("--k-stop", type=int)
    s.add_argument("--eps-stop", type=float)
    s.add_argument("--out")
    s.add_argument("--trace", help="JSON-lines file for the SBR move trace")
    s.add_argument("--polygon", help="JSON file for the final l0-PD polygon")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="check exact-path structure on small random instances")
    o.add_argument("--check", choices=("theorems", "dominance", "all"), default="theorems")
    o.add_argument("--n", type=int, default=8)
    o.add_argument("--m", type=int, default=10)
    o.add_argument("--dict", choices=SMALL_KINDS, default="gaussian")
    o.add_argument("--trials", type=int, default=10)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--dump-dir", default=".")
    o.add_argument("--replay", help="re-run the checks on a dumped instance")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="Monte-Carlo support recovery on a preset scenario")
    b.add_argument("--scenario", required=True, choices=sorted(PRESETS))
    b.add_argument("--algo", choices=ALGORITHMS + ("both",), default="both")
    b.add_argument("--trials", type=int, default=30)
    b.add_argument("--first-trial", type=int, default=0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.add_argument("--csv")
    b.add_argument("--plot", help="directory for SVG figures")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("select", help="pick a model order on a solved path")
    c.add_argument("--path", required=True, help="JSON written by solve --out")
    c.add_argument("--criterion", choices=("mdlc", "aic", "mdl", "hq"), default="mdlc")
    c.add_argument("--out")
    c.set_defaults(func=cmd_select)

    pl = sub.add_parser("plot", help="SVG of a solved path or of a bench result")
    pl.add_argument("input")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    io.set_command_line(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CapExceeded, RankDeficient, NonDecreasingLambda) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (L0PathError, OSError, ValueError, KeyError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
