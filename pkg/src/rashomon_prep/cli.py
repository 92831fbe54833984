"""Balancing, filtering, data complexity and Rashomon-set multiplicity tools.

Exit codes: 0 success, 1 configuration or input error, 2 grid finished with
failed cells.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import pandas as pd

from . import __version__
from .complexity import (MEASURES, cluster_datasets, complexity_profile, read_profiles,
                         write_profiles_csv)
from .errors import ConfigInvalid, NonBinaryTarget, RashomonPrepError, UnknownMethod
from .filtering import FilterSpec, select_features
from .harness import make_report, parse_config, run_experiment
from .harness.report import MODES
from .rashomon import (build_rashomon_set, multiplicity_report, prediction_matrix, roc_auc,
                       train_pool)
from .resampling import BalanceSpec, balance
from .tabular import class_stats, load_csv, stratified_split

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


def _add_data_args(p):
    p.add_argument("csv", help="input CSV with a header row")
    p.add_argument("--target", required=True, help="label column")
    p.add_argument("--positive", default=None, help="positive (minority) level")
    p.add_argument("--categorical", choices=("onehot", "ordinal"), default="onehot",
                   help="encoding of non-numeric columns")
    p.add_argument("--seed", type=int, default=0)


def _load(args):
    return load_csv(args.csv, args.target, args.positive, categorical=args.categorical)


def cmd_complexity(args):
    ds = _load(args)
    prof = complexity_profile(ds, seed=args.seed, cutoff=args.cutoff, subsample=args.subsample)
    width = max(len(m) for m in MEASURES)
    print(f"{ds.name}: n={ds.n} p={ds.p}")
    for m in MEASURES:
        v = "NA" if prof.is_na(m) else f"{prof.values[m]:.6g}"
        reason = f"  ({prof.na_reasons[m]})" if m in prof.na_reasons else ""
        print(f"  {m:<{width}}  {v:>12}{reason}")
    out = args.out or f"{ds.name}_complexity.csv"
    write_profiles_csv([prof], out)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_cluster(args):
    files = sorted(os.path.join(args.profiles, f) for f in os.listdir(args.profiles)
                   if f.endswith((".csv", ".json")))
    profiles = [p for f in files for p in read_profiles(f)]
    res = cluster_datasets(profiles, k=args.k, seed=args.seed)
    rows = [{"dataset": d, "cluster": c} for d, c in res.assignment.items()]
    table = pd.DataFrame(rows)
    print(table.to_string(index=False))
    print(f"inertia {res.inertia:.6g}")
    if args.out:
        table.to_csv(args.out, index=False)
    return EXIT_OK


def cmd_balance(args):
    ds = _load(args)
    spec = BalanceSpec(args.method, k=args.k, target_ratio=args.ratio, seed=args.seed,
                       standardize=not args.raw)
    out = balance(ds, spec)
    before, after = class_stats(ds), class_stats(out.data)
    print(f"{spec.method}: IR {before.ir:.4g} -> {after.ir:.4g}; "
          + ", ".join(f"{k}={v}" for k, v in out.method_trace.items() if k != "method"))
    if args.out:
        frame = pd.DataFrame(out.data.X, columns=out.data.feature_names)
        frame[args.target] = out.data.y
        frame["provenance"] = out.provenance
        frame.to_csv(args.out, index=False)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_filter(args):
    ds = _load(args)
    try:
        sel = select_features(ds, FilterSpec(alpha=args.alpha, mode=args.filter))
    except RashomonPrepError as exc:
        if not hasattr(exc, "result"):
            raise
        print(f"warning: {exc}", file=sys.stderr)
        sel = exc.result
    names = [ds.feature_names[j] for j in sorted(sel.selected)]
    print(f"selected {len(names)}/{ds.p}: {', '.join(names)}")
    if args.out:
        sel.to_csv(args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_rashomon(args):
    ds = _load(args)
    loss = {"auc": "one_minus_auc", "error": "error_rate"}[args.loss]
    split = stratified_split(ds, args.test_fraction, args.seed)
    inner = stratified_split(split.train, 0.2, args.seed + 1)
    pool = train_pool(inner.train, args.pool, args.seed)
    rset = build_rashomon_set(pool, inner.test, args.epsilon, loss)
    pm = prediction_matrix(rset, split.test.X)
    rep = multiplicity_report(pm, args.epsilon, include_reference=args.include_reference)
    auc = roc_auc(split.test.y, pool[rset.reference_index].predict_scores(split.test.X))
    print(f"members {rep.n_members}/{len(pool)}  discrepancy {rep.discrepancy:.4f}  "
          f"obscurity {rep.obscurity:.4f}  reference AUC {auc:.4f}")
    if args.json:
        report = {
            "dataset": ds.name, "epsilon": args.epsilon, "loss_kind": loss,
            "n_members": rep.n_members, "discrepancy": rep.discrepancy,
            "obscurity": rep.obscurity, "auc_reference": auc,
            "reference_index": rset.reference_index,
            "member_indices": list(rset.member_indices),
            "models": [{"index": i, "loss": float(rset.losses[i]), **m.spec.to_dict()}
                       for i, m in enumerate(pool)],
        }
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=1)
        print(f"wrote {args.json}")
    return EXIT_OK


def cmd_experiment(args):
    cfg = parse_config(args.config)

    def progress(rec):
        status = "ok" if rec["status"] == "ok" else f"ERROR {rec['error']}"
        logging.info("%s %s/%s r%d: %s (%.1fs)", rec["dataset"], rec["balancing"],
                     rec["filtering"], rec["repeat"], status, rec["wall_time"])

    summary = run_experiment(cfg, workers=args.workers, resume=args.resume, progress=progress)
    print(f"{summary.n_records} records ({summary.n_failed} failed) -> {summary.path}")
    return EXIT_PARTIAL if summary.n_failed else EXIT_OK


def cmd_report(args):
    mode = "stats" if args.stats else args.mode
    if mode is None:
        raise ConfigInvalid("choose --mode or --stats")
    tables = make_report(args.store, mode, out_dir=args.out, profiles_path=args.profiles)
    for name, table in tables.items():
        if name.endswith("_points"):
            print(f"{name}: {len(table)} rows")
            continue
        print(f"== {name}")
        with pd.option_context("display.width", 160, "display.max_columns", 20):
            print(table.to_string(index=False, float_format=lambda v: f"{v:.4g}"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rashomon-prep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complexity", help="seventeen data complexity measures")
    _add_data_args(p)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--cutoff", type=int, default=15000)
    p.add_argument("--subsample", action="store_true",
                   help="subsample to --cutoff rows instead of reporting NA")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("cluster", help="k-means over complexity profiles")
    p.add_argument("--profiles", required=True, help="directory of profile CSV/JSON files")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("balance", help="resample a training CSV")
    _add_data_args(p)
    p.add_argument("--method", default="smote")
    p.add_argument("--ratio", type=float, default=1.0, help="target imbalance ratio")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--raw", action="store_true", help="neighbours on raw features")
    p.add_argument("--out")
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("filter", help="correlation / rank-sum feature filter")
    _add_data_args(p)
    p.add_argument("--filter", default="intersect", choices=("none", "cor", "sig", "intersect"))
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="per-feature test report CSV")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("rashomon", help="Rashomon set and multiplicity of one dataset")
    _add_data_args(p)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--pool", type=int, default=50)
    p.add_argument("--loss", choices=("auc", "error"), default="auc")
    p.add_argument("--test-fraction", type=float, default=0.25)
    p.add_argument("--include-reference", action="store_true",
                   help="count the reference model in the obscurity denominator")
    p.add_argument("--json", help="JSON report path")
    p.set_defaults(func=cmd_rashomon)

    p = sub.add_parser("experiment", help="experiment grid")
    esub = p.add_subparsers(dest="action", required=True)
    run = esub.add_parser("run", help="run a YAML-configured grid")
    run.add_argument("config")
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--resume", action="store_true")
    run.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="tables from a results store")
    p.add_argument("store", help="results.jsonl or its directory")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--stats", action="store_true", help="statistical test battery")
    p.add_argument("--out", help="output directory (default: next to the store)")
    p.add_argument("--profiles", help="complexity profiles CSV for rq6")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        return args.func(args)
    except (ConfigInvalid, UnknownMethod, NonBinaryTarget, FileNotFoundError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
