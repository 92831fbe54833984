"""Report tables and plot data derived from a results store."""

from __future__ import annotations

import os

import numpy as np
import pandas as pd

from ..complexity.profile import MEASURES, read_profiles
from ..errors import ConstantInput, EmptyStore, TooFewGroups
from ..stats import dunn_posthoc, friedman, kruskal_wallis, spearman_test
from .runner import RESULTS_FILE, load_jsonl

DISAGREEMENT = ("discrepancy", "obscurity")
MODES = ("rq1", "rq5", "rq6", "stats")


def load_store(store) -> pd.DataFrame:
    """Successful records of a results store (file or output directory)."""
    path = os.path.join(store, RESULTS_FILE) if os.path.isdir(store) else store
    if not os.path.exists(path):
        raise EmptyStore(f"no results store at {store}")
    records = load_jsonl(path)
    df = pd.DataFrame(records)
    if df.empty or "status" not in df or not (df["status"] == "ok").any():
        raise EmptyStore(f"{path} holds no successful records")
    return df[df["status"] == "ok"].reset_index(drop=True)


def _quartiles(values) -> dict:
    v = np.asarray(values, dtype=float)
    return {"n": v.size, "min": v.min(), "q1": np.percentile(v, 25), "median": np.median(v),
            "q3": np.percentile(v, 75), "max": v.max(), "mean": v.mean()}


def _ordered(df, col):
    return list(dict.fromkeys(df[col]))


def rq1_tables(df: pd.DataFrame) -> dict:
    """Distributions by balancing condition, Kruskal-Wallis and Dunn tests,
    and the per-dataset balanced-versus-original comparison."""
    groups = _ordered(df, "balancing")
    dist, tests, dunn = [], [], []
    for metric in DISAGREEMENT:
        samples = [df.loc[df["balancing"] == g, metric].to_numpy(float) for g in groups]
        for g, s in zip(groups, samples):
            dist.append({"balancing": g, "metric": metric, **_quartiles(s)})
        try:
            kw = kruskal_wallis(samples, labels=groups)
            tests.append({"metric": metric, "method": kw.method, "statistic": kw.statistic,
                          "df": kw.df, "p": kw.p})
            post = dunn_posthoc(samples, labels=groups)
            for i, a in enumerate(groups):
                for j, b in enumerate(groups):
                    if i < j:
                        dunn.append({"metric": metric, "group_a": a, "group_b": b,
                                     "z": post.z[i, j], "p_raw": post.p_raw[i, j],
                                     "p_adj": post.p[i, j]})
        except TooFewGroups:
            pass
    direction = []
    for name in _ordered(df, "dataset"):
        sub = df[df["dataset"] == name]
        orig = sub.loc[sub["balancing"] == "none", "discrepancy"]
        bal = sub.loc[sub["balancing"] != "none", "discrepancy"]
        if len(orig) and len(bal):
            direction.append({"dataset": name, "median_original": float(np.median(orig)),
                              "median_balanced": float(np.median(bal)),
                              "inflated": bool(np.median(bal) > np.median(orig))})
    points = df[["dataset", "balancing", "filtering", "repeat", *DISAGREEMENT]]
    return {"rq1_distributions": pd.DataFrame(dist), "rq1_tests": pd.DataFrame(tests),
            "rq1_dunn": pd.DataFrame(dunn), "rq1_direction": pd.DataFrame(direction),
            "rq1_points": points}


def rq5_tables(df: pd.DataFrame) -> dict:
    """Performance gain against disagreement per preprocessing condition."""
    gain = "performance_gain_vs_original"
    rows = []
    for (b, f), sub in df.groupby(["balancing", "filtering"], sort=False):
        rows.append({"balancing": b, "filtering": f, "n": len(sub),
                     "median_gain": float(np.nanmedian(sub[gain].astype(float))),
                     "median_discrepancy": float(sub["discrepancy"].median()),
                     "median_obscurity": float(sub["obscurity"].median())})
    cor = []
    pts = df[df[gain].notna()]
    for metric in DISAGREEMENT:
        try:
            c = spearman_test(pts[gain].astype(float), pts[metric].astype(float))
            cor.append({"x": gain, "y": metric, "rho": c.rho, "p": c.p, "n": c.n})
        except (ConstantInput, ValueError):
            cor.append({"x": gain, "y": metric, "rho": np.nan, "p": np.nan, "n": len(pts)})
    points = df[["dataset", "balancing", "filtering", "repeat", gain, *DISAGREEMENT]]
    return {"rq5_table": pd.DataFrame(rows), "rq5_correlation": pd.DataFrame(cor),
            "rq5_points": points}


def rq6_tables(df: pd.DataFrame, profiles) -> dict:
    """Spearman correlation of each complexity measure with each
    disagreement metric across datasets (per-dataset medians)."""
    per_ds = df.groupby("dataset", sort=False)[list(DISAGREEMENT)].median()
    prof = {p.dataset_name: p for p in profiles}
    names = [d for d in per_ds.index if d in prof]
    rows, points = [], []
    for m in MEASURES:
        xs = np.array([prof[d].values[m] for d in names], dtype=float)
        row = {"measure": m, "n": int(np.isfinite(xs).sum()), "na": False}
        for metric in DISAGREEMENT:
            ys = per_ds.loc[names, metric].to_numpy(float)
            ok = np.isfinite(xs)
            try:
                c = spearman_test(xs[ok], ys[ok])
                row[f"rho_{metric}"], row[f"p_{metric}"] = c.rho, c.p
            except (ConstantInput, ValueError):
                row[f"rho_{metric}"], row[f"p_{metric}"] = np.nan, np.nan
                row["na"] = True
        rows.append(row)
        for d, x in zip(names, xs):
            points.append({"dataset": d, "measure": m, "value": x,
                           **{k: float(per_ds.loc[d, k]) for k in DISAGREEMENT}})
    return {"rq6_spearman": pd.DataFrame(rows), "rq6_points": pd.DataFrame(points)}


def stats_tables(df: pd.DataFrame) -> dict:
    """Kruskal-Wallis across balancing, filtering and complexity clusters, and
    Friedman with balancing conditions as blocks and filtering modes as
    treatments."""
    rows = []

    def kw(factor, metric):
        sub = df[df[factor].notna()]
        labels = _ordered(sub, factor)
        try:
            r = kruskal_wallis([sub.loc[sub[factor] == g, metric].astype(float)
                                for g in labels], labels=labels)
            rows.append({"analysis": f"kruskal_wallis by {factor}", "metric": metric,
                         "statistic": r.statistic, "df": r.df, "p": r.p})
        except TooFewGroups:
            pass

    for metric in (*DISAGREEMENT, "performance_gain_vs_original"):
        for factor in ("balancing", "filtering", "complexity_cluster"):
            if factor in df:
                kw(factor, metric)
        table = df.pivot_table(index="balancing", columns="filtering", values=metric,
                               aggfunc="median")
        table = table.dropna(axis=0, how="any")
        if table.shape[0] >= 2 and table.shape[1] >= 2:
            r = friedman(table.to_numpy(float), labels=list(table.columns))
            rows.append({"analysis": "friedman balancing-blocks x filtering", "metric": metric,
                         "statistic": r.statistic, "df": r.df, "p": r.p})
    return {"stats_tests": pd.DataFrame(rows)}


def make_report(store, mode: str, out_dir=None, profiles_path=None) -> dict:
    """Write the CSV tables for ``mode`` and return them as DataFrames."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    df = load_store(store)
    base = store if os.path.isdir(store) else os.path.dirname(os.path.abspath(store))
    out_dir = out_dir or base
    os.makedirs(out_dir, exist_ok=True)
    if mode == "rq1":
        tables = rq1_tables(df)
    elif mode == "rq5":
        tables = rq5_tables(df)
    elif mode == "rq6":
        path = profiles_path or os.path.join(base, "profiles.csv")
        tables = rq6_tables(df, read_profiles(path))
    else:
        tables = stats_tables(df)
    for name, table in tables.items():
        table.to_csv(os.path.join(out_dir, f"{name}.csv"), index=False)
    return tables
