"""Experiment grid execution.

Cells are ordered dataset -> repeat -> balancing -> filtering with ``none``
first, so each dataset's baseline precedes the cells compared against it.
Records are written in that order by a single writer regardless of how many
worker processes compute them.
"""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..complexity import cluster_datasets, complexity_profile, write_profiles_csv
from ..errors import NoFeaturesSelected
from ..filtering import FilterSpec, select_features
from ..rashomon import build_rashomon_set, prediction_matrix, roc_auc, train_pool
from ..rashomon.metrics import discrepancy, obscurity, performance_gain
from ..resampling import BalanceSpec, balance
from ..seeding import stable_seed
from ..tabular import class_stats, load_csv, stratified_split
from .config import ExperimentConfig

logger = logging.getLogger(__name__)

RESULTS_FILE = "results.jsonl"
METRIC_FIELDS = ("n_rashomon_members", "auc_reference", "discrepancy", "obscurity",
                 "performance_gain_vs_original", "complexity_cluster")


@dataclass(frozen=True)
class Cell:
    dataset: str
    repeat: int
    balancing: str
    filtering: str

    @property
    def key(self) -> tuple:
        return self.dataset, self.balancing, self.filtering, self.repeat


@dataclass(frozen=True)
class RunSummary:
    path: str
    n_records: int
    n_failed: int
    n_skipped: int = 0


def grid_cells(cfg: ExperimentConfig) -> list:
    return [Cell(d.name, r, b, f)
            for d in cfg.datasets for r in range(cfg.repeats)
            for b in cfg.balancing for f in cfg.filtering]


def _load(entry):
    return load_csv(entry.path, entry.target, entry.positive, categorical=entry.categorical,
                    name=entry.name)


def _filter(train, cfg, mode, notes):
    """Column indices kept by the filter (all columns when the mode is none
    or nothing passes)."""
    if mode == "none":
        return list(range(train.p))
    try:
        sel = select_features(train, FilterSpec(alpha=cfg.alpha, mode=mode))
        return sorted(sel.selected)
    except NoFeaturesSelected:
        notes.append(f"filter {mode} selected no features; using all")
        return list(range(train.p))


def run_cell(cfg: ExperimentConfig, cell: Cell, ds=None) -> dict:
    """Execute one grid cell and return its record (errors are captured)."""
    t0 = time.perf_counter()
    seed = stable_seed(cfg.master_seed, cell.dataset, cell.balancing, cell.filtering,
                       cell.repeat)
    rec = {"dataset": cell.dataset, "balancing": cell.balancing, "filtering": cell.filtering,
           "repeat": cell.repeat, "seed": seed, "status": "ok", "error": None,
           "pipeline_order": cfg.pipeline_order, "epsilon": cfg.epsilon,
           "loss_kind": cfg.loss}
    notes = []
    try:
        entry = next(d for d in cfg.datasets if d.name == cell.dataset)
        ds = ds if ds is not None else _load(entry)
        split = stratified_split(ds, cfg.test_fraction,
                                 stable_seed(cfg.master_seed, cell.dataset, cell.repeat, "split"))
        inner = stratified_split(split.train, cfg.validation_fraction,
                                 stable_seed(cfg.master_seed, cell.dataset, cell.repeat,
                                             "validation"))
        fit, val, test = inner.train, inner.test, split.test
        spec = BalanceSpec(cell.balancing, k=cfg.k, target_ratio=cfg.target_ratio, seed=seed)
        if cfg.pipeline_order == "filter_first":
            cols = _filter(fit, cfg, cell.filtering, notes)
            outcome = balance(fit.select_columns(cols), spec, fallback=True)
            balanced = outcome.data
        else:
            outcome = balance(fit, spec, fallback=True)
            cols = _filter(outcome.data, cfg, cell.filtering, notes)
            balanced = outcome.data.select_columns(cols)
        if "fallback" in outcome.method_trace:
            notes.append(f"{cell.balancing} fell back to smote "
                         f"({outcome.method_trace['fallback_reason']})")
        val, test = val.select_columns(cols), test.select_columns(cols)
        pool = train_pool(balanced, cfg.pool_size,
                          stable_seed(cfg.master_seed, cell.dataset, cell.repeat, "pool"))
        rset = build_rashomon_set(pool, val, cfg.epsilon, cfg.loss)
        pm = prediction_matrix(rset, test.X, obs_ids=test.row_ids)
        ref_scores = pool[rset.reference_index].predict_scores(test.X)
        n0, n1 = balanced.class_counts
        rec.update({
            "n_rashomon_members": len(rset.member_indices),
            "auc_reference": roc_auc(test.y, ref_scores),
            "discrepancy": discrepancy(pm, cfg.include_reference),
            "obscurity": obscurity(pm, cfg.include_reference),
            "performance_gain_vs_original": None,
            "complexity_cluster": None,
            "reference_index": rset.reference_index,
            "member_indices": list(rset.member_indices),
            "pool_losses": [float(v) for v in rset.losses],
            "members_by_epsilon": {repr(e): len(rset.members_at(e))
                                   for e in cfg.epsilon_grid},
            "n_features_used": len(cols),
            "features_used": [balanced.feature_names[j] for j in range(balanced.p)],
            "n_train": int(fit.n), "n_train_balanced": int(balanced.n),
            "class_counts_balanced": [int(n0), int(n1)],
            "ir_balanced": class_stats(balanced).ir,
            "balance_trace": {k: v for k, v in outcome.method_trace.items()
                              if isinstance(v, (int, float, str))},
        })
    except Exception as exc:  # a failing cell must not abort the grid
        rec.update({"status": "error", "error": f"{type(exc).__name__}: {exc}"})
        for f in METRIC_FIELDS:
            rec.setdefault(f, None)
    rec["notes"] = notes
    rec["wall_time"] = time.perf_counter() - t0
    return rec


def _profiles(cfg: ExperimentConfig, datasets: dict) -> dict:
    profiles = []
    for entry in cfg.datasets:
        ds = datasets.get(entry.name)
        if ds is None:
            continue
        logger.info("complexity profile for %s", entry.name)
        profiles.append(complexity_profile(ds, seed=stable_seed(cfg.master_seed, entry.name,
                                                                "complexity")))
    if not profiles:
        return {}
    os.makedirs(cfg.output_dir, exist_ok=True)
    write_profiles_csv(profiles, os.path.join(cfg.output_dir, "profiles.csv"))
    with open(os.path.join(cfg.output_dir, "profiles.json"), "w") as fh:
        json.dump([p.to_dict() for p in profiles], fh, indent=1)
    k = min(cfg.cluster_k, len(profiles))
    clusters = cluster_datasets(profiles, k=k, seed=cfg.master_seed)
    with open(os.path.join(cfg.output_dir, "clusters.json"), "w") as fh:
        json.dump({"k": k, "assignment": clusters.assignment, "inertia": clusters.inertia},
                  fh, indent=1)
    return clusters.assignment


def _worker(args):
    cfg, cell = args
    return run_cell(cfg, cell)


def run_experiment(cfg: ExperimentConfig, workers: int = None, resume: bool = False,
                   progress=None) -> RunSummary:
    """Run every grid cell and write ``results.jsonl`` under ``cfg.output_dir``.

    Parameters
    ----------
    workers : int, optional
        Process count (defaults to ``cfg.workers``). Output is identical for
        any value.
    resume : bool
        Keep records already present in the results file and run only the
        missing cells.
    progress : callable, optional
        Called with each finished record.
    """
    workers = int(workers or cfg.workers)
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = os.path.join(cfg.output_dir, RESULTS_FILE)
    done = {}
    if resume and os.path.exists(path):
        for rec in load_jsonl(path):
            done[(rec["dataset"], rec["balancing"], rec["filtering"], rec["repeat"])] = rec
    datasets, load_errors = {}, {}
    for entry in cfg.datasets:
        try:
            datasets[entry.name] = _load(entry)
        except Exception as exc:
            load_errors[entry.name] = f"{type(exc).__name__}: {exc}"
    clusters = _profiles(cfg, datasets) if cfg.complexity else {}

    cells = grid_cells(cfg)
    todo = [c for c in cells if c.key not in done]
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            fresh = list(ex.map(_worker, [(cfg, c) for c in todo]))
    else:
        fresh = []
        for c in todo:
            if c.dataset in load_errors:
                rec = run_cell(cfg, c)
            else:
                rec = run_cell(cfg, c, datasets[c.dataset])
            fresh.append(rec)
            if progress:
                progress(rec)
    by_key = dict(done)
    by_key.update({c.key: r for c, r in zip(todo, fresh)})

    baselines = {}
    n_failed = 0
    with open(path, "w") as fh:
        for c in cells:
            rec = by_key[c.key]
            if c.balancing == "none" and c.filtering == "none":
                baselines[(c.dataset, c.repeat)] = rec
            base = baselines.get((c.dataset, c.repeat))
            if rec["status"] == "ok":
                if base is not None and base["status"] == "ok":
                    rec["performance_gain_vs_original"] = performance_gain(
                        rec["auc_reference"], base["auc_reference"])
                rec["complexity_cluster"] = clusters.get(c.dataset)
            else:
                n_failed += 1
            fh.write(json.dumps(rec) + "\n")
    return RunSummary(path=path, n_records=len(cells), n_failed=n_failed,
                      n_skipped=len(cells) - len(todo))


def load_jsonl(path) -> list:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def metric_view(records) -> list:
    """Records reduced to their deterministic fields (no wall_time)."""
    return [{k: v for k, v in r.items() if k != "wall_time"} for r in records]
