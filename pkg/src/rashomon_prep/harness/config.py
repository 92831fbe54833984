"""Experiment configuration (YAML)."""

from __future__ import annotations

import difflib
import os
from dataclasses import dataclass, field

import yaml

from ..errors import ConfigInvalid, MissingDataset, UnknownKey, UnknownMethod
from ..filtering import normalize_mode
from ..rashomon.metrics import LOSS_KINDS
from ..resampling import normalize_method

PIPELINE_ORDERS = ("filter_first", "balance_first")


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    path: str
    target: str
    positive: str = None
    categorical: str = "onehot"


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple
    balancing: tuple = ("none",)
    filtering: tuple = ("none",)
    epsilon: float = 0.05
    pool_size: int = 50
    target_ratio: float = 1.0
    test_fraction: float = 0.25
    master_seed: int = 0
    repeats: int = 1
    output_dir: str = "results"
    validation_fraction: float = 0.2
    alpha: float = 0.05
    k: int = 5
    loss: str = "one_minus_auc"
    pipeline_order: str = "filter_first"
    include_reference: bool = False
    epsilon_grid: tuple = (0.0, 0.025, 0.05, 0.1)
    complexity: bool = True
    cluster_k: int = 3
    workers: int = 1


TOP_KEYS = tuple(ExperimentConfig.__dataclass_fields__)
DATASET_KEYS = tuple(DatasetEntry.__dataclass_fields__)
_LOSS_ALIASES = {"auc": "one_minus_auc", "one_minus_auc": "one_minus_auc",
                 "error": "error_rate", "error_rate": "error_rate"}


def _reject_unknown(keys, allowed, where: str):
    for key in keys:
        if key not in allowed:
            close = difflib.get_close_matches(str(key), allowed, n=1)
            hint = f"; did you mean {close[0]!r}?" if close else ""
            raise UnknownKey(f"unknown key {key!r} in {where}{hint}")


def _with_none(values, normalize, what):
    out = ["none"]
    for v in values or []:
        try:
            name = normalize(v)
        except (UnknownMethod, ValueError) as exc:
            raise ConfigInvalid(f"{what}: {exc}") from exc
        if name not in out:
            out.append(name)
    return tuple(out)


def config_from_dict(raw: dict, base_dir: str = ".") -> ExperimentConfig:
    """Validate a raw mapping and fill defaults.

    ``none`` is always added as the first balancing and filtering condition
    so every dataset has its baseline cell.
    """
    if not isinstance(raw, dict):
        raise ConfigInvalid("configuration must be a mapping")
    _reject_unknown(raw, TOP_KEYS, "configuration")
    entries = raw.get("datasets")
    if not entries:
        raise MissingDataset("configuration lists no datasets")
    datasets = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise MissingDataset(f"dataset #{i} must be a mapping")
        _reject_unknown(entry, DATASET_KEYS, f"dataset #{i}")
        for req in ("path", "target"):
            if not entry.get(req):
                raise MissingDataset(f"dataset #{i} lacks {req!r}")
        path = str(entry["path"])
        if not os.path.isabs(path):
            path = os.path.normpath(os.path.join(base_dir, path))
        name = str(entry.get("name") or os.path.splitext(os.path.basename(path))[0])
        cat = entry.get("categorical", "onehot")
        if cat not in ("onehot", "ordinal"):
            raise ConfigInvalid(f"dataset {name!r}: categorical must be onehot or ordinal")
        pos = entry.get("positive")
        datasets.append(DatasetEntry(name, path, str(entry["target"]),
                                     None if pos is None else str(pos), cat))
    if len({d.name for d in datasets}) != len(datasets):
        raise ConfigInvalid("dataset names must be unique")

    vals = {k: v for k, v in raw.items() if k not in ("datasets", "balancing", "filtering")}
    cfg = ExperimentConfig(
        datasets=tuple(datasets),
        balancing=_with_none(raw.get("balancing"), normalize_method, "balancing"),
        filtering=_with_none(raw.get("filtering"), normalize_mode, "filtering"),
        **vals)
    loss = _LOSS_ALIASES.get(str(cfg.loss))
    if loss not in LOSS_KINDS:
        raise ConfigInvalid(f"loss must be one of {sorted(_LOSS_ALIASES)}")
    out_dir = cfg.output_dir
    if not os.path.isabs(out_dir):
        out_dir = os.path.normpath(os.path.join(base_dir, out_dir))
    cfg = _replace(cfg, loss=loss, output_dir=out_dir,
                   epsilon_grid=tuple(float(e) for e in cfg.epsilon_grid))
    _validate(cfg)
    return cfg


def _replace(cfg, **changes):
    d = {f: getattr(cfg, f) for f in TOP_KEYS}
    d.update(changes)
    return ExperimentConfig(**d)


def _validate(cfg: ExperimentConfig):
    checks = [
        (cfg.epsilon >= 0, "epsilon must be >= 0"),
        (all(e >= 0 for e in cfg.epsilon_grid), "epsilon_grid values must be >= 0"),
        (int(cfg.repeats) >= 1, "repeats must be >= 1"),
        (int(cfg.pool_size) >= 2, "pool_size must be >= 2"),
        (cfg.target_ratio >= 1, "target_ratio must be >= 1"),
        (0 < cfg.test_fraction < 1, "test_fraction must lie in (0, 1)"),
        (0 < cfg.validation_fraction < 1, "validation_fraction must lie in (0, 1)"),
        (0 < cfg.alpha < 1, "alpha must lie in (0, 1)"),
        (int(cfg.k) >= 1, "k must be >= 1"),
        (cfg.pipeline_order in PIPELINE_ORDERS,
         f"pipeline_order must be one of {PIPELINE_ORDERS}"),
        (int(cfg.cluster_k) >= 1, "cluster_k must be >= 1"),
        (int(cfg.workers) >= 1, "workers must be >= 1"),
    ]
    for ok, msg in checks:
        if not ok:
            raise ConfigInvalid(msg)


def parse_config(path) -> ExperimentConfig:
    """Load and validate a YAML experiment configuration.

    Relative dataset paths and ``output_dir`` resolve against the config
    file's directory.
    """
    if not os.path.exists(path):
        raise ConfigInvalid(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigInvalid(f"cannot parse {path}: {exc}") from exc
    return config_from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))
