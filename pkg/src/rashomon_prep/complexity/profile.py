"""Seventeen-measure complexity profile of a dataset."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import SingleClass, TooLarge
from ..tabular import Dataset
from .dimensionality import dimensionality_metrics
from .linearity import linearity_metrics
from .neighborhood import DEFAULT_CUTOFF, neighborhood_metrics
from .overlap import fisher_ratios, overlapping_metrics

MEASURES = ("t2", "t3", "t4", "l1", "l2", "l3", "f1", "f1v", "f2", "f3", "f4",
            "n1", "n2", "n3", "n4", "t1", "lsc")
FAMILIES = {
    "dimensionality": ("t2", "t3", "t4"),
    "linearity": ("l1", "l2", "l3"),
    "overlap": ("f1", "f1v", "f2", "f3", "f4"),
    "neighborhood": ("n1", "n2", "n3", "n4", "t1", "lsc"),
}


@dataclass
class ComplexityProfile:
    """Complexity measures of one dataset; NA values are stored as NaN and
    the reason is kept in ``na_reasons``."""

    dataset_name: str
    values: dict
    na_reasons: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __getattr__(self, name):
        if name in MEASURES:
            return self.values[name]
        raise AttributeError(name)

    def is_na(self, name: str) -> bool:
        return not math.isfinite(self.values[name])

    def vector(self) -> np.ndarray:
        return np.array([self.values[m] for m in MEASURES], dtype=float)

    def to_dict(self) -> dict:
        return {"dataset": self.dataset_name,
                **{m: (None if self.is_na(m) else self.values[m]) for m in MEASURES},
                "na_reasons": dict(self.na_reasons), "extras": dict(self.extras)}

    @classmethod
    def from_dict(cls, d: dict) -> "ComplexityProfile":
        values = {m: (float("nan") if d.get(m) is None else float(d[m])) for m in MEASURES}
        return cls(d.get("dataset", d.get("dataset_name", "?")), values,
                   dict(d.get("na_reasons", {})), dict(d.get("extras", {})))


def complexity_profile(ds: Dataset, seed: int = 0, cutoff: int = DEFAULT_CUTOFF,
                       subsample: bool = False) -> ComplexityProfile:
    """Compute all seventeen measures; failures of a family become NA."""
    values = {m: float("nan") for m in MEASURES}
    reasons, extras = {}, {}

    def run(family, fn):
        try:
            out = fn()
        except (SingleClass, TooLarge, np.linalg.LinAlgError) as exc:
            for m in FAMILIES[family]:
                reasons[m] = f"{type(exc).__name__}: {exc}"
            return
        for m, v in zip(FAMILIES[family], out):
            values[m] = float(v)
            if not math.isfinite(values[m]):
                reasons[m] = "undefined on this dataset"

    run("dimensionality", lambda: dimensionality_metrics(ds))
    run("linearity", lambda: linearity_metrics(ds, seed=seed))
    run("overlap", lambda: overlapping_metrics(ds))

    def hood():
        res = neighborhood_metrics(ds, seed=seed, cutoff=cutoff, subsample=subsample)
        extras["mst_weight"] = res.mst_weight
        extras["t1_sphere_fraction"] = res.n_spheres / min(ds.n, cutoff)
        return res.as_tuple()

    run("neighborhood", hood)
    if "f1" not in reasons:
        ratios = fisher_ratios(ds.X, ds.y)
        if np.isfinite(ratios).any() or np.isinf(ratios).any():
            extras["fisher_max"] = float(np.nanmax(ratios))
    return ComplexityProfile(ds.name, values, reasons, extras)


def write_profiles_csv(profiles, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", *MEASURES])
        for prof in profiles:
            writer.writerow([prof.dataset_name] + [
                "NA" if prof.is_na(m) else repr(prof.values[m]) for m in MEASURES])


def read_profiles(path) -> list:
    """Read profiles from a CSV written by :func:`write_profiles_csv` or a
    JSON file holding one profile dict or a list of them."""
    path = str(path)
    if path.endswith(".json"):
        with open(path) as fh:
            data = json.load(fh)
        data = data if isinstance(data, list) else [data]
        return [ComplexityProfile.from_dict(d) for d in data]
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            vals = {m: (float("nan") if row.get(m) in (None, "", "NA") else float(row[m]))
                    for m in MEASURES}
            out.append(ComplexityProfile(row["dataset"], vals,
                                         {m: "NA in file" for m in MEASURES
                                          if not math.isfinite(vals[m])}))
    return out
