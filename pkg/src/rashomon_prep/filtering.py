"""Filter-type feature selection with FDR control.

Two test families score each feature against the binary label: the
point-biserial (Pearson) correlation test and the Wilcoxon rank-sum test.
Benjamini-Hochberg adjustment is applied within each family and the final
selection is the correlation set, the significance set, or their
intersection.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy import stats as st
from scipy.stats import rankdata

from .errors import ConstantFeature, EmptyGroup, NoFeaturesSelected
from .tabular import Dataset

MODES = ("none", "cor", "sig", "intersect")
_MODE_ALIASES = {
    "none": "none", "correlationonly": "cor", "cor": "cor", "correlation": "cor",
    "significanceonly": "sig", "sig": "sig", "significance": "sig",
    "intersection": "intersect", "intersect": "intersect",
}

EXACT_LIMIT = 20


def normalize_mode(mode: str) -> str:
    key = str(mode).strip().lower().replace("_", "").replace("-", "")
    if key not in _MODE_ALIASES:
        raise ValueError(f"unknown filter mode {mode!r}; choose from {', '.join(MODES)}")
    return _MODE_ALIASES[key]


@dataclass(frozen=True)
class FilterSpec:
    alpha: float = 0.05
    mode: str = "intersect"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        object.__setattr__(self, "mode", normalize_mode(self.mode))


@dataclass(frozen=True)
class FeatureTestRecord:
    feature_index: int
    feature_name: str
    r: float
    p_r: float
    p_r_adj: float
    w_stat: float
    p_sig: float
    p_sig_adj: float
    in_s_cor: bool
    in_s_sig: bool
    constant: bool = False


@dataclass(frozen=True)
class SelectedFeatureSet:
    records: tuple
    selected: frozenset
    mode: str = "intersect"
    alpha: float = 0.05

    @property
    def s_cor(self) -> frozenset:
        return frozenset(r.feature_index for r in self.records if r.in_s_cor)

    @property
    def s_sig(self) -> frozenset:
        return frozenset(r.feature_index for r in self.records if r.in_s_sig)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(FeatureTestRecord.__dataclass_fields__)
                                    + ["selected"])
            writer.writeheader()
            for rec in self.records:
                row = asdict(rec)
                row["selected"] = rec.feature_index in self.selected
                writer.writerow(row)


def pearson_test(x, y) -> tuple:
    """Pearson (point-biserial for binary y) correlation and two-sided p.

    p is taken from t = r sqrt((n-2)/(1-r^2)) against Student-t with n-2
    degrees of freedom.

    Raises
    ------
    ConstantFeature
        If ``x`` (or ``y``) has zero variance.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 3 or y.size != n:
        raise ValueError("pearson_test needs two equal-length vectors with n >= 3")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ConstantFeature("zero variance input")
    r = float(np.clip((dx @ dy) / np.sqrt(sxx * syy), -1.0, 1.0))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * np.sqrt((n - 2) / (1 - r * r))
    p = float(2 * st.t.sf(abs(t), n - 2))
    return r, min(1.0, p)


@lru_cache(maxsize=256)
def _rank_sum_null(n0: int, n1: int) -> np.ndarray:
    """Counts of subsets of size n1 from ranks 1..n by rank sum."""
    n = n0 + n1
    max_sum = n1 * (2 * n - n1 + 1) // 2
    # ways[j][s]: subsets of size j with sum s, built rank by rank
    ways = np.zeros((n1 + 1, max_sum + 1), dtype=np.float64)
    ways[0, 0] = 1
    for rank in range(1, n + 1):
        for j in range(min(rank, n1), 0, -1):
            ways[j, rank:] += ways[j - 1, :max_sum + 1 - rank]
    return ways[n1]


def wilcoxon_rank_sum(x0, x1) -> tuple:
    """Two-sided Wilcoxon rank-sum test.

    Returns
    -------
    w_stat : float
        Sum of the mid-ranks of ``x1`` in the pooled sample.
    p : float
        Exact p from the permutation distribution when ``n0 + n1 <= 20`` and
        there are no ties; otherwise the normal approximation with tie and
        continuity corrections.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    x1 = np.asarray(x1, dtype=float).ravel()
    n0, n1 = x0.size, x1.size
    if n0 == 0 or n1 == 0:
        raise EmptyGroup("both groups must be nonempty")
    pooled = np.concatenate([x0, x1])
    ranks = rankdata(pooled)
    w = float(ranks[n0:].sum())
    n = n0 + n1
    ties = np.unique(pooled, return_counts=True)[1]
    if n <= EXACT_LIMIT and (ties == 1).all():
        counts = _rank_sum_null(n0, n1)
        total = counts.sum()
        w_int = int(round(w))
        lower = counts[:w_int + 1].sum() / total
        upper = counts[w_int:].sum() / total
        return w, float(min(1.0, 2 * min(lower, upper)))
    mu = n1 * (n + 1) / 2.0
    var = n0 * n1 / 12.0 * ((n + 1) - (ties ** 3 - ties).sum() / (n * (n - 1)))
    if var <= 0:
        return w, 1.0
    z = max(abs(w - mu) - 0.5, 0.0) / np.sqrt(var)
    return w, float(min(1.0, 2 * st.norm.sf(z)))


def bh_adjust(p_values) -> np.ndarray:
    """Benjamini-Hochberg step-up adjusted p-values in input order."""
    p = np.asarray(p_values, dtype=float)
    m = p.size
    if m == 0:
        return p.copy()
    if ((p < 0) | (p > 1)).any():
        raise ValueError("p-values must lie in [0, 1]")
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adj = np.minimum.accumulate(scaled[::-1])[::-1]
    out = np.empty(m)
    out[order] = np.minimum(adj, 1.0)
    return out


def select_features(ds: Dataset, spec: FilterSpec = FilterSpec()) -> SelectedFeatureSet:
    """Score every feature with both test families and select per ``spec.mode``.

    Raises
    ------
    NoFeaturesSelected
        When the selection is empty.
    """
    y = ds.y
    p = ds.p
    r = np.zeros(p)
    p_r = np.ones(p)
    w = np.zeros(p)
    p_sig = np.ones(p)
    constant = np.zeros(p, dtype=bool)
    for j in range(p):
        x = ds.X[:, j]
        try:
            r[j], p_r[j] = pearson_test(x, y)
        except ConstantFeature:
            constant[j] = True
        w[j], p_sig[j] = wilcoxon_rank_sum(x[y == 0], x[y == 1])
        if constant[j]:
            p_sig[j] = 1.0
    p_r_adj = bh_adjust(p_r)
    p_sig_adj = bh_adjust(p_sig)
    in_cor = (p_r_adj < spec.alpha) & ~constant
    in_sig = (p_sig_adj < spec.alpha) & ~constant
    records = tuple(
        FeatureTestRecord(j, ds.feature_names[j], float(r[j]), float(p_r[j]),
                          float(p_r_adj[j]), float(w[j]), float(p_sig[j]),
                          float(p_sig_adj[j]), bool(in_cor[j]), bool(in_sig[j]),
                          bool(constant[j]))
        for j in range(p))
    if spec.mode == "none":
        chosen = np.ones(p, dtype=bool)
    elif spec.mode == "cor":
        chosen = in_cor
    elif spec.mode == "sig":
        chosen = in_sig
    else:
        chosen = in_cor & in_sig
    selected = frozenset(int(j) for j in np.flatnonzero(chosen))
    result = SelectedFeatureSet(records=records, selected=selected, mode=spec.mode,
                                alpha=spec.alpha)
    if not selected:
        exc = NoFeaturesSelected(f"{ds.name}: mode {spec.mode!r} selected no features")
        exc.result = result
        raise exc
    return result
