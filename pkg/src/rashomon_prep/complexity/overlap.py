"""Feature-overlap measures F1, F1v, F2, F3, F4."""

from __future__ import annotations

import numpy as np

from ..errors import SingleClass
from ..tabular import Dataset


def _classes(X, y):
    a, b = X[y == 0], X[y == 1]
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise SingleClass("overlap measures need both classes")
    return a, b


def fisher_ratios(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-feature between/within scatter ratio; NaN where both are zero."""
    mu = X.mean(axis=0)
    between = np.zeros(X.shape[1])
    within = np.zeros(X.shape[1])
    for c in (0, 1):
        Xc = X[y == c]
        mc = Xc.mean(axis=0)
        between += Xc.shape[0] * (mc - mu) ** 2
        within += ((Xc - mc) ** 2).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return between / within


def f1_measure(X, y) -> float:
    """Mean over features of 1/(1 + Fisher ratio); degenerate features skipped."""
    ratio = fisher_ratios(X, y)
    ok = ~np.isnan(ratio)
    if not ok.any():
        return float("nan")
    return float(np.mean(1.0 / (1.0 + ratio[ok])))


def f1v_measure(X, y) -> float:
    """Directional Fisher criterion along pinv(W)(mu_0 - mu_1), as 1/(1+dF)."""
    a, b = _classes(X, y)
    n = X.shape[0]
    W = np.zeros((X.shape[1], X.shape[1]))
    for Xc in (a, b):
        if Xc.shape[0] > 1:
            W += Xc.shape[0] / n * np.atleast_2d(np.cov(Xc, rowvar=False))
    diff = a.mean(axis=0) - b.mean(axis=0)
    d = np.linalg.pinv(W) @ diff
    spread = d @ W @ d
    if spread <= 0:
        return 0.0 if np.any(diff != 0) else 1.0
    dF = (d @ diff) ** 2 / spread
    return float(1.0 / (1.0 + dF))


def _overlap_bounds(a, b):
    lo = np.maximum(a.min(axis=0), b.min(axis=0))
    hi = np.minimum(a.max(axis=0), b.max(axis=0))
    return lo, hi


def f2_measure(X, y) -> float:
    """Product over features of overlap length / range length."""
    a, b = _classes(X, y)
    lo, hi = _overlap_bounds(a, b)
    span = X.max(axis=0) - X.min(axis=0)
    ok = span > 0
    ratio = np.maximum(hi - lo, 0.0)[ok] / span[ok]
    return float(np.prod(ratio)) if ratio.size else float("nan")


def _outside_overlap(X, y):
    a, b = _classes(X, y)
    lo, hi = _overlap_bounds(a, b)
    return (X < lo) | (X > hi)


def f3_measure(X, y) -> float:
    """Smallest per-feature fraction of points inside the class-overlap interval."""
    outside = _outside_overlap(X, y)
    return float(1.0 - outside.mean(axis=0).max())


def f4_measure(X, y) -> float:
    """Fraction of points left in the overlap region after greedily peeling
    off, feature by feature, the points each feature alone separates."""
    n = X.shape[0]
    rows = np.arange(n)
    feats = list(range(X.shape[1]))
    while feats:
        Xr, yr = X[np.ix_(rows, feats)], y[rows]
        if np.unique(yr).size < 2:
            break
        outside = _outside_overlap(Xr, yr)
        counts = outside.sum(axis=0)
        best = int(np.argmax(counts))
        if counts[best] == 0:
            break
        rows = rows[~outside[:, best]]
        del feats[best]
        if rows.size == 0:
            break
    return float(rows.size / n)


def overlapping_metrics(ds: Dataset) -> tuple:
    """Return ``(f1, f1v, f2, f3, f4)``."""
    X, y = ds.X, ds.y
    _classes(X, y)
    return (f1_measure(X, y), f1v_measure(X, y), f2_measure(X, y), f3_measure(X, y),
            f4_measure(X, y))
