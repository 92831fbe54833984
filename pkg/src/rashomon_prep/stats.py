"""Rank-based tests for comparing disagreement metrics across conditions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as st
from scipy.stats import rankdata

from .errors import ConstantInput, IncompleteBlocks, LengthMismatch, TooFewGroups
from .filtering import bh_adjust


@dataclass(frozen=True)
class TestReport:
    method: str
    statistic: float
    df: int
    p: float
    groups: tuple = ()

    __test__ = False  # not a pytest class


@dataclass(frozen=True)
class PosthocReport:
    """Pairwise Dunn statistics as symmetric ``k x k`` matrices.

    ``z[i, j]`` is positive when group i has the larger mean rank.
    """

    groups: tuple
    z: np.ndarray
    p: np.ndarray
    p_raw: np.ndarray
    adjust: str = "bh"

    def pair(self, a, b) -> tuple:
        i, j = self.groups.index(a), self.groups.index(b)
        return float(self.z[i, j]), float(self.p[i, j])


@dataclass(frozen=True)
class CorrelationReport:
    rho: float
    p: float
    n: int


def _tie_term(values) -> float:
    counts = np.unique(values, return_counts=True)[1].astype(float)
    return float((counts ** 3 - counts).sum())


def _clean_groups(groups):
    arrs = [np.asarray(g, dtype=float).ravel() for g in groups]
    if len(arrs) < 2:
        raise TooFewGroups("at least two groups are required")
    if any(a.size == 0 for a in arrs):
        raise TooFewGroups("every group must be nonempty")
    return arrs


def kruskal_wallis(groups, labels=None) -> TestReport:
    """Kruskal-Wallis H with tie correction; p from chi-square(k-1)."""
    arrs = _clean_groups(groups)
    pooled = np.concatenate(arrs)
    n = pooled.size
    ranks = rankdata(pooled)
    bounds = np.cumsum([0] + [a.size for a in arrs])
    h = 0.0
    for a, lo, hi in zip(arrs, bounds[:-1], bounds[1:]):
        h += ranks[lo:hi].sum() ** 2 / a.size
    h = 12.0 / (n * (n + 1)) * h - 3 * (n + 1)
    c = 1.0 - _tie_term(pooled) / (n ** 3 - n) if n > 1 else 0.0
    df = len(arrs) - 1
    if c <= 0:
        h, p = 0.0, 1.0
    else:
        h = max(h / c, 0.0)
        p = float(st.chi2.sf(h, df))
    labels = tuple(labels) if labels is not None else tuple(range(len(arrs)))
    return TestReport("kruskal_wallis", float(h), df, min(1.0, p), labels)


def friedman(blocks, labels=None) -> TestReport:
    """Friedman chi-square over a complete ``b x t`` matrix (rows are blocks).

    Within-block mid-ranks with the usual tie correction; df = t - 1.
    """
    M = np.asarray(blocks, dtype=float)
    if M.ndim != 2 or M.shape[0] < 2 or M.shape[1] < 2:
        raise IncompleteBlocks("need a b x t matrix with b >= 2 and t >= 2")
    if not np.isfinite(M).all():
        raise IncompleteBlocks("missing or non-finite cells")
    b, t = M.shape
    R = np.apply_along_axis(rankdata, 1, M)
    col = R.sum(axis=0)
    ties = sum(_tie_term(row) for row in M)
    denom = b * t * (t + 1) - ties / (t - 1)
    df = t - 1
    if denom <= 0:
        stat, p = 0.0, 1.0
    else:
        stat = 12.0 * ((col - b * (t + 1) / 2.0) ** 2).sum() / denom
        p = float(st.chi2.sf(stat, df))
    labels = tuple(labels) if labels is not None else tuple(range(t))
    return TestReport("friedman", float(stat), df, min(1.0, p), labels)


def dunn_posthoc(groups, adjust: str = "bh", labels=None) -> PosthocReport:
    """Dunn pairwise z-tests on pooled mean ranks.

    Parameters
    ----------
    groups : sequence of array_like
    adjust : {"bh", "none"}
        Multiplicity adjustment over the k(k-1)/2 pairs.
    """
    if adjust not in ("bh", "none"):
        raise ValueError("adjust must be 'bh' or 'none'")
    arrs = _clean_groups(groups)
    pooled = np.concatenate(arrs)
    n = pooled.size
    ranks = rankdata(pooled)
    bounds = np.cumsum([0] + [a.size for a in arrs])
    mean_rank = np.array([ranks[lo:hi].mean() for lo, hi in zip(bounds[:-1], bounds[1:])])
    sizes = np.array([a.size for a in arrs], dtype=float)
    var0 = n * (n + 1) / 12.0 - _tie_term(pooled) / (12.0 * (n - 1)) if n > 1 else 0.0
    k = len(arrs)
    z = np.zeros((k, k))
    p_raw = np.ones((k, k))
    pairs = list(itertools.combinations(range(k), 2))
    for i, j in pairs:
        se = np.sqrt(var0 * (1 / sizes[i] + 1 / sizes[j]))
        zij = (mean_rank[i] - mean_rank[j]) / se if se > 0 else 0.0
        z[i, j], z[j, i] = zij, -zij
        p_raw[i, j] = p_raw[j, i] = min(1.0, 2 * st.norm.sf(abs(zij)))
    p = np.ones((k, k))
    flat = np.array([p_raw[i, j] for i, j in pairs])
    adj = bh_adjust(flat) if adjust == "bh" else flat
    for (i, j), v in zip(pairs, adj):
        p[i, j] = p[j, i] = v
    labels = tuple(labels) if labels is not None else tuple(range(k))
    return PosthocReport(labels, z, p, p_raw, adjust)


def spearman_test(x, y) -> CorrelationReport:
    """Spearman rho (Pearson correlation of mid-ranks) with a t(n-2) p-value."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise LengthMismatch(f"lengths differ: {x.size} vs {y.size}")
    n = x.size
    if n < 3:
        raise ValueError("spearman_test needs n >= 3")
    rx, ry = rankdata(x), rankdata(y)
    dx, dy = rx - rx.mean(), ry - ry.mean()
    sxx, syy = dx @ dx, dy @ dy
    if sxx == 0 or syy == 0:
        raise ConstantInput("rank correlation undefined for constant input")
    rho = float(np.clip(dx @ dy / np.sqrt(sxx * syy), -1.0, 1.0))
    if abs(rho) == 1.0:
        return CorrelationReport(rho, 0.0, n)
    t = rho * np.sqrt((n - 2) / (1 - rho * rho))
    return CorrelationReport(rho, float(min(1.0, 2 * st.t.sf(abs(t), n - 2))), n)
