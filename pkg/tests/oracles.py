"""Independent reference implementations used as test oracles.

Each one is written from the textbook definition by brute force, without
sharing code with the package.
"""

import itertools
from fractions import Fraction

import numpy as np
from scipy.stats import rankdata


def wilcoxon_exact_enumeration(x0, x1):
    """Two-sided exact p by enumerating every assignment of pooled ranks."""
    pooled = np.r_[x0, x1]
    ranks = rankdata(pooled)
    n0, n1 = len(x0), len(x1)
    w = ranks[n0:].sum()
    sums = np.array([ranks[list(c)].sum()
                     for c in itertools.combinations(range(n0 + n1), n1)])
    lower = (sums <= w + 1e-9).mean()
    upper = (sums >= w - 1e-9).mean()
    return min(1.0, 2 * min(lower, upper))


def wilcoxon_permutation(x0, x1, n_perm=100_000, seed=0):
    """Monte Carlo two-sided p of the rank sum of ``x1``."""
    ranks = rankdata(np.r_[x0, x1])
    n0, n1 = len(x0), len(x1)
    mu = n1 * (n0 + n1 + 1) / 2
    obs = abs(ranks[n0:].sum() - mu)
    rng = np.random.default_rng(seed)
    hits = 0
    for start in range(0, n_perm, 10_000):
        m = min(10_000, n_perm - start)
        perm = rng.permuted(np.tile(ranks, (m, 1)), axis=1)
        hits += int((np.abs(perm[:, :n1].sum(axis=1) - mu) >= obs - 1e-9).sum())
    return hits / n_perm


def dunn_permutation(groups, n_perm=100_000, seed=0):
    """Monte Carlo two-sided p of every |mean-rank difference| under random
    relabelling of the pooled sample."""
    sizes = [len(g) for g in groups]
    ranks = rankdata(np.concatenate(groups))
    bounds = np.cumsum([0] + sizes)
    t = len(groups)

    def mean_ranks(R):
        return np.stack([R[:, bounds[i]:bounds[i + 1]].mean(axis=1) for i in range(t)], axis=1)

    obs = mean_ranks(ranks[None, :])[0]
    rng = np.random.default_rng(seed)
    hits = np.zeros((t, t))
    for start in range(0, n_perm, 10_000):
        m = min(10_000, n_perm - start)
        M = mean_ranks(rng.permuted(np.tile(ranks, (m, 1)), axis=1))
        for i in range(t):
            for j in range(t):
                d = abs(obs[i] - obs[j])
                hits[i, j] += int((np.abs(M[:, i] - M[:, j]) >= d - 1e-9).sum())
    return hits / n_perm


def pearson_one_pass(x, y):
    """Welford-style single pass covariance and variances."""
    n = 0
    mx = my = cxy = cxx = cyy = 0.0
    for a, b in zip(map(float, x), map(float, y)):
        n += 1
        dx = a - mx
        mx += dx / n
        dy = b - my
        my += dy / n
        cxy += dx * (b - my)
        cxx += dx * (a - mx)
        cyy += dy * (b - my)
    return cxy / np.sqrt(cxx * cyy)


def bh_bruteforce(p):
    """adjusted_k = min over j with rank_j >= rank_k of p_(j) m / j."""
    p = list(p)
    m = len(p)
    order = sorted(range(m), key=lambda i: (p[i], i))
    rank = {i: r + 1 for r, i in enumerate(order)}
    out = []
    for i in range(m):
        out.append(min(1.0, min(p[j] * m / rank[j] for j in range(m) if rank[j] >= rank[i])))
    return out


def auc_pairwise(y, s):
    pos = [v for v, t in zip(s, y) if t == 1]
    neg = [v for v, t in zip(s, y) if t == 0]
    total = 0.0
    for a in pos:
        for b in neg:
            total += 1.0 if a > b else 0.5 if a == b else 0.0
    return total / (len(pos) * len(neg))


def disagreement_double_loop(P, ref):
    """(discrepancy, obscurity) over non-reference columns by explicit loops.

    Fractions are accumulated exactly and rounded once at the end.
    """
    n, m = P.shape
    others = [j for j in range(m) if j != ref]
    if not others:
        return 0.0, 0.0
    per_model = []
    for j in others:
        count = 0
        for i in range(n):
            if P[i, j] != P[i, ref]:
                count += 1
        per_model.append(Fraction(count, n))
    per_obs = []
    for i in range(n):
        count = 0
        for j in others:
            if P[i, j] != P[i, ref]:
                count += 1
        per_obs.append(Fraction(count, len(others)))
    return float(max(per_model)), float(sum(per_obs) / n)


def prim_bruteforce(Z):
    """O(n^3) Prim: total weight of the Euclidean minimum spanning tree."""
    n = len(Z)
    in_tree = {0}
    total = 0.0
    while len(in_tree) < n:
        best = None
        for i in in_tree:
            for j in range(n):
                if j in in_tree:
                    continue
                d = float(np.sqrt(((Z[i] - Z[j]) ** 2).sum()))
                if best is None or d < best[0]:
                    best = (d, j)
        total += best[0]
        in_tree.add(best[1])
    return total


def loo_1nn_error(Z, y):
    n = len(Z)
    wrong = 0
    for i in range(n):
        best_d, best_j = np.inf, -1
        for j in range(n):
            if j == i:
                continue
            d = float(((Z[i] - Z[j]) ** 2).sum())
            if d < best_d:
                best_d, best_j = d, j
        wrong += y[best_j] != y[i]
    return wrong / n
