"""Neighbourhood measures N1, N2, N3, N4, T1 and LSC.

All distances are Euclidean on min-max scaled features and are computed in
row blocks, so memory stays linear in n apart from the T1 sphere lists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..errors import SingleClass, TooLarge
from ..tabular import Dataset, pairwise_chunks
from .linearity import interpolate_within_classes, minmax_scale

DEFAULT_CUTOFF = 15000


@dataclass(frozen=True)
class NeighborhoodResult:
    n1: float
    n2: float
    n3: float
    n4: float
    t1: float
    lsc: float
    mst_weight: float
    n_spheres: int

    def as_tuple(self) -> tuple:
        return self.n1, self.n2, self.n3, self.n4, self.t1, self.lsc


def prim_mst(Z: np.ndarray) -> tuple:
    """Exact Euclidean minimum spanning tree by dense Prim.

    Returns
    -------
    parent : ndarray of int
        ``parent[v]`` is the tree neighbour through which v joined (-1 for the root).
    weight : ndarray of float
        Length of the edge (v, parent[v]).
    """
    n = Z.shape[0]
    parent = np.full(n, -1, dtype=np.int64)
    best = np.full(n, np.inf)
    done = np.zeros(n, dtype=bool)
    weight = np.zeros(n)
    v = 0
    for _ in range(n):
        done[v] = True
        d = np.sqrt(((Z - Z[v]) ** 2).sum(axis=1))
        closer = (~done) & (d < best)
        best[closer] = d[closer]
        parent[closer] = v
        cand = np.where(done, np.inf, best)
        nxt = int(np.argmin(cand))
        if done[nxt]:
            break
        weight[nxt] = best[nxt]
        v = nxt
    return parent, weight


def _sphere_radii(enemy: np.ndarray, enemy_dist: np.ndarray) -> np.ndarray:
    """Radius of each point's enemy-bounded hypersphere.

    Two mutual nearest enemies split their distance in half; otherwise a
    point's sphere stops where its nearest enemy's sphere begins.
    """
    n = enemy.size
    r = np.full(n, np.nan)
    for start in range(n):
        chain = []
        on_chain = set()
        i = start
        while np.isnan(r[i]):
            j = enemy[i]
            if enemy[j] == i or j in on_chain:
                r[i] = enemy_dist[i] / 2.0
                break
            chain.append(i)
            on_chain.add(i)
            i = j
        for i in reversed(chain):
            if np.isnan(r[i]):
                r[i] = max(enemy_dist[i] - r[enemy[i]], 0.0)
    return r


def _greedy_cover(A: sparse.csr_matrix) -> np.ndarray:
    """Greedy sphere selection; returns the covered count of each chosen sphere."""
    n = A.shape[0]
    alive = np.ones(n, dtype=bool)
    AT = A.tocsc()
    cover = np.asarray(A.sum(axis=1)).ravel().astype(np.int64)
    counts = []
    while alive.any():
        c = np.where(alive, cover, -1)
        i = int(np.argmax(c))
        row = A.indices[A.indptr[i]:A.indptr[i + 1]]
        members = row[alive[row]]
        cnt = members.size
        gone = np.union1d(members, [i])
        gone = gone[alive[gone]]
        alive[gone] = False
        counts.append(cnt if alive.any() else 1)
        # spheres containing a removed point lose one covered point each
        for j in gone:
            holders = AT.indices[AT.indptr[j]:AT.indptr[j + 1]]
            cover[holders] -= 1
    return np.asarray(counts)


def neighborhood_metrics(ds: Dataset, seed: int = 0, cutoff: int = DEFAULT_CUTOFF,
                         subsample: bool = False) -> NeighborhoodResult:
    """Return the neighbourhood measures for ``ds``.

    Parameters
    ----------
    ds : Dataset
    seed : int
        Seeds the N4 interpolants (and the optional subsample).
    cutoff : int
        Larger datasets raise ``TooLarge`` unless ``subsample`` is set, in
        which case ``cutoff`` rows are drawn uniformly without replacement.
    """
    n0, n1_ = ds.class_counts
    if n0 == 0 or n1_ == 0:
        raise SingleClass(f"{ds.name}: neighbourhood measures need both classes")
    rng = np.random.default_rng(seed)
    X, y = ds.X, ds.y
    if X.shape[0] > cutoff:
        if not subsample:
            raise TooLarge(f"{ds.name}: n={X.shape[0]} exceeds cutoff {cutoff}")
        rows = np.sort(rng.choice(X.shape[0], size=cutoff, replace=False))
        X, y = X[rows], y[rows]
    Z, _, _ = minmax_scale(X)
    n = Z.shape[0]

    same_d = np.full(n, np.inf)
    enemy_d = np.full(n, np.inf)
    enemy = np.zeros(n, dtype=np.int64)
    nn = np.zeros(n, dtype=np.int64)
    for start, D in pairwise_chunks(Z, Z):
        rows = np.arange(start, start + D.shape[0])
        D[np.arange(D.shape[0]), rows] = np.inf
        nn[rows] = np.argmin(D, axis=1)
        is_same = y[rows][:, None] == y[None, :]
        Ds = np.where(is_same, D, np.inf)
        De = np.where(is_same, np.inf, D)
        same_d[rows] = Ds.min(axis=1)
        enemy[rows] = np.argmin(De, axis=1)
        enemy_d[rows] = De[np.arange(D.shape[0]), enemy[rows]]

    n3 = float((y[nn] != y).mean())
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = same_d / (same_d + enemy_d)
    frac = np.where(np.isfinite(frac), frac, np.where(np.isinf(same_d), 1.0, 0.5))
    n2 = float(frac.mean())

    radii = _sphere_radii(enemy, enemy_d)
    ls_total = 0
    ind, ptr = [], [0]
    for start, D in pairwise_chunks(Z, Z):
        rows = np.arange(start, start + D.shape[0])
        ls_total += int((D < enemy_d[rows][:, None]).sum())
        inside = D < radii[rows][:, None]
        for row in inside:
            hit = np.flatnonzero(row)
            ind.append(hit)
            ptr.append(ptr[-1] + hit.size)
    A = sparse.csr_matrix((np.ones(ptr[-1], dtype=np.int32),
                           np.concatenate(ind) if ind else np.empty(0, dtype=np.int64),
                           np.asarray(ptr)), shape=(n, n))
    counts = _greedy_cover(A)
    t1 = float(np.mean(counts / n))
    lsc = 1.0 - ls_total / n ** 2

    parent, weight = prim_mst(Z)
    tree = parent >= 0
    cross = tree & (y != y[np.maximum(parent, 0)])
    border = np.zeros(n, dtype=bool)
    border[np.flatnonzero(cross)] = True
    border[parent[cross]] = True
    n1 = float(border.mean())

    Xi, yi = interpolate_within_classes(Z, y, rng)
    hits = np.empty(Xi.shape[0], dtype=np.int64)
    for start, D in pairwise_chunks(Xi, Z):
        hits[start:start + D.shape[0]] = np.argmin(D, axis=1)
    n4 = float((y[hits] != yi).mean())

    return NeighborhoodResult(n1=n1, n2=n2, n3=n3, n4=n4, t1=t1, lsc=float(lsc),
                              mst_weight=float(weight.sum()), n_spheres=int(counts.size))
