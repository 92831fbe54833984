"""Post-condition checks on resampling outcomes."""

import numpy as np


def within_parent_box(out, train, tol=1e-12):
    """Every added row lies in the bounding box of its recorded parents."""
    added = out.data.X[len(out.data.X) - out.parents.shape[0]:]
    for row, parents in zip(added, out.parents):
        P = train.X[parents[parents >= 0]]
        if ((row < P.min(axis=0) - tol) | (row > P.max(axis=0) + tol)).any():
            return False
    return True


def ir_within_one_sample(out, target=1.0):
    n0, n1 = out.data.class_counts
    n_min, n_maj = min(n0, n1), max(n0, n1)
    # one sample more or less on either side of the target
    return (abs(n_maj / n_min - target) <= max(abs(n_maj / (n_min + 1) - n_maj / n_min),
                                               abs((n_maj + 1) / n_min - n_maj / n_min))
            + 1e-12)


def same_outcome(a, b):
    return (np.array_equal(a.data.X, b.data.X) and np.array_equal(a.data.y, b.data.y)
            and np.array_equal(a.parents, b.parents)
            and np.array_equal(a.removed_ids, b.removed_ids)
            and list(a.provenance) == list(b.provenance))
