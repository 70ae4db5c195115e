"""Distance computation and nearest-neighbour classification over reference sets.

Distances are Euclidean over numeric attributes with nominal attributes
contributing overlap distance (0 if equal, 1 otherwise) in quadrature.
Nearest-neighbour distance ties are broken toward the lowest retained index;
k-NN vote ties are broken toward the positive class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ReferenceSet",
    "distance",
    "pairwise_distances",
    "classify_1nn",
    "classify_knn",
    "loo_predict",
    "loo_gm",
]


@dataclass(frozen=True)
class ReferenceSet:
    """Indices into a training set retained for 1-NN classification."""

    retained: np.ndarray
    method: str = ""
    seed: int | None = None

    def __post_init__(self):
        retained = np.asarray(self.retained, dtype=np.intp)
        if retained.ndim != 1 or retained.size == 0:
            raise ValueError("reference set must be a non-empty index vector")
        if len(np.unique(retained)) != retained.size:
            raise ValueError("reference set indices must be unique")
        if np.any(retained < 0):
            raise ValueError("negative index in reference set")
        object.__setattr__(self, "retained", np.sort(retained))

    def __len__(self):
        return self.retained.size


def pairwise_distances(A, B, nominal_mask=None) -> np.ndarray:
    """Distance matrix between the rows of ``A`` and the rows of ``B``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ValueError("dimension mismatch")
    if nominal_mask is None:
        nominal_mask = np.zeros(A.shape[1], dtype=bool)
    else:
        nominal_mask = np.asarray(nominal_mask, dtype=bool)
    num = ~nominal_mask
    An, Bn = A[:, num], B[:, num]
    sq = (
        np.sum(An * An, axis=1)[:, None]
        + np.sum(Bn * Bn, axis=1)[None, :]
        - 2.0 * An @ Bn.T
    )
    np.maximum(sq, 0.0, out=sq)
    if nominal_mask.any():
        Ac, Bc = A[:, nominal_mask], B[:, nominal_mask]
        sq += np.sum(Ac[:, None, :] != Bc[None, :, :], axis=2)
    return np.sqrt(sq)


def distance(a, b, nominal_mask=None) -> float:
    """Distance between two value vectors."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError("length mismatch")
    return float(pairwise_distances(a[None, :], b[None, :], nominal_mask)[0, 0])


def _ref_arrays(X, y, ref):
    retained = ref.retained if isinstance(ref, ReferenceSet) else np.sort(
        np.asarray(ref, dtype=np.intp)
    )
    if retained.size == 0:
        raise ValueError("empty reference set")
    return retained, X[retained], y[retained]


def classify_1nn(X, y, ref, queries, nominal_mask=None) -> np.ndarray:
    """Label each query row by its nearest retained instance.

    ``ref`` is a :class:`ReferenceSet` or an index array into ``X``/``y``.
    Ties go to the lowest retained index.
    """
    retained, Xr, yr = _ref_arrays(X, y, ref)
    D = pairwise_distances(queries, Xr, nominal_mask)
    return yr[np.argmin(D, axis=1)]


def classify_knn(X, y, ref, queries, k, nominal_mask=None) -> np.ndarray:
    """Majority label among the k nearest retained instances; vote ties -> positive."""
    retained, Xr, yr = _ref_arrays(X, y, ref)
    if k < 1 or k > retained.size:
        raise ValueError(f"k={k} out of range for reference set of size {retained.size}")
    D = pairwise_distances(queries, Xr, nominal_mask)
    # argsort is stable, so equidistant neighbours are taken in index order
    nn = np.argsort(D, kind="stable", axis=1)[:, :k]
    votes = yr[nn].sum(axis=1)
    return (2 * votes >= k).astype(y.dtype)


def loo_predict(X, y, retained, nominal_mask=None, exclude_self=True) -> np.ndarray:
    """1-NN prediction for every row of ``X`` over ``retained`` minus itself."""
    retained = np.sort(np.asarray(retained, dtype=np.intp))
    D = pairwise_distances(X, X[retained], nominal_mask)
    if exclude_self:
        # retained instance r is row r of X and column j of D
        D[retained, np.arange(retained.size)] = np.inf
    return y[retained][np.argmin(D, axis=1)]


def loo_gm(X, y, retained, nominal_mask=None, sample_weight=None) -> float:
    """Leave-one-out GM of 1-NN over ``retained``, evaluated on all of ``X``.

    Returns 0.0 (not an error) when ``retained`` misses a class, so subset
    optimisers can penalise degenerate selections naturally.  With
    ``sample_weight`` the confusion cells are weight sums instead of counts.
    """
    retained = np.asarray(retained, dtype=np.intp)
    yr = y[retained]
    if not (np.any(yr == 1) and np.any(yr == 0)):
        return 0.0
    pred = loo_predict(X, y, retained, nominal_mask)
    if sample_weight is None:
        sample_weight = np.ones(len(y))
    pos = y == 1
    tp = np.sum(sample_weight[pos & (pred == 1)])
    tn = np.sum(sample_weight[~pos & (pred == 0)])
    wp = np.sum(sample_weight[pos])
    wn = np.sum(sample_weight[~pos])
    if wp == 0 or wn == 0:
        return 0.0
    return float(np.sqrt((tp / wp) * (tn / wn)))
