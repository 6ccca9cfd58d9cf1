"""Clustering over feature rows or precomputed distances, with validity indices.

Two complementary routes: k-means on standardized feature rows, and
agglomerative merging on a pairwise distance matrix (so DTW distances can be
used directly). Three cluster validity indices score a labeling against a
distance matrix; ``select_k`` scans a k range and keeps the best silhouette.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .distance import DistanceMatrix
from .errors import EmptyMatrix, KTooLarge, SingleCluster

LINKAGES = ("average", "complete", "single")


@dataclass(frozen=True)
class ClusterAssignment:
    """Labels 0..k-1 for each row, with the fit diagnostics that produced them."""

    labels: np.ndarray
    k: int
    method: str
    inertia: float | None = None
    centers: np.ndarray | None = None
    wcss_history: tuple[float, ...] = ()
    seconds: float = 0.0

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "labels", labels)
        if labels.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        present = np.unique(labels)
        if len(present) != self.k or present[0] != 0 or present[-1] != self.k - 1:
            raise ValueError(f"labels must cover 0..{self.k - 1} exactly")

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)


def _validate_rows(rows) -> np.ndarray:
    x = np.asarray(rows, dtype=float)
    if x.ndim != 2 or x.size == 0:
        raise EmptyMatrix(f"expected a non-empty 2-D matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("feature rows must be finite")
    return x


def _plusplus_centers(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Spread-out initial centers: each next center is drawn with probability
    proportional to its squared distance from the nearest center so far."""
    n = len(x)
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total == 0.0:
            centers[j:] = x[rng.integers(n, size=k - j)]
            break
        centers[j] = x[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((x - centers[j]) ** 2).sum(axis=1))
    return centers


def _assign(x: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    return labels, d2


def kmeans(
    rows,
    k: int,
    seed: int = 0,
    n_init: int = 10,
    max_iter: int = 300,
    tol: float = 1e-8,
) -> ClusterAssignment:
    """Lloyd iterations from spread-out starts; best of ``n_init`` restarts.

    Within-cluster sum of squares is measured after each center update, so
    the recorded history never increases. A cluster that loses all members
    is reseeded to the point farthest from its assigned center.
    """
    x = _validate_rows(rows)
    n = len(x)
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} outside 1..{n}")
    if max_iter < 1 or n_init < 1:
        raise ValueError("n_init and max_iter must be positive")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        centers = _plusplus_centers(x, k, rng)
        history = []
        labels, d2 = _assign(x, centers)
        for _ in range(max_iter):
            for j in range(k):
                mask = labels == j
                if mask.any():
                    centers[j] = x[mask].mean(axis=0)
                else:
                    centers[j] = x[d2[np.arange(n), labels].argmax()]
            labels, d2 = _assign(x, centers)
            wcss = float(d2[np.arange(n), labels].sum())
            if history and history[-1] - wcss <= tol:
                history.append(wcss)
                break
            history.append(wcss)
        if best is None or history[-1] < best[0]:
            best = (history[-1], labels.copy(), centers.copy(), tuple(history))
    inertia, labels, centers, history = best
    # relabel so cluster ids follow first appearance order, deterministically
    order = {}
    for lab in labels:
        if lab not in order:
            order[lab] = len(order)
    labels = np.array([order[lab] for lab in labels])
    centers = centers[sorted(order, key=order.get)]
    return ClusterAssignment(
        labels=labels,
        k=len(order),
        method="kmeans",
        inertia=inertia,
        centers=centers,
        wcss_history=history,
        seconds=time.perf_counter() - start,
    )


def agglomerative(
    matrix: DistanceMatrix | np.ndarray, k: int, linkage: str = "average"
) -> ClusterAssignment:
    """Bottom-up merging on a precomputed distance matrix.

    Starts from singletons and repeatedly merges the closest pair, updating
    merged-cluster distances by the chosen linkage (average, complete, or
    single). Equal-distance ties go to the lowest index pair.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; choose from {LINKAGES}")
    d = matrix.values if isinstance(matrix, DistanceMatrix) else np.asarray(matrix, float)
    if d.ndim != 2 or d.size == 0 or d.shape[0] != d.shape[1]:
        raise EmptyMatrix(f"expected a non-empty square matrix, got shape {d.shape}")
    n = len(d)
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} outside 1..{n}")
    start = time.perf_counter()
    work = d.astype(float).copy()
    np.fill_diagonal(work, np.inf)
    active = list(range(n))
    members = {i: [i] for i in range(n)}
    while len(active) > k:
        sub = work[np.ix_(active, active)]
        flat = int(np.argmin(sub))  # row-major argmin = lowest (i, j) tie-break
        ai, aj = flat // len(active), flat % len(active)
        if ai > aj:
            ai, aj = aj, ai
        i, j = active[ai], active[aj]
        ni, nj = len(members[i]), len(members[j])
        for other in active:
            if other in (i, j):
                continue
            if linkage == "average":
                merged = (ni * work[i, other] + nj * work[j, other]) / (ni + nj)
            elif linkage == "complete":
                merged = max(work[i, other], work[j, other])
            else:
                merged = min(work[i, other], work[j, other])
            work[i, other] = work[other, i] = merged
        members[i].extend(members.pop(j))
        active.remove(j)
    labels = np.empty(n, dtype=int)
    for new_label, root in enumerate(active):
        labels[members[root]] = new_label
    return ClusterAssignment(
        labels=labels,
        k=k,
        method=f"agglomerative:{linkage}",
        seconds=time.perf_counter() - start,
    )


def _check_scoring_args(d, labels) -> tuple[np.ndarray, np.ndarray]:
    dv = d.values if isinstance(d, DistanceMatrix) else np.asarray(d, float)
    labels = np.asarray(labels, dtype=int)
    if dv.ndim != 2 or dv.shape[0] != dv.shape[1] or dv.size == 0:
        raise EmptyMatrix(f"expected a non-empty square matrix, got shape {dv.shape}")
    if len(labels) != len(dv):
        raise ValueError("labels and distance matrix disagree on row count")
    if len(np.unique(labels)) < 2:
        raise SingleCluster("validity indices need at least two clusters")
    return dv, labels


def silhouette(d, labels) -> float:
    """Mean silhouette width over all points.

    For each point, a is the mean distance to its own cluster's other
    members and b the smallest mean distance to another cluster; the width
    is (b - a) / max(a, b). Singleton members score 0, as does a point
    whose a and b are both 0.
    """
    dv, labels = _check_scoring_args(d, labels)
    uniq = np.unique(labels)
    scores = np.zeros(len(dv))
    for i in range(len(dv)):
        own = labels[i]
        same = np.flatnonzero(labels == own)
        if len(same) == 1:
            continue
        a = dv[i, same[same != i]].mean()
        b = min(dv[i, labels == other].mean() for other in uniq if other != own)
        denom = max(a, b)
        if denom > 0.0:
            scores[i] = (b - a) / denom
    return float(scores.mean())


def dunn(d, labels) -> float:
    """Smallest between-cluster distance over largest within-cluster diameter.

    All clusters being singletons (every diameter 0) scores +inf.
    """
    dv, labels = _check_scoring_args(d, labels)
    uniq = np.unique(labels)
    idx = {c: np.flatnonzero(labels == c) for c in uniq}
    max_diam = 0.0
    for c in uniq:
        members = idx[c]
        if len(members) > 1:
            max_diam = max(max_diam, float(dv[np.ix_(members, members)].max()))
    min_sep = min(
        float(dv[np.ix_(idx[a], idx[b])].min())
        for ai, a in enumerate(uniq)
        for b in uniq[ai + 1 :]
    )
    if max_diam == 0.0:
        return float("inf")
    return min_sep / max_diam


def gamma_index(d, labels, max_pairs: int = 100_000, seed: int = 0) -> float:
    """Rank agreement between distances and the labeling, in [-1, 1].

    Compares every within-cluster distance with every between-cluster
    distance and scores (concordant - discordant) / total, where concordant
    means the within distance is strictly smaller. When the comparison count
    exceeds ``max_pairs`` a seeded random subset of that size is scored.
    """
    dv, labels = _check_scoring_args(d, labels)
    iu, ju = np.triu_indices(len(dv), k=1)
    within_mask = labels[iu] == labels[ju]
    within = dv[iu[within_mask], ju[within_mask]]
    between = dv[iu[~within_mask], ju[~within_mask]]
    if len(within) == 0 or len(between) == 0:
        raise SingleCluster("need both within- and between-cluster pairs")
    total = len(within) * len(between)
    if total > max_pairs:
        rng = np.random.default_rng(seed)
        wi = rng.integers(len(within), size=max_pairs)
        bi = rng.integers(len(between), size=max_pairs)
        w, b = within[wi], between[bi]
        concordant = int(np.sum(w < b))
        discordant = int(np.sum(w > b))
        total = max_pairs
    else:
        comp = within[:, None] - between[None, :]
        concordant = int(np.sum(comp < 0))
        discordant = int(np.sum(comp > 0))
    return (concordant - discordant) / total


@dataclass(frozen=True)
class KSelection:
    """Winning k plus the per-k validity table behind the choice."""

    k: int
    assignment: ClusterAssignment
    table: dict[int, dict[str, float]] = field(default_factory=dict)


def euclidean_matrix(rows) -> np.ndarray:
    """Pairwise euclidean distances between feature rows."""
    rows = np.asarray(rows, dtype=float)
    sq = (rows**2).sum(axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * rows @ rows.T, 0.0)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)


def select_k(
    source,
    k_range=range(2, 11),
    method: str = "kmeans",
    seed: int = 0,
    linkage: str = "average",
) -> KSelection:
    """Score each candidate k and keep the one with the best silhouette.

    ``source`` is a feature-row matrix for k-means or a distance matrix for
    agglomerative merging. Ties on silhouette go to the smaller k. The
    returned table carries silhouette, Dunn, and gamma for every candidate.
    """
    ks = sorted(set(int(k) for k in k_range))
    if not ks or ks[0] < 2:
        raise ValueError("k_range must contain integers >= 2")
    if method == "kmeans":
        rows = _validate_rows(
            source.values if hasattr(source, "values") and hasattr(source, "feature_names") else source
        )
        dv = euclidean_matrix(rows)
        run = lambda k: kmeans(rows, k, seed=seed)
    elif method == "agglomerative":
        dv = source.values if isinstance(source, DistanceMatrix) else np.asarray(source, float)
        run = lambda k: agglomerative(source, k, linkage=linkage)
    else:
        raise ValueError(f"unknown method {method!r}")
    if ks[-1] > len(dv):
        raise KTooLarge(f"k={ks[-1]} exceeds {len(dv)} rows")
    table: dict[int, dict[str, float]] = {}
    best: tuple[float, int, ClusterAssignment] | None = None
    for k in ks:
        assignment = run(k)
        sil = silhouette(dv, assignment.labels)
        scores = {"silhouette": sil}
        for name, score in (
            ("dunn", lambda: dunn(dv, assignment.labels)),
            ("gamma", lambda: gamma_index(dv, assignment.labels, seed=seed)),
        ):
            try:
                scores[name] = score()
            except SingleCluster:
                # all-singleton partitions leave no within-cluster pairs
                scores[name] = float("nan")
        table[k] = scores
        if best is None or sil > best[0]:
            best = (sil, k, assignment)
    _, k, assignment = best
    return KSelection(k=k, assignment=assignment, table=table)
