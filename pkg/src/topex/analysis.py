"""Analysis utilities: Ward clustering of representations and scorer ablations.

Ward agglomeration runs on the Euclidean geometry of the representation
vectors via the Lance-Williams recurrence; merge costs are the increase in
total within-cluster sum of squared deviations. A "cosine" metric variant
L2-normalizes the vectors first. O(n^2) memory and O(n^3) time, which is fine
at per-entity sentence counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .representations import TopicalRep
from .selection import euclidean_importance, general_summary, top_q_by_score


@dataclass
class ClusterAssignment:
    labels: dict[int, int]  # sent_id -> dense cluster id
    merge_tree: list[tuple[int, int, float]]  # (left_id, right_id, cost) in merge order


def ward_clustering(
    reps: list[TopicalRep], num_clusters: int, metric: str = "euclidean"
) -> ClusterAssignment:
    """Agglomerate down to ``num_clusters`` by minimum variance increase.

    Initial singleton clusters take ids 0..n-1 in sent_key order; each merge
    creates cluster id n+step. Cost ties are broken by the smaller
    (left_id, right_id) pair, so results are order-independent.
    """
    if not 1 <= num_clusters <= len(reps):
        raise ValueError(f"num_clusters must be in [1, {len(reps)}], got {num_clusters}")
    ordered = sorted(reps, key=lambda r: r.sent_key)
    points = np.stack([r.vec for r in ordered]).astype(np.float64)
    if metric == "cosine":
        norms = np.linalg.norm(points, axis=1, keepdims=True)
        points = points / np.where(norms == 0, 1.0, norms)
    elif metric != "euclidean":
        raise ValueError(f"unknown metric {metric!r}")
    n = len(ordered)

    # pairwise SSE increase for singleton merges: 0.5 * squared distance
    sq = ((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
    cost = 0.5 * sq
    np.fill_diagonal(cost, np.inf)

    sizes = np.ones(n)
    active = np.ones(n, dtype=bool)
    cluster_ids = list(range(n))
    members: list[list[int]] = [[i] for i in range(n)]
    merge_tree: list[tuple[int, int, float]] = []

    for step in range(n - num_clusters):
        masked = np.where(active[:, None] & active[None, :], cost, np.inf)
        best = masked.min()
        pairs = np.argwhere(masked == best)
        # normalize to id pairs, pick lexicographically smallest
        candidates = []
        for pi, pj in pairs:
            if pi == pj:
                continue
            a, b = cluster_ids[pi], cluster_ids[pj]
            (left, right) = (a, b) if a < b else (b, a)
            candidates.append((left, right, int(pi), int(pj)))
        left, right, pi, pj = min(candidates)
        if cluster_ids[pi] != left:
            pi, pj = pj, pi
        merge_tree.append((left, right, float(best)))

        size_i, size_j = sizes[pi], sizes[pj]
        cost_ij = cost[pi, pj]
        others = np.flatnonzero(active)
        others = others[(others != pi) & (others != pj)]
        if others.size:
            total = size_i + size_j + sizes[others]
            cost_new = (
                (size_i + sizes[others]) * cost[pi, others]
                + (size_j + sizes[others]) * cost[pj, others]
                - sizes[others] * cost_ij
            ) / total
            cost[pi, others] = cost_new
            cost[others, pi] = cost_new
        sizes[pi] = size_i + size_j
        active[pj] = False
        cluster_ids[pi] = n + step
        members[pi] = members[pi] + members[pj]

    groups = [members[p] for p in np.flatnonzero(active)]
    groups.sort(key=min)
    labels = {
        ordered[pos].sent_id: label for label, group in enumerate(groups) for pos in group
    }
    return ClusterAssignment(labels=labels, merge_tree=merge_tree)


def compare_scorers(reps: list[TopicalRep], q: int, k: int) -> dict:
    """Top-q sets under geodesic vs Euclidean scoring plus their Jaccard overlap."""
    geodesic = general_summary(reps, q, k)
    euclidean = top_q_by_score(euclidean_importance(reps), q)
    union = set(geodesic) | set(euclidean)
    inter = set(geodesic) & set(euclidean)
    overlap = len(inter) / len(union) if union else 1.0
    return {"geodesic": geodesic, "euclidean": euclidean, "overlap": overlap}
