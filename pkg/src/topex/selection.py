"""Sentence selection by approximate geodesic importance.

Sentence representations form nodes of a directed kNN graph together with one
synthetic mean node; edge weights are cosine distances ``1 - x·y``. A
sentence's importance is the reciprocal of its shortest-path distance from
the mean node, so centrality follows the data manifold rather than straight
lines. Summaries are the top-q sentences by importance.

Node indexing: representations are sorted by sent_key and numbered 0..n-1;
the mean node is index n. Ties in neighbor selection and in ranking prefer
the smaller index, i.e. the smaller sent_id, and the mean node loses all
ties against real sentences.
"""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .representations import TopicalRep, mean_representation

# Score assigned when a representation coincides with the mean (distance 0);
# ranks above every finite reciprocal distance.
INF_SENTINEL = float(np.finfo(np.float32).max)

Adjacency = list[list[tuple[int, float]]]


@dataclass
class KnnGraph:
    sent_ids: list[int]   # node index i holds sentence sent_ids[i]
    k: int
    edges: Adjacency      # out-adjacency per node index, mean node last
    mean_index: int


@dataclass
class ImportanceResult:
    scores: dict[int, float]     # sent_id -> importance
    distances: dict[int, float]  # sent_id -> geodesic distance (inf if unreachable)
    unreachable: set[int]


def _vec(x) -> np.ndarray:
    return x.vec if isinstance(x, TopicalRep) else np.asarray(x)


def cosine_distance(x, y) -> float:
    """1 - x·y, clamped to [0, 1]; exact 0 for identical unit-L1 one-hots."""
    xv, yv = _vec(x), _vec(y)
    if xv.shape != yv.shape:
        raise ShapeError(f"representation shapes differ: {xv.shape} vs {yv.shape}")
    dot = float(np.dot(xv.astype(np.float64), yv.astype(np.float64)))
    return min(max(1.0 - dot, 0.0), 1.0)


def _sorted_reps(reps: list[TopicalRep]) -> list[TopicalRep]:
    return sorted(reps, key=lambda r: r.sent_key)


def build_knn_graph(reps: list[TopicalRep], mean: np.ndarray, k: int) -> KnnGraph:
    """Exact exhaustive kNN over reps plus the mean node.

    Every node gets out-edges to its k nearest neighbors by cosine distance
    (min(k, n-1) when the graph is small); ties prefer the smaller index.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not reps:
        raise ValueError("cannot build a graph over zero representations")
    ordered = _sorted_reps(reps)
    points = np.stack([r.vec for r in ordered] + [np.asarray(mean)]).astype(np.float64)
    n_nodes = points.shape[0]
    dist = np.clip(1.0 - points @ points.T, 0.0, 1.0)
    np.fill_diagonal(dist, np.inf)
    degree = min(k, n_nodes - 1)
    # stable sort keeps ascending index order among exact ties
    order = np.argsort(dist, axis=1, kind="stable")
    edges: Adjacency = []
    for i in range(n_nodes):
        targets = order[i, :degree]
        edges.append([(int(j), float(dist[i, j])) for j in targets])
    return KnnGraph(
        sent_ids=[r.sent_id for r in ordered],
        k=k,
        edges=edges,
        mean_index=n_nodes - 1,
    )


def dijkstra(edges: Adjacency, source: int) -> np.ndarray:
    """Single-source shortest paths over a weighted digraph; inf = unreachable."""
    dist = np.full(len(edges), np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in edges[u]:
            alt = d + w
            if alt < dist[v]:
                dist[v] = alt
                heapq.heappush(heap, (alt, v))
    return dist


def reverse_adjacency(edges: Adjacency) -> Adjacency:
    reversed_edges: Adjacency = [[] for _ in edges]
    for u, out in enumerate(edges):
        for v, w in out:
            reversed_edges[v].append((u, w))
    return reversed_edges


def shortest_paths_from_mean(graph: KnnGraph, reverse_edges: bool = False) -> dict[int, float]:
    """Geodesic distance of every sentence from the mean node (inf if unreachable).

    ``reverse_edges=True`` transposes the graph first, which measures
    sentence-to-mean paths instead of mean-to-sentence paths.
    """
    edges = reverse_adjacency(graph.edges) if reverse_edges else graph.edges
    dist = dijkstra(edges, graph.mean_index)
    return {sid: float(dist[i]) for i, sid in enumerate(graph.sent_ids)}


def _reciprocal(distance: float) -> float:
    if math.isinf(distance):
        return 0.0
    if distance <= 0.0:
        return INF_SENTINEL
    return min(1.0 / distance, INF_SENTINEL)


def importance_scores(
    reps: list[TopicalRep],
    k: int,
    source: np.ndarray | None = None,
    reverse_edges: bool = False,
) -> ImportanceResult:
    """Reciprocal geodesic distance from the mean node (or a custom source vector)."""
    if not reps:
        raise ValueError("cannot score zero representations")
    mean = mean_representation(reps) if source is None else np.asarray(source)
    graph = build_knn_graph(reps, mean, k)
    distances = shortest_paths_from_mean(graph, reverse_edges=reverse_edges)
    scores = {sid: _reciprocal(d) for sid, d in distances.items()}
    unreachable = {sid for sid, d in distances.items() if math.isinf(d)}
    return ImportanceResult(scores=scores, distances=distances, unreachable=unreachable)


def top_q_by_score(scores: dict[int, float], q: int) -> list[int]:
    """Top-q sent_ids by descending score, ascending sent_id on ties; exactly q items."""
    if not 1 <= q <= len(scores):
        raise ValueError(f"q must be in [1, {len(scores)}], got {q}")
    ranked = sorted(scores, key=lambda sid: (-scores[sid], sid))
    return ranked[:q]


def general_summary(
    reps: list[TopicalRep], q: int, k: int, reverse_edges: bool = False
) -> list[int]:
    """Top-q sentences by geodesic importance."""
    if not 1 <= q <= len(reps):
        raise ValueError(f"q must be in [1, {len(reps)}], got {q}")
    result = importance_scores(reps, k, reverse_edges=reverse_edges)
    selected = top_q_by_score(result.scores, q)
    strays = [sid for sid in selected if sid in result.unreachable]
    if strays:
        warnings.warn(
            f"budget {q} exceeds reachable sentences; filled with unreachable "
            f"sent_ids {strays} in id order",
            stacklevel=2,
        )
    return selected


def aspect_scores(
    reps: list[TopicalRep],
    aspect_ids: set[int],
    gamma: float,
    k: int,
    reverse_edges: bool = False,
) -> tuple[dict[int, float], ImportanceResult]:
    """Aspect importance for every sentence, plus the aspect-graph result.

    The aspect score is the reciprocal geodesic distance from the mean of the
    aspect-matched representations, minus ``gamma`` times the general
    importance, so generally central sentences are demoted. Candidates are
    all sentences, not only aspect-matched ones.
    """
    if not aspect_ids:
        raise ValueError("aspect sentence set is empty; fall back to general_summary")
    by_id = {r.sent_id: r for r in reps}
    missing = aspect_ids - set(by_id)
    if missing:
        raise KeyError(f"aspect sent_ids {sorted(missing)} not among representations")
    general = importance_scores(reps, k, reverse_edges=reverse_edges)
    aspect_mean = mean_representation([by_id[s] for s in sorted(aspect_ids)])
    aspect_result = importance_scores(reps, k, source=aspect_mean, reverse_edges=reverse_edges)
    combined = {
        sid: aspect_result.scores[sid] - gamma * general.scores[sid] for sid in by_id
    }
    return combined, aspect_result


def aspect_summary(
    reps: list[TopicalRep],
    aspect_ids: set[int],
    gamma: float,
    q: int,
    k: int,
    reverse_edges: bool = False,
) -> list[int]:
    """Top-q sentences by aspect importance (see ``aspect_scores``)."""
    if not 1 <= q <= len(reps):
        raise ValueError(f"q must be in [1, {len(reps)}], got {q}")
    combined, _ = aspect_scores(reps, aspect_ids, gamma, k, reverse_edges=reverse_edges)
    return top_q_by_score(combined, q)


def euclidean_importance(reps: list[TopicalRep]) -> dict[int, float]:
    """Ablation scorer: negative squared Euclidean distance to the mean."""
    if not reps:
        raise ValueError("cannot score zero representations")
    ordered = _sorted_reps(reps)
    points = np.stack([r.vec for r in ordered]).astype(np.float64)
    mean = mean_representation(ordered).astype(np.float64)
    sq = ((points - mean) ** 2).sum(axis=1)
    return {r.sent_id: float(-d) for r, d in zip(ordered, sq)}
