"""Deterministic synthetic data for tests.

Everything here is seed-driven and independent of the code under test: the
generators build corpora, embedding stores, and representation sets with
planted structure (sparse atom combinations, popularity clusters, curved
arcs) so selection and training behavior can be checked against known ground
truth.
"""

from __future__ import annotations

import hashlib

import numpy as np

from topex.corpus import Corpus, Entity, Review, Sentence
from topex.embeddings import EmbeddingStore
from topex.representations import TopicalRep


def normalize_l1(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.float64)
    total = vec.sum()
    return (vec / total).astype(np.float32)


def make_rep(vec, entity_id: str = "e", sent_id: int = 0) -> TopicalRep:
    return TopicalRep(vec=normalize_l1(np.asarray(vec)), sent_key=(entity_id, sent_id))


def make_reps(matrix, entity_id: str = "e") -> list[TopicalRep]:
    return [make_rep(row, entity_id, i) for i, row in enumerate(matrix)]


def random_unit_l1_reps(rng: np.random.Generator, count: int, dim: int, alpha: float = 1.0):
    return make_reps(rng.dirichlet(np.full(dim, alpha), size=count))


def tiny_corpus(n_entities: int = 1, reviews_per_entity: int = 2, sents_per_review: int = 2) -> Corpus:
    entities = []
    for e in range(n_entities):
        reviews = []
        sid = 0
        for r in range(reviews_per_entity):
            sentences = []
            for s in range(sents_per_review):
                sentences.append(Sentence(sid, f"entity {e} review {r} sentence {s}"))
                sid += 1
            reviews.append(Review(f"r{r}", sentences))
        entities.append(Entity(f"e{e}", reviews))
    return Corpus(entities)


def token_vector(token: str, dim: int, seed: int) -> np.ndarray:
    """Hash-seeded deterministic embedding; the same token always maps to the
    same vector. Mirrors the synthetic exporter contract on the primary side."""
    digest = hashlib.blake2b(f"{seed}:{token}".encode("utf-8"), digest_size=8).digest()
    rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))
    return rng.normal(0.0, 1.0, size=dim).astype(np.float32)


def synthetic_embedding_store(corpus: Corpus, dim: int, seed: int) -> EmbeddingStore:
    store = EmbeddingStore(dim)
    for entity in corpus.entities:
        for sentence in entity.sentences():
            tokens = sentence.text.split()
            rows = np.stack([token_vector(t, dim, seed) for t in tokens])
            store.add(entity.entity_id, sentence.sent_id, rows)
    return store


def sparse_combo_store(
    seed: int,
    n_sentences: int = 120,
    dim: int = 16,
    n_atoms: int = 8,
    single_topic_frac: float = 0.55,
    entity_id: str = "synth",
) -> tuple[EmbeddingStore, Corpus, np.ndarray, list[tuple[int, ...]]]:
    """Word embeddings drawn as sparse non-negative combinations of ground-truth atoms.

    Atoms have disjoint two-coordinate supports so the factorization is
    identifiable. Each sentence covers one or two atoms (mostly one); every
    word is a positively scaled copy of one of the sentence's atoms. Returns
    the store, a matching corpus, the atom matrix, and each sentence's atom
    subset.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    atoms = np.zeros((n_atoms, dim))
    for a in range(n_atoms):
        atoms[a, 2 * a] = 0.8
        atoms[a, 2 * a + 1] = 0.6
    store = EmbeddingStore(dim)
    sentences = []
    atom_sets = []
    for sid in range(n_sentences):
        n_active = 1 if rng.uniform() < single_topic_frac else 2
        chosen = tuple(sorted(rng.choice(n_atoms, size=n_active, replace=False)))
        atom_sets.append(chosen)
        n_words = int(rng.integers(3, 7))
        words = np.stack(
            [rng.uniform(0.9, 1.1) * atoms[chosen[w % n_active]] for w in range(n_words)]
        )
        store.add(entity_id, sid, words.astype(np.float32))
        sentences.append(Sentence(sid, f"synthetic sentence {sid}"))
    corpus = Corpus([Entity(entity_id, [Review("r0", sentences)])])
    return store, corpus, atoms, atom_sets


def planted_popularity_reps(
    seed: int,
    dim: int = 16,
    n_popular: int = 32,
    n_rare: int = 8,
    entity_id: str = "e",
) -> tuple[list[TopicalRep], set[int]]:
    """80/20 split: a tight popular cluster plus scattered rare points."""
    rng = np.random.Generator(np.random.PCG64(seed))
    centroid = rng.dirichlet(np.full(dim, 0.4))
    reps = []
    popular_ids = set()
    for sid in range(n_popular):
        noise = rng.dirichlet(np.full(dim, 1.0))
        reps.append(make_rep(0.85 * centroid + 0.15 * noise, entity_id, sid))
        popular_ids.add(sid)
    for offset in range(n_rare):
        sid = n_popular + offset
        reps.append(make_rep(rng.dirichlet(np.full(dim, 0.3)), entity_id, sid))
    return reps, popular_ids


def topic_bump(dim: int, position: float, eps: float = 0.01) -> np.ndarray:
    """Near-one-hot vector: mass split between two adjacent coordinates.

    The ``1 - x.y`` distance is only small for sparse, aligned vectors, so
    bump families have the sharp neighborhood structure that trained topical
    representations show.
    """
    left = min(int(position), dim - 2)
    frac = position - left
    vec = np.full(dim, eps)
    vec[left] += 1 - frac
    vec[left + 1] += frac
    return vec


def arc_reps(n_points: int = 60, dim: int = 24, entity_id: str = "e") -> list[TopicalRep]:
    """One-dimensional curved manifold: a near-one-hot peak sliding across dims.

    Consecutive points share most of their mass (small hops) while far-apart
    points have almost disjoint support, so the kNN graph is a chain and
    geodesics must traverse it; straight-line cosine distance saturates near 1
    instead.
    """
    rows = [
        topic_bump(dim, i / (n_points - 1) * (dim - 1), eps=0.004)
        for i in range(n_points)
    ]
    return make_reps(rows, entity_id)


def arc_chain_oracle(reps: list[TopicalRep], graph) -> float:
    """Shortest mean-to-endpoint path assuming chain travel: best entry edge
    plus the summed consecutive hops from the entry to the arc end."""
    from topex.selection import cosine_distance

    n = len(reps)
    hops = [cosine_distance(reps[i], reps[i + 1]) for i in range(n - 1)]
    best = np.inf
    for target, weight in graph.edges[graph.mean_index]:
        if target >= len(graph.sent_ids):
            continue
        entry = graph.sent_ids[target]
        best = min(best, weight + sum(hops[entry:]))
    return float(best)


def aspect_steering_reps(
    seed: int,
    dim: int = 10,
    n_aspect: int = 14,
    n_hot: int = 14,
    n_matched_hot: int = 10,
    n_broad: int = 14,
    entity_id: str = "e",
) -> tuple[list[TopicalRep], set[int], set[int]]:
    """Two-cluster corpus for the informativeness penalty: aspect topics plus
    a dense popular topic whose sentences partly contain the aspect keyword.

    Returns (reps, matched_ids, aspect_cluster_ids). The matched set feeds the
    aspect mean; it covers the true aspect cluster and ``n_matched_hot``
    generic hot-topic sentences (keyword present, content generic). Those
    generic sentences rank well from the aspect mean at gamma=0 but carry the
    highest general importance, so the penalty pushes them out in favor of
    real aspect-cluster sentences.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    reps: list[TopicalRep] = []
    matched: set[int] = set()
    cluster: set[int] = set()
    sid = 0
    for _ in range(n_aspect):
        reps.append(make_rep(topic_bump(dim, rng.uniform(0.3, 2.7)), entity_id, sid))
        matched.add(sid)
        cluster.add(sid)
        sid += 1
    for i in range(n_hot):
        reps.append(make_rep(topic_bump(dim, rng.uniform(5.0, 6.6)), entity_id, sid))
        if i < n_matched_hot:
            matched.add(sid)
        sid += 1
    for _ in range(n_broad):
        reps.append(make_rep(topic_bump(dim, rng.uniform(4.2, 8.7)), entity_id, sid))
        sid += 1
    return reps, matched, cluster
