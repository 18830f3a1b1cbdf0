"""Topical word and sentence representations.

A word's representation concatenates its code vectors from every dictionary
layer; a sentence max-pools its words coordinate-wise and L1-normalizes. The
result is a non-negative unit-L1 vector of length dict_size * n_layers that
behaves like a distribution over latent topics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .dict_learning import ModelState, kernel_forward
from .embeddings import EmbeddingStore, RepStore, SentKey
from .errors import DegenerateSentenceError, ShapeError, ValidationError

L1_TOLERANCE = 1e-6


@dataclass(frozen=True)
class TopicalRep:
    vec: np.ndarray
    sent_key: SentKey

    @property
    def sent_id(self) -> int:
        return self.sent_key[1]


def validate_rep(vec: np.ndarray, sent_key: SentKey) -> None:
    if np.any(vec < 0):
        raise ValidationError(f"representation {sent_key} has negative entries")
    l1 = float(np.abs(vec).sum(dtype=np.float64))
    if abs(l1 - 1.0) > L1_TOLERANCE:
        raise ValidationError(
            f"representation {sent_key} has L1 norm {l1!r}, expected 1 ± {L1_TOLERANCE}"
        )


def word_representation(model: ModelState, z: np.ndarray) -> np.ndarray:
    """Concatenated per-layer codes; layer j occupies [j*dict_size, (j+1)*dict_size)."""
    z = np.asarray(z)
    if z.ndim != 1 or z.shape[0] != model.config.embed_dim:
        raise ShapeError(f"word vector has shape {z.shape}, expected ({model.config.embed_dim},)")
    return np.concatenate([kernel_forward(layer, z) for layer in model.layers])


def _word_matrix_representation(model: ModelState, words: np.ndarray) -> np.ndarray:
    # one kernel pass per layer over all words at once
    return np.concatenate([kernel_forward(layer, words) for layer in model.layers], axis=1)


def sentence_representation(
    model: ModelState,
    word_vectors: np.ndarray | list[np.ndarray],
    sent_key: SentKey = ("", -1),
) -> TopicalRep:
    """Coordinate-wise max over the words' representations, L1-normalized.

    Raises DegenerateSentenceError when the pooled vector is all zero, since
    no unit vector exists for it.
    """
    words = np.asarray(word_vectors)
    if words.ndim == 1:
        words = words[None, :]
    if words.shape[0] == 0:
        raise ValueError("sentence has no word vectors")
    if words.shape[1] != model.config.embed_dim:
        raise ShapeError(
            f"word vectors have dim {words.shape[1]}, model expects {model.config.embed_dim}"
        )
    pooled = _word_matrix_representation(model, words).max(axis=0)
    total = float(pooled.sum(dtype=np.float64))
    if total <= 0.0:
        raise DegenerateSentenceError(
            f"sentence {sent_key} pooled to the all-zero representation"
        )
    vec = (pooled / total).astype(np.float32)
    return TopicalRep(vec=vec, sent_key=sent_key)


def mean_representation(reps: list[TopicalRep]) -> np.ndarray:
    """Arithmetic mean of the rep vectors; stays non-negative and unit-L1."""
    if not reps:
        raise ValueError("cannot average an empty representation list")
    stacked = np.stack([r.vec for r in reps])
    return stacked.mean(axis=0, dtype=np.float64).astype(np.float32)


def sparsity_profile(reps: list[TopicalRep]) -> tuple[np.ndarray, np.ndarray]:
    """Per-rank mean and standard deviation of ascending-sorted rep entries."""
    if not reps:
        raise ValueError("cannot profile an empty representation list")
    ranked = np.sort(np.stack([r.vec for r in reps]), axis=1)
    return ranked.mean(axis=0, dtype=np.float64), ranked.std(axis=0, dtype=np.float64)


def entity_representations(
    model: ModelState, corpus: Corpus, store: EmbeddingStore, entity_id: str
) -> list[TopicalRep]:
    """Representations for every sentence of an entity, in sent_id order."""
    entity = corpus.entity(entity_id)
    reps = []
    for sentence in entity.sentences():
        key = (entity_id, sentence.sent_id)
        reps.append(sentence_representation(model, store.matrix(*key), sent_key=key))
    return reps


def corpus_representations(
    model: ModelState, corpus: Corpus, store: EmbeddingStore
) -> dict[str, list[TopicalRep]]:
    return {
        entity_id: entity_representations(model, corpus, store, entity_id)
        for entity_id in corpus.entity_ids()
    }


def reps_to_store(reps_by_entity: dict[str, list[TopicalRep]]) -> RepStore:
    """Pack representations into a RepStore for GSRP dumping."""
    dims = {r.vec.shape[0] for reps in reps_by_entity.values() for r in reps}
    if len(dims) > 1:
        raise ShapeError(f"mixed representation dims {sorted(dims)}")
    store = RepStore(dims.pop() if dims else 0)
    for reps in reps_by_entity.values():
        for rep in reps:
            store.vectors[rep.sent_key] = rep.vec
    return store


def store_to_reps(store: RepStore, validate: bool = True) -> dict[str, list[TopicalRep]]:
    """Rebuild per-entity representation lists from a GSRP dump."""
    by_entity: dict[str, list[TopicalRep]] = {}
    for key in store.sorted_keys():
        vec = store.vectors[key].astype(np.float32)
        if validate:
            validate_rep(vec, key)
        by_entity.setdefault(key[0], []).append(TopicalRep(vec=vec, sent_key=key))
    return by_entity
