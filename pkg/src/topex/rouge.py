"""Self-contained ROUGE-1/2/L F-score evaluation.

Tokenization is lowercase with splits on non-alphanumeric runs; no stemming
or stopword removal unless asked for. Multi-reference scores take the best F1
across references by default ("max" aggregation), with a mean variant behind
a flag. ROUGE-L uses the token-level longest common subsequence between the
whole candidate and each whole reference.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from .corpus import fold_plural

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


_ZERO = RougeScore(0.0, 0.0, 0.0)


def rouge_tokenize(
    text: str, stemming: bool = False, stopwords: frozenset[str] | None = None
) -> list[str]:
    tokens = [t for t in _TOKEN_SPLIT.split(text.lower()) if t]
    if stopwords:
        tokens = [t for t in tokens if t not in stopwords]
    if stemming:
        tokens = [fold_plural(t) for t in tokens]
    return tokens


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _prf(matches: int, candidate_total: int, reference_total: int) -> RougeScore:
    p = matches / candidate_total if candidate_total else 0.0
    r = matches / reference_total if reference_total else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return RougeScore(p, r, f1)


def _aggregate(scores: list[RougeScore], aggregate: str) -> RougeScore:
    if aggregate == "max":
        return max(scores, key=lambda s: (s.f1, s.precision, s.recall))
    if aggregate == "mean":
        n = len(scores)
        return RougeScore(
            sum(s.precision for s in scores) / n,
            sum(s.recall for s in scores) / n,
            sum(s.f1 for s in scores) / n,
        )
    raise ValueError(f"unknown aggregation {aggregate!r}")


def rouge_n(
    candidate: str,
    references: list[str],
    n: int,
    aggregate: str = "max",
    stemming: bool = False,
    stopwords: frozenset[str] | None = None,
) -> RougeScore:
    """Clipped n-gram overlap F-score against one or more references."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not references:
        raise ValueError("need at least one reference")
    cand = _ngrams(rouge_tokenize(candidate, stemming, stopwords), n)
    cand_total = sum(cand.values())
    scores = []
    for reference in references:
        ref = _ngrams(rouge_tokenize(reference, stemming, stopwords), n)
        matches = sum(min(count, ref[gram]) for gram, count in cand.items())
        scores.append(_prf(matches, cand_total, sum(ref.values())))
    return _aggregate(scores, aggregate)


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for j, other in enumerate(b, start=1):
            if token == other:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(
    candidate: str,
    references: list[str],
    aggregate: str = "max",
    stemming: bool = False,
    stopwords: frozenset[str] | None = None,
) -> RougeScore:
    """Longest-common-subsequence F-score against one or more references."""
    if not references:
        raise ValueError("need at least one reference")
    cand_tokens = rouge_tokenize(candidate, stemming, stopwords)
    scores = []
    for reference in references:
        ref_tokens = rouge_tokenize(reference, stemming, stopwords)
        lcs = _lcs_length(cand_tokens, ref_tokens)
        scores.append(_prf(lcs, len(cand_tokens), len(ref_tokens)))
    return _aggregate(scores, aggregate)


def evaluate_run(
    summaries: dict[str, list[str]],
    gold: dict[str, list[str]],
    aggregate: str = "max",
    stemming: bool = False,
    stopwords: frozenset[str] | None = None,
) -> dict:
    """Per-entity ROUGE-1/2/L plus corpus means.

    ``summaries`` maps entity_id to the selected sentence texts in output
    order; they are joined with single spaces before scoring. Every
    summarized entity must have gold references.
    """
    per_entity: dict[str, dict] = {}
    opts = {"aggregate": aggregate, "stemming": stemming, "stopwords": stopwords}
    for entity_id in sorted(summaries):
        if entity_id not in gold or not gold[entity_id]:
            raise KeyError(f"no gold references for entity {entity_id!r}")
        text = " ".join(summaries[entity_id])
        references = gold[entity_id]
        per_entity[entity_id] = {
            "r1": vars(rouge_n(text, references, 1, **opts)),
            "r2": vars(rouge_n(text, references, 2, **opts)),
            "rl": vars(rouge_l(text, references, **opts)),
        }
    count = len(per_entity)
    mean = {
        metric: (
            sum(entry[metric]["f1"] for entry in per_entity.values()) / count
            if count
            else 0.0
        )
        for metric in ("r1", "r2", "rl")
    }
    return {
        "per_entity": per_entity,
        "mean": mean,
        "settings": {
            "aggregate": aggregate,
            "stemming": stemming,
            "stopwords": sorted(stopwords) if stopwords else [],
        },
    }
