"""Review corpora and aspect lexicons.

A corpus is a set of entities (products, hotels), each owning reviews that
arrive pre-split into sentences. Sentences get dense integer ids per entity,
assigned in file order; all downstream stages address a sentence by the pair
``(entity_id, sent_id)``.

Corpus JSONL format: one object per review,
``{"entity_id": str, "review_id": str, "sentences": [str, ...]}``.

Aspect lexicon JSON: ``{"aspect": str, "keywords": [str, ...]}`` or a list of
such objects.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateReviewError, ParseError


@dataclass(frozen=True)
class Sentence:
    sent_id: int
    text: str


@dataclass
class Review:
    review_id: str
    sentences: list[Sentence]


@dataclass
class Entity:
    entity_id: str
    reviews: list[Review] = field(default_factory=list)

    def sentences(self) -> list[Sentence]:
        """All sentences of the entity in document order (sent_id order)."""
        return [s for r in self.reviews for s in r.sentences]


@dataclass
class Corpus:
    entities: list[Entity] = field(default_factory=list)

    def __post_init__(self):
        self._by_id = {e.entity_id: e for e in self.entities}

    def entity(self, entity_id: str) -> Entity:
        try:
            return self._by_id[entity_id]
        except KeyError:
            raise KeyError(f"unknown entity {entity_id!r}") from None

    def entity_ids(self) -> list[str]:
        return [e.entity_id for e in self.entities]

    def sent_keys(self) -> list[tuple[str, int]]:
        """Every (entity_id, sent_id) pair in the corpus."""
        return [
            (e.entity_id, s.sent_id) for e in self.entities for s in e.sentences()
        ]


def load_corpus(path: str | Path, format: str = "jsonl") -> Corpus:
    """Load a review corpus, assigning dense per-entity sentence ids in file order.

    Raises ParseError (with line number) on malformed lines and
    DuplicateReviewError when an (entity_id, review_id) pair repeats.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format {format!r}")
    entities: dict[str, Entity] = {}
    next_sent_id: dict[str, int] = {}
    seen_reviews: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line=lineno) from None
            if not isinstance(record, dict):
                raise ParseError("record is not a JSON object", line=lineno)
            try:
                entity_id = record["entity_id"]
                review_id = record["review_id"]
                sentences = record["sentences"]
            except KeyError as exc:
                raise ParseError(f"missing field {exc.args[0]!r}", line=lineno) from None
            if not isinstance(entity_id, str) or not isinstance(review_id, str):
                raise ParseError("entity_id and review_id must be strings", line=lineno)
            if not isinstance(sentences, list) or not all(
                isinstance(s, str) for s in sentences
            ):
                raise ParseError("sentences must be a list of strings", line=lineno)
            key = (entity_id, review_id)
            if key in seen_reviews:
                raise DuplicateReviewError(
                    f"duplicate review {review_id!r} for entity {entity_id!r}"
                )
            seen_reviews.add(key)
            entity = entities.get(entity_id)
            if entity is None:
                entity = entities[entity_id] = Entity(entity_id)
                next_sent_id[entity_id] = 0
            review = Review(review_id, [])
            for text in sentences:
                if not text.strip():
                    raise ParseError(
                        f"empty sentence in review {review_id!r}", line=lineno
                    )
                review.sentences.append(Sentence(next_sent_id[entity_id], text))
                next_sent_id[entity_id] += 1
            entity.reviews.append(review)
    return Corpus(list(entities.values()))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the canonical JSONL form (one review per line, corpus order)."""
    with open(path, "w", encoding="utf-8") as fh:
        for entity in corpus.entities:
            for review in entity.reviews:
                record = {
                    "entity_id": entity.entity_id,
                    "review_id": review.review_id,
                    "sentences": [s.text for s in review.sentences],
                }
                fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
                fh.write("\n")


@dataclass(frozen=True)
class AspectLexicon:
    aspect_name: str
    keywords: tuple[str, ...]

    def __post_init__(self):
        if not self.keywords:
            raise ValueError("aspect lexicon must have at least one keyword")
        if len(set(self.keywords)) != len(self.keywords):
            raise ValueError("aspect lexicon contains duplicate keywords")


def load_aspect_lexicons(path: str | Path) -> dict[str, AspectLexicon]:
    """Load one or many aspect lexicons, keyed by aspect name."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if isinstance(payload, dict):
        payload = [payload]
    lexicons: dict[str, AspectLexicon] = {}
    for obj in payload:
        try:
            name = obj["aspect"]
            keywords = obj["keywords"]
        except (TypeError, KeyError):
            raise ParseError("lexicon entries need 'aspect' and 'keywords'") from None
        lexicons[name] = AspectLexicon(name, tuple(k.lower() for k in keywords))
    return lexicons


def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def fold_plural(token: str) -> str:
    """Drop one trailing 's' from tokens of length >= 3 not ending in 'ss'."""
    if len(token) >= 3 and token.endswith("s") and not token.endswith("ss"):
        return token[:-1]
    return token


def tokenize(text: str, fold_plurals: bool = True) -> list[str]:
    """Lowercase, split on whitespace, strip edge punctuation, fold plurals.

    Empty tokens (pure punctuation) are dropped. This is the matching rule
    used for aspect keywords; ``fold_plurals=False`` gives exact-token mode.
    """
    tokens = []
    for raw in text.lower().split():
        tok = _strip_punct(raw)
        if not tok:
            continue
        tokens.append(fold_plural(tok) if fold_plurals else tok)
    return tokens


def match_aspect_sentences(
    corpus: Corpus,
    entity_id: str,
    lexicon: AspectLexicon,
    fold_plurals: bool = True,
) -> set[int]:
    """sent_ids of the entity whose token sequence contains a lexicon keyword.

    Multi-word keywords match as contiguous token subsequences. Keywords are
    tokenized by the same rule as sentences, so plural folding applies to
    both sides.
    """
    entity = corpus.entity(entity_id)
    keyword_seqs = [
        tuple(tokenize(kw, fold_plurals=fold_plurals)) for kw in lexicon.keywords
    ]
    keyword_seqs = [seq for seq in keyword_seqs if seq]
    matched: set[int] = set()
    for sentence in entity.sentences():
        tokens = tokenize(sentence.text, fold_plurals=fold_plurals)
        for seq in keyword_seqs:
            n = len(seq)
            if n > len(tokens):
                continue
            if any(tuple(tokens[i : i + n]) == seq for i in range(len(tokens) - n + 1)):
                matched.add(sentence.sent_id)
                break
    return matched
