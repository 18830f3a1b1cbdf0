"""Minimal review-corpus reader.

Same JSONL contract as the summarization side: one object per review,
``{"entity_id": str, "review_id": str, "sentences": [str, ...]}``, sentence
ids dense per entity in file order. Kept independent so the exporter only
shares the on-disk formats with the consumer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class CorpusSentence:
    entity_id: str
    sent_id: int
    text: str


def load_sentences(path: str | Path) -> list[CorpusSentence]:
    sentences: list[CorpusSentence] = []
    next_id: dict[str, int] = {}
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            entity_id = record["entity_id"]
            review_id = record["review_id"]
            key = (entity_id, review_id)
            if key in seen:
                raise ValueError(
                    f"{path}:{lineno}: duplicate review {review_id!r} for {entity_id!r}"
                )
            seen.add(key)
            for text in record["sentences"]:
                sid = next_id.get(entity_id, 0)
                sentences.append(CorpusSentence(entity_id, sid, text))
                next_id[entity_id] = sid + 1
    return sentences
