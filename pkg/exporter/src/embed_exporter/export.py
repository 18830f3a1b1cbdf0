"""Embedding extraction: real encoder forward passes or hash-seeded synthesis.

The real path loads a pretrained (or locally saved) encoder with
``transformers``, runs it frozen in inference mode, and writes the
final-layer hidden state of every non-special token as float32 rows.
Sequences are truncated to ``max_len`` positions counting the tokenizer's
special tokens, which are then dropped from the output rows. Sentences that
tokenize to zero non-special tokens are skipped and listed in the manifest.

The synthetic path needs no ML stack: every whitespace token maps to a
deterministic pseudo-random vector seeded by a hash of ``"{seed}:{token}"``,
so the same token always gets the same row.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .corpus import load_sentences
from .gsem import write_gsem

ENCODER_BATCH = 16


@dataclass
class ExportManifest:
    encoder_name: str
    dim: int
    truncation_length: int
    corpus_sha256: str
    sentence_count: int
    skipped: list[dict] = field(default_factory=list)

    def write(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, sort_keys=True, indent=2)
            fh.write("\n")


def _sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _encode_unique_texts(texts: list[str], encoder_name: str, max_len: int):
    """Final-layer hidden states per unique text, specials dropped.

    Unique texts are processed in sorted order with a fixed batch size, so
    identical corpus files always produce identical bytes and identical
    sentences share one forward pass (hence bitwise-equal matrices).
    """
    import torch
    from transformers import AutoModel, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(encoder_name)
    model = AutoModel.from_pretrained(encoder_name)
    # seq2seq checkpoints contribute only their encoder stack
    if getattr(model.config, "is_encoder_decoder", False):
        encoder = model.get_encoder()
    else:
        encoder = model
    encoder.eval()
    for parameter in encoder.parameters():
        parameter.requires_grad_(False)

    results: dict[str, np.ndarray | None] = {}
    ordered = sorted(set(texts))
    with torch.inference_mode():
        for start in range(0, len(ordered), ENCODER_BATCH):
            batch = ordered[start : start + ENCODER_BATCH]
            encoding = tokenizer(
                batch,
                return_tensors="pt",
                padding=True,
                truncation=True,
                max_length=max_len,
                return_special_tokens_mask=True,
            )
            special_mask = encoding.pop("special_tokens_mask")
            output = encoder(**encoding)
            hidden = output.last_hidden_state
            for row, text in enumerate(batch):
                keep = (encoding["attention_mask"][row] == 1) & (special_mask[row] == 0)
                vectors = hidden[row][keep]
                results[text] = (
                    vectors.to(torch.float32).cpu().numpy() if vectors.shape[0] else None
                )
    return results


def export(
    corpus_path: str | Path,
    encoder_name: str,
    out_path: str | Path,
    max_len: int = 128,
) -> ExportManifest:
    """Run the frozen encoder over every corpus sentence and write a GSEM file."""
    sentences = load_sentences(corpus_path)
    per_text = _encode_unique_texts([s.text for s in sentences], encoder_name, max_len)
    dims = {m.shape[1] for m in per_text.values() if m is not None}
    if len(dims) != 1:
        raise ValueError(f"expected one hidden size, saw {sorted(dims)}")
    dim = dims.pop()
    records: dict[tuple[str, int], np.ndarray] = {}
    skipped = []
    for sentence in sentences:
        matrix = per_text[sentence.text]
        if matrix is None:
            skipped.append(
                {"entity_id": sentence.entity_id, "sent_id": sentence.sent_id,
                 "reason": "no non-special tokens"}
            )
            continue
        records[(sentence.entity_id, sentence.sent_id)] = matrix
    write_gsem(out_path, dim, records)
    manifest = ExportManifest(
        encoder_name=str(encoder_name),
        dim=dim,
        truncation_length=max_len,
        corpus_sha256=_sha256_file(corpus_path),
        sentence_count=len(records),
        skipped=skipped,
    )
    manifest.write(str(out_path) + ".manifest.json")
    return manifest


def token_vector(token: str, dim: int, seed: int) -> np.ndarray:
    """Deterministic per-token embedding from a stable hash of seed and token."""
    digest = hashlib.blake2b(f"{seed}:{token}".encode("utf-8"), digest_size=8).digest()
    rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))
    return rng.normal(0.0, 1.0, size=dim).astype(np.float32)


def export_synthetic(
    corpus_path: str | Path,
    dim: int,
    seed: int,
    out_path: str | Path,
    max_len: int = 128,
) -> ExportManifest:
    """Write hash-seeded pseudo-random embeddings; same token, same vector."""
    sentences = load_sentences(corpus_path)
    records: dict[tuple[str, int], np.ndarray] = {}
    skipped = []
    for sentence in sentences:
        tokens = sentence.text.split()[:max_len]
        if not tokens:
            skipped.append(
                {"entity_id": sentence.entity_id, "sent_id": sentence.sent_id,
                 "reason": "no tokens"}
            )
            continue
        records[(sentence.entity_id, sentence.sent_id)] = np.stack(
            [token_vector(t, dim, seed) for t in tokens]
        )
    write_gsem(out_path, dim, records)
    manifest = ExportManifest(
        encoder_name=f"synthetic:seed={seed}",
        dim=dim,
        truncation_length=max_len,
        corpus_sha256=_sha256_file(corpus_path),
        sentence_count=len(records),
        skipped=skipped,
    )
    manifest.write(str(out_path) + ".manifest.json")
    return manifest
