"""Binary exchange formats for per-sentence float matrices.

Two sibling formats share one record layout (all little-endian):

  GSEM — frozen contextual word embeddings, one L×d f32 matrix per sentence.
  GSRP — cached sentence representation vectors, one 1×dim f32 row per
         sentence (dim = dictionary size × number of layers).

File layout::

    magic     4 bytes   b"GSEM" or b"GSRP"
    version   u16       currently 1
    dim       u32       columns of every record matrix
    count     u64       number of sentence records
    records   repeated  entity_id_len u16 | entity_id utf8 | sent_id u32
                        | L u32 | L*dim f32 row-major

Writers emit records sorted by (entity_id, sent_id), so identical stores
always produce identical bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, TruncatedFileError, ValidationError

GSEM_MAGIC = b"GSEM"
GSRP_MAGIC = b"GSRP"
FORMAT_VERSION = 1

SentKey = tuple[str, int]


@dataclass
class EmbeddingStore:
    """Per-sentence matrices of frozen word embeddings, keyed by sent_key."""

    dim: int
    sentences: dict[SentKey, np.ndarray] = field(default_factory=dict)

    def add(self, entity_id: str, sent_id: int, matrix: np.ndarray) -> None:
        matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        if matrix.ndim != 2 or matrix.shape[1] != self.dim or matrix.shape[0] < 1:
            raise ValidationError(
                f"sentence ({entity_id!r}, {sent_id}) has shape {matrix.shape}, "
                f"expected (L>=1, {self.dim})"
            )
        self.sentences[(entity_id, sent_id)] = matrix

    def matrix(self, entity_id: str, sent_id: int) -> np.ndarray:
        try:
            return self.sentences[(entity_id, sent_id)]
        except KeyError:
            raise KeyError(f"no embeddings for ({entity_id!r}, {sent_id})") from None

    def sorted_keys(self) -> list[SentKey]:
        return sorted(self.sentences)

    def word_matrix(self) -> np.ndarray:
        """All word rows pooled across sentences, in sorted sent_key order."""
        if not self.sentences:
            return np.zeros((0, self.dim), dtype=np.float32)
        return np.concatenate([self.sentences[k] for k in self.sorted_keys()])


def _read_exact(fh, nbytes: int, context: str) -> bytes:
    buf = fh.read(nbytes)
    if len(buf) != nbytes:
        raise TruncatedFileError(f"file truncated while reading {context}")
    return buf


def _write_records(fh, dim: int, items: list[tuple[SentKey, np.ndarray]], magic: bytes):
    fh.write(magic)
    fh.write(struct.pack("<HIQ", FORMAT_VERSION, dim, len(items)))
    for (entity_id, sent_id), matrix in items:
        eid = entity_id.encode("utf-8")
        fh.write(struct.pack("<H", len(eid)))
        fh.write(eid)
        fh.write(struct.pack("<II", sent_id, matrix.shape[0]))
        fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())


def _read_records(fh, magic: bytes, path):
    got = fh.read(4)
    if got != magic:
        raise FormatError(f"{path}: bad magic {got!r}, expected {magic!r}")
    header = _read_exact(fh, 14, "header")
    version, dim, count = struct.unpack("<HIQ", header)
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    records = []
    for index in range(count):
        context = f"record {index}"
        (eid_len,) = struct.unpack("<H", _read_exact(fh, 2, context))
        entity_id = _read_exact(fh, eid_len, context).decode("utf-8")
        sent_id, rows = struct.unpack("<II", _read_exact(fh, 8, context))
        context = f"record {index} (sent_key=({entity_id!r}, {sent_id}))"
        payload = _read_exact(fh, 4 * rows * dim, context)
        matrix = np.frombuffer(payload, dtype="<f4").reshape(rows, dim).copy()
        if rows < 1:
            raise ValidationError(f"{path}: {context} has zero rows")
        if not np.isfinite(matrix).all():
            raise ValidationError(f"{path}: {context} contains NaN/Inf values")
        records.append(((entity_id, sent_id), matrix))
    if fh.read(1):
        raise FormatError(f"{path}: trailing bytes after {count} records")
    return dim, records


def write_embedding_file(store: EmbeddingStore, path: str | Path) -> None:
    """Write a GSEM file; byte output is deterministic for identical stores."""
    items = [(key, store.sentences[key]) for key in store.sorted_keys()]
    with open(path, "wb") as fh:
        _write_records(fh, store.dim, items, GSEM_MAGIC)


def read_embedding_file(path: str | Path) -> EmbeddingStore:
    """Read a GSEM file, validating shapes and finiteness of every record."""
    with open(path, "rb") as fh:
        dim, records = _read_records(fh, GSEM_MAGIC, path)
    store = EmbeddingStore(dim)
    for (entity_id, sent_id), matrix in records:
        if (entity_id, sent_id) in store.sentences:
            raise ValidationError(
                f"{path}: duplicate sent_key ({entity_id!r}, {sent_id})"
            )
        store.add(entity_id, sent_id, matrix)
    return store


@dataclass
class RepStore:
    """Per-sentence representation vectors, keyed by sent_key."""

    dim: int
    vectors: dict[SentKey, np.ndarray] = field(default_factory=dict)

    def sorted_keys(self) -> list[SentKey]:
        return sorted(self.vectors)


def write_rep_file(store: RepStore, path: str | Path) -> None:
    """Write a GSRP representation dump (one row per sentence)."""
    items = [
        (key, store.vectors[key].reshape(1, store.dim)) for key in store.sorted_keys()
    ]
    with open(path, "wb") as fh:
        _write_records(fh, store.dim, items, GSRP_MAGIC)


def read_rep_file(path: str | Path) -> RepStore:
    """Read a GSRP dump; every record must be a single row."""
    with open(path, "rb") as fh:
        dim, records = _read_records(fh, GSRP_MAGIC, path)
    store = RepStore(dim)
    for (entity_id, sent_id), matrix in records:
        if matrix.shape[0] != 1:
            raise ValidationError(
                f"{path}: representation record ({entity_id!r}, {sent_id}) has "
                f"{matrix.shape[0]} rows, expected 1"
            )
        store.vectors[(entity_id, sent_id)] = matrix[0]
    return store
