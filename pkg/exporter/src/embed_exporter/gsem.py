"""GSEM writer: the binary embedding format consumed by the summarizer.

Layout (little-endian):

    magic "GSEM" | version u16 = 1 | dim u32 | count u64
    | per record: entity_id_len u16, entity_id utf-8, sent_id u32, L u32,
      L*dim f32 row-major

Records are written sorted by (entity_id, sent_id) for byte determinism.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"GSEM"
VERSION = 1

SentKey = tuple[str, int]


def write_gsem(
    path: str | Path, dim: int, records: dict[SentKey, np.ndarray]
) -> None:
    for key, matrix in records.items():
        if matrix.ndim != 2 or matrix.shape[1] != dim or matrix.shape[0] < 1:
            raise ValueError(f"record {key} has shape {matrix.shape}, expected (L>=1, {dim})")
        if not np.isfinite(matrix).all():
            raise ValueError(f"record {key} contains non-finite values")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HIQ", VERSION, dim, len(records)))
        for entity_id, sent_id in sorted(records):
            matrix = records[(entity_id, sent_id)]
            encoded = entity_id.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<II", sent_id, matrix.shape[0]))
            fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())
