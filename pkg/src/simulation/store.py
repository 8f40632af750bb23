"""
File store: N files split into F equal byte blocks.

Each file is zero-padded to F*L bytes, where L = ceil(longest / F), and the
original lengths are kept so unpack() can strip the padding again.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from src.errors import UsageError
from src.simulation.prng import SplitMix64


@dataclass
class FileStore:
    blocks: np.ndarray = field(repr=False)   # (N, F, L) uint8
    lengths: Tuple[int, ...]

    @property
    def N(self) -> int:
        return self.blocks.shape[0]

    @property
    def F(self) -> int:
        return self.blocks.shape[1]

    @property
    def L(self) -> int:
        return self.blocks.shape[2]

    def file_bytes(self, index: int) -> bytes:
        return self.blocks[index].tobytes()[: self.lengths[index]]


def pack(inputs: Sequence[bytes], F: int) -> FileStore:
    if not inputs:
        raise UsageError("pack needs at least one input file")
    if F < 1:
        raise UsageError(f"subpacketization F must be positive, got {F}")
    longest = max(len(x) for x in inputs)
    L = max(1, -(-longest // F))
    blocks = np.zeros((len(inputs), F * L), dtype=np.uint8)
    for i, data in enumerate(inputs):
        blocks[i, : len(data)] = np.frombuffer(bytes(data), dtype=np.uint8)
    logger.debug(f"packed {len(inputs)} files into F={F} blocks of {L} bytes")
    return FileStore(blocks=blocks.reshape(len(inputs), F, L), lengths=tuple(len(x) for x in inputs))


def unpack(store: FileStore) -> List[bytes]:
    return [store.file_bytes(i) for i in range(store.N)]


def random_files(N: int, payload_bytes: int, seed: int) -> List[bytes]:
    """N files of `payload_bytes` bytes from one SplitMix64 stream."""
    if payload_bytes < 1:
        raise UsageError(f"payload_bytes must be positive, got {payload_bytes}")
    rng = SplitMix64(seed)
    return [rng.bytes(payload_bytes) for _ in range(N)]


def read_inputs(paths: Sequence[Path]) -> List[bytes]:
    out = []
    for path in paths:
        path = Path(path)
        if not path.is_file():
            raise UsageError(f"input file not found: {path}")
        out.append(path.read_bytes())
    return out


# -----------------------------------------------------------
# Manifest (pack / unpack on disk)
# -----------------------------------------------------------

class StoreManifest(BaseModel):
    """On-disk form of a FileStore: names, lengths and hex subfile blocks."""
    F: int = Field(ge=1)
    L: int = Field(ge=1)
    names: List[str]
    lengths: List[int]
    blocks: List[List[str]] = Field(description="blocks[i][j] = hex of subfile j of file i")

    @classmethod
    def from_store(cls, store: FileStore, names: Sequence[str]) -> "StoreManifest":
        return cls(
            F=store.F,
            L=store.L,
            names=list(names),
            lengths=list(store.lengths),
            blocks=[[store.blocks[i, j].tobytes().hex() for j in range(store.F)] for i in range(store.N)],
        )

    def to_store(self) -> FileStore:
        if len(self.blocks) != len(self.lengths):
            raise UsageError("manifest lists a different number of files and lengths")
        raw = bytearray()
        for row in self.blocks:
            if len(row) != self.F:
                raise UsageError(f"manifest file has {len(row)} subfiles, expected F={self.F}")
            for block in row:
                chunk = bytes.fromhex(block)
                if len(chunk) != self.L:
                    raise UsageError(f"manifest block of {len(chunk)} bytes, expected L={self.L}")
                raw.extend(chunk)
        blocks = np.frombuffer(bytes(raw), dtype=np.uint8).reshape(len(self.lengths), self.F, self.L)
        return FileStore(blocks=blocks.copy(), lengths=tuple(self.lengths))


def write_manifest(store: FileStore, names: Sequence[str], path: Path) -> None:
    manifest = StoreManifest.from_store(store, names)
    Path(path).write_text(json.dumps(manifest.model_dump(), indent=2) + "\n", encoding="utf-8")
    logger.info(f"wrote manifest for {store.N} files (F={store.F}, L={store.L}) to {path}")


def read_manifest(path: Path) -> StoreManifest:
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"manifest not found: {path}")
    return StoreManifest.model_validate_json(path.read_text(encoding="utf-8"))
