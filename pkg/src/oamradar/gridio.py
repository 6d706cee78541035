"""Binary grid format, quicklooks, CSV helpers, and the run manifest.

OAMG grid layout (little-endian): magic ``OAMG``, format version u16,
rows u32, cols u32, then rows*cols interleaved float64 (re, im) pairs in
row-major order. The encoding is bit-exact across platforms.
"""

from __future__ import annotations

import csv
import hashlib
import json
import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

__all__ = [
    "OAMG_MAGIC",
    "OAMG_VERSION",
    "RunManifest",
    "read_oamg",
    "sha256_file",
    "write_csv_rows",
    "write_manifest",
    "write_oamg",
    "write_pgm16",
]

OAMG_MAGIC = b"OAMG"
OAMG_VERSION = 1
_HEADER = struct.Struct("<4sHII")


def write_oamg(path, grid) -> None:
    """Write a complex 2D grid in the OAMG binary format."""
    arr = np.asarray(grid, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"OAMG grids are 2D, got shape {arr.shape}")
    rows, cols = arr.shape
    inter = np.empty((rows, cols, 2), dtype="<f8")
    inter[..., 0] = arr.real
    inter[..., 1] = arr.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(OAMG_MAGIC, OAMG_VERSION, rows, cols))
        fh.write(inter.tobytes())


def read_oamg(path) -> np.ndarray:
    """Read an OAMG grid back as a complex128 array."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated OAMG header")
        magic, version, rows, cols = _HEADER.unpack(head)
        if magic != OAMG_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != OAMG_VERSION:
            raise ValueError(f"{path}: unsupported OAMG version {version}")
        payload = fh.read(rows * cols * 16)
    if len(payload) != rows * cols * 16:
        raise ValueError(f"{path}: truncated OAMG payload")
    inter = np.frombuffer(payload, dtype="<f8").reshape(rows, cols, 2)
    return inter[..., 0] + 1j * inter[..., 1]


def write_pgm16(path, magnitude) -> None:
    """Write a 16-bit PGM quicklook of a magnitude image (max-normalized)."""
    mag = np.abs(np.asarray(magnitude, dtype=float))
    if mag.ndim != 2:
        raise ValueError("quicklook input must be 2D")
    peak = mag.max()
    scaled = np.zeros_like(mag) if peak == 0 else mag / peak
    pix = np.round(scaled * 65535.0).astype(">u2")  # PGM samples are big-endian
    with open(path, "wb") as fh:
        fh.write(f"P5\n{mag.shape[1]} {mag.shape[0]}\n65535\n".encode("ascii"))
        fh.write(pix.tobytes())


def write_csv_rows(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Reproducibility record: same scenario + seed give identical checksums."""

    scenario_hash: str
    tool_version: str
    command: str = ""
    stages: list = dc_field(default_factory=list)  # (name, seconds)
    files: dict = dc_field(default_factory=dict)  # relpath -> sha256

    def add_stage(self, name: str, seconds: float) -> None:
        self.stages.append((name, round(float(seconds), 6)))

    def add_file(self, root, path) -> None:
        rel = str(Path(path).relative_to(root))
        self.files[rel] = sha256_file(path)


def write_manifest(path, manifest: RunManifest) -> None:
    payload = {
        "scenario_hash": manifest.scenario_hash,
        "tool_version": manifest.tool_version,
        "command": manifest.command,
        "stages": [{"name": n, "seconds": s} for n, s in manifest.stages],
        "files": dict(sorted(manifest.files.items())),
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
