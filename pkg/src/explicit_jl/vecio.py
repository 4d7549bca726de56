"""Vector files.

Binary layout: an optional header ``b"JLV1"`` + 32-byte SHA-256 of the
plan + ``uint32`` length + that many bytes of UTF-8 JSON config, then
records of ``uint64`` length followed by that many ``float64`` values,
all little-endian.

CSV layout: optional ``# plan_sha256=<hex>`` and ``# config=<json>``
comment lines, then one vector per line.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import InvalidParams, LengthMismatch

MAGIC = b"JLV1"


def guess_format(path) -> str:
    return "csv" if str(path).lower().endswith(".csv") else "binary"


def write_vectors(path, vectors, fmt: str | None = None, plan_hash: str | None = None,
                  config: dict | None = None) -> None:
    fmt = fmt or guess_format(path)
    path = Path(path)
    if fmt == "csv":
        lines = []
        if plan_hash:
            lines.append(f"# plan_sha256={plan_hash}")
        if config is not None:
            lines.append(f"# config={json.dumps(config, sort_keys=True)}")
        for v in vectors:
            lines.append(",".join(repr(float(x)) for x in v))
        path.write_text("\n".join(lines) + "\n")
        return
    with open(path, "wb") as fh:
        if plan_hash:
            cfg = json.dumps(config or {}, sort_keys=True).encode()
            fh.write(MAGIC + bytes.fromhex(plan_hash) + struct.pack("<I", len(cfg)) + cfg)
        for v in vectors:
            v = np.asarray(v, dtype="<f8")
            fh.write(struct.pack("<Q", v.size))
            fh.write(v.tobytes())


def read_vectors(path, fmt: str | None = None) -> tuple[list[np.ndarray], str | None]:
    """Return the vectors and the plan hash from the header, if any."""
    fmt = fmt or guess_format(path)
    path = Path(path)
    if fmt == "csv":
        vectors, plan_hash = [], None
        for line in path.read_text().splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# plan_sha256="):
                    plan_hash = line.split("=", 1)[1].strip()
                continue
            try:
                vectors.append(np.array([float(x) for x in line.split(",")]))
            except ValueError as exc:
                raise InvalidParams(f"{path}: bad CSV line: {exc}") from exc
        return vectors, plan_hash
    data = path.read_bytes()
    pos, plan_hash = 0, None
    if data[:4] == MAGIC:
        plan_hash = data[4:36].hex()
        (clen,) = struct.unpack_from("<I", data, 36)
        pos = 40 + clen
    vectors = []
    while pos < len(data):
        if pos + 8 > len(data):
            raise LengthMismatch(f"{path}: truncated record header")
        (n,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        end = pos + 8 * n
        if end > len(data):
            raise LengthMismatch(f"{path}: truncated record")
        vectors.append(np.frombuffer(data[pos:end], dtype="<f8").astype(float))
        pos = end
    return vectors, plan_hash
