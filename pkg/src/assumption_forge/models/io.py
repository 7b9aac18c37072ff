"""Versioned binary container for trained models.

Layout: magic, format version, a JSON header (algorithm, hyperparameters,
feature-map hash, class list, payload length), an .npz payload holding the
fitted arrays, and a trailing sha256 over everything before it.
"""

from __future__ import annotations

import hashlib
import io
import json
import struct

import numpy as np

from ..errors import CorruptFile, VersionMismatch

MAGIC = b"AFMD"
FORMAT_VERSION = 1


def write_container(path, header: dict, arrays: dict) -> None:
    payload = io.BytesIO()
    np.savez(payload, **arrays)
    payload_bytes = payload.getvalue()
    header = dict(header)
    header["payload_length"] = len(payload_bytes)
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    body = (
        MAGIC
        + struct.pack("<II", FORMAT_VERSION, len(header_bytes))
        + header_bytes
        + payload_bytes
    )
    digest = hashlib.sha256(body).digest()
    with open(path, "wb") as fh:
        fh.write(body + digest)


def read_container(path) -> tuple[dict, dict]:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + 8 + 32:
        raise CorruptFile(f"{path}: file too short")
    body, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise CorruptFile(f"{path}: checksum mismatch")
    if body[: len(MAGIC)] != MAGIC:
        raise CorruptFile(f"{path}: bad magic")
    version, header_len = struct.unpack_from("<II", body, len(MAGIC))
    if version > FORMAT_VERSION:
        raise VersionMismatch(
            f"{path}: written by format version {version}, reader supports {FORMAT_VERSION}"
        )
    offset = len(MAGIC) + 8
    try:
        header = json.loads(body[offset : offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptFile(f"{path}: unreadable header: {exc}") from None
    payload = body[offset + header_len :]
    if len(payload) != header.get("payload_length"):
        raise CorruptFile(f"{path}: truncated payload")
    with np.load(io.BytesIO(payload), allow_pickle=False) as npz:
        arrays = {k: npz[k] for k in npz.files}
    return header, arrays
