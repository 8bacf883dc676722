"""Platform-independent seed derivation."""

from __future__ import annotations

import hashlib
import struct

import numpy as np


def stable_seed(*parts) -> int:
    """64-bit seed from the ``repr`` of each part, stable across runs and machines.

    NumPy scalars are converted to Python scalars first so that ``3`` and
    ``np.int64(3)`` give the same seed.
    """
    parts = [p.item() if isinstance(p, np.generic) else p for p in parts]
    payload = "\x1f".join(repr(p) for p in parts).encode("utf-8")
    return struct.unpack("<Q", hashlib.blake2b(payload, digest_size=8).digest())[0]
