"""Deterministic seed derivation.

Every stochastic actor in a simulation gets its own random stream derived
from the run's root seed and a stable label. Streams are independent of
the order in which actors are created, so adding an agent never perturbs
the draws of existing ones.
"""
from __future__ import annotations

import hashlib
import random

__all__ = ["derive_seed", "split"]


def derive_seed(root_seed: int, label: str) -> int:
    """Hash (root_seed, label) into a 64-bit substream seed."""
    payload = f"{root_seed}:{label}".encode()
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "big")


def split(root_seed: int, label: str) -> random.Random:
    """Return an independent Random keyed by label."""
    return random.Random(derive_seed(root_seed, label))
