"""Deterministic per-participant deck ordering.

Each (study, participant) pair gets its own permutation of the dataset.
The pipeline is fixed bit-exactly so the same inputs reproduce the same
order across process restarts and across implementations:

    seed  = first 8 bytes (big-endian) of SHA-256(study_id 0x1F participant_id)
    rng   = SplitMix64 stream seeded with it
    order = Fisher-Yates over [0..n-1], i from n-1 down to 1, j = next() mod (i+1)
"""

from __future__ import annotations

import hashlib

from .errors import InvalidCount

_MASK64 = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood 2014); 64-bit outputs."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


def order_seed(study_id: str, participant_id: str) -> int:
    """64-bit seed derived from the pair of identifiers.

    0x1F (unit separator) keeps ("ab","c") and ("a","bc") distinct.
    """
    digest = hashlib.sha256(
        study_id.encode("utf-8") + b"\x1f" + participant_id.encode("utf-8")
    ).digest()
    return int.from_bytes(digest[:8], "big")


def build_order(study_id: str, participant_id: str, n: int) -> list[int]:
    """Permutation of range(n) for this participant's deck.

    Raises :class:`~swipelabel.errors.InvalidCount` for n < 1.
    """
    if n < 1:
        raise InvalidCount(f"cannot order a deck of {n} items")
    rng = SplitMix64(order_seed(study_id, participant_id))
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.next() % (i + 1)
        order[i], order[j] = order[j], order[i]
    return order
