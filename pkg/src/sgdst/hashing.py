"""Deterministic 64-bit hashing and stream utilities.

Everything here is defined in terms of exact unsigned 64-bit arithmetic so
that an independent implementation (another process, another language) can
reproduce the same values bit for bit.  The full recipe is written down in
docs/encoder-baseline.md.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

# Weyl increment of the splitmix64 generator.
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & MASK64
    return h


def mix64(z: int) -> int:
    """splitmix64 finalizer: scrambles a 64-bit state into an output word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream64(seed: int, count: int) -> list[int]:
    """First `count` outputs of splitmix64 seeded with `seed`.

    Output i is mix64(seed + (i + 1) * GAMMA), which is equivalent to the
    usual stateful formulation but trivially random-access.
    """
    seed &= MASK64
    return [mix64((seed + (i + 1) * SPLITMIX_GAMMA) & MASK64) for i in range(count)]


def unit_floats(seed: int, count: int) -> list[float]:
    """`count` deterministic floats in [0, 1) drawn from the splitmix64 stream."""
    return [(w >> 11) * 2.0 ** -53 for w in stream64(seed, count)]


def derive_seed(root_seed: int, purpose: str) -> int:
    """Split one root seed into independent per-purpose seeds.

    The scheme is mix64(root XOR fnv1a64(purpose)); every consumer of
    randomness names its purpose, so adding a consumer never perturbs the
    streams of existing ones.
    """
    return mix64((root_seed & MASK64) ^ fnv1a64(purpose.encode("utf-8")))
