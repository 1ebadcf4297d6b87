"""64-bit hash and word-stream primitives.

Everything is unsigned 64-bit arithmetic modulo 2**64, per the recipe in
docs/encoder-baseline.md; the goal is bit-for-bit agreement with any
other implementation of that document.
"""

from __future__ import annotations

_U64 = (1 << 64) - 1
_FNV_BASIS = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_GAMMA = 0x9E3779B97F4A7C15


def fnv1a64(data: bytes) -> int:
    h = _FNV_BASIS
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _U64
    return h


def mix64(z: int) -> int:
    z &= _U64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


def stream64(seed: int, count: int) -> list[int]:
    """Word i of the stream is mix64(seed + (i + 1) * GAMMA)."""
    seed &= _U64
    return [mix64((seed + (i + 1) * _GAMMA) & _U64) for i in range(count)]


def unit_floats(seed: int, count: int) -> list[float]:
    """Doubles in [0, 1): the top 53 bits of each stream word."""
    return [(word >> 11) * 2.0**-53 for word in stream64(seed, count)]


def signed_unit_floats(seed: int, count: int) -> list[float]:
    """Doubles in [-1, 1), the encoder's raw embedding coordinates."""
    return [2.0 * f - 1.0 for f in unit_floats(seed, count)]


def derive_seed(root: int, label: str) -> int:
    """Per-purpose seed: mix64(root XOR fnv1a64(label))."""
    return mix64((root & _U64) ^ fnv1a64(label.encode("utf-8")))
