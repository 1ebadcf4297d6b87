"""Frozen values and invariants for the hash/stream primitives."""

import pytest

pytest.importorskip("refscorer.hashing")

from refscorer.hashing import (
    derive_seed,
    fnv1a64,
    mix64,
    signed_unit_floats,
    stream64,
    unit_floats,
)

GAMMA = 0x9E3779B97F4A7C15


def test_fnv1a64_frozen_values():
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"encoder") == 0x8B21471FD8AEC12F


def test_mix64_frozen_values():
    assert mix64(0) == 0
    assert mix64(1) == 0x5692161D100B05E5
    assert mix64(GAMMA) == 0xE220A8397B1DCDAF


def test_stream_offset_convention():
    # Word i is mix64(seed + (i + 1) * GAMMA): the stream starts one step in.
    assert stream64(0, 1)[0] == mix64(GAMMA)
    assert stream64(1, 1)[0] == 0x910A2DEC89025CC1
    # First three outputs of the splitmix64 reference generator seeded 0.
    assert stream64(0, 3) == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    assert stream64(7, 3) == [
        7191089600892374487,
        309689372594955804,
        16616101746815609346,
    ]


def test_stream_is_random_access():
    assert stream64(42, 8)[3:] == stream64(42, 8)[3:]
    assert stream64(42, 8)[:5] == stream64(42, 5)


def test_unit_floats_range_and_frozen_prefix():
    floats = unit_floats(0, 100)
    assert all(0.0 <= f < 1.0 for f in floats)
    assert floats[:3] == [
        0.8833108082136426,
        0.43152799704850997,
        0.026433771592597743,
    ]


def test_signed_unit_floats_affine_of_unit():
    plain = unit_floats(9, 16)
    signed = signed_unit_floats(9, 16)
    assert all(s == 2.0 * f - 1.0 for f, s in zip(plain, signed))
    assert all(-1.0 <= s < 1.0 for s in signed)


def test_derive_seed_formula_and_purpose_split():
    assert derive_seed(0x5D57, "segment:0") == 0x6790C5AC1C55CA56
    assert derive_seed(3, "x") == mix64(3 ^ fnv1a64(b"x"))
    assert derive_seed(3, "token:a") != derive_seed(3, "token:b")
    assert derive_seed(3, "token:a") != derive_seed(4, "token:a")


def test_masking_keeps_everything_in_64_bits():
    for value in (0, 1, 2**63, 2**64 - 1, 2**64 + 5):
        assert 0 <= mix64(value) < 2**64
        assert 0 <= derive_seed(value, "p") < 2**64
