"""Arithmetic properties of the hashed encoder."""

import pytest

pytest.importorskip("refscorer.encoder")

import math

import numpy as np

from refscorer.encoder import HashedEncoder, position_encoding


class TestPositionEncoding:
    def test_position_zero_alternates_zero_one(self):
        pe = position_encoding(0, 8)
        assert np.array_equal(pe[0::2], np.zeros(4))
        assert np.array_equal(pe[1::2], np.ones(4))

    def test_matches_direct_formula(self):
        dim = 10
        pe = position_encoding(3, dim)
        for i in range(dim // 2):
            angle = 3 / 10000.0 ** (2 * i / dim)
            assert pe[2 * i] == pytest.approx(math.sin(angle), abs=1e-12)
            assert pe[2 * i + 1] == pytest.approx(math.cos(angle), abs=1e-12)

    def test_odd_dimension_supported(self):
        pe = position_encoding(5, 7)
        assert pe.shape == (7,)
        assert np.isfinite(pe).all()


class TestEncode:
    def test_shapes_and_determinism(self):
        enc = HashedEncoder(dim=16, seed=3)
        cls, reps = enc.encode(["hello", "world"], ["a", "b", "c"])
        assert cls.shape == (16,)
        assert reps.shape == (2, 16)
        cls2, reps2 = HashedEncoder(dim=16, seed=3).encode(["hello", "world"], ["a", "b", "c"])
        assert np.array_equal(cls, cls2)
        assert np.array_equal(reps, reps2)

    def test_token_rows_are_unit_norm(self):
        _, reps = HashedEncoder(dim=32).encode(["x", "y", "z", "x"], [])
        norms = np.linalg.norm(reps, axis=1)
        assert np.allclose(norms, 1.0, atol=1e-12)

    def test_cls_is_mean_over_ctx_and_pair(self):
        enc = HashedEncoder(dim=8, seed=5)
        cls, reps = enc.encode(["p", "q"], ["r"])
        pair_row = enc._token_vector("r", 0, 1)
        want = (reps[0] + reps[1] + pair_row) / 3.0
        assert np.allclose(cls, want, atol=1e-15)

    def test_position_and_segment_matter(self):
        enc = HashedEncoder(dim=12)
        _, reps = enc.encode(["same", "same"], [])
        assert not np.array_equal(reps[0], reps[1])
        cls_ctx, _ = enc.encode(["tok"], [])
        cls_pair, _ = enc.encode([], ["tok"])
        assert not np.array_equal(cls_ctx, cls_pair)

    def test_empty_inputs_give_zeros(self):
        cls, reps = HashedEncoder(dim=6).encode([], [])
        assert np.array_equal(cls, np.zeros(6))
        assert reps.shape == (0, 6)

    def test_seed_changes_vectors(self):
        a, _ = HashedEncoder(dim=8, seed=1).encode(["tok"], [])
        b, _ = HashedEncoder(dim=8, seed=2).encode(["tok"], [])
        assert not np.array_equal(a, b)

    def test_name_carries_dimension(self):
        assert HashedEncoder(dim=48).name == "baseline-hash-48"

    def test_bad_dim_rejected(self):
        with pytest.raises(ValueError):
            HashedEncoder(dim=0)
