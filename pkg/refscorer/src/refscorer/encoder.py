"""Hashed-parity encoder arithmetic.

A token vector is embedding + position + segment, L2-normalized unless
the norm is below 1e-12.  Context tokens carry segment 0 with positions
0..n-1; pair tokens carry segment 1 with positions restarting at 0.  The
summary vector is the plain mean over every normalized token vector, and
the zero vector when there are no tokens at all.
"""

from __future__ import annotations

import numpy as np

from .hashing import derive_seed, signed_unit_floats


def position_encoding(pos: int, dim: int) -> np.ndarray:
    """pe[2i] = sin(pos / 10000^(2i/dim)), pe[2i+1] = the matching cos."""
    pe = np.empty(dim, dtype=np.float64)
    pair_index = np.arange((dim + 1) // 2, dtype=np.float64)
    angle = pos * np.power(10000.0, -2.0 * pair_index / dim)
    pe[0::2] = np.sin(angle)
    pe[1::2] = np.cos(angle[: dim // 2])
    return pe


class HashedEncoder:
    """Deterministic encoder over two token lists; no training, no state."""

    def __init__(self, dim: int = 64, seed: int = 0x5D57):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.seed = seed
        self._embeddings: dict[str, np.ndarray] = {}
        self._segments = {
            0: np.asarray(signed_unit_floats(derive_seed(seed, "segment:0"), dim)),
            1: np.asarray(signed_unit_floats(derive_seed(seed, "segment:1"), dim)),
        }

    @property
    def name(self) -> str:
        return f"baseline-hash-{self.dim}"

    def embedding(self, token: str) -> np.ndarray:
        vec = self._embeddings.get(token)
        if vec is None:
            vec = np.asarray(signed_unit_floats(derive_seed(self.seed, "token:" + token), self.dim))
            self._embeddings[token] = vec
        return vec

    def _token_vector(self, token: str, pos: int, segment: int) -> np.ndarray:
        vec = self.embedding(token) + position_encoding(pos, self.dim) + self._segments[segment]
        norm = float(np.linalg.norm(vec))
        if norm > 1e-12:
            vec = vec / norm
        return vec

    def encode(self, ctx_tokens: list[str], pair_tokens: list[str]) -> tuple[np.ndarray, np.ndarray]:
        """(cls, ctx_reps): the summary vector and one row per ctx token."""
        rows = [self._token_vector(t, i, 0) for i, t in enumerate(ctx_tokens)]
        pair_rows = [self._token_vector(t, i, 1) for i, t in enumerate(pair_tokens)]
        ctx_reps = np.stack(rows) if rows else np.zeros((0, self.dim), dtype=np.float64)
        combined = rows + pair_rows
        if combined:
            cls = np.mean(np.stack(combined), axis=0)
        else:
            cls = np.zeros(self.dim, dtype=np.float64)
        return cls, ctx_reps
