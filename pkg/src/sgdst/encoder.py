"""Token-sequence encoders behind a common interface.

The heads consume three things: one vector per context token, a pooled
summary vector for the whole input, and the encoder dimension.  Two
implementations exist:

* BaselineEncoder: deterministic, training-free reference built from
  hashed token embeddings plus sinusoidal position and segment vectors.
  Its exact arithmetic is pinned in docs/encoder-baseline.md so an
  out-of-process encoder can reproduce it bit-for-bit.
* SidecarEncoder: client for an external encoder process speaking
  newline-delimited JSON over stdio or TCP (same document).
"""

from __future__ import annotations

import json
import shlex
import socket
import subprocess
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .errors import ProtocolError, TransportError
from .hashing import derive_seed, unit_floats

DEFAULT_DIM = 64
DEFAULT_SEED = 0x5D57


@dataclass(frozen=True)
class EncoderOutput:
    """cls summarizes the full input; ctx_reps has one row per context token."""

    cls: np.ndarray
    ctx_reps: np.ndarray


class Encoder(Protocol):
    @property
    def dim(self) -> int: ...

    @property
    def name(self) -> str: ...

    def encode(self, ctx_tokens: list[str], pair_tokens: list[str]) -> EncoderOutput: ...


def sinusoidal_position(pos: int, dim: int) -> np.ndarray:
    """Standard interleaved sin/cos position encoding."""
    out = np.empty(dim, dtype=np.float64)
    half = np.arange((dim + 1) // 2, dtype=np.float64)
    freq = np.power(10000.0, -2.0 * half / dim)
    angles = pos * freq
    out[0::2] = np.sin(angles)
    out[1::2] = np.cos(angles[: dim // 2])
    return out


def signed_unit_floats(seed: int, count: int) -> np.ndarray:
    """count floats in [-1, 1) from the shared deterministic stream."""
    return np.asarray(unit_floats(seed, count), dtype=np.float64) * 2.0 - 1.0


@dataclass
class BaselineEncoder:
    """Deterministic hash-based encoder; identical inputs give identical outputs.

    Each token vector is hash_embedding(token) + position + segment, then
    L2-normalized.  Context tokens use segment 0 with positions 0..n-1;
    pair tokens use segment 1 with positions restarting at 0.  cls is the
    plain mean of every normalized token vector, context and pair alike.
    """

    dim: int = DEFAULT_DIM
    seed: int = DEFAULT_SEED
    _token_cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    _segment_cache: dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    _position_cache: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def name(self) -> str:
        return f"baseline-hash-{self.dim}"

    def token_embedding(self, token: str) -> np.ndarray:
        vec = self._token_cache.get(token)
        if vec is None:
            vec = signed_unit_floats(derive_seed(self.seed, "token:" + token), self.dim)
            self._token_cache[token] = vec
        return vec

    def segment_vector(self, segment: int) -> np.ndarray:
        vec = self._segment_cache.get(segment)
        if vec is None:
            vec = signed_unit_floats(derive_seed(self.seed, f"segment:{segment}"), self.dim)
            self._segment_cache[segment] = vec
        return vec

    def position_vector(self, pos: int) -> np.ndarray:
        vec = self._position_cache.get(pos)
        if vec is None:
            vec = sinusoidal_position(pos, self.dim)
            self._position_cache[pos] = vec
        return vec

    def _token_vector(self, token: str, pos: int, segment: int) -> np.ndarray:
        vec = self.token_embedding(token) + self.position_vector(pos) + self.segment_vector(segment)
        norm = float(np.linalg.norm(vec))
        if norm > 1e-12:
            vec = vec / norm
        return vec

    def encode(self, ctx_tokens: list[str], pair_tokens: list[str]) -> EncoderOutput:
        rows = [self._token_vector(t, i, 0) for i, t in enumerate(ctx_tokens)]
        pair_rows = [self._token_vector(t, i, 1) for i, t in enumerate(pair_tokens)]
        ctx_reps = (
            np.stack(rows) if rows else np.zeros((0, self.dim), dtype=np.float64)
        )
        everything = rows + pair_rows
        if everything:
            cls = np.mean(np.stack(everything), axis=0)
        else:
            cls = np.zeros(self.dim, dtype=np.float64)
        return EncoderOutput(cls=cls, ctx_reps=ctx_reps)


class _LineChannel:
    """One JSON object per line over a pair of byte streams."""

    def __init__(self, reader, writer, close=None):
        self._reader = reader
        self._writer = writer
        self._close = close

    def send(self, obj: dict) -> None:
        try:
            self._writer.write((json.dumps(obj) + "\n").encode("utf-8"))
            self._writer.flush()
        except (BrokenPipeError, OSError) as exc:
            raise TransportError(f"encoder channel write failed: {exc}") from None

    def recv(self) -> dict:
        line = self._reader.readline()
        if not line:
            raise TransportError("encoder channel closed")
        try:
            obj = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ProtocolError(f"bad frame from encoder: {exc}") from None
        if not isinstance(obj, dict):
            raise ProtocolError("encoder frame must be a JSON object")
        return obj

    def close(self) -> None:
        if self._close is not None:
            self._close()


def _open_channel(spec: str) -> _LineChannel:
    if spec.startswith("tcp://"):
        rest = spec[len("tcp://") :]
        host, _, port = rest.rpartition(":")
        if not host or not port.isdigit():
            raise TransportError(f"bad tcp encoder address {spec!r}")
        try:
            sock = socket.create_connection((host, int(port)), timeout=30)
        except OSError as exc:
            raise TransportError(f"cannot connect to {spec}: {exc}") from None
        reader = sock.makefile("rb")
        writer = sock.makefile("wb")

        def close():
            reader.close()
            writer.close()
            sock.close()

        return _LineChannel(reader, writer, close)
    try:
        proc = subprocess.Popen(
            shlex.split(spec), stdin=subprocess.PIPE, stdout=subprocess.PIPE
        )
    except OSError as exc:
        raise TransportError(f"cannot start encoder command {spec!r}: {exc}") from None

    def close():
        proc.stdin.close()
        proc.stdout.close()
        proc.wait(timeout=10)

    return _LineChannel(proc.stdout, proc.stdin, close)


def serve_encoder(encoder: Encoder, reader, writer) -> int:
    """Reference server loop for the line protocol; returns requests served.

    Reads one JSON request per line until EOF.  Malformed requests get an
    error reply instead of killing the loop, so a confused client can
    recover; an unreadable line (not JSON at all) ends the session.
    """
    served = 0
    for line in reader:
        try:
            req = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            break
        rid = req.get("id") if isinstance(req, dict) else None
        try:
            if not isinstance(req, dict):
                raise ProtocolError("request must be a JSON object")
            op = req.get("op")
            if op == "hello":
                reply = {"id": rid, "dim": encoder.dim, "name": encoder.name}
            elif op == "encode":
                ctx = [str(t) for t in req.get("ctx", [])]
                pair = [str(t) for t in req.get("pair", [])]
                out = encoder.encode(ctx, pair)
                reply = {
                    "id": rid,
                    "dim": encoder.dim,
                    "cls": out.cls.tolist(),
                    "ctx_reps": out.ctx_reps.tolist(),
                }
            else:
                raise ProtocolError(f"unknown op {op!r}")
        except ProtocolError as exc:
            reply = {"id": rid, "error": str(exc)}
        writer.write((json.dumps(reply) + "\n").encode("utf-8"))
        writer.flush()
        served += 1
    return served


class SidecarEncoder:
    """Encoder living in another process, reached through a line channel.

    `spec` is either a command line to spawn (stdio transport) or a
    "tcp://host:port" address.  A hello exchange on startup fixes the
    dimension and name for the session.
    """

    def __init__(self, spec: str):
        self._channel = _open_channel(spec)
        self._next_id = 1
        reply = self._call({"op": "hello"})
        try:
            self._dim = int(reply["dim"])
            self._name = str(reply["name"])
        except (KeyError, TypeError, ValueError):
            raise ProtocolError(f"bad hello reply: {reply!r}") from None

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def name(self) -> str:
        return self._name

    def _call(self, body: dict) -> dict:
        rid = self._next_id
        self._next_id += 1
        self._channel.send({"id": rid, **body})
        reply = self._channel.recv()
        if reply.get("id") != rid:
            raise ProtocolError(f"reply id {reply.get('id')!r} does not match request {rid}")
        if "error" in reply:
            raise ProtocolError(f"encoder error: {reply['error']}")
        return reply

    def encode(self, ctx_tokens: list[str], pair_tokens: list[str]) -> EncoderOutput:
        reply = self._call(
            {"op": "encode", "ctx": list(ctx_tokens), "pair": list(pair_tokens)}
        )
        try:
            cls = np.asarray(reply["cls"], dtype=np.float64)
            ctx_reps = np.asarray(reply["ctx_reps"], dtype=np.float64)
        except (KeyError, ValueError) as exc:
            raise ProtocolError(f"bad encode reply: {exc}") from None
        if ctx_reps.size == 0:
            ctx_reps = ctx_reps.reshape(0, self._dim)
        if cls.shape != (self._dim,):
            raise ProtocolError(f"cls has shape {cls.shape}, want ({self._dim},)")
        if ctx_reps.ndim != 2 or ctx_reps.shape != (len(ctx_tokens), self._dim):
            raise ProtocolError(
                f"ctx_reps has shape {ctx_reps.shape}, want ({len(ctx_tokens)}, {self._dim})"
            )
        return EncoderOutput(cls=cls, ctx_reps=ctx_reps)

    def close(self) -> None:
        self._channel.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
