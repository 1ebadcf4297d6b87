"""Deterministic baseline encoder and the out-of-process encoder protocol.

The TinyReference class below restates the documented encoder arithmetic
from scratch (its own hash fold, mixer, float mapping, and position code)
so the production encoder is checked against an independent computation,
not against itself.
"""

import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from sgdst.encoder import (
    BaselineEncoder,
    EncoderOutput,
    SidecarEncoder,
    serve_encoder,
    sinusoidal_position,
)
from sgdst.errors import ProtocolError, TransportError

MASK = (1 << 64) - 1


class TinyReference:
    """Independent restatement of the pinned encoder arithmetic."""

    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, dim, seed):
        self.dim = dim
        self.seed = seed

    @staticmethod
    def fnv(data: bytes) -> int:
        h = 0xCBF29CE484222325
        for b in data:
            h = ((h ^ b) * 0x100000001B3) & MASK
        return h

    @staticmethod
    def mix(z: int) -> int:
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK
        return z ^ (z >> 31)

    def signed_floats(self, label: str) -> list[float]:
        seed = self.mix(self.seed ^ self.fnv(label.encode("utf-8")))
        out = []
        for i in range(1, self.dim + 1):
            word = self.mix((seed + i * self.GAMMA) & MASK)
            out.append((word >> 11) * 2.0**-53 * 2.0 - 1.0)
        return out

    def position(self, pos: int) -> list[float]:
        out = [0.0] * self.dim
        for k in range((self.dim + 1) // 2):
            angle = pos * 10000.0 ** (-2.0 * k / self.dim)
            out[2 * k] = math.sin(angle)
            if 2 * k + 1 < self.dim:
                out[2 * k + 1] = math.cos(angle)
        return out

    def token_vector(self, token: str, pos: int, segment: int) -> list[float]:
        emb = self.signed_floats("token:" + token)
        p = self.position(pos)
        s = self.signed_floats(f"segment:{segment}")
        raw = [a + b + c for a, b, c in zip(emb, p, s)]
        norm = math.sqrt(sum(x * x for x in raw))
        return [x / norm for x in raw] if norm > 1e-12 else raw

    def encode(self, ctx, pair):
        rows = [self.token_vector(t, i, 0) for i, t in enumerate(ctx)]
        pair_rows = [self.token_vector(t, i, 1) for i, t in enumerate(pair)]
        both = rows + pair_rows
        cls = [sum(col) / len(both) for col in zip(*both)] if both else [0.0] * self.dim
        return cls, rows


class TestBaselineArithmetic:
    def test_matches_independent_reference(self):
        enc = BaselineEncoder(dim=24, seed=77)
        ref = TinyReference(dim=24, seed=77)
        ctx = ["user", ":", "book", "a", "table", "for", "four"]
        pair = ["party", "size"]
        out = enc.encode(ctx, pair)
        ref_cls, ref_rows = ref.encode(ctx, pair)
        np.testing.assert_allclose(out.ctx_reps, np.asarray(ref_rows), atol=1e-12)
        np.testing.assert_allclose(out.cls, np.asarray(ref_cls), atol=1e-12)

    def test_rows_are_unit_norm(self):
        out = BaselineEncoder(dim=16, seed=1).encode(["a", "b", "c"], ["q"])
        np.testing.assert_allclose(np.linalg.norm(out.ctx_reps, axis=1), 1.0, atol=1e-12)

    def test_deterministic_across_instances(self):
        a = BaselineEncoder(dim=32, seed=5).encode(["x", "y"], ["z"])
        b = BaselineEncoder(dim=32, seed=5).encode(["x", "y"], ["z"])
        np.testing.assert_array_equal(a.cls, b.cls)
        np.testing.assert_array_equal(a.ctx_reps, b.ctx_reps)

    def test_seed_changes_everything(self):
        a = BaselineEncoder(dim=32, seed=5).encode(["x"], [])
        b = BaselineEncoder(dim=32, seed=6).encode(["x"], [])
        assert np.abs(a.cls - b.cls).max() > 1e-3

    def test_position_matters(self):
        out = BaselineEncoder(dim=32, seed=5).encode(["same", "same"], [])
        assert np.abs(out.ctx_reps[0] - out.ctx_reps[1]).max() > 1e-3

    def test_pair_tokens_shift_cls_but_not_ctx(self):
        enc = BaselineEncoder(dim=32, seed=5)
        a = enc.encode(["x", "y"], ["question"])
        b = enc.encode(["x", "y"], ["other"])
        np.testing.assert_array_equal(a.ctx_reps, b.ctx_reps)
        assert np.abs(a.cls - b.cls).max() > 1e-4

    def test_segments_distinguish_ctx_from_pair(self):
        enc = BaselineEncoder(dim=32, seed=5)
        ctx_row = enc.encode(["tok"], []).ctx_reps[0]
        pair_only_cls = enc.encode([], ["tok"]).cls
        assert np.abs(ctx_row - pair_only_cls).max() > 1e-3

    def test_empty_inputs(self):
        enc = BaselineEncoder(dim=8, seed=5)
        out = enc.encode([], [])
        assert out.ctx_reps.shape == (0, 8)
        np.testing.assert_array_equal(out.cls, np.zeros(8))

    def test_cls_is_plain_mean(self):
        enc = BaselineEncoder(dim=16, seed=9)
        out = enc.encode(["a", "b"], ["c"])
        pair_row = TinyReference(16, 9).token_vector("c", 0, 1)
        stacked = np.vstack([out.ctx_reps, np.asarray(pair_row)])
        np.testing.assert_allclose(out.cls, stacked.mean(axis=0), atol=1e-12)

    def test_name_reports_dim(self):
        assert BaselineEncoder(dim=48).name == "baseline-hash-48"


class TestSinusoid:
    def test_position_zero(self):
        np.testing.assert_allclose(sinusoidal_position(0, 6), [0, 1, 0, 1, 0, 1], atol=0)

    def test_frozen_values(self):
        got = sinusoidal_position(1, 4)
        want = [math.sin(1.0), math.cos(1.0), math.sin(0.01), math.cos(0.01)]
        np.testing.assert_allclose(got, want, atol=1e-15)

    def test_odd_dimension(self):
        got = sinusoidal_position(2, 3)
        f1 = 10000.0 ** (-2.0 / 3.0)
        want = [math.sin(2.0), math.cos(2.0), math.sin(2.0 * f1)]
        np.testing.assert_allclose(got, want, atol=1e-15)


def drive_server(requests):
    """Run the reference server over in-memory byte streams."""
    encoder = BaselineEncoder(dim=8, seed=3)
    reader = io.BytesIO("".join(json.dumps(r) + "\n" for r in requests).encode())
    writer = io.BytesIO()
    served = serve_encoder(encoder, reader, writer)
    replies = [json.loads(line) for line in writer.getvalue().decode().splitlines()]
    return served, replies


class TestServerLoop:
    def test_hello_and_encode(self):
        served, replies = drive_server(
            [
                {"id": 1, "op": "hello"},
                {"id": 2, "op": "encode", "ctx": ["a", "b"], "pair": ["q"]},
            ]
        )
        assert served == 2
        assert replies[0] == {"id": 1, "dim": 8, "name": "baseline-hash-8"}
        assert replies[1]["id"] == 2
        assert len(replies[1]["ctx_reps"]) == 2
        assert len(replies[1]["cls"]) == 8
        want = BaselineEncoder(dim=8, seed=3).encode(["a", "b"], ["q"])
        np.testing.assert_array_equal(np.asarray(replies[1]["ctx_reps"]), want.ctx_reps)

    def test_unknown_op_gets_error_reply(self):
        served, replies = drive_server([{"id": 5, "op": "reverse"}, {"id": 6, "op": "hello"}])
        assert served == 2
        assert "error" in replies[0] and replies[0]["id"] == 5
        assert replies[1]["dim"] == 8

    def test_non_json_line_ends_session(self):
        encoder = BaselineEncoder(dim=8, seed=3)
        reader = io.BytesIO(b'{"id": 1, "op": "hello"}\nnot json at all\n{"id": 2, "op": "hello"}\n')
        writer = io.BytesIO()
        assert serve_encoder(encoder, reader, writer) == 1

    def test_non_object_request_gets_error(self):
        served, replies = drive_server([[1, 2, 3]])
        assert served == 1
        assert "error" in replies[0]

    def test_empty_encode(self):
        _, replies = drive_server([{"id": 1, "op": "encode", "ctx": [], "pair": []}])
        assert replies[0]["ctx_reps"] == []
        assert replies[0]["cls"] == [0.0] * 8


SIDECAR_CMD = f"{sys.executable} -m sgdst.cli serve-encoder --dim 16 --encoder-seed 21"


class TestSidecarSubprocess:
    def test_parity_with_in_process_encoder(self):
        local = BaselineEncoder(dim=16, seed=21)
        with SidecarEncoder(SIDECAR_CMD) as remote:
            assert remote.dim == 16
            assert remote.name == "baseline-hash-16"
            for ctx, pair in [(["hello", "world"], ["a", "b"]), ([], []), (["x"], [])]:
                mine = local.encode(ctx, pair)
                theirs = remote.encode(ctx, pair)
                np.testing.assert_array_equal(mine.cls, theirs.cls)
                np.testing.assert_array_equal(mine.ctx_reps, theirs.ctx_reps)
                assert isinstance(theirs, EncoderOutput)

    def test_tcp_transport(self):
        proc = subprocess.Popen(
            SIDECAR_CMD.split() + ["--tcp", "0"],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )
        try:
            # The CLI echoes its config to stderr first; the listening banner
            # with the bound address follows.
            address = ""
            for _ in range(5):
                line = proc.stderr.readline().decode()
                if "tcp://" in line:
                    address = line.strip().split()[-1]
                    break
            assert address.startswith("tcp://")
            with SidecarEncoder(address) as remote:
                assert remote.dim == 16
                out = remote.encode(["tcp", "works"], [])
                want = BaselineEncoder(dim=16, seed=21).encode(["tcp", "works"], [])
                np.testing.assert_array_equal(out.ctx_reps, want.ctx_reps)
        finally:
            proc.kill()
            proc.wait()

    def test_unconnectable_address_raises(self):
        with pytest.raises(TransportError):
            SidecarEncoder("tcp://127.0.0.1:1")

    def test_bad_command_raises(self):
        with pytest.raises(TransportError):
            SidecarEncoder("/no/such/binary --flag")


class FakeChannel:
    def __init__(self, replies):
        self.sent = []
        self._replies = list(replies)

    def send(self, obj):
        self.sent.append(obj)

    def recv(self):
        return self._replies.pop(0)

    def close(self):
        pass


def make_client(monkeypatch, replies):
    import sgdst.encoder as mod

    monkeypatch.setattr(mod, "_open_channel", lambda spec: FakeChannel(replies))
    return SidecarEncoder("fake")


class TestClientValidation:
    def test_mismatched_reply_id_rejected(self, monkeypatch):
        with pytest.raises(ProtocolError, match="does not match"):
            make_client(monkeypatch, [{"id": 999, "dim": 4, "name": "x"}])

    def test_error_reply_raises(self, monkeypatch):
        with pytest.raises(ProtocolError, match="boom"):
            make_client(monkeypatch, [{"id": 1, "error": "boom"}])

    def test_bad_hello_rejected(self, monkeypatch):
        with pytest.raises(ProtocolError, match="hello"):
            make_client(monkeypatch, [{"id": 1, "name": "missing-dim"}])

    def test_wrong_shape_rejected(self, monkeypatch):
        client = make_client(
            monkeypatch,
            [
                {"id": 1, "dim": 4, "name": "x"},
                {"id": 2, "cls": [0.0] * 4, "ctx_reps": [[0.0] * 4]},
            ],
        )
        with pytest.raises(ProtocolError, match="ctx_reps"):
            client.encode(["two", "tokens"], [])
