"""Line-protocol server for the hashed encoder.

Transport is newline-delimited JSON, one object per line, over stdio or
TCP.  Every request carries an id; its reply echoes the id, and replies
on one connection never reorder relative to their requests.  A request
the server understands but cannot serve gets an error reply; a line that
is not JSON at all ends that session.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
import threading

from .encoder import HashedEncoder


def handle_request(encoder: HashedEncoder, req) -> dict:
    rid = req.get("id") if isinstance(req, dict) else None
    if not isinstance(req, dict):
        return {"id": rid, "error": "request must be a JSON object"}
    op = req.get("op")
    if op == "hello":
        return {"id": rid, "dim": encoder.dim, "name": encoder.name}
    if op == "encode":
        ctx = req.get("ctx", [])
        pair = req.get("pair", [])
        if not isinstance(ctx, list) or not isinstance(pair, list):
            return {"id": rid, "error": "ctx and pair must be arrays"}
        cls, ctx_reps = encoder.encode([str(t) for t in ctx], [str(t) for t in pair])
        return {"id": rid, "dim": encoder.dim, "cls": cls.tolist(), "ctx_reps": ctx_reps.tolist()}
    return {"id": rid, "error": f"unknown op {op!r}"}


def serve_stream(encoder: HashedEncoder, reader, writer) -> int:
    """Request loop over a pair of byte streams; returns requests served."""
    served = 0
    for line in reader:
        try:
            req = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            break
        reply = handle_request(encoder, req)
        writer.write((json.dumps(reply) + "\n").encode("utf-8"))
        writer.flush()
        served += 1
    return served


def _serve_connection(encoder: HashedEncoder, conn: socket.socket) -> None:
    with conn:
        reader = conn.makefile("rb")
        writer = conn.makefile("wb")
        try:
            serve_stream(encoder, reader, writer)
        except (BrokenPipeError, ConnectionResetError, OSError):
            pass


def serve_tcp(encoder: HashedEncoder, port: int) -> None:
    """Accept loop: one single-threaded request loop per connection."""
    srv = socket.create_server(("127.0.0.1", port))
    bound = srv.getsockname()[1]
    print(f"listening on tcp://127.0.0.1:{bound}", file=sys.stderr, flush=True)
    with srv:
        while True:
            conn, _ = srv.accept()
            worker = threading.Thread(target=_serve_connection, args=(encoder, conn), daemon=True)
            worker.start()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="refscorer", description="serve hashed encoder vectors over the line protocol"
    )
    parser.add_argument("--dim", type=int, default=64, help="vector dimension")
    parser.add_argument("--seed", type=int, default=0x5D57, help="hash root seed")
    parser.add_argument("--tcp", type=int, metavar="PORT", help="listen on TCP (0 = any free port)")
    args = parser.parse_args(argv)
    encoder = HashedEncoder(dim=args.dim, seed=args.seed)
    if args.tcp is not None:
        serve_tcp(encoder, args.tcp)
        return 0
    serve_stream(encoder, sys.stdin.buffer, sys.stdout.buffer)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
