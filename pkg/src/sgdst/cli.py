"""Command line interface.

Subcommands cover the whole workflow: ingest (dialogues to example files),
train, predict, evaluate, augment-lexicon (offline synonym expansion),
serve-encoder (reference wire-protocol server), and repl (line-oriented
tracking service).  Results go to stdout as JSON; the effective
configuration is echoed to stderr before work starts.

Exit codes: 0 success, 1 operational failure (bad data, missing cache
entry, transport loss), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys

from . import __version__
from .augment import CachedProvider, build_lexicon, load_lexicon, save_lexicon
from .checkpoint import load_checkpoint, save_checkpoint
from .dialogue import USER, load_dialogues, parse_dialogue, save_dialogues, state_to_raw
from .encoder import (
    DEFAULT_DIM,
    DEFAULT_SEED,
    BaselineEncoder,
    Encoder,
    SidecarEncoder,
    serve_encoder,
)
from .errors import SgdstError, UsageError
from .examples import dump_examples_jsonl, make_training_examples
from .hashing import derive_seed
from .metrics import evaluate
from .optim import TrainConfig
from .pipeline import train_bundle
from .schema import load_schema
from .tracker import predict_corpus, predict_dialogue

SIDECAR_ENV = "SGDST_SIDECAR"


def _echo_config(args: argparse.Namespace) -> None:
    shown = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    print(f"config: {json.dumps(shown, sort_keys=True, default=str)}", file=sys.stderr)


def _resolve_encoder(args: argparse.Namespace) -> Encoder:
    kind = getattr(args, "encoder", "baseline")
    if kind == "baseline":
        return BaselineEncoder(dim=args.dim, seed=args.encoder_seed)
    spec = getattr(args, "sidecar", None) or os.environ.get(SIDECAR_ENV)
    if not spec:
        raise UsageError(
            f"--encoder sidecar needs --sidecar or the {SIDECAR_ENV} environment variable"
        )
    return SidecarEncoder(spec)


def _load_lexicon_arg(args: argparse.Namespace):
    path = getattr(args, "lexicon", None)
    return load_lexicon(path) if path else None


def _add_encoder_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--encoder", choices=("baseline", "sidecar"), default="baseline")
    p.add_argument("--sidecar", help=f"sidecar command or tcp://host:port (or ${SIDECAR_ENV})")
    p.add_argument("--dim", type=int, default=DEFAULT_DIM, help="baseline encoder dimension")
    p.add_argument(
        "--encoder-seed",
        type=int,
        default=DEFAULT_SEED,
        help="baseline hash seed; an encoder identity, not a training seed",
    )


def cmd_ingest(args) -> int:
    schema = load_schema(args.schema)
    dialogues = load_dialogues(args.dialogues)
    lexicon = _load_lexicon_arg(args)
    examples = make_training_examples(
        dialogues, schema, lexicon, use_reset_rule=not args.no_reset_rule
    )
    os.makedirs(args.out_dir, exist_ok=True)
    dump_examples_jsonl(os.path.join(args.out_dir, "mrc.jsonl"), examples.mrc)
    dump_examples_jsonl(os.path.join(args.out_dir, "intent.jsonl"), examples.intent)
    dump_examples_jsonl(os.path.join(args.out_dir, "requested.jsonl"), examples.requested)
    dump_examples_jsonl(os.path.join(args.out_dir, "categorical.jsonl"), examples.categorical)
    print(json.dumps(examples.counts()))
    return 0


def cmd_train(args) -> int:
    schema = load_schema(args.schema)
    dialogues = load_dialogues(args.dialogues)
    lexicon = _load_lexicon_arg(args)
    encoder = _resolve_encoder(args)
    examples = make_training_examples(
        dialogues, schema, lexicon, use_reset_rule=not args.no_reset_rule
    )
    config = TrainConfig(
        lr=args.lr,
        weight_decay=args.weight_decay,
        batch_size=args.batch_size,
        epochs=args.epochs,
        seed=derive_seed(args.seed, "train") % (2**31),
    )
    bundle, summary = train_bundle(
        examples, encoder, config, lexicon, time_budget=args.time_budget
    )
    save_checkpoint(args.out, bundle)
    print(
        json.dumps(
            {
                "checkpoint": args.out,
                "examples": examples.counts(),
                "epochs": {
                    "mrc": summary.mrc_epochs,
                    "intent": summary.intent_epochs,
                    "requested": summary.requested_epochs,
                    "categorical": summary.categorical_epochs,
                },
                "final_losses": summary.final_losses,
            }
        )
    )
    return 0


def cmd_predict(args) -> int:
    schema = load_schema(args.schema)
    dialogues = load_dialogues(args.dialogues)
    encoder = _resolve_encoder(args) if args.encoder == "sidecar" else None
    bundle = load_checkpoint(args.model, encoder)
    bundle.lexicon = _load_lexicon_arg(args)
    predictions = predict_corpus(
        bundle, schema, dialogues, use_reset_rule=not args.no_reset_rule
    )
    save_dialogues(args.out, predictions)
    print(json.dumps({"predictions": args.out, "dialogues": len(predictions)}))
    return 0


def cmd_evaluate(args) -> int:
    schema = load_schema(args.schema)
    gold = load_dialogues(args.gold)
    pred = load_dialogues(args.pred)
    report = evaluate(gold, pred, schema, strict_binary=args.strict_binary)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_augment_lexicon(args) -> int:
    if args.terms:
        terms = [t.strip() for t in args.terms.split(",") if t.strip()]
    else:
        with open(args.terms_file, encoding="utf-8") as fh:
            terms = [line.strip() for line in fh if line.strip()]
    provider = CachedProvider(args.cache)
    lexicon = build_lexicon(terms, provider)
    save_lexicon(args.out, lexicon)
    print(json.dumps({"lexicon": args.out, "terms": len(lexicon)}))
    return 0


def cmd_serve_encoder(args) -> int:
    encoder = BaselineEncoder(dim=args.dim, seed=args.encoder_seed)
    if args.tcp is not None:
        srv = socket.create_server(("127.0.0.1", args.tcp))
        port = srv.getsockname()[1]
        print(f"listening on tcp://127.0.0.1:{port}", file=sys.stderr, flush=True)
        conn, _ = srv.accept()
        with conn:
            reader = conn.makefile("rb")
            writer = conn.makefile("wb")
            serve_encoder(encoder, reader, writer)
        srv.close()
        return 0
    serve_encoder(encoder, sys.stdin.buffer, sys.stdout.buffer)
    return 0


def cmd_repl(args) -> int:
    schema = load_schema(args.schema)
    encoder = _resolve_encoder(args) if args.encoder == "sidecar" else None
    bundle = load_checkpoint(args.model, encoder)
    bundle.lexicon = _load_lexicon_arg(args)
    out = sys.stdout
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError as exc:
            print(json.dumps({"error": f"bad request: {exc.msg}"}), file=out, flush=True)
            continue
        op = req.get("op") if isinstance(req, dict) else None
        if op == "quit":
            print(json.dumps({"ok": True}), file=out, flush=True)
            return 0
        if op == "ping":
            print(json.dumps({"ok": True}), file=out, flush=True)
            continue
        if op != "track":
            print(json.dumps({"error": f"unknown op {op!r}"}), file=out, flush=True)
            continue
        try:
            dialogue = parse_dialogue(req["dialogue"])
            predicted = predict_dialogue(
                bundle, schema, dialogue, use_reset_rule=not args.no_reset_rule
            )
        except (KeyError, SgdstError) as exc:
            print(json.dumps({"error": str(exc)}), file=out, flush=True)
            continue
        turns = [
            {
                "turn_index": i,
                "frames": {
                    f.service: state_to_raw(f.state) for f in t.frames if f.state is not None
                },
            }
            for i, t in enumerate(predicted.turns)
            if t.speaker == USER
        ]
        print(
            json.dumps({"dialogue_id": predicted.dialogue_id, "turns": turns}),
            file=out,
            flush=True,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgdst", description="Schema-guided dialogue state tracking toolkit"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="turn a dialogue corpus into training example files")
    p.add_argument("--schema", required=True)
    p.add_argument("--dialogues", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--no-reset-rule", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train all heads and write a checkpoint")
    p.add_argument("--schema", required=True)
    p.add_argument("--dialogues", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--no-reset-rule", action="store_true")
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--weight-decay", type=float, default=0.0)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--seed", type=int, default=13)
    p.add_argument("--time-budget", type=float, help="soft training time limit in seconds")
    _add_encoder_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict states for a corpus")
    p.add_argument("--schema", required=True)
    p.add_argument("--dialogues", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--no-reset-rule", action="store_true")
    _add_encoder_args(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against gold states")
    p.add_argument("--schema", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument(
        "--strict-binary",
        action="store_true",
        help="floor per-slot scores to {0,1} instead of fuzzy matching",
    )
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("augment-lexicon", help="expand terms into a synonym lexicon (offline)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--terms", help="comma-separated terms")
    group.add_argument("--terms-file", help="one term per line")
    p.add_argument("--cache", required=True, help="frozen synonym cache (JSON)")
    p.add_argument("--out", required=True, help="lexicon TSV to write")
    p.set_defaults(func=cmd_augment_lexicon)

    p = sub.add_parser("serve-encoder", help="serve the baseline encoder over the line protocol")
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--encoder-seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--tcp", type=int, nargs="?", const=0, help="listen on TCP (0 = any port)")
    p.set_defaults(func=cmd_serve_encoder)

    p = sub.add_parser("repl", help="line-oriented tracking: one JSON request per line")
    p.add_argument("--schema", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--no-reset-rule", action="store_true")
    _add_encoder_args(p)
    p.set_defaults(func=cmd_repl)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _echo_config(args)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SgdstError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
