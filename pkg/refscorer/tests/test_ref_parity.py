"""Cross-checks against the tracker's built-in baseline encoder.

These tests need both packages; they are skipped when either one is
not installed, so each suite also stands alone.
"""

import json
import random
import sys
from pathlib import Path

import numpy as np
import pytest

pytest.importorskip("refscorer.encoder")
pytest.importorskip("sgdst")

from refscorer.encoder import HashedEncoder
from sgdst.dialogue import load_dialogues
from sgdst.encoder import BaselineEncoder, SidecarEncoder
from sgdst.metrics import evaluate
from sgdst.mrc import init_mrc_params
from sgdst.schema import load_schema
from sgdst.tracker import ModelBundle, OracleModel, predict_corpus, predict_dialogue
from sgdst.wd import init_wd_params

DATA = Path(__file__).resolve().parent.parent.parent / "data"
SIDECAR_CMD = f"{sys.executable} -m refscorer.server --dim 16 --seed 21"


def random_tokens(rng: random.Random, max_len: int) -> list[str]:
    alphabet = "abcdefghijklmnop0123456789éñü.,?"
    return [
        "".join(rng.choices(alphabet, k=rng.randint(1, 8)))
        for _ in range(rng.randint(0, max_len))
    ]


def test_matches_builtin_encoder_on_random_inputs():
    rng = random.Random(2024)
    worst = 0.0
    for case in range(100):
        dim, seed = (32, 0x5D57) if case < 50 else (17, 99)
        ours = HashedEncoder(dim=dim, seed=seed)
        theirs = BaselineEncoder(dim=dim, seed=seed)
        ctx = random_tokens(rng, 12)
        pair = random_tokens(rng, 6)
        cls, reps = ours.encode(ctx, pair)
        want = theirs.encode(ctx, pair)
        worst = max(
            worst,
            float(np.max(np.abs(cls - want.cls), initial=0.0)),
            float(np.max(np.abs(reps - want.ctx_reps), initial=0.0)),
        )
    assert worst <= 1e-6
    print(f"PASS protocol parity: 100 random inputs, worst component diff {worst:.1e}")


def test_parity_through_the_wire():
    local = BaselineEncoder(dim=16, seed=21)
    with SidecarEncoder(SIDECAR_CMD) as remote:
        assert remote.dim == 16
        assert remote.name == "baseline-hash-16"
        for ctx, pair in [(["hello", "world"], ["city"]), ([], []), (["x"] * 5, ["y"])]:
            mine = remote.encode(ctx, pair)
            want = local.encode(ctx, pair)
            assert np.max(np.abs(mine.cls - want.cls), initial=0.0) <= 1e-6
            assert np.max(np.abs(mine.ctx_reps - want.ctx_reps), initial=0.0) <= 1e-6


def untrained_bundle(encoder) -> ModelBundle:
    return ModelBundle(
        encoder=encoder,
        mrc_params=init_mrc_params(16, seed=5),
        intent_params=init_wd_params(16, seed=6),
        requested_params=init_wd_params(16, seed=7),
        categorical_params=init_wd_params(16, seed=8),
    )


def test_swapping_backends_leaves_predictions_unchanged():
    schema = load_schema(DATA / "synthetic" / "schema.json")
    dialogues = load_dialogues(str(DATA / "synthetic" / "e2e_eval.json"))[:3]

    baseline = untrained_bundle(BaselineEncoder(dim=16, seed=21))
    with SidecarEncoder(SIDECAR_CMD) as remote:
        swapped = untrained_bundle(remote)
        for dlg in dialogues:
            assert predict_dialogue(baseline, schema, dlg) == predict_dialogue(swapped, schema, dlg)


def test_oracle_results_do_not_depend_on_backend():
    # The oracle path never touches an encoder; running it under both
    # configurations pins that the wiring cannot change its results.
    schema = load_schema(DATA / "synthetic" / "schema.json")
    gold = load_dialogues(str(DATA / "synthetic" / "e2e_eval.json"))
    report = evaluate(gold, predict_corpus(OracleModel(), schema, gold), schema)
    assert report.joint_goal_accuracy == 1.0
    assert report.average_goal_accuracy == 1.0
    assert report.active_intent_accuracy == 1.0
