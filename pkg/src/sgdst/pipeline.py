"""Encoding of training examples and end-to-end head training."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .augment import SynonymLexicon
from .encoder import Encoder
from .examples import MrcExample, TrainingExamples, WdExample
from .mrc import MrcInstance, init_mrc_params, train_mrc
from .optim import TrainConfig
from .tracker import ModelBundle
from .wd import WIDE_DIM, WdInstance, init_wd_params, train_wd


def encode_mrc_examples(encoder: Encoder, examples: list[MrcExample]) -> list[MrcInstance]:
    out = []
    for ex in examples:
        enc = encoder.encode(list(ex.ctx_tokens), list(ex.pair_tokens))
        out.append(
            MrcInstance(
                ctx_reps=enc.ctx_reps,
                cls=enc.cls,
                has_answer=ex.has_answer,
                start=ex.start,
                end=ex.end,
            )
        )
    return out


def encode_wd_examples(
    encoder: Encoder, examples: list[WdExample], use_wide: bool = True
) -> list[WdInstance]:
    out = []
    for ex in examples:
        enc = encoder.encode(list(ex.ctx_tokens), list(ex.pair_tokens))
        wide = np.asarray(ex.wide, dtype=np.float64) if use_wide else np.zeros(WIDE_DIM)
        out.append(WdInstance(cls=enc.cls, wide=wide, label=ex.label))
    return out


@dataclass(frozen=True)
class TrainSummary:
    mrc_epochs: int
    intent_epochs: int
    requested_epochs: int
    categorical_epochs: int
    final_losses: dict


def train_bundle(
    examples: TrainingExamples,
    encoder: Encoder,
    config: TrainConfig,
    lexicon: SynonymLexicon | None = None,
    target_accuracy: float | None = 1.0,
    time_budget: float | None = None,
    use_wide: bool = True,
) -> tuple[ModelBundle, TrainSummary]:
    """Train all four heads on the example set and assemble a bundle.

    Heads train independently; each stops at its epoch limit, at perfect
    training accuracy, or when its share of the time budget runs out.  A
    head with no examples (a schema can lack span slots entirely) keeps
    its initialization and is never exercised by the tracker.
    """
    per_head_budget = None if time_budget is None else time_budget / 4.0
    if examples.mrc:
        mrc_params, mrc_hist = train_mrc(
            encode_mrc_examples(encoder, examples.mrc),
            config,
            target_accuracy=target_accuracy,
            time_budget=per_head_budget,
        )
    else:
        mrc_params, mrc_hist = init_mrc_params(encoder.dim, seed=config.seed), []
    histories = {}
    wd_params = {}
    for task, rows, seed_shift in (
        ("intent", examples.intent, 1),
        ("requested", examples.requested, 2),
        ("categorical", examples.categorical, 3),
    ):
        task_config = replace(config, seed=config.seed + seed_shift)
        if rows:
            params, hist = train_wd(
                encode_wd_examples(encoder, rows, use_wide),
                task_config,
                target_accuracy=target_accuracy,
                time_budget=per_head_budget,
            )
        else:
            params, hist = init_wd_params(encoder.dim, seed=task_config.seed), []
        wd_params[task] = params
        histories[task] = hist
    bundle = ModelBundle(
        encoder=encoder,
        mrc_params=mrc_params,
        intent_params=wd_params["intent"],
        requested_params=wd_params["requested"],
        categorical_params=wd_params["categorical"],
        lexicon=lexicon,
        use_wide=use_wide,
    )
    summary = TrainSummary(
        mrc_epochs=len(mrc_hist),
        intent_epochs=len(histories["intent"]),
        requested_epochs=len(histories["requested"]),
        categorical_epochs=len(histories["categorical"]),
        final_losses={
            "mrc": mrc_hist[-1] if mrc_hist else float("nan"),
            "intent": histories["intent"][-1] if histories["intent"] else float("nan"),
            "requested": histories["requested"][-1] if histories["requested"] else float("nan"),
            "categorical": histories["categorical"][-1]
            if histories["categorical"]
            else float("nan"),
        },
    )
    return bundle, summary
