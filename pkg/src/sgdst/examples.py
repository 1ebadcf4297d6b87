"""Gold dialogues to per-head training examples.

Examples are text-level: token sequences, wide feature bits, and labels.
Vectorizing through an encoder happens later, at training time, so the
same example files work with any encoder of any dimension.

Span supervision comes from the corpus span annotations when present.
Integer-valued categorical slots have no span annotations, so their spans
are restored by searching the utterances for the value in digit or word
form; unrestorable assignments are dropped and counted rather than taught
as no-answer.

Segmentation during example building follows the same intent-switch rule
the tracker applies, driven by gold intents.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .augment import SynonymLexicon
from .dialogue import Dialogue, Turn, NONE_INTENT, USER
from .errors import DataError
from .features import build_feature_context, wide_features
from .history import HistoryMode, HistoryView, build_history
from .numwords import restore_numeric_span
from .schema import (
    Schema,
    ServiceDef,
    SlotDef,
    SlotKind,
    UNKNOWN,
    candidate_values,
    classify_slot,
    natural_name,
)
from .text import tokenize_with_offsets
from .tracker import NONE_INTENT_TEXT, ResetRule

TASK_INTENT = "intent"
TASK_REQUESTED = "requested"
TASK_CATEGORICAL = "categorical"


@dataclass(frozen=True)
class MrcExample:
    dialogue_id: str
    turn_index: int
    service: str
    slot: str
    ctx_tokens: tuple[str, ...]
    pair_tokens: tuple[str, ...]
    has_answer: bool
    start: int = -1
    end: int = -1


@dataclass(frozen=True)
class WdExample:
    task: str
    dialogue_id: str
    turn_index: int
    service: str
    slot: str
    candidate: str
    ctx_tokens: tuple[str, ...]
    pair_tokens: tuple[str, ...]
    wide: tuple[float, ...]
    label: float


@dataclass
class TrainingExamples:
    mrc: list[MrcExample]
    intent: list[WdExample]
    requested: list[WdExample]
    categorical: list[WdExample]
    skipped_unrestorable: int = 0

    def counts(self) -> dict[str, int]:
        return {
            "mrc": len(self.mrc),
            "intent": len(self.intent),
            "requested": len(self.requested),
            "categorical": len(self.categorical),
            "skipped_unrestorable": self.skipped_unrestorable,
        }


def _pair(*texts: str) -> tuple[str, ...]:
    return tokenize_with_offsets(" ".join(t for t in texts if t)).tokens


def _latest_gold_span(
    turns: tuple[Turn, ...], service: str, slot: str
) -> tuple[int, int, int] | None:
    """Most recent span annotation for the slot: (turn offset in ctx, start, end)."""
    for idx in range(len(turns) - 1, -1, -1):
        frame = turns[idx].frame_for(service)
        if frame is None:
            continue
        for span in frame.spans:
            if span.slot == slot:
                return idx, span.start, span.end
    return None


def _restore_integer_span(
    turns: tuple[Turn, ...], value: str
) -> tuple[int, int, int] | None:
    """Search utterances, newest first, for the value in digit or word form."""
    for idx in range(len(turns) - 1, -1, -1):
        hit = restore_numeric_span(turns[idx].utterance, value)
        if hit is not None:
            return idx, hit[0], hit[1]
    return None


def _context_token_span(
    view: HistoryView, tc, turn_offset: int, start: int, end: int
) -> tuple[int, int] | None:
    mapped = view.map_span(turn_offset, start, end)
    if mapped is None:
        return None
    return tc.token_span_for_chars(mapped[0], mapped[1])


def make_training_examples(
    dialogues: list[Dialogue],
    schema: Schema,
    lexicon: SynonymLexicon | None = None,
    use_reset_rule: bool = True,
) -> TrainingExamples:
    out = TrainingExamples(mrc=[], intent=[], requested=[], categorical=[])
    for dialogue in dialogues:
        rule = ResetRule() if use_reset_rule else None
        for ti, turn in enumerate(dialogue.turns):
            if turn.speaker != USER:
                continue
            for frame in turn.frames:
                if frame.state is None:
                    continue
                service = schema.service(frame.service)
                # Intent examples see the pre-switch segment, matching what
                # the tracker feeds its intent prediction; everything else
                # sees the segment after the gold intent is observed.
                pre = rule.segment_start(frame.service) if rule is not None else 0
                if rule is not None:
                    rule.observe(frame.service, ti, frame.state.active_intent)
                post = rule.segment_start(frame.service) if rule is not None else 0
                _emit_for_frame(
                    out,
                    dialogue,
                    ti,
                    dialogue.turns[pre : ti + 1],
                    dialogue.turns[post : ti + 1],
                    service,
                    frame.state,
                    lexicon,
                )
    return out


def _emit_for_frame(
    out, dialogue, ti, intent_ctx_turns, ctx_turns, service: ServiceDef, state, lexicon
):
    span_view = build_history(ctx_turns, HistoryMode.SPAN)
    span_tc = tokenize_with_offsets(span_view.text)
    cls_view = build_history(ctx_turns, HistoryMode.CLASSIFIER)
    cls_tokens = tokenize_with_offsets(cls_view.text).tokens
    feats = build_feature_context(ctx_turns, service.name)
    if intent_ctx_turns is not ctx_turns and len(intent_ctx_turns) != len(ctx_turns):
        intent_view = build_history(intent_ctx_turns, HistoryMode.CLASSIFIER)
        intent_tokens = tokenize_with_offsets(intent_view.text).tokens
        intent_feats = build_feature_context(intent_ctx_turns, service.name)
    else:
        intent_tokens, intent_feats = cls_tokens, feats

    # Intent task: the placeholder plus every declared intent, binary each.
    gold_intent = state.active_intent
    intent_rows = [(NONE_INTENT, NONE_INTENT_TEXT, SlotDef(NONE_INTENT, NONE_INTENT_TEXT), "none")]
    for intent in service.intents:
        intent_rows.append(
            (
                intent.name,
                f"{natural_name(intent.name)} {intent.description}".strip(),
                SlotDef(intent.name, intent.description),
                natural_name(intent.name),
            )
        )
    for name, pair_text, pseudo, cand in intent_rows:
        out.intent.append(
            WdExample(
                task=TASK_INTENT,
                dialogue_id=dialogue.dialogue_id,
                turn_index=ti,
                service=service.name,
                slot=name,
                candidate=cand,
                ctx_tokens=intent_tokens,
                pair_tokens=_pair(pair_text),
                wide=tuple(wide_features(intent_feats, service, pseudo, cand, lexicon)),
                label=1.0 if name == gold_intent else 0.0,
            )
        )

    requested = set(state.requested_slots)
    for slot in service.slots:
        out.requested.append(
            WdExample(
                task=TASK_REQUESTED,
                dialogue_id=dialogue.dialogue_id,
                turn_index=ti,
                service=service.name,
                slot=slot.name,
                candidate=natural_name(slot.name),
                ctx_tokens=cls_tokens,
                pair_tokens=_pair(natural_name(slot.name), slot.description),
                wide=tuple(
                    wide_features(feats, service, slot, natural_name(slot.name), lexicon)
                ),
                label=1.0 if slot.name in requested else 0.0,
            )
        )

    for slot in service.slots:
        kind = classify_slot(slot)
        values = state.values_for(slot.name)
        if kind in (SlotKind.SPAN, SlotKind.NUMERICAL):
            _emit_mrc(out, dialogue, ti, ctx_turns, span_view, span_tc, service, slot, kind, values)
        else:
            gold = values[0] if values else UNKNOWN
            for cand in candidate_values(slot):
                out.categorical.append(
                    WdExample(
                        task=TASK_CATEGORICAL,
                        dialogue_id=dialogue.dialogue_id,
                        turn_index=ti,
                        service=service.name,
                        slot=slot.name,
                        candidate=cand,
                        ctx_tokens=cls_tokens,
                        pair_tokens=_pair(natural_name(slot.name), slot.description, cand),
                        wide=tuple(wide_features(feats, service, slot, cand, lexicon)),
                        label=1.0 if cand == gold else 0.0,
                    )
                )


def _emit_mrc(out, dialogue, ti, ctx_turns, view, tc, service, slot, kind, values):
    pair = _pair(natural_name(slot.name), slot.description)

    def emit(has_answer: bool, start: int = -1, end: int = -1):
        out.mrc.append(
            MrcExample(
                dialogue_id=dialogue.dialogue_id,
                turn_index=ti,
                service=service.name,
                slot=slot.name,
                ctx_tokens=tc.tokens,
                pair_tokens=pair,
                has_answer=has_answer,
                start=start,
                end=end,
            )
        )

    if not values:
        emit(False)
        return
    if kind is SlotKind.NUMERICAL:
        located = _restore_integer_span(ctx_turns, values[0])
    else:
        located = _latest_gold_span(ctx_turns, service.name, slot.name)
    if located is None:
        out.skipped_unrestorable += 1
        return
    token_span = _context_token_span(view, tc, *located)
    if token_span is None:
        out.skipped_unrestorable += 1
        return
    emit(True, token_span[0], token_span[1])


def dump_examples_jsonl(path: str, examples: list) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(dataclasses.asdict(ex)) + "\n")


def _load_jsonl(path: str) -> list[dict]:
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rows.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise DataError(f"{path}:{lineno}: {exc.msg}") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    return rows


def load_mrc_examples_jsonl(path: str) -> list[MrcExample]:
    out = []
    for row in _load_jsonl(path):
        out.append(
            MrcExample(
                dialogue_id=str(row.get("dialogue_id", "")),
                turn_index=int(row.get("turn_index", -1)),
                service=str(row.get("service", "")),
                slot=str(row.get("slot", "")),
                ctx_tokens=tuple(row["ctx_tokens"]),
                pair_tokens=tuple(row["pair_tokens"]),
                has_answer=bool(row["has_answer"]),
                start=int(row.get("start", -1)),
                end=int(row.get("end", -1)),
            )
        )
    return out


def load_wd_examples_jsonl(path: str) -> list[WdExample]:
    out = []
    for row in _load_jsonl(path):
        out.append(
            WdExample(
                task=str(row.get("task", TASK_CATEGORICAL)),
                dialogue_id=str(row.get("dialogue_id", "")),
                turn_index=int(row.get("turn_index", -1)),
                service=str(row.get("service", "")),
                slot=str(row.get("slot", "")),
                candidate=str(row.get("candidate", "")),
                ctx_tokens=tuple(row["ctx_tokens"]),
                pair_tokens=tuple(row["pair_tokens"]),
                wide=tuple(float(x) for x in row["wide"]),
                label=float(row["label"]),
            )
        )
    return out
