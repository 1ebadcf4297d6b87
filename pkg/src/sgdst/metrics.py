"""State-tracking evaluation metrics.

A frame here is one (user turn, service) pair.  Predictions and gold are
matched frame by frame and scored with:

* active_intent_accuracy: exact intent match rate.
* requested_slots_f1: set F1 over requested slots, macro over frames;
  both-empty frames score 1.
* slot_tagging_f1: F1 over non-categorical assignments where a value
  counts as correct when its fuzzy score reaches 0.9, macro over frames
  with any non-categorical activity.
* average_goal_accuracy: mean slot score over gold-assigned slots, macro
  over frames that have at least one gold assignment.
* joint_goal_accuracy: per frame, the minimum slot score over the union
  of predicted and gold assignments (an unmatched slot scores 0), then a
  mean over frames.  strict_binary floors each slot score to {0, 1}.

Non-categorical values are compared with a normalized Levenshtein fuzzy
score; categorical values need exact normalized equality.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .dialogue import Dialogue, USER
from .errors import DataError
from .schema import Schema, SlotDef, classify_slot, SlotKind

FUZZY_TAG_THRESHOLD = 0.9


def normalize_value(value: str) -> str:
    return " ".join(value.lower().split())


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def fuzzy_score(a: str, b: str) -> float:
    """1 minus the normalized edit distance; 1.0 for two empty strings."""
    na, nb = normalize_value(a), normalize_value(b)
    longest = max(len(na), len(nb))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(na, nb) / longest


def slot_assignment_score(
    pred_values: tuple[str, ...], gold_values: tuple[str, ...], categorical: bool
) -> float:
    """Score one slot; gold lists several acceptable surface forms."""
    if not pred_values or not gold_values:
        return 0.0
    pred = pred_values[0]
    if categorical:
        return 1.0 if any(normalize_value(pred) == normalize_value(g) for g in gold_values) else 0.0
    return max(fuzzy_score(pred, g) for g in gold_values)


def _set_f1(pred: set, gold: set) -> float:
    if not pred and not gold:
        return 1.0
    tp = len(pred & gold)
    if tp == 0:
        return 0.0
    precision = tp / len(pred)
    recall = tp / len(gold)
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class MetricsReport:
    active_intent_accuracy: float
    requested_slots_f1: float
    slot_tagging_f1: float
    average_goal_accuracy: float
    joint_goal_accuracy: float
    frame_count: int

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _is_categorical(slot_defs: dict[str, SlotDef], slot: str) -> bool:
    sdef = slot_defs.get(slot)
    if sdef is None:
        raise DataError(f"assignment references unknown slot {slot!r}")
    return classify_slot(sdef) is not SlotKind.SPAN


def _frame_pairs(gold: list[Dialogue], pred: list[Dialogue]):
    pred_by_id = {d.dialogue_id: d for d in pred}
    for gd in gold:
        pd = pred_by_id.get(gd.dialogue_id)
        if pd is None:
            raise DataError(f"predictions missing dialogue {gd.dialogue_id!r}")
        if len(pd.turns) != len(gd.turns):
            raise DataError(f"dialogue {gd.dialogue_id!r}: turn count mismatch")
        for ti, gturn in enumerate(gd.turns):
            if gturn.speaker != USER:
                continue
            pturn = pd.turns[ti]
            for gframe in gturn.frames:
                pframe = pturn.frame_for(gframe.service)
                if pframe is None or pframe.state is None:
                    raise DataError(
                        f"dialogue {gd.dialogue_id!r} turn {ti}: no prediction for "
                        f"service {gframe.service!r}"
                    )
                yield gd.dialogue_id, ti, gframe, pframe


def evaluate(
    gold: list[Dialogue],
    pred: list[Dialogue],
    schema: Schema,
    strict_binary: bool = False,
) -> MetricsReport:
    intent_hits: list[float] = []
    req_f1s: list[float] = []
    tag_f1s: list[float] = []
    aga: list[float] = []
    jga: list[float] = []
    for _did, _ti, gframe, pframe in _frame_pairs(gold, pred):
        service = schema.service(gframe.service)
        slot_defs = {s.name: s for s in service.slots}
        gstate, pstate = gframe.state, pframe.state

        intent_hits.append(1.0 if pstate.active_intent == gstate.active_intent else 0.0)
        req_f1s.append(_set_f1(set(pstate.requested_slots), set(gstate.requested_slots)))

        gold_map = dict(gstate.slot_values)
        pred_map = dict(pstate.slot_values)

        scores: dict[str, float] = {}
        for slot in set(gold_map) | set(pred_map):
            cat = _is_categorical(slot_defs, slot)
            score = slot_assignment_score(pred_map.get(slot, ()), gold_map.get(slot, ()), cat)
            if strict_binary:
                score = 1.0 if score >= 1.0 else 0.0
            scores[slot] = score

        jga.append(min(scores.values()) if scores else 1.0)
        gold_scores = [scores[s] for s in gold_map]
        if gold_scores:
            aga.append(sum(gold_scores) / len(gold_scores))

        gold_tags = {s: v for s, v in gold_map.items() if not _is_categorical(slot_defs, s)}
        pred_tags = {s: v for s, v in pred_map.items() if not _is_categorical(slot_defs, s)}
        if gold_tags or pred_tags:
            tp = sum(
                1
                for s, v in pred_tags.items()
                if s in gold_tags
                and slot_assignment_score(v, gold_tags[s], categorical=False)
                >= FUZZY_TAG_THRESHOLD
            )
            precision = tp / len(pred_tags) if pred_tags else 0.0
            recall = tp / len(gold_tags) if gold_tags else 0.0
            if precision + recall > 0:
                tag_f1s.append(2 * precision * recall / (precision + recall))
            else:
                tag_f1s.append(0.0)

    if not intent_hits:
        raise DataError("no user frames to evaluate")

    def mean(xs: list[float], empty: float = 0.0) -> float:
        return sum(xs) / len(xs) if xs else empty

    return MetricsReport(
        active_intent_accuracy=mean(intent_hits),
        requested_slots_f1=mean(req_f1s),
        slot_tagging_f1=mean(tag_f1s, empty=1.0),
        average_goal_accuracy=mean(aga, empty=1.0),
        joint_goal_accuracy=mean(jga),
        frame_count=len(intent_hits),
    )
