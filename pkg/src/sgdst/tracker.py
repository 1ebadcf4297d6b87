"""Turn-by-turn state tracking.

The tracker is stateless across turns: for every user turn it rebuilds the
full state of each active service from the visible history alone.  What
"visible" means is governed by the intent-switch rule: when the predicted
active intent of a service moves from one real intent to a different real
intent, history before the switching turn is dropped for that service from
then on.  The placeholder intent (no goal) never starts or breaks a
segment.

Models plug in through the TrackerModel protocol.  ModelBundle is the
trained implementation (span head plus three wide-and-deep scorers);
OracleModel answers from gold annotations and exists to exercise the
tracking plumbing end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .augment import SynonymLexicon
from .dialogue import Dialogue, Frame, State, Turn, NONE_INTENT, USER
from .encoder import Encoder
from .errors import DialogueError
from .features import FeatureContext, build_feature_context, wide_features
from .history import HistoryMode, build_history
from .mrc import predict_span
from .numwords import words_to_number
from .schema import (
    DONTCARE,
    UNKNOWN,
    Schema,
    ServiceDef,
    SlotDef,
    SlotKind,
    candidate_values,
    classify_slot,
    natural_name,
)
from .text import tokenize_with_offsets
from .wd import WIDE_DIM, wd_forward


@dataclass(frozen=True)
class TurnContext:
    """Inputs a model sees when predicting one (user turn, service) frame.

    `turns` is the visible history: it ends at the current user turn and
    starts wherever the intent-switch rule last cut it.
    """

    turns: tuple[Turn, ...]
    turn_index: int
    dialogue: Dialogue
    service: ServiceDef


class TrackerModel(Protocol):
    def predict_intent(self, ctx: TurnContext) -> str: ...

    def predict_requested(self, ctx: TurnContext) -> tuple[str, ...]: ...

    def predict_span_value(self, ctx: TurnContext, slot: SlotDef) -> str | None: ...

    def predict_candidate(
        self, ctx: TurnContext, slot: SlotDef, candidates: tuple[str, ...]
    ) -> str | None: ...


class ResetRule:
    """Tracks per-service intent switches and the resulting history cuts."""

    def __init__(self):
        self._last_real_intent: dict[str, str] = {}
        self._starts: dict[str, int] = {}

    def segment_start(self, service: str) -> int:
        return self._starts.get(service, 0)

    def observe(self, service: str, turn_index: int, intent: str) -> bool:
        """Record this turn's predicted intent; True when a switch fires."""
        fired = False
        if intent != NONE_INTENT:
            prev = self._last_real_intent.get(service)
            if prev is not None and prev != intent:
                self._starts[service] = turn_index
                fired = True
            self._last_real_intent[service] = intent
        return fired


@dataclass(frozen=True)
class TurnState:
    turn_index: int
    by_service: tuple[tuple[str, State], ...]

    def state_for(self, service: str) -> State | None:
        for name, state in self.by_service:
            if name == service:
                return state
        return None


def track_turn(
    model: TrackerModel,
    schema: Schema,
    dialogue: Dialogue,
    turn_index: int,
    rule: ResetRule | None = None,
) -> TurnState:
    """Predict the state of every service framed on one user turn.

    The intent is predicted on the current segment first; if that very
    prediction reveals a switch, the segment restarts at this turn before
    the remaining predictions are made.
    """
    turn = dialogue.turns[turn_index]
    if turn.speaker != USER:
        raise DialogueError(f"turn {turn_index} is not a user turn")
    results: list[tuple[str, State]] = []
    for frame in turn.frames:
        service = schema.service(frame.service)
        seg = rule.segment_start(frame.service) if rule is not None else 0
        ctx = TurnContext(
            turns=dialogue.turns[seg : turn_index + 1],
            turn_index=turn_index,
            dialogue=dialogue,
            service=service,
        )
        intent = model.predict_intent(ctx)
        if rule is not None and rule.observe(frame.service, turn_index, intent):
            ctx = TurnContext(
                turns=dialogue.turns[turn_index : turn_index + 1],
                turn_index=turn_index,
                dialogue=dialogue,
                service=service,
            )
        requested = tuple(model.predict_requested(ctx))
        assignments: list[tuple[str, tuple[str, ...]]] = []
        for slot in service.slots:
            kind = classify_slot(slot)
            if kind in (SlotKind.SPAN, SlotKind.NUMERICAL):
                raw = model.predict_span_value(ctx, slot)
                if raw is None:
                    continue
                value = raw
                if kind is SlotKind.NUMERICAL:
                    parsed = words_to_number(raw)
                    if parsed is not None:
                        value = str(parsed)
                assignments.append((slot.name, (value,)))
            else:
                choice = model.predict_candidate(ctx, slot, tuple(candidate_values(slot)))
                if choice is None or choice == UNKNOWN:
                    continue
                assignments.append((slot.name, (choice,)))
        state = State(
            active_intent=intent,
            requested_slots=requested,
            slot_values=tuple(sorted(assignments)),
        )
        results.append((frame.service, state))
    return TurnState(turn_index=turn_index, by_service=tuple(results))


def predict_dialogue(
    model: TrackerModel,
    schema: Schema,
    dialogue: Dialogue,
    use_reset_rule: bool = True,
) -> Dialogue:
    """A copy of the dialogue whose user-frame states are model predictions."""
    rule = ResetRule() if use_reset_rule else None
    new_turns: list[Turn] = []
    for i, turn in enumerate(dialogue.turns):
        if turn.speaker != USER:
            new_turns.append(turn)
            continue
        turn_state = track_turn(model, schema, dialogue, i, rule)
        frames = tuple(
            Frame(service=frame.service, state=turn_state.state_for(frame.service))
            for frame in turn.frames
        )
        new_turns.append(Turn(speaker=turn.speaker, utterance=turn.utterance, frames=frames))
    return Dialogue(
        dialogue_id=dialogue.dialogue_id,
        services=dialogue.services,
        turns=tuple(new_turns),
    )


def predict_corpus(
    model: TrackerModel,
    schema: Schema,
    dialogues: list[Dialogue],
    use_reset_rule: bool = True,
) -> list[Dialogue]:
    return [predict_dialogue(model, schema, d, use_reset_rule) for d in dialogues]


class OracleModel:
    """Answers every prediction from the gold frame of the current turn.

    Running it through the tracker must reproduce gold states exactly, so
    every metric evaluates to 1.0; anything less is a plumbing bug.
    """

    def _gold(self, ctx: TurnContext) -> State:
        frame = ctx.dialogue.turns[ctx.turn_index].frame_for(ctx.service.name)
        if frame is None or frame.state is None:
            raise DialogueError(
                f"no gold state for service {ctx.service.name!r} at turn {ctx.turn_index}"
            )
        return frame.state

    def predict_intent(self, ctx: TurnContext) -> str:
        return self._gold(ctx).active_intent

    def predict_requested(self, ctx: TurnContext) -> tuple[str, ...]:
        return self._gold(ctx).requested_slots

    def predict_span_value(self, ctx: TurnContext, slot: SlotDef) -> str | None:
        values = self._gold(ctx).values_for(slot.name)
        return values[0] if values else None

    def predict_candidate(
        self, ctx: TurnContext, slot: SlotDef, candidates: tuple[str, ...]
    ) -> str | None:
        values = self._gold(ctx).values_for(slot.name)
        if not values:
            return UNKNOWN
        for v in values:
            if v in candidates:
                return v
        return values[0]


NONE_INTENT_TEXT = "no active goal"


def _pair_tokens(*texts: str) -> list[str]:
    return list(tokenize_with_offsets(" ".join(t for t in texts if t)).tokens)


@dataclass
class ModelBundle:
    """Trained tracker: one span head plus wide-and-deep scorers for the
    intent, requested-slot, and categorical-value decisions.

    use_wide=False silences the wide path everywhere (train the heads on
    zeroed wide bits to match); it exists for deep-only comparisons."""

    encoder: Encoder
    mrc_params: dict[str, np.ndarray]
    intent_params: dict[str, np.ndarray]
    requested_params: dict[str, np.ndarray]
    categorical_params: dict[str, np.ndarray]
    lexicon: SynonymLexicon | None = None
    max_span_tokens: int = 12
    answer_threshold: float = 0.5
    requested_threshold: float = 0.5
    use_wide: bool = True
    _feat_cache: dict = field(default_factory=dict, repr=False)

    def _features_for(self, ctx: TurnContext) -> FeatureContext:
        key = (id(ctx.dialogue), ctx.turn_index, len(ctx.turns), ctx.service.name)
        feats = self._feat_cache.get(key)
        if feats is None:
            feats = build_feature_context(ctx.turns, ctx.service.name)
            self._feat_cache[key] = feats
        return feats

    def _wide(self, feats, service, slot, candidate) -> np.ndarray:
        if not self.use_wide:
            return np.zeros(WIDE_DIM)
        return wide_features(feats, service, slot, candidate, self.lexicon)

    def _classifier_tokens(self, ctx: TurnContext) -> list[str]:
        view = build_history(ctx.turns, HistoryMode.CLASSIFIER)
        return list(tokenize_with_offsets(view.text).tokens)

    def predict_intent(self, ctx: TurnContext) -> str:
        ctx_tokens = self._classifier_tokens(ctx)
        feats = self._features_for(ctx)
        names = [NONE_INTENT]
        scored: list[float] = []
        pseudo = SlotDef(name=NONE_INTENT, description=NONE_INTENT_TEXT)
        enc = self.encoder.encode(ctx_tokens, _pair_tokens(NONE_INTENT_TEXT))
        scored.append(
            wd_forward(self.intent_params, enc.cls, self._wide(feats, ctx.service, pseudo, "none"))
        )
        for intent in ctx.service.intents:
            names.append(intent.name)
            pseudo = SlotDef(name=intent.name, description=intent.description)
            enc = self.encoder.encode(
                ctx_tokens, _pair_tokens(natural_name(intent.name), intent.description)
            )
            scored.append(
                wd_forward(
                    self.intent_params,
                    enc.cls,
                    self._wide(feats, ctx.service, pseudo, natural_name(intent.name)),
                )
            )
        best = max(range(len(scored)), key=lambda i: (scored[i], -i))
        return names[best]

    def predict_requested(self, ctx: TurnContext) -> tuple[str, ...]:
        ctx_tokens = self._classifier_tokens(ctx)
        feats = self._features_for(ctx)
        out = []
        for slot in ctx.service.slots:
            enc = self.encoder.encode(
                ctx_tokens, _pair_tokens(natural_name(slot.name), slot.description)
            )
            score = wd_forward(
                self.requested_params,
                enc.cls,
                self._wide(feats, ctx.service, slot, natural_name(slot.name)),
            )
            if score >= self.requested_threshold:
                out.append(slot.name)
        return tuple(out)

    def predict_span_value(self, ctx: TurnContext, slot: SlotDef) -> str | None:
        view = build_history(ctx.turns, HistoryMode.SPAN)
        tc = tokenize_with_offsets(view.text)
        if not tc.tokens:
            return None
        enc = self.encoder.encode(
            list(tc.tokens), _pair_tokens(natural_name(slot.name), slot.description)
        )
        pred = predict_span(self.mrc_params, enc.ctx_reps, enc.cls, self.max_span_tokens)
        if pred.p_has < self.answer_threshold:
            return None
        cs, ce = tc.char_span_for_tokens(pred.start, pred.end)
        unmapped = view.unmap_span(cs, ce)
        if unmapped is not None:
            ti, a, b = unmapped
            return ctx.turns[ti].utterance[a:b]
        return view.text[cs:ce]

    def predict_candidate(
        self, ctx: TurnContext, slot: SlotDef, candidates: tuple[str, ...]
    ) -> str | None:
        if not candidates:
            return None
        ctx_tokens = self._classifier_tokens(ctx)
        feats = self._features_for(ctx)
        scores = []
        for cand in candidates:
            enc = self.encoder.encode(
                ctx_tokens, _pair_tokens(natural_name(slot.name), slot.description, cand)
            )
            scores.append(
                wd_forward(self.categorical_params, enc.cls, self._wide(feats, ctx.service, slot, cand))
            )
        best = max(range(len(scores)), key=lambda i: (scores[i], -i))
        return candidates[best]
