"""Dialogue corpus types and JSON loading/saving.

A corpus file is a JSON array of dialogues.  Each dialogue carries the
services it touches and an alternating list of USER/SYSTEM turns; every
turn holds one frame per active service with the gold state (user turns),
character-level slot spans and dialogue actions.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import DialogueError

USER = "USER"
SYSTEM = "SYSTEM"
NONE_INTENT = "NONE"

# Action types the feature extractor keys on; unknown acts pass through.
ACT_INFORM = "INFORM"
ACT_REQUEST = "REQUEST"
ACT_OFFER = "OFFER"
ACT_CONFIRM = "CONFIRM"


@dataclass(frozen=True)
class Action:
    act: str
    slot: str = ""
    values: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class SlotSpan:
    """Character span [start, end) of a non-categorical slot value in the utterance."""

    slot: str
    start: int
    end: int
    extra: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class State:
    active_intent: str = NONE_INTENT
    requested_slots: tuple[str, ...] = ()
    # Each slot maps to one or more acceptable surface strings.
    slot_values: tuple[tuple[str, tuple[str, ...]], ...] = ()
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def values_for(self, slot: str) -> tuple[str, ...]:
        for name, values in self.slot_values:
            if name == slot:
                return values
        return ()

    def assigned_slots(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.slot_values)


@dataclass(frozen=True)
class Frame:
    service: str
    state: State | None = None
    spans: tuple[SlotSpan, ...] = ()
    actions: tuple[Action, ...] = ()
    extra: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class Turn:
    speaker: str
    utterance: str
    frames: tuple[Frame, ...] = ()
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def frame_for(self, service: str) -> Frame | None:
        for frame in self.frames:
            if frame.service == service:
                return frame
        return None


@dataclass(frozen=True)
class Dialogue:
    dialogue_id: str
    services: tuple[str, ...]
    turns: tuple[Turn, ...]
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def user_turn_indices(self) -> list[int]:
        return [i for i, t in enumerate(self.turns) if t.speaker == USER]


def _claim(raw: dict, key: str, default=None):
    return raw.get(key, default)


def _extras(raw: dict, known: tuple[str, ...]) -> dict:
    return {k: v for k, v in raw.items() if k not in known}


def parse_state(raw: dict) -> State:
    slot_values = raw.get("slot_values", {})
    if not isinstance(slot_values, dict):
        raise DialogueError("slot_values must be an object")
    pairs = tuple(
        (slot, tuple(str(v) for v in values)) for slot, values in sorted(slot_values.items())
    )
    return State(
        active_intent=str(raw.get("active_intent", NONE_INTENT)),
        requested_slots=tuple(str(s) for s in raw.get("requested_slots", ())),
        slot_values=pairs,
        extra=_extras(raw, ("active_intent", "requested_slots", "slot_values")),
    )


def parse_frame(raw: dict) -> Frame:
    service = raw.get("service")
    if not service:
        raise DialogueError("frame missing service")
    state = parse_state(raw["state"]) if isinstance(raw.get("state"), dict) else None
    spans = []
    for s in raw.get("slots", ()):
        start, end = int(s["start"]), int(s["exclusive_end"])
        if start < 0 or end <= start:
            raise DialogueError(f"bad span [{start}, {end}) for slot {s.get('slot')!r}")
        spans.append(
            SlotSpan(
                slot=str(s["slot"]),
                start=start,
                end=end,
                extra=_extras(s, ("slot", "start", "exclusive_end")),
            )
        )
    actions = tuple(
        Action(
            act=str(a.get("act", "")),
            slot=str(a.get("slot", "")),
            values=tuple(str(v) for v in a.get("values", ())),
            extra=_extras(a, ("act", "slot", "values")),
        )
        for a in raw.get("actions", ())
    )
    return Frame(
        service=str(service),
        state=state,
        spans=tuple(spans),
        actions=actions,
        extra=_extras(raw, ("service", "state", "slots", "actions")),
    )


def parse_turn(raw: dict) -> Turn:
    speaker = raw.get("speaker")
    if speaker not in (USER, SYSTEM):
        raise DialogueError(f"speaker must be USER or SYSTEM, got {speaker!r}")
    utterance = raw.get("utterance")
    if not isinstance(utterance, str):
        raise DialogueError("turn missing utterance")
    frames = tuple(parse_frame(f) for f in raw.get("frames", ()))
    seen = set()
    for frame in frames:
        if frame.service in seen:
            raise DialogueError(f"duplicate frame for service {frame.service!r}")
        seen.add(frame.service)
        for span in frame.spans:
            if span.end > len(utterance):
                raise DialogueError(
                    f"span for {span.slot!r} ends at {span.end}, utterance has {len(utterance)} chars"
                )
    return Turn(
        speaker=str(speaker),
        utterance=utterance,
        frames=frames,
        extra=_extras(raw, ("speaker", "utterance", "frames")),
    )


def parse_dialogue(raw: dict) -> Dialogue:
    did = raw.get("dialogue_id")
    if not did:
        raise DialogueError("dialogue missing dialogue_id")
    try:
        turns = tuple(parse_turn(t) for t in raw.get("turns", ()))
        for i, turn in enumerate(turns):
            expected = USER if i % 2 == 0 else SYSTEM
            if turn.speaker != expected:
                raise DialogueError(f"turn {i} should be {expected}, got {turn.speaker}")
            if turn.speaker == USER:
                for frame in turn.frames:
                    if frame.state is None:
                        raise DialogueError(
                            f"user turn {i} frame {frame.service!r} has no state"
                        )
    except DialogueError as exc:
        raise DialogueError(f"dialogue {did!r}: {exc}") from None
    return Dialogue(
        dialogue_id=str(did),
        services=tuple(str(s) for s in raw.get("services", ())),
        turns=turns,
        extra=_extras(raw, ("dialogue_id", "services", "turns")),
    )


def state_to_raw(state: State) -> dict:
    raw = {
        "active_intent": state.active_intent,
        "requested_slots": list(state.requested_slots),
        "slot_values": {slot: list(values) for slot, values in state.slot_values},
    }
    raw.update(state.extra)
    return raw


def frame_to_raw(frame: Frame) -> dict:
    raw: dict = {"service": frame.service}
    if frame.state is not None:
        raw["state"] = state_to_raw(frame.state)
    raw["slots"] = [
        {"slot": s.slot, "start": s.start, "exclusive_end": s.end, **s.extra}
        for s in frame.spans
    ]
    raw["actions"] = [
        {"act": a.act, "slot": a.slot, "values": list(a.values), **a.extra}
        for a in frame.actions
    ]
    raw.update(frame.extra)
    return raw


def turn_to_raw(turn: Turn) -> dict:
    raw = {
        "speaker": turn.speaker,
        "utterance": turn.utterance,
        "frames": [frame_to_raw(f) for f in turn.frames],
    }
    raw.update(turn.extra)
    return raw


def dialogue_to_raw(dialogue: Dialogue) -> dict:
    raw = {
        "dialogue_id": dialogue.dialogue_id,
        "services": list(dialogue.services),
        "turns": [turn_to_raw(t) for t in dialogue.turns],
    }
    raw.update(dialogue.extra)
    return raw


def load_dialogues(path: str) -> list[Dialogue]:
    """Load a corpus from a JSON file, or every *.json file in a directory."""
    if os.path.isdir(path):
        dialogues: list[Dialogue] = []
        names = sorted(n for n in os.listdir(path) if n.endswith(".json"))
        if not names:
            raise DialogueError(f"no .json files under {path}")
        for name in names:
            dialogues.extend(load_dialogues(os.path.join(path, name)))
        return dialogues
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise DialogueError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DialogueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(raw, list):
        raise DialogueError(f"{path}: corpus must be a JSON array of dialogues")
    out = []
    ids = set()
    for item in raw:
        dialogue = parse_dialogue(item)
        if dialogue.dialogue_id in ids:
            raise DialogueError(f"duplicate dialogue_id {dialogue.dialogue_id!r}")
        ids.add(dialogue.dialogue_id)
        out.append(dialogue)
    return out


def save_dialogues(path: str, dialogues: list[Dialogue]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([dialogue_to_raw(d) for d in dialogues], fh, indent=1)
        fh.write("\n")
