"""Assembly of model input context from dialogue turns.

Every utterance is prefixed with a "User: " or "System: " speaker tag and
phone-number groups are masked before the pieces are joined.  Two layouts
exist:

* SPAN: the whole (possibly truncated) history, followed by a second copy
  of the last user utterance.  Span extraction points into that copy, so
  the answer is always near the end of the context regardless of history
  length.
* CLASSIFIER: only the last nine utterances, for the classification tasks
  where old context stops helping and mostly adds noise.

A HistoryView keeps per-piece offsets and mask edits so character spans in
the original utterances can be mapped into the built context and back.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .dialogue import Turn, USER
from .errors import DialogueError
from .text import MaskEdit, map_offset_through_edits, mask_phone_numbers_with_edits, unmap_offset_through_edits

CLASSIFIER_WINDOW = 9

USER_TAG = "User: "
SYSTEM_TAG = "System: "
PIECE_SEPARATOR = " "


class HistoryMode(enum.Enum):
    SPAN = "span"
    CLASSIFIER = "classifier"


@dataclass(frozen=True)
class HistoryPiece:
    turn_index: int
    speaker: str
    body_start: int
    body_end: int
    edits: tuple[MaskEdit, ...]
    is_copy: bool = False


@dataclass(frozen=True)
class HistoryView:
    text: str
    pieces: tuple[HistoryPiece, ...]
    mode: HistoryMode

    def piece_for_turn(self, turn_index: int, prefer_copy: bool = True) -> HistoryPiece | None:
        body = None
        copy = None
        for piece in self.pieces:
            if piece.turn_index == turn_index:
                if piece.is_copy:
                    copy = piece
                elif body is None:
                    body = piece
        if prefer_copy and copy is not None:
            return copy
        return body if body is not None else copy

    def map_span(
        self, turn_index: int, start: int, end: int, prefer_copy: bool = True
    ) -> tuple[int, int] | None:
        """Context char span for an original-utterance span; None if masked away."""
        piece = self.piece_for_turn(turn_index, prefer_copy)
        if piece is None:
            return None
        a = map_offset_through_edits(start, list(piece.edits))
        b = map_offset_through_edits(end - 1, list(piece.edits))
        if a is None or b is None:
            return None
        return piece.body_start + a, piece.body_start + b + 1

    def unmap_span(self, start: int, end: int) -> tuple[int, int, int] | None:
        """(turn_index, start, end) in the original utterance for a context span."""
        for piece in self.pieces:
            if piece.body_start <= start and end <= piece.body_end:
                a = unmap_offset_through_edits(start - piece.body_start, list(piece.edits))
                b = unmap_offset_through_edits(end - 1 - piece.body_start, list(piece.edits))
                if a is None or b is None:
                    return None
                return piece.turn_index, a, b + 1
        return None


def _tag_for(speaker: str) -> str:
    return USER_TAG if speaker == USER else SYSTEM_TAG


def build_history(
    turns: list[Turn] | tuple[Turn, ...],
    mode: HistoryMode,
    mask_phones: bool = True,
) -> HistoryView:
    """Join tagged, masked utterances; see the module docstring for layouts."""
    if not turns:
        raise DialogueError("cannot build history from zero turns")
    indexed = list(enumerate(turns))
    if mode is HistoryMode.CLASSIFIER:
        indexed = indexed[-CLASSIFIER_WINDOW:]
    copies: list[tuple[int, Turn, bool]] = [(i, t, False) for i, t in indexed]
    if mode is HistoryMode.SPAN:
        last_index, last_turn = indexed[-1]
        if last_turn.speaker != USER:
            raise DialogueError("span layout needs the final turn to be a user turn")
        copies.append((last_index, last_turn, True))

    parts: list[str] = []
    pieces: list[HistoryPiece] = []
    produced = 0
    for turn_index, turn, is_copy in copies:
        if parts:
            parts.append(PIECE_SEPARATOR)
            produced += len(PIECE_SEPARATOR)
        tag = _tag_for(turn.speaker)
        if mask_phones:
            body, edits = mask_phone_numbers_with_edits(turn.utterance)
        else:
            body, edits = turn.utterance, []
        parts.append(tag)
        parts.append(body)
        body_start = produced + len(tag)
        pieces.append(
            HistoryPiece(
                turn_index=turn_index,
                speaker=turn.speaker,
                body_start=body_start,
                body_end=body_start + len(body),
                edits=tuple(edits),
                is_copy=is_copy,
            )
        )
        produced = body_start + len(body)
    return HistoryView(text="".join(parts), pieces=tuple(pieces), mode=mode)
