"""Utterance-level text processing: phone masking and offset tokenization."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

PHONE_TAG = "phone"

# A digit, then any run of digits joined by -, space or parentheses; an
# optional opening parenthesis may lead.  Groups like "415-555-0132" or
# "(415) 555 0132" match as one unit; "11:30" does not (":" never joins).
_PHONE_RE = re.compile(r"\(?\d(?:[\s\-()]*\d)*\)?")

_MIN_PHONE_DIGITS = 7


@dataclass(frozen=True)
class MaskEdit:
    """One replaced region: [start, end) in the original, [new_start, new_end) in the output."""

    start: int
    end: int
    new_start: int
    new_end: int


def mask_phone_numbers_with_edits(text: str) -> tuple[str, list[MaskEdit]]:
    """Replace phone-number-sized digit groups with the literal tag "phone".

    A group is a maximal run of digits joined by the separators "-", space,
    "(" and ")"; it is replaced only when it contains at least 7 digits, so
    ordinary small numbers (counts, ratings, years) pass through untouched.
    Returns the masked text plus the list of edits for offset mapping.
    """
    out: list[str] = []
    edits: list[MaskEdit] = []
    cursor = 0
    produced = 0
    for m in _PHONE_RE.finditer(text):
        digits = sum(c.isdigit() for c in m.group())
        if digits < _MIN_PHONE_DIGITS:
            continue
        out.append(text[cursor : m.start()])
        produced += m.start() - cursor
        out.append(PHONE_TAG)
        edits.append(MaskEdit(m.start(), m.end(), produced, produced + len(PHONE_TAG)))
        produced += len(PHONE_TAG)
        cursor = m.end()
    out.append(text[cursor:])
    return "".join(out), edits


def mask_phone_numbers(text: str) -> str:
    """Masked text only; see :func:`mask_phone_numbers_with_edits`."""
    return mask_phone_numbers_with_edits(text)[0]


def map_offset_through_edits(pos: int, edits: list[MaskEdit]) -> int | None:
    """Map an original character offset to the masked text; None if it was erased."""
    shift = 0
    for e in edits:
        if pos < e.start:
            break
        if pos < e.end:
            return None
        shift += (e.new_end - e.new_start) - (e.end - e.start)
    return pos + shift


def unmap_offset_through_edits(pos: int, edits: list[MaskEdit]) -> int | None:
    """Map a masked-text offset back to the original; None inside a replacement."""
    shift = 0
    for e in edits:
        if pos < e.new_start:
            break
        if pos < e.new_end:
            return None
        shift += (e.end - e.start) - (e.new_end - e.new_start)
    return pos + shift


_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


@dataclass(frozen=True)
class TokenizedContext:
    """Lowercased tokens over a text, with offsets into the original string.

    `segment_boundary` is the token index at which a second (question /
    description) segment would begin; with no second segment attached it
    equals len(tokens).
    """

    text: str
    tokens: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]
    segment_boundary: int = field(default=-1)

    def __post_init__(self):
        if self.segment_boundary < 0:
            object.__setattr__(self, "segment_boundary", len(self.tokens))

    def token_span_for_chars(self, start: int, end: int) -> tuple[int, int] | None:
        """Smallest token range covering the character span [start, end)."""
        hit = [i for i, (s, e) in enumerate(self.offsets) if s < end and e > start]
        if not hit:
            return None
        return hit[0], hit[-1]

    def char_span_for_tokens(self, first: int, last: int) -> tuple[int, int]:
        return self.offsets[first][0], self.offsets[last][1]


def tokenize_with_offsets(text: str) -> TokenizedContext:
    """Split on whitespace and punctuation, keeping punctuation as tokens.

    Tokens are lowercased; offsets index the original string, so slicing
    `text[s:e]` and lowercasing reproduces each token exactly.
    """
    tokens: list[str] = []
    offsets: list[tuple[int, int]] = []
    for m in _TOKEN_RE.finditer(text):
        tokens.append(m.group().lower())
        offsets.append((m.start(), m.end()))
    return TokenizedContext(text=text, tokens=tuple(tokens), offsets=tuple(offsets))
