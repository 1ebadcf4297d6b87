"""Context assembly: tagging, windowing, the span copy, and offset maps."""

import pytest
from hypothesis import given, strategies as st

from sgdst.dialogue import SYSTEM, USER, Turn
from sgdst.errors import DialogueError
from sgdst.history import (
    CLASSIFIER_WINDOW,
    SYSTEM_TAG,
    USER_TAG,
    HistoryMode,
    build_history,
)
from sgdst.text import PHONE_TAG


def turn(speaker, text):
    return Turn(speaker=speaker, utterance=text, frames=())


def alternating(texts):
    return [turn(USER if i % 2 == 0 else SYSTEM, t) for i, t in enumerate(texts)]


class TestSpanLayout:
    def test_copy_of_last_user_turn_appended(self):
        turns = alternating(["find a cafe", "which area?", "the mission"])
        view = build_history(turns, HistoryMode.SPAN)
        assert view.text == (
            f"{USER_TAG}find a cafe {SYSTEM_TAG}which area? "
            f"{USER_TAG}the mission {USER_TAG}the mission"
        )
        assert [p.is_copy for p in view.pieces] == [False, False, False, True]
        assert view.pieces[-1].turn_index == 2

    def test_final_turn_must_be_user(self):
        turns = alternating(["hi", "hello"])
        with pytest.raises(DialogueError):
            build_history(turns, HistoryMode.SPAN)

    def test_empty_history_rejected(self):
        with pytest.raises(DialogueError):
            build_history([], HistoryMode.SPAN)

    def test_map_prefers_copy_piece(self):
        turns = alternating(["go to rome", "ok?", "no, to paris"])
        view = build_history(turns, HistoryMode.SPAN)
        src = turns[2].utterance
        a, b = src.index("paris"), src.index("paris") + len("paris")
        mapped = view.map_span(2, a, b)
        assert view.text[mapped[0] : mapped[1]] == "paris"
        assert mapped[0] >= view.pieces[-1].body_start
        # The non-copy occurrence is reachable on request.
        earlier = view.map_span(2, a, b, prefer_copy=False)
        assert view.text[earlier[0] : earlier[1]] == "paris"
        assert earlier[0] < view.pieces[-1].body_start

    def test_map_earlier_turn_and_unmap_round_trip(self):
        turns = alternating(["book a table", "at Blue Bottle?", "yes please"])
        view = build_history(turns, HistoryMode.SPAN)
        src = turns[1].utterance
        a, b = src.index("Blue"), src.index("Bottle") + len("Bottle")
        mapped = view.map_span(1, a, b)
        assert view.text[mapped[0] : mapped[1]] == "Blue Bottle"
        assert view.unmap_span(*mapped) == (1, a, b)

    def test_unmap_copy_region_points_at_source_turn(self):
        turns = alternating(["take me to soho"])
        view = build_history(turns, HistoryMode.SPAN)
        copy = view.pieces[-1]
        a = copy.body_start + len("take me to ")
        b = a + len("soho")
        assert view.text[a:b] == "soho"
        ti, sa, sb = view.unmap_span(a, b)
        assert ti == 0
        assert turns[0].utterance[sa:sb] == "soho"

    def test_unmap_outside_any_body_is_none(self):
        view = build_history(alternating(["hi there"]), HistoryMode.SPAN)
        # A span starting inside the speaker tag belongs to no piece.
        assert view.unmap_span(0, 8) is None


class TestClassifierLayout:
    def test_window_keeps_last_nine(self):
        texts = [f"utterance number {i}" for i in range(12)]
        turns = alternating(texts)
        view = build_history(turns, HistoryMode.CLASSIFIER)
        kept = [p.turn_index for p in view.pieces]
        assert kept == list(range(12 - CLASSIFIER_WINDOW, 12))
        assert not any(p.is_copy for p in view.pieces)
        assert "number 2 " not in view.text
        assert "number 3 " in view.text

    def test_short_history_kept_whole(self):
        turns = alternating(["a", "b", "c"])
        view = build_history(turns, HistoryMode.CLASSIFIER)
        assert [p.turn_index for p in view.pieces] == [0, 1, 2]
        assert view.text == f"{USER_TAG}a {SYSTEM_TAG}b {USER_TAG}c"

    def test_system_turn_may_end_classifier_context(self):
        turns = alternating(["hi", "hello"])
        view = build_history(turns, HistoryMode.CLASSIFIER)
        assert view.text == f"{USER_TAG}hi {SYSTEM_TAG}hello"


class TestMasking:
    def test_phone_masked_and_span_over_it_unmappable(self):
        turns = alternating(["call me", "reach them at 415-555-0199 today", "thanks"])
        view = build_history(turns, HistoryMode.SPAN)
        assert PHONE_TAG in view.text
        assert "415" not in view.text
        src = turns[1].utterance
        a = src.index("415")
        assert view.map_span(1, a, a + 12) is None
        # Text around the mask still maps.
        t = src.index("today")
        mapped = view.map_span(1, t, t + 5)
        assert view.text[mapped[0] : mapped[1]] == "today"

    def test_masking_can_be_disabled(self):
        turns = alternating(["call 415-555-0199 now"])
        view = build_history(turns, HistoryMode.SPAN, mask_phones=False)
        assert "415-555-0199" in view.text


@given(
    st.lists(
        st.text(alphabet="abcdefg h", min_size=1, max_size=12).filter(str.strip),
        min_size=1,
        max_size=12,
    )
)
def test_reconstruction_property(texts):
    # Joining tags and bodies reproduces the built text for both layouts.
    turns = alternating(texts)
    for mode in (HistoryMode.SPAN, HistoryMode.CLASSIFIER):
        if mode is HistoryMode.SPAN and turns[-1].speaker != USER:
            continue
        view = build_history(turns, mode)
        for piece in view.pieces:
            expected = turns[piece.turn_index].utterance
            assert view.text[piece.body_start : piece.body_end] == expected
            tag = USER_TAG if piece.speaker == USER else SYSTEM_TAG
            tag_start = piece.body_start - len(tag)
            assert view.text[tag_start : piece.body_start] == tag
