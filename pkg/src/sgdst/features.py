"""Binary wide features for the candidate ranker.

Exactly 83 features, all 0/1, computed from the dialogue text, the system
side's own past actions, the schema entry for the slot, the candidate
string, and the synonym lexicon.  Nothing here peeks at gold user
annotations, so the same code runs at train and inference time.

The layout is versioned; docs/FEATURES.md describes every index.  Any
change to an index's meaning requires bumping FEATURE_VERSION, and the
total must stay 83 so stored checkpoints stay readable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .augment import SynonymLexicon
from .dialogue import (
    ACT_CONFIRM,
    ACT_INFORM,
    ACT_OFFER,
    ACT_REQUEST,
    Action,
    Turn,
    USER,
)
from .history import CLASSIFIER_WINDOW
from .numwords import words_to_number
from .schema import DONTCARE, UNKNOWN, ServiceDef, SlotDef, SlotKind, classify_slot
from .text import tokenize_with_offsets

FEATURE_VERSION = 1
WIDE_DIM = 83

STOPWORDS = frozenset(
    "a an and are as at be but by for from has have if in into is it its of on or "
    "s t that the their then there these this to was were will with you your".split()
)

AFFIRM_WORDS = frozenset(
    "yes yeah yep yup sure correct right ok okay definitely absolutely certainly please".split()
)

NEGATE_WORDS = frozenset(
    "no not nope nah never don dont can cant cannot won wont isn isnt aren arent didn didnt".split()
)

QUESTION_LEADS = frozenset(
    "what which when where who whom whose why how is are do does did can could "
    "would will shall should may might am".split()
)

_RANKED_ACTS = (ACT_INFORM, ACT_REQUEST, ACT_OFFER, ACT_CONFIRM)


def _tokens(text: str) -> tuple[str, ...]:
    return tokenize_with_offsets(text).tokens


def content_words(text: str) -> tuple[str, ...]:
    return tuple(t for t in _tokens(text) if t not in STOPWORDS and t.isalnum())


def contains_subsequence(haystack: tuple[str, ...], needle: tuple[str, ...]) -> bool:
    if not needle or len(needle) > len(haystack):
        return False
    for i in range(len(haystack) - len(needle) + 1):
        if haystack[i : i + len(needle)] == needle:
            return True
    return False


@dataclass(frozen=True)
class FeatureContext:
    """Per-(turn, service) text and action state shared across candidates."""

    user_tokens: tuple[str, ...]
    prev_user_tokens: tuple[str, ...]
    first_user_tokens: tuple[str, ...]
    last_system_tokens: tuple[str, ...]
    window_token_sets: tuple[tuple[str, ...], ...]
    window_speakers: tuple[str, ...]
    user_turn_ordinal: int
    system_actions: tuple[Action, ...]
    last_system_actions: tuple[Action, ...]


def build_feature_context(turns: list[Turn] | tuple[Turn, ...], service: str) -> FeatureContext:
    """Assemble the candidate-independent inputs from a (possibly truncated) history.

    The final turn must be the current user turn; scope "anywhere" means the
    same nine-utterance window the classifier text layout uses.
    """
    user_indices = [i for i, t in enumerate(turns) if t.speaker == USER]
    current = turns[-1]
    prev_user = turns[user_indices[-2]].utterance if len(user_indices) >= 2 else ""
    first_user = turns[user_indices[0]].utterance if user_indices else ""
    system_turns = [t for t in turns if t.speaker != USER]
    last_system = system_turns[-1].utterance if system_turns else ""

    window = list(turns)[-CLASSIFIER_WINDOW:]
    actions: list[Action] = []
    for turn in turns:
        if turn.speaker == USER:
            continue
        frame = turn.frame_for(service)
        if frame is not None:
            actions.extend(frame.actions)
    last_actions: tuple[Action, ...] = ()
    if system_turns:
        frame = system_turns[-1].frame_for(service)
        if frame is not None:
            last_actions = frame.actions

    return FeatureContext(
        user_tokens=_tokens(current.utterance),
        prev_user_tokens=_tokens(prev_user),
        first_user_tokens=_tokens(first_user),
        last_system_tokens=_tokens(last_system),
        window_token_sets=tuple(_tokens(t.utterance) for t in window),
        window_speakers=tuple(t.speaker for t in window),
        user_turn_ordinal=max(0, len(user_indices) - 1),
        system_actions=tuple(actions),
        last_system_actions=last_actions,
    )


def _synonyms_of_words(words: tuple[str, ...], lexicon: SynonymLexicon | None) -> set[str]:
    out: set[str] = set()
    if lexicon is None:
        return out
    for w in words:
        out.update(s.lower() for s in lexicon.synonyms(w))
    return out


def _any_word_in(words, token_seq) -> bool:
    pool = set(token_seq)
    return any(w in pool for w in words)


def _any_phrase_in(phrases: set[str], token_seq: tuple[str, ...]) -> bool:
    return any(contains_subsequence(token_seq, _tokens(p)) for p in phrases)


def _scope_triple(check_user, check_system, check_window) -> tuple[bool, bool, bool]:
    return check_user, check_system, check_window


def wide_features(
    ctx: FeatureContext,
    service: ServiceDef,
    slot: SlotDef,
    candidate: str,
    lexicon: SynonymLexicon | None = None,
) -> np.ndarray:
    """The 83-bit feature vector for one candidate value of one slot."""
    f = np.zeros(WIDE_DIM, dtype=np.float64)
    u = ctx.user_tokens
    s = ctx.last_system_tokens
    window = ctx.window_token_sets

    def anywhere(pred) -> bool:
        return any(pred(tok_seq) for tok_seq in window)

    # 0-2: utterance tone, mutually exclusive, question beats negation.
    is_question = "?" in u or (bool(u) and u[0] in QUESTION_LEADS)
    is_negative = not is_question and _any_word_in(NEGATE_WORDS, u)
    f[0] = is_question
    f[1] = is_negative
    f[2] = not (is_question or is_negative)

    # 3-8: slot description content words, literal then synonym, per scope.
    desc_words = content_words(slot.description)
    f[3] = _any_word_in(desc_words, u)
    f[4] = _any_word_in(desc_words, s)
    f[5] = anywhere(lambda seq: _any_word_in(desc_words, seq))
    desc_syn = _synonyms_of_words(desc_words, lexicon)
    f[6] = _any_phrase_in(desc_syn, u)
    f[7] = _any_phrase_in(desc_syn, s)
    f[8] = anywhere(lambda seq: _any_phrase_in(desc_syn, seq))

    # 9-14: candidate value, literal token subsequence then synonym, per scope.
    cand_tokens = _tokens(candidate)
    f[9] = contains_subsequence(u, cand_tokens)
    f[10] = contains_subsequence(s, cand_tokens)
    f[11] = anywhere(lambda seq: contains_subsequence(seq, cand_tokens))
    cand_syn = set()
    if lexicon is not None:
        cand_syn = {x.lower() for x in lexicon.synonyms(candidate)}
    f[12] = _any_phrase_in(cand_syn, u)
    f[13] = _any_phrase_in(cand_syn, s)
    f[14] = anywhere(lambda seq: _any_phrase_in(cand_syn, seq))

    # 15-18: slot named in a past system action, one bit per act type.
    for i, act in enumerate(_RANKED_ACTS):
        f[15 + i] = any(a.act == act and a.slot == slot.name for a in ctx.system_actions)

    # 19-20: leading affirmation / negation word.
    f[19] = bool(u) and u[0] in AFFIRM_WORDS
    f[20] = bool(u) and u[0] in NEGATE_WORDS

    # 21-23: slot name tokens (underscores split) per scope.
    name_words = tuple(w for w in slot.name.lower().replace("_", " ").split() if w)
    f[21] = _any_word_in(name_words, u)
    f[22] = _any_word_in(name_words, s)
    f[23] = anywhere(lambda seq: _any_word_in(name_words, seq))

    # 24-33: user turn ordinal one-hot (0..8, then 9+).
    f[24 + min(ctx.user_turn_ordinal, 9)] = 1.0

    # 34-39: candidate kind.
    f[34] = candidate == DONTCARE
    f[35] = candidate == UNKNOWN
    f[36] = candidate == "True"
    f[37] = candidate == "False"
    f[38] = candidate in slot.possible_values
    f[39] = any(
        a.act == ACT_OFFER and a.slot == slot.name and candidate in a.values
        for a in ctx.system_actions
    )

    # 40-43: candidate token count (1, 2, 3, 4+).
    f[40 + min(max(len(cand_tokens), 1), 4) - 1] = 1.0

    # 44-47: fraction of candidate tokens present in the user utterance.
    pool = set(u)
    if cand_tokens:
        frac = sum(t in pool for t in cand_tokens) / len(cand_tokens)
    else:
        frac = 0.0
    f[44] = frac == 0.0
    f[45] = 0.0 < frac < 0.5
    f[46] = 0.5 <= frac < 1.0
    f[47] = frac == 1.0

    # 48-52: utterances in the window (<=2, 3-4, 5-6, 7-8, 9+).
    n_window = len(window)
    f[48 + min((max(n_window, 1) - 1) // 2, 4)] = 1.0

    # 53-54: candidate literally present in any user / any system utterance.
    f[53] = any(
        contains_subsequence(seq, cand_tokens)
        for seq, spk in zip(window, ctx.window_speakers)
        if spk == USER
    )
    f[54] = any(
        contains_subsequence(seq, cand_tokens)
        for seq, spk in zip(window, ctx.window_speakers)
        if spk != USER
    )

    # 55-58: fraction of description content words in the user utterance.
    if desc_words:
        dfrac = sum(t in pool for t in desc_words) / len(desc_words)
    else:
        dfrac = 0.0
    f[55] = dfrac == 0.0
    f[56] = 0.0 < dfrac < 1 / 3
    f[57] = 1 / 3 <= dfrac < 2 / 3
    f[58] = dfrac >= 2 / 3

    # 59-60: last system turn asked something; user reply is very short.
    f[59] = "?" in s
    f[60] = len(u) <= 3

    # 61-64: act types present in the most recent system turn.
    for i, act in enumerate(_RANKED_ACTS):
        f[61 + i] = any(a.act == act for a in ctx.last_system_actions)

    # 65-67: numeric candidate; candidate stated / offered by the system for this slot.
    f[65] = words_to_number(candidate) is not None
    f[66] = any(
        a.act in (ACT_INFORM, ACT_CONFIRM) and a.slot == slot.name and candidate in a.values
        for a in ctx.system_actions
    )
    f[67] = any(
        a.act == ACT_OFFER and a.slot == slot.name and candidate in a.values
        for a in ctx.system_actions
    )

    # 68-69: slot is required / optional somewhere in the service's intents.
    f[68] = any(slot.name in intent.required_slots for intent in service.intents)
    f[69] = any(slot.name in intent.optional_slots for intent in service.intents)

    # 70-72: earlier-turn echoes.
    f[70] = contains_subsequence(ctx.first_user_tokens, cand_tokens)
    f[71] = contains_subsequence(ctx.prev_user_tokens, cand_tokens)
    f[72] = _any_word_in(desc_words, ctx.prev_user_tokens)

    # 73-75: digit presence.
    f[73] = any(any(c.isdigit() for c in t) for t in u)
    f[74] = any(any(c.isdigit() for c in t) for t in s)
    f[75] = any(c.isdigit() for c in candidate)

    # 76: long user utterance.
    f[76] = len(u) >= 10

    # 77: the system offered a choice (multi-value offer) for this slot.
    f[77] = any(
        a.act == ACT_OFFER and a.slot == slot.name and len(a.values) >= 2
        for a in ctx.system_actions
    )

    # 78: the most recent system turn touched this slot at all.
    f[78] = any(a.slot == slot.name for a in ctx.last_system_actions)

    # 79: every candidate token appears in the last system utterance.
    spool = set(s)
    f[79] = bool(cand_tokens) and all(t in spool for t in cand_tokens)

    # 80-82: slot kind.
    kind = classify_slot(slot)
    f[80] = kind is SlotKind.BOOLEAN
    f[81] = kind is SlotKind.TEXT
    f[82] = kind is SlotKind.NUMERICAL

    return f
