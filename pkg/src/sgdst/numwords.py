"""Small-integer numeral lexicon: word forms, parsing, and span restoration.

Covers the integers 0..100, which is what slot values drawn from candidate
lists actually use.  Word forms are the plain English ones ("two",
"seventeen", "forty-five", "one hundred"); hyphenated compounds are the
canonical rendering for 21..99 and "a hundred" / "hundred" are accepted as
variants of 100.
"""

from __future__ import annotations

import re

from .errors import UnsupportedValueError

MAX_SUPPORTED = 100

_UNITS = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen",
]

_TENS = {
    20: "twenty", 30: "thirty", 40: "forty", 50: "fifty",
    60: "sixty", 70: "seventy", 80: "eighty", 90: "ninety",
}


def number_to_words(n: int) -> str:
    """Canonical word form of an integer in 0..100."""
    if not 0 <= n <= MAX_SUPPORTED:
        raise UnsupportedValueError(f"{n} is outside the supported range 0..{MAX_SUPPORTED}")
    if n < 20:
        return _UNITS[n]
    if n == 100:
        return "one hundred"
    tens, unit = divmod(n, 10)
    word = _TENS[tens * 10]
    return word if unit == 0 else f"{word}-{_UNITS[unit]}"


def _word_variants(n: int) -> list[str]:
    canonical = number_to_words(n)
    if n == 100:
        return [canonical, "a hundred", "hundred"]
    variants = [canonical]
    if "-" in canonical:
        variants.append(canonical.replace("-", " "))
    return variants


_WORD_TO_NUMBER: dict[str, int] = {}
for _n in range(MAX_SUPPORTED + 1):
    for _v in _word_variants(_n):
        _WORD_TO_NUMBER.setdefault(_v, _n)


def words_to_number(text: str) -> int | None:
    """Parse a word-form or digit-form integer in 0..100; None if neither."""
    cleaned = " ".join(text.lower().split())
    if cleaned in _WORD_TO_NUMBER:
        return _WORD_TO_NUMBER[cleaned]
    try:
        n = int(cleaned)
    except ValueError:
        return None
    return n if 0 <= n <= MAX_SUPPORTED else None


def parse_int_value(value: str) -> int:
    try:
        n = int(value.strip())
    except ValueError as exc:
        raise UnsupportedValueError(f"{value!r} does not parse as an integer") from exc
    if not 0 <= n <= MAX_SUPPORTED:
        raise UnsupportedValueError(f"{value!r} is outside the supported range 0..{MAX_SUPPORTED}")
    return n


def restore_numeric_span(utterance: str, value: str) -> tuple[int, int] | None:
    """Character span of the first mention of `value` in `utterance`.

    Both surface forms are searched: Arabic numerals and the word forms of
    the numeral lexicon.  Matches must fall on word boundaries; the earliest
    match of any form wins.  Returns None when the value is not mentioned.
    """
    n = parse_int_value(value)
    patterns = [str(n)] + _word_variants(n)
    best: tuple[int, int] | None = None
    for surface in patterns:
        m = re.search(rf"\b{re.escape(surface)}\b", utterance, flags=re.IGNORECASE)
        if m and (best is None or m.start() < best[0]):
            best = (m.start(), m.end())
    return best
