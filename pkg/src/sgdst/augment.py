"""Synonym lexicon construction and lookup.

Synonym features (and any candidate/description expansion) read from a
SynonymLexicon.  Lexicons live in TSV files so the expansion step is
reproducible offline: expensive providers (web thesauri, embedding
nearest-neighbor services) are wrapped in a JSON cache, and a frozen
cache file replays their answers without network access.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Protocol

from .errors import CacheMissError, DataError


@dataclass(frozen=True)
class SynonymLexicon:
    """Case-insensitive term -> synonyms map."""

    entries: tuple[tuple[str, tuple[str, ...]], ...] = ()
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for term, syns in self.entries:
            self._index[term.lower()] = syns

    def synonyms(self, term: str) -> tuple[str, ...]:
        return self._index.get(term.lower(), ())

    def terms(self) -> tuple[str, ...]:
        return tuple(term for term, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


class SynonymProvider(Protocol):
    def expand(self, term: str) -> list[str]: ...


@dataclass(frozen=True)
class StaticProvider:
    """In-memory provider, mostly for tests and hand-written tables."""

    table: dict

    def expand(self, term: str) -> list[str]:
        return list(self.table.get(term.lower(), ()))


class CachedProvider:
    """JSON-file cache in front of a provider.

    With provider=None the cache is authoritative: a lookup outside it
    raises CacheMissError instead of silently returning nothing, so a
    frozen fixture cache that is missing a term fails loudly.
    """

    def __init__(self, cache_path: str, provider: SynonymProvider | None = None):
        self.cache_path = cache_path
        self.provider = provider
        self._cache: dict[str, list[str]] = {}
        if os.path.exists(cache_path):
            try:
                with open(cache_path, encoding="utf-8") as fh:
                    raw = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise DataError(f"bad synonym cache {cache_path}: {exc}") from None
            if not isinstance(raw, dict):
                raise DataError(f"synonym cache {cache_path} must be a JSON object")
            self._cache = {k: [str(v) for v in vs] for k, vs in raw.items()}

    def expand(self, term: str) -> list[str]:
        key = term.lower()
        if key in self._cache:
            return list(self._cache[key])
        if self.provider is None:
            raise CacheMissError(f"term {term!r} not in cache {self.cache_path}")
        values = self.provider.expand(term)
        self._cache[key] = list(values)
        self._persist()
        return list(values)

    def _persist(self) -> None:
        with open(self.cache_path, "w", encoding="utf-8") as fh:
            json.dump(self._cache, fh, indent=1, sort_keys=True)
            fh.write("\n")


def expand_term(term: str, provider: SynonymProvider) -> tuple[str, ...]:
    """Provider output, deduplicated case-insensitively, term itself removed."""
    seen = {term.lower()}
    out: list[str] = []
    for syn in provider.expand(term):
        syn = syn.strip()
        if not syn or syn.lower() in seen:
            continue
        seen.add(syn.lower())
        out.append(syn)
    return tuple(out)


def build_lexicon(terms: list[str], provider: SynonymProvider) -> SynonymLexicon:
    entries = []
    done = set()
    for term in terms:
        if term.lower() in done:
            continue
        done.add(term.lower())
        entries.append((term, expand_term(term, provider)))
    return SynonymLexicon(entries=tuple(entries))


def load_lexicon(path: str) -> SynonymLexicon:
    """TSV: term, tab, synonyms separated by tabs.  '#' starts a comment line."""
    entries = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                cells = [c.strip() for c in line.split("\t")]
                term = cells[0]
                if not term:
                    raise DataError(f"{path}:{lineno}: empty term")
                entries.append((term, tuple(c for c in cells[1:] if c)))
    except OSError as exc:
        raise DataError(f"cannot read lexicon {path}: {exc}") from None
    return SynonymLexicon(entries=tuple(entries))


def save_lexicon(path: str, lexicon: SynonymLexicon) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for term, syns in lexicon.entries:
            fh.write("\t".join((term, *syns)) + "\n")
