"""Normalization, tokenization and lexicon lookup.

The lexicon is a flat TSV file whose rows attach every possible reading
(lemma, part of speech, morphological features, semantic traits) to a
surface form.  Ambiguity is preserved: :func:`analyze` returns all
readings and leaves the choice to the parser's disambiguation stage.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

__all__ = [
    "POS",
    "Token",
    "MorphAnalysis",
    "AnalyzedToken",
    "Lexicon",
    "LexiconError",
    "normalize",
    "tokenize",
    "analyze",
    "load_lexicon",
    "PROPER_TRAIT",
]

PROPER_TRAIT = "proper"


class POS(str, Enum):
    Noun = "Noun"
    Verb = "Verb"
    Adj = "Adj"
    Adv = "Adv"
    Pron = "Pron"
    Det = "Det"
    Prep = "Prep"
    Conj = "Conj"
    Interrog = "Interrog"
    Punct = "Punct"
    Proper = "Proper"

    def __str__(self) -> str:
        return self.value


class LexiconError(ValueError):
    """Raised for malformed lexicon files."""

    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


@dataclass(frozen=True)
class Token:
    surface: str
    char_offset: int
    sentence_index: int


@dataclass(frozen=True)
class MorphAnalysis:
    lemma: str
    pos: POS
    morph_features: frozenset = frozenset()
    semantic_traits: frozenset = frozenset()

    def render(self) -> str:
        feats = "+".join(sorted(self.morph_features))
        traits = " + ".join(sorted(self.semantic_traits))
        out = f"{self.lemma} +{feats}+{self.pos}"
        return f"{out}  + {traits}" if traits else out


@dataclass
class AnalyzedToken:
    token: Token
    analyses: list[MorphAnalysis]
    sentence_initial: bool = False


@dataclass
class Lexicon:
    entries: dict[str, list[MorphAnalysis]] = field(default_factory=dict)
    trait_inventory: frozenset = frozenset({PROPER_TRAIT})
    multiword_entries: dict[str, MorphAnalysis] = field(default_factory=dict)

    def lookup(self, surface: str) -> list[MorphAnalysis]:
        key = surface.lower()
        found = list(self.entries.get(key, ()))
        if key in self.multiword_entries:
            found.append(self.multiword_entries[key])
        return found

    def lemma_index(self) -> dict[str, set[POS]]:
        """Map every attested lemma to the parts of speech it occurs with."""
        index: dict[str, set[POS]] = {}
        for analyses in self.entries.values():
            for a in analyses:
                index.setdefault(a.lemma, set()).add(a.pos)
        for a in self.multiword_entries.values():
            index.setdefault(a.lemma, set()).add(a.pos)
        return index

    def traits_of_lemma(self, lemma: str, pos: POS | None = None) -> frozenset:
        traits: set[str] = set()
        for analyses in self.entries.values():
            for a in analyses:
                if a.lemma == lemma and (pos is None or a.pos == pos):
                    traits |= a.semantic_traits
        return frozenset(traits)

    @property
    def max_multiword(self) -> int:
        return max((len(k.split(" ")) for k in self.multiword_entries), default=1)


_APOSTROPHES = dict.fromkeys(map(ord, "’‘ʼ′´`"), "'")
_SPACE_RUN = re.compile(r"\s+")


def normalize(raw_text: str) -> str:
    text = unicodedata.normalize("NFC", raw_text).translate(_APOSTROPHES)
    return _SPACE_RUN.sub(" ", text).strip()


# Elided clitics (l', d', qu', ...) are split from the following word.
_TOKEN_RE = re.compile(
    r"(?P<elided>(?:jusqu|lorsqu|puisqu|quoiqu|qu|[cdjlmnst])')"
    r"|(?P<word>\w+(?:-\w+)*)"
    r"|(?P<punct>[^\w\s])",
    re.IGNORECASE,
)
# Subject-clitic inversion: "est-il", "a-t-elle".
_INVERSION_RE = re.compile(
    r"^(?P<verb>\w+?)(?P<clitic>(?:-t)?-(?:il|elle|ils|elles|on|je|tu|nous|vous))$",
    re.IGNORECASE,
)
_SENTENCE_END = {".", "!", "?"}


def _raw_tokens(text: str) -> list[tuple[str, int]]:
    out: list[tuple[str, int]] = []
    for m in _TOKEN_RE.finditer(text):
        surface, start = m.group(0), m.start()
        inv = _INVERSION_RE.match(surface) if m.group("word") else None
        if inv:
            verb = inv.group("verb")
            out.append((verb, start))
            out.append((inv.group("clitic"), start + len(verb)))
        else:
            out.append((surface, start))
    return out


def _merge_multiwords(
    text: str, raw: list[tuple[str, int]], lexicon: Lexicon | None
) -> list[tuple[str, int]]:
    if lexicon is None or not lexicon.multiword_entries:
        return raw
    longest = lexicon.max_multiword
    merged: list[tuple[str, int]] = []
    i = 0
    while i < len(raw):
        for n in range(min(longest, len(raw) - i), 1, -1):
            start = raw[i][1]
            last_surface, last_start = raw[i + n - 1]
            span = text[start:last_start + len(last_surface)]
            if " ".join(s for s, _ in raw[i:i + n]) != span:
                continue  # only merge over single-space separators
            if span.lower() in lexicon.multiword_entries:
                merged.append((span, start))
                i += n
                break
        else:
            merged.append(raw[i])
            i += 1
    return merged


def tokenize(text: str, lexicon: Lexicon | None = None) -> list[list[Token]]:
    """Split normalized text into sentences of tokens.

    A sentence ends at ``.``, ``!`` or ``?`` when followed by a capitalized
    token or by the end of the text.  Multiword lexicon entries are merged
    greedily, longest match first.
    """
    raw = _merge_multiwords(text, _raw_tokens(text), lexicon)
    sentences: list[list[Token]] = []
    current: list[Token] = []
    for i, (surface, offset) in enumerate(raw):
        current.append(Token(surface, offset, len(sentences)))
        if surface in _SENTENCE_END:
            nxt = raw[i + 1][0] if i + 1 < len(raw) else None
            if nxt is None or nxt[0].isupper():
                sentences.append(current)
                current = []
    if current:
        sentences.append(current)
    return sentences


def analyze(token: Token, lexicon: Lexicon, sentence_initial: bool = False) -> AnalyzedToken:
    """Attach every lexicon reading to ``token``; never fails."""
    surface = token.surface
    analyses = lexicon.lookup(surface)
    capitalized = surface[:1].isupper()
    if analyses:
        if capitalized and not sentence_initial and all(a.pos != POS.Proper for a in analyses):
            analyses.append(MorphAnalysis(surface, POS.Proper, frozenset(), frozenset({PROPER_TRAIT})))
    elif not any(ch.isalnum() for ch in surface):
        analyses = [MorphAnalysis(surface, POS.Punct)]
    elif capitalized:
        analyses = [MorphAnalysis(surface, POS.Proper, frozenset(), frozenset({PROPER_TRAIT}))]
    else:
        analyses = [MorphAnalysis(surface.lower(), POS.Noun)]
    return AnalyzedToken(token, analyses, sentence_initial)


def analyze_sentence(tokens: Iterable[Token], lexicon: Lexicon) -> list[AnalyzedToken]:
    return [analyze(tok, lexicon, sentence_initial=(i == 0)) for i, tok in enumerate(tokens)]


def _split(value: str, sep: str) -> frozenset:
    return frozenset(v.strip() for v in value.split(sep) if v.strip())


def load_lexicon(path: str | Path) -> Lexicon:
    path = Path(path)
    inventory: set[str] = {PROPER_TRAIT}
    entries: dict[str, list[MorphAnalysis]] = {}
    multi: dict[str, MorphAnalysis] = {}
    seen: set[tuple] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if line.startswith("#traits:"):
                inventory |= set(line[len("#traits:"):].split())
                continue
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) == 4:
                cols.append("")
            if len(cols) != 5:
                raise LexiconError(path, lineno, f"expected 5 tab-separated columns, got {len(cols)}")
            surface, lemma, pos_name, feats, traits = (c.strip() for c in cols)
            if not surface or not lemma:
                raise LexiconError(path, lineno, "empty surface or lemma")
            try:
                pos = POS(pos_name)
            except ValueError:
                raise LexiconError(path, lineno, f"unknown part of speech {pos_name!r}") from None
            trait_set = _split(traits, ",")
            unknown = sorted(trait_set - inventory)
            if unknown:
                raise LexiconError(path, lineno, f"undeclared trait {unknown[0]!r}")
            feat_set = _split(feats, "+")
            key = (surface.lower(), lemma, pos, feat_set)
            if key in seen:
                continue
            seen.add(key)
            analysis = MorphAnalysis(lemma, pos, feat_set, trait_set)
            if "_" in surface:
                multi[surface.replace("_", " ").lower()] = analysis
            else:
                entries.setdefault(surface.lower(), []).append(analysis)
    return Lexicon(entries, frozenset(inventory), multi)
