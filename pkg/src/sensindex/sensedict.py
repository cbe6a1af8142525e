"""Sense-distributed dictionary: every piece of information hangs off one sense.

File format (UTF-8, ``;``-separated, ``#`` comments)::

    lemma;pos;sense_no;gloss;class_tags;subcat;examples;synonyms;derivations

``class_tags`` and ``synonyms`` are comma lists, ``examples`` are separated
by ``|``.  ``subcat`` is ``I``, ``T``, ``T:trait``, ``Ti:prep`` or empty.
Derivation codes are ``-suffix:POS`` or ``-suffix:POS:root``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .lexicon import POS

__all__ = [
    "Subcat",
    "DerivationCode",
    "SenseEntry",
    "SenseDictionary",
    "SenseDictError",
    "load_sensedict",
    "dump_sensedict",
    "lexicon_traits",
]

HEADER = ("lemma", "pos", "sense_no", "gloss", "class_tags", "subcat",
          "examples", "synonyms", "derivations")


class SenseDictError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


@dataclass(frozen=True)
class Subcat:
    """Argument frame: intransitive, direct object, or indirect via a preposition."""

    kind: str  # "I", "T" or "Ti"
    preposition: str | None = None
    object_trait: str | None = None

    @classmethod
    def parse(cls, text: str) -> Subcat | None:
        text = text.strip()
        if not text:
            return None
        kind, _, arg = text.partition(":")
        if kind == "I" and not arg:
            return cls("I")
        if kind == "T":
            return cls("T", object_trait=arg or None)
        if kind == "Ti" and arg:
            return cls("Ti", preposition=arg)
        raise ValueError(f"bad subcat {text!r}")

    def __str__(self) -> str:
        if self.kind == "T":
            return f"T:{self.object_trait}" if self.object_trait else "T"
        if self.kind == "Ti":
            return f"Ti:{self.preposition}"
        return "I"


@dataclass(frozen=True)
class DerivationCode:
    suffix: str
    target_pos: POS
    root_hint: str | None = None

    def __post_init__(self):
        if not self.suffix.startswith("-") or len(self.suffix) < 2:
            raise ValueError(f"derivation suffix must start with '-': {self.suffix!r}")

    @classmethod
    def parse(cls, text: str) -> DerivationCode:
        parts = text.strip().split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad derivation code {text!r}")
        root = parts[2] if len(parts) == 3 and parts[2] else None
        return cls(parts[0], POS(parts[1]), root)

    @property
    def ending(self) -> str:
        return self.suffix[1:]

    def __str__(self) -> str:
        base = f"{self.suffix}:{self.target_pos}"
        return f"{base}:{self.root_hint}" if self.root_hint else base


@dataclass(frozen=True)
class SenseEntry:
    lemma: str
    pos: POS
    sense_no: int
    gloss: str
    class_tags: frozenset
    subcat: Subcat | None = None
    examples: tuple = ()
    synonyms: tuple = ()
    derivation_codes: tuple = ()

    @property
    def key(self) -> tuple[str, POS, int]:
        return (self.lemma, self.pos, self.sense_no)

    def label(self) -> str:
        return f"{self.lemma} {self.sense_no:02d} « {self.gloss} »"


@dataclass
class SenseDictionary:
    entries: dict[tuple[str, POS], list[SenseEntry]] = field(default_factory=dict)

    def senses_of(self, lemma: str, pos: POS) -> list[SenseEntry]:
        return list(self.entries.get((lemma, POS(pos)), ()))

    def sense(self, lemma: str, pos: POS, sense_no: int) -> SenseEntry | None:
        for s in self.entries.get((lemma, POS(pos)), ()):
            if s.sense_no == sense_no:
                return s
        return None

    def all_senses(self):
        for senses in self.entries.values():
            yield from senses

    def tags_of_lemma(self, lemma: str) -> frozenset:
        """Union of class tags over every sense of ``lemma``, any POS."""
        tags: set[str] = set()
        for (lem, _), senses in self.entries.items():
            if lem == lemma:
                for s in senses:
                    tags |= s.class_tags
        return frozenset(tags)

    def __contains__(self, lemma: str) -> bool:
        return any(lem == lemma for lem, _ in self.entries)

    def __len__(self) -> int:
        return sum(len(v) for v in self.entries.values())


def _comma(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def load_sensedict(path: str | Path) -> SenseDictionary:
    path = Path(path)
    entries: dict[tuple[str, POS], list[SenseEntry]] = {}
    first_line: dict[tuple[str, POS], int] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        rows = csv.reader(fh, delimiter=";")
        for row in rows:
            lineno = rows.line_num
            if not row or not "".join(row).strip() or row[0].startswith("#"):
                continue
            if tuple(c.strip() for c in row) == HEADER:
                continue
            if len(row) != len(HEADER):
                raise SenseDictError(path, lineno, f"expected {len(HEADER)} fields, got {len(row)}")
            lemma, pos, sense_no, gloss, tags, subcat, examples, syns, derivs = (c.strip() for c in row)
            try:
                entry = SenseEntry(
                    lemma=lemma,
                    pos=POS(pos),
                    sense_no=int(sense_no),
                    gloss=gloss,
                    class_tags=frozenset(_comma(tags)),
                    subcat=Subcat.parse(subcat),
                    examples=tuple(e.strip() for e in examples.split("|") if e.strip()),
                    synonyms=tuple(_comma(syns)),
                    derivation_codes=tuple(DerivationCode.parse(d) for d in _comma(derivs)),
                )
            except ValueError as exc:
                raise SenseDictError(path, lineno, str(exc)) from None
            if not entry.class_tags:
                raise SenseDictError(path, lineno, f"{lemma} sense {sense_no}: missing class tag")
            if entry.sense_no < 1:
                raise SenseDictError(path, lineno, "sense numbers start at 1")
            key = (entry.lemma, entry.pos)
            senses = entries.setdefault(key, [])
            if any(s.sense_no == entry.sense_no for s in senses):
                raise SenseDictError(path, lineno, f"duplicate sense {lemma};{pos};{sense_no}")
            first_line.setdefault(key, lineno)
            senses.append(entry)
    for key, senses in entries.items():
        senses.sort(key=lambda s: s.sense_no)
        if [s.sense_no for s in senses] != list(range(1, len(senses) + 1)):
            raise SenseDictError(path, first_line[key], f"{key[0]};{key[1]}: sense numbers are not contiguous from 1")
    return SenseDictionary(entries)


def dump_sensedict(dictionary: SenseDictionary, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        out = csv.writer(fh, delimiter=";", lineterminator="\n")
        out.writerow(HEADER)
        for key in sorted(dictionary.entries, key=lambda k: (k[0], k[1].value)):
            for s in dictionary.entries[key]:
                out.writerow([
                    s.lemma, s.pos.value, s.sense_no, s.gloss,
                    ",".join(sorted(s.class_tags)),
                    str(s.subcat) if s.subcat else "",
                    "|".join(s.examples),
                    ",".join(s.synonyms),
                    ",".join(str(d) for d in s.derivation_codes),
                ])


def lexicon_traits(dictionary: SenseDictionary) -> dict[tuple[str, POS], frozenset]:
    """Class tags per headword, i.e. the trait column a lexicon row would carry."""
    return {
        key: frozenset().union(*(s.class_tags for s in senses))
        for key, senses in sorted(dictionary.entries.items(), key=lambda kv: (kv[0][0], kv[0][1].value))
    }
