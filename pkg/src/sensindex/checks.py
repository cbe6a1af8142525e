"""Fixture cross-validation for the ``check`` command."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .config import Config
from .expansion import PatternError, SynonymFileError, load_patterns, load_synonyms
from .lexicon import LexiconError, load_lexicon
from .parser import GrammarError, read_grammar
from .sensedict import SenseDictError, load_sensedict

__all__ = ["Failure", "check_fixtures"]


@dataclass(frozen=True)
class Failure:
    check: str
    path: str
    line: int
    message: str

    def __str__(self) -> str:
        loc = f"{self.path}:{self.line}" if self.line else self.path
        return f"[{self.check}] {loc}: {self.message}"


def _load(check: str, loader, path: Path, failures: list[Failure]):
    try:
        return loader(path)
    except (LexiconError, GrammarError, SenseDictError, PatternError) as exc:
        failures.append(Failure(check, str(exc.path), exc.line, str(exc).split(": ", 1)[-1]))
    except (SynonymFileError, ValueError, OSError) as exc:
        failures.append(Failure(check, str(path), 0, str(exc)))
    return None


def _grammar_lemmas(grammar, lexicon, path: Path, failures: list[Failure]) -> None:
    known = set(lexicon.lemma_index())
    for rule in grammar.rules:
        for slot in rule.pattern:
            for key, values, _ in slot.constraints:
                if key != "lemma":
                    continue
                for v in sorted(values - known):
                    failures.append(Failure("grammar", str(path), rule.line, f"lemma {v!r} is not in the lexicon"))


def check_fixtures(config: Config) -> list[Failure]:
    """Load every fixture and cross-check them; an empty list means all is well."""
    failures: list[Failure] = []
    lexicon = _load("lexicon", load_lexicon, config.lexicon, failures)
    grammars = [(p, _load("grammar", read_grammar, p, failures)) for p in (config.grammar, config.question_grammar)]
    dictionary = _load("sensedict", load_sensedict, config.sensedict, failures)
    for p in config.synonyms:
        _load("synonyms", load_synonyms, p, failures)
    _load("derivations", load_patterns, config.derivations, failures)

    if lexicon is not None:
        for path, grammar in grammars:
            if grammar is not None:
                _grammar_lemmas(grammar, lexicon, path, failures)
    if lexicon is not None and dictionary is not None:
        inventory = lexicon.trait_inventory
        lemmas = lexicon.lemma_index()
        for sense in dictionary.all_senses():
            where = f"{sense.lemma} {sense.sense_no:02d}"
            for tag in sorted(sense.class_tags - inventory):
                failures.append(Failure("traits", str(config.sensedict), 0,
                                        f"{where}: class tag {tag!r} is not in the lexicon trait inventory"))
            if sense.pos not in lemmas.get(sense.lemma, ()):
                failures.append(Failure("traits", str(config.sensedict), 0,
                                        f"{where}: headword has no {sense.pos} reading in the lexicon"))
            if sense.subcat and sense.subcat.object_trait and sense.subcat.object_trait not in inventory:
                failures.append(Failure("traits", str(config.sensedict), 0,
                                        f"{where}: subcat trait {sense.subcat.object_trait!r} is undeclared"))
    return failures
