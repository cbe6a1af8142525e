"""JSON configuration.

Fixture paths are resolved against the directory of the config file.  The
index path is resolved the same way when given, and otherwise defaults to
``sensindex-index.jsonl`` in the working directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .query import Weights

__all__ = ["Config", "ConfigError", "load_config", "default_config_path"]

DEFAULT_INDEX = "sensindex-index.jsonl"


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    lexicon: Path
    grammar: Path
    question_grammar: Path
    sensedict: Path
    synonyms: list[Path]
    derivations: Path
    index: Path
    weights: Weights = field(default_factory=Weights)
    partial_threshold: float = 0.5
    workers: int = 1
    source: Path | None = None

    def fixture_paths(self) -> dict[str, Path]:
        paths = {
            "lexicon": self.lexicon,
            "grammar": self.grammar,
            "question_grammar": self.question_grammar,
            "sensedict": self.sensedict,
            "derivations": self.derivations,
        }
        for i, p in enumerate(self.synonyms):
            paths[f"synonyms[{i}]"] = p
        return paths


def default_config_path() -> Path:
    return Path(str(resources.files("sensindex") / "data" / "config.json"))


_FIXTURES = ("lexicon", "grammar", "question_grammar", "sensedict", "derivations")


def load_config(path: str | Path | None = None, index: str | Path | None = None) -> Config:
    path = Path(path) if path is not None else default_config_path()
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    base = path.parent

    def resolve(value) -> Path:
        p = Path(value)
        return p if p.is_absolute() else base / p

    missing = [k for k in _FIXTURES + ("synonyms",) if k not in raw]
    if missing:
        raise ConfigError(f"{path}: missing keys {', '.join(missing)}")
    fixtures = {k: resolve(raw[k]) for k in _FIXTURES}
    synonyms = [resolve(p) for p in raw["synonyms"]]
    for name, p in list(fixtures.items()) + [("synonyms", p) for p in synonyms]:
        if not p.is_file():
            raise ConfigError(f"{path}: {name} file not found: {p}")

    w = raw.get("weights", {})
    try:
        weights = Weights(float(w.get("original", 1.0)), float(w.get("synonym", 0.7)), float(w.get("derived", 0.5)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    threshold = float(raw.get("partial_threshold", 0.5))
    if not 0 < threshold <= 1:
        raise ConfigError(f"{path}: partial_threshold must be in (0, 1]")
    workers = int(raw.get("workers", 1))
    if workers < 1:
        raise ConfigError(f"{path}: workers must be at least 1")

    if index is not None:
        index_path = Path(index)
    elif raw.get("index"):
        index_path = resolve(raw["index"])
    else:
        index_path = Path(DEFAULT_INDEX)
    return Config(
        synonyms=synonyms,
        index=index_path,
        weights=weights,
        partial_threshold=threshold,
        workers=workers,
        source=path,
        **fixtures,
    )
