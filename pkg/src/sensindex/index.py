"""The information structure: sentence records plus inverted postings.

On disk an index is a JSON-lines file::

    {"format": "sensindex", "version": 1, "postings": "rebuild", ...}   header
    {...}                                                                 one line per record
    {"postings": ...}                                                     only when stored
    {"end": true, "records": N}                                           trailer

Postings are the inverted image of the records and are rebuilt on load
unless the header says they were stored.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .expansion import DERIVED, ORIGINAL, SYNONYM, ExpandedGraph, ExtraDependency
from .lexicon import POS
from .parser import Dependency, Node, dep_label

__all__ = [
    "FORMAT",
    "VERSION",
    "SentenceRecord",
    "DepPosting",
    "LemmaPosting",
    "Trait",
    "Hit",
    "InfoStructure",
    "IndexFormatError",
    "IndexVersionError",
    "StaleIndexError",
    "record_from_expanded",
    "save",
    "load",
    "file_digest",
]

FORMAT = "sensindex"
VERSION = 1


class IndexFormatError(ValueError):
    pass


class IndexVersionError(IndexFormatError):
    pass


class StaleIndexError(IndexFormatError):
    pass


@dataclass
class SentenceRecord:
    doc_id: str
    sentence_index: int
    text: str
    nodes: list[Node]
    base_dependencies: list[Dependency]
    alternatives: dict[int, set[tuple[str, str]]] = field(default_factory=dict)
    extra_dependencies: list[ExtraDependency] = field(default_factory=list)
    virtual_nodes: list[Node] = field(default_factory=list)
    virtual_provenance: dict[int, str] = field(default_factory=dict)
    blocked: set[tuple[int, int, str]] = field(default_factory=set)

    def node(self, node_id: int) -> Node:
        n = len(self.nodes)
        return self.nodes[node_id] if node_id < n else self.virtual_nodes[node_id - n]

    def all_nodes(self) -> list[Node]:
        return self.nodes + self.virtual_nodes

    def dependency(self, layer: str, index: int) -> Dependency:
        return self.base_dependencies[index] if layer == "base" else self.extra_dependencies[index].dependency

    def render(self, dep: Dependency) -> str:
        return f"{dep.label}({', '.join(self.node(i).surface for i in dep.endpoints())})"


def record_from_expanded(expanded: ExpandedGraph) -> SentenceRecord:
    import copy

    base = expanded.base
    return SentenceRecord(
        doc_id=base.doc_id,
        sentence_index=base.sentence_index,
        text=base.text,
        nodes=copy.deepcopy(base.nodes),
        base_dependencies=list(base.dependencies),
        alternatives={k: set(v) for k, v in expanded.alternatives.items()},
        extra_dependencies=list(expanded.extra_dependencies),
        virtual_nodes=copy.deepcopy(expanded.virtual_nodes),
        virtual_provenance=dict(expanded.virtual_provenance),
        blocked=set(expanded.blocked),
    )


@dataclass(frozen=True)
class DepPosting:
    record: int
    layer: str  # "base" or "extra"
    dep_index: int
    head: int
    dependent: int
    mediator: int | None
    provenance: frozenset


@dataclass(frozen=True)
class LemmaPosting:
    record: int
    node_id: int
    provenance: str


@dataclass(frozen=True)
class Trait:
    """Lookup argument matching any node that carries ``name``."""

    name: str


@dataclass(frozen=True)
class Hit:
    record: SentenceRecord
    binding: dict
    provenance: frozenset
    posting: DepPosting

    def __hash__(self):
        return hash(self.posting)


def _provenance(*parts: Iterable[str]) -> frozenset:
    kinds = frozenset().union(*parts)
    return kinds - {ORIGINAL} if kinds - {ORIGINAL} else frozenset({ORIGINAL})


def record_postings(ref: int, rec: SentenceRecord):
    """Yield ``(lemma, LemmaPosting)`` and ``(key, DepPosting)`` pairs for one record."""
    lemma_out = []
    for node in rec.nodes:
        lemma_out.append((node.lemma, LemmaPosting(ref, node.node_id, ORIGINAL)))
    for node_id in sorted(rec.alternatives):
        for lemma, prov in sorted(rec.alternatives[node_id]):
            lemma_out.append((lemma, LemmaPosting(ref, node_id, prov)))
    for node in rec.virtual_nodes:
        lemma_out.append((node.lemma, LemmaPosting(ref, node.node_id, rec.virtual_provenance.get(node.node_id, DERIVED))))

    def choices(node_id: int, base_index: int | None):
        out = [(rec.node(node_id).lemma, frozenset())]
        for lemma, prov in sorted(rec.alternatives.get(node_id, ())):
            if base_index is not None and (base_index, node_id, lemma) in rec.blocked:
                continue
            out.append((lemma, frozenset({prov})))
        return out

    dep_out = []
    layers = [("base", j, d, frozenset({ORIGINAL})) for j, d in enumerate(rec.base_dependencies)]
    layers += [("extra", j, e.dependency, e.provenance) for j, e in enumerate(rec.extra_dependencies)]
    for layer, j, dep, prov in layers:
        if dep.dependent is None:
            continue
        base_index = j if layer == "base" else None
        for h_lemma, h_prov in choices(dep.head, base_index):
            for d_lemma, d_prov in choices(dep.dependent, base_index):
                key = (dep.label, h_lemma, d_lemma)
                posting = DepPosting(ref, layer, j, dep.head, dep.dependent, dep.mediator,
                                     _provenance(prov, h_prov, d_prov))
                dep_out.append((key, posting))
    return lemma_out, dep_out


@dataclass
class InfoStructure:
    records: list[SentenceRecord] = field(default_factory=list)
    lemma_postings: dict[str, list[LemmaPosting]] = field(default_factory=dict)
    dep_postings: dict[tuple[str, str, str], list[DepPosting]] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    # ------------------------------------------------------------ building
    def add_sentence(self, expanded: ExpandedGraph | SentenceRecord) -> SentenceRecord:
        rec = expanded if isinstance(expanded, SentenceRecord) else record_from_expanded(expanded)
        ref = len(self.records)
        self.records.append(rec)
        lemma_out, dep_out = record_postings(ref, rec)
        for lemma, p in lemma_out:
            self.lemma_postings.setdefault(lemma, []).append(p)
        for key, p in dep_out:
            self.dep_postings.setdefault(key, []).append(p)
        self._by_label = None
        self._surfaces = None
        return rec

    def rebuilt(self) -> InfoStructure:
        """A fresh structure holding the same records with postings recomputed."""
        fresh = InfoStructure(metadata=dict(self.metadata))
        for rec in self.records:
            fresh.add_sentence(rec)
        return fresh

    # ------------------------------------------------------------- queries
    @property
    def by_label(self) -> dict[str, list[tuple[str, str, str]]]:
        if getattr(self, "_by_label", None) is None:
            table: dict[str, list] = {}
            for key in self.dep_postings:
                table.setdefault(key[0], []).append(key)
            self._by_label = table
        return self._by_label

    @property
    def surface_lemmas(self) -> dict[str, set[str]]:
        if getattr(self, "_surfaces", None) is None:
            table: dict[str, set[str]] = {}
            for rec in self.records:
                for node in rec.nodes:
                    table.setdefault(node.surface.lower(), set()).add(node.lemma)
            self._surfaces = table
        return self._surfaces

    def lemma_options(self, word: str) -> set[str]:
        return {word} | self.surface_lemmas.get(word.lower(), set())

    def lookup_dependency(self, label: str, head=None, dependent=None, mediator: str | None = None) -> list[Hit]:
        """Find every posting of ``label`` whose slots fit ``head`` and ``dependent``.

        A slot argument is a lemma (an inflected form found in the corpus
        also works), a :class:`Trait`, or ``None`` for any filler.
        """
        if isinstance(head, str) and isinstance(dependent, str):
            keys = [(label, h, d) for h in sorted(self.lemma_options(head))
                    for d in sorted(self.lemma_options(dependent))]
        else:
            keys = []
            for key in self.by_label.get(label, ()):
                if isinstance(head, str) and key[1] not in self.lemma_options(head):
                    continue
                if isinstance(dependent, str) and key[2] not in self.lemma_options(dependent):
                    continue
                keys.append(key)
        hits, seen = [], set()
        for key in keys:
            for p in self.dep_postings.get(key, ()):
                rec = self.records[p.record]
                if isinstance(head, Trait) and head.name not in rec.node(p.head).traits:
                    continue
                if isinstance(dependent, Trait) and dependent.name not in rec.node(p.dependent).traits:
                    continue
                if mediator is not None and (p.mediator is None or rec.node(p.mediator).lemma != mediator):
                    continue
                if p in seen:
                    continue
                seen.add(p)
                binding = {"head": p.head, "dependent": p.dependent, "mediator": p.mediator}
                hits.append(Hit(rec, binding, p.provenance, p))
        hits.sort(key=lambda h: (h.posting.record, h.posting.layer, h.posting.dep_index, sorted(h.provenance)))
        return hits

    def counts(self) -> dict:
        return {
            "records": len(self.records),
            "lemma_keys": len(self.lemma_postings),
            "dependency_keys": len(self.dep_postings),
        }


# ---------------------------------------------------------------- storage

def _node_json(n: Node) -> list:
    return [n.node_id, n.surface, n.lemma, n.pos.value, sorted(n.features), sorted(n.traits)]


def _node_from(j: list) -> Node:
    return Node(j[0], j[1], j[2], POS(j[3]), frozenset(j[4]), set(j[5]))


def _dep_json(d: Dependency) -> list:
    return [d.name, sorted(d.tags), d.head, d.dependent, d.mediator]


def _dep_from(j: list) -> Dependency:
    return Dependency(j[0], frozenset(j[1]), j[2], j[3], j[4])


def _origin_json(origin: tuple) -> list:
    return list(origin)


def record_to_json(rec: SentenceRecord) -> dict:
    return {
        "doc_id": rec.doc_id,
        "sentence_index": rec.sentence_index,
        "text": rec.text,
        "nodes": [_node_json(n) for n in rec.nodes],
        "dependencies": [_dep_json(d) for d in rec.base_dependencies],
        "alternatives": {str(k): sorted(map(list, v)) for k, v in sorted(rec.alternatives.items())},
        "extra": [[_dep_json(e.dependency), sorted(e.provenance), _origin_json(e.origin)]
                  for e in rec.extra_dependencies],
        "virtual": [_node_json(n) for n in rec.virtual_nodes],
        "virtual_provenance": {str(k): v for k, v in sorted(rec.virtual_provenance.items())},
        "blocked": sorted(map(list, rec.blocked)),
    }


def record_from_json(j: dict) -> SentenceRecord:
    return SentenceRecord(
        doc_id=j["doc_id"],
        sentence_index=j["sentence_index"],
        text=j["text"],
        nodes=[_node_from(n) for n in j["nodes"]],
        base_dependencies=[_dep_from(d) for d in j["dependencies"]],
        alternatives={int(k): {tuple(a) for a in v} for k, v in j["alternatives"].items()},
        extra_dependencies=[ExtraDependency(_dep_from(d), frozenset(p), tuple(o)) for d, p, o in j["extra"]],
        virtual_nodes=[_node_from(n) for n in j["virtual"]],
        virtual_provenance={int(k): v for k, v in j["virtual_provenance"].items()},
        blocked={tuple(b) for b in j["blocked"]},
    )


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def _postings_json(structure: InfoStructure) -> dict:
    return {
        "lemma": {k: [[p.record, p.node_id, p.provenance] for p in v]
                  for k, v in sorted(structure.lemma_postings.items())},
        "dep": [[list(k), [[p.record, p.layer, p.dep_index, p.head, p.dependent, p.mediator,
                            sorted(p.provenance)] for p in v]]
                for k, v in sorted(structure.dep_postings.items())],
    }


def save(structure: InfoStructure, path: str | Path, store_postings: bool = False) -> None:
    header = {
        "format": FORMAT,
        "version": VERSION,
        "postings": "stored" if store_postings else "rebuild",
        "records": len(structure.records),
        "metadata": structure.metadata,
    }
    lines = [_dumps(header)]
    lines += [_dumps(record_to_json(r)) for r in structure.records]
    if store_postings:
        lines.append(_dumps({"postings": _postings_json(structure)}))
    lines.append(_dumps({"end": True, "records": len(structure.records)}))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load(path: str | Path, expected_fixtures: dict | None = None) -> InfoStructure:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise IndexFormatError(f"{path}: empty index file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"{path}: unreadable header ({exc})") from None
    if header.get("format") != FORMAT:
        raise IndexFormatError(f"{path}: not a {FORMAT} index")
    if header.get("version") != VERSION:
        raise IndexVersionError(f"{path}: index version {header.get('version')} is not supported (expected {VERSION})")
    n = header.get("records", -1)
    stored = header.get("postings") == "stored"
    expected_lines = 1 + n + (1 if stored else 0) + 1
    if len(lines) != expected_lines:
        raise IndexFormatError(f"{path}: truncated or corrupt index ({len(lines)} lines, expected {expected_lines})")
    try:
        trailer = json.loads(lines[-1])
        if trailer != {"end": True, "records": n}:
            raise IndexFormatError(f"{path}: bad trailer")
        records = [record_from_json(json.loads(line)) for line in lines[1:1 + n]]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, IndexFormatError):
            raise
        raise IndexFormatError(f"{path}: corrupt record ({exc})") from None
    metadata = header.get("metadata", {})
    if expected_fixtures is not None and metadata.get("fixtures") != expected_fixtures:
        raise StaleIndexError(f"{path}: built from different fixtures; rebuild the index")
    structure = InfoStructure(metadata=metadata)
    if stored:
        postings = json.loads(lines[1 + n])["postings"]
        structure.records = records
        structure.lemma_postings = {
            k: [LemmaPosting(r, i, p) for r, i, p in v] for k, v in postings["lemma"].items()
        }
        structure.dep_postings = {
            tuple(k): [DepPosting(r, layer, j, h, d, m, frozenset(p)) for r, layer, j, h, d, m, p in v]
            for k, v in postings["dep"]
        }
    else:
        for rec in records:
            structure.add_sentence(rec)
    return structure


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
