"""End-to-end wiring: fixtures in, information structure and answers out."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .config import Config, load_config
from .expansion import DERIVED, ExpandedGraph, expand_graph, derive_all, load_patterns, load_synonyms, redistribute_synonyms
from .index import InfoStructure, file_digest
from .lexicon import load_lexicon
from .parser import SentenceGraph, read_grammar, parse_text
from .query import Answer, LightStructure, match, parse_question, strip
from .sensedict import load_sensedict
from .wsd import apply_rules, compile_rules, sense_of

__all__ = ["Pipeline", "BuildReport", "fixture_hashes"]

log = logging.getLogger(__name__)


def fixture_hashes(config: Config) -> dict[str, str]:
    return {name: file_digest(p) for name, p in config.fixture_paths().items()}


@dataclass
class BuildReport:
    documents: int = 0
    sentences: int = 0
    dependencies: int = 0
    extra_dependencies: int = 0
    derived_dependencies: int = 0
    alternatives: int = 0
    sense_resolved: int = 0
    node_only: int = 0
    skipped_examples: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [
            f"documents: {self.documents}",
            f"sentences: {self.sentences}",
            f"dependencies: {self.dependencies}",
            f"extra dependencies: {self.extra_dependencies} ({self.derived_dependencies} derived)",
            f"synonym alternatives: {self.alternatives}",
            f"sense-resolved nodes: {self.sense_resolved}",
            f"node-only records: {self.node_only}",
            f"skipped WSD examples: {len(self.skipped_examples)}",
        ]
        out += [f"warning: {w}" for w in self.skipped_examples]
        out += [f"error: {e}" for e in self.errors]
        return out


class Pipeline:
    def __init__(self, config: Config):
        self.config = config
        self.lexicon = load_lexicon(config.lexicon)
        self.grammar = read_grammar(config.grammar).section("main")
        question = read_grammar(config.question_grammar)
        self.question_rules = self.grammar + question.rules
        self.drops = question.drops
        self.dictionary = load_sensedict(config.sensedict)
        self.ruleset = compile_rules(self.dictionary, self.lexicon, self.grammar)
        self.synonyms = redistribute_synonyms(self.dictionary, [load_synonyms(p) for p in config.synonyms])
        self.derivations = derive_all(self.dictionary, self.lexicon)
        self.patterns = load_patterns(config.derivations)
        self.hashes = fixture_hashes(config)

    @classmethod
    def from_config(cls, path: str | Path | None = None, index: str | Path | None = None) -> Pipeline:
        return cls(load_config(path, index))

    # ----------------------------------------------------------- documents
    def disambiguated(self, text: str, doc_id: str = "", first_index: int = 0) -> list[SentenceGraph]:
        graphs = parse_text(text, self.lexicon, self.grammar, doc_id, first_index)
        return [apply_rules(g, self.ruleset, self.dictionary) for g in graphs]

    def process_text(self, text: str, doc_id: str = "", first_index: int = 0) -> list[ExpandedGraph]:
        out = []
        for graph in parse_text(text, self.lexicon, self.grammar, doc_id, first_index):
            try:
                resolved = apply_rules(graph, self.ruleset, self.dictionary)
                out.append(expand_graph(resolved, self.synonyms, self.derivations, self.patterns,
                                        self.dictionary, self.lexicon))
            except Exception as exc:  # keep the sentence even if enrichment fails
                log.warning("%s#%d: enrichment failed (%s); indexing nodes only", doc_id, graph.sentence_index, exc)
                out.append(ExpandedGraph(SentenceGraph(doc_id, graph.sentence_index, graph.text, graph.nodes)))
        return out

    def new_structure(self) -> InfoStructure:
        return InfoStructure(metadata={"fixtures": dict(self.hashes), "format": "sentence records"})

    def build(self, corpus_paths: Sequence[str | Path]) -> tuple[InfoStructure, BuildReport]:
        report = BuildReport(skipped_examples=list(self.ruleset.warnings))
        docs = _doc_ids(corpus_paths)
        results: dict[str, list[ExpandedGraph]] = {}
        if self.config.workers > 1 and len(docs) > 1:
            with ProcessPoolExecutor(self.config.workers, initializer=_init_worker, initargs=(self.config,)) as pool:
                futures = {doc_id: pool.submit(_worker_doc, doc_id, str(p)) for doc_id, p in docs}
                for doc_id, fut in futures.items():
                    graphs, error = fut.result()
                    if error:
                        report.errors.append(error)
                    else:
                        results[doc_id] = graphs
        else:
            for doc_id, p in docs:
                graphs, error = _process_doc(self, doc_id, p)
                if error:
                    report.errors.append(error)
                else:
                    results[doc_id] = graphs

        structure = self.new_structure()
        for doc_id in sorted(results):
            report.documents += 1
            for expanded in sorted(results[doc_id], key=lambda e: e.base.sentence_index):
                structure.add_sentence(expanded)
                report.sentences += 1
                report.dependencies += len(expanded.base.dependencies)
                report.extra_dependencies += len(expanded.extra_dependencies)
                report.derived_dependencies += sum(DERIVED in e.provenance for e in expanded.extra_dependencies)
                report.alternatives += sum(len(v) for v in expanded.alternatives.values())
                report.sense_resolved += sum(sense_of(n) is not None for n in expanded.base.nodes)
                report.node_only += not expanded.base.dependencies
        structure.metadata["counts"] = {
            "documents": report.documents,
            "sentences": report.sentences,
            "dependencies": report.dependencies,
            "extra_dependencies": report.extra_dependencies,
        }
        for e in report.errors:
            log.error(e)
        return structure, report

    # ------------------------------------------------------------- questions
    def light(self, question: str) -> LightStructure:
        return strip(parse_question(question, self.lexicon, self.question_rules), self.drops)

    def ask(self, question: str, structure: InfoStructure, weights=None) -> list[Answer]:
        return match(self.light(question), structure, weights or self.config.weights, self.config.partial_threshold)


def _doc_ids(paths: Iterable[str | Path]) -> list[tuple[str, Path]]:
    paths = [Path(p) for p in paths]
    names = [p.name for p in paths]
    out = []
    for p, name in zip(paths, names):
        out.append((name if names.count(name) == 1 else str(p), p))
    return out


def _process_doc(pipeline: Pipeline, doc_id: str, path: Path) -> tuple[list[ExpandedGraph], str | None]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return [], f"{path}: cannot read corpus file ({exc})"
    return pipeline.process_text(text, doc_id), None


_WORKER: Pipeline | None = None


def _init_worker(config: Config) -> None:
    global _WORKER
    _WORKER = Pipeline(config)


def _worker_doc(doc_id: str, path: str):
    return _process_doc(_WORKER, doc_id, Path(path))
