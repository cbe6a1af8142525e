"""Questions: light structures, matching against the index, ranking.

A question is parsed with the main and interrogative grammar sections,
without sense selection or expansion.  :func:`strip` then turns the parse
into a light structure: the FOCUS marking becomes a flag on a slot,
interrogative words keep only their traits, and functional dependencies
listed as ``drop`` directives disappear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .expansion import DERIVED, ORIGINAL, SYNONYM
from .index import Hit, InfoStructure, SentenceRecord
from .lexicon import POS, Lexicon
from .parser import DropPattern, GrammarRule, SentenceGraph, dep_label, parse_text

__all__ = [
    "INTERROGATIVES",
    "Slot",
    "LightDependency",
    "LightStructure",
    "Weights",
    "MatchStep",
    "Answer",
    "parse_question",
    "strip",
    "match",
    "extract_focus",
    "posting_weight",
]

INTERROGATIVES = frozenset({"qui", "que", "quoi", "quel", "lequel"})


@dataclass(frozen=True)
class Slot:
    """A light-structure argument: a lemma, or a trait set when ``lemma`` is None."""

    lemma: str | None
    traits: frozenset = frozenset()
    focus: bool = False
    surface: str = ""

    def render(self) -> str:
        body = self.lemma if self.lemma is not None else "[" + ",".join(sorted(self.traits)) + "]"
        return body + ("*" if self.focus else "")


@dataclass(frozen=True)
class LightDependency:
    name: str
    tags: frozenset
    head: Slot
    dependent: Slot
    mediator: str | None = None

    @property
    def label(self) -> str:
        return dep_label(self.name, self.tags)

    def render(self) -> str:
        args = [self.head.render()] + ([self.mediator] if self.mediator else []) + [self.dependent.render()]
        return f"{self.label}({', '.join(args)})"


@dataclass
class LightStructure:
    dependencies: list[LightDependency] = field(default_factory=list)
    focus_traits: frozenset = frozenset()

    @property
    def has_focus(self) -> bool:
        return any(d.head.focus or d.dependent.focus for d in self.dependencies)

    def render(self) -> list[str]:
        return [d.render() for d in self.dependencies]


@dataclass(frozen=True)
class Weights:
    original: float = 1.0
    synonym: float = 0.7
    derived: float = 0.5

    def __post_init__(self):
        for name in ("original", "synonym", "derived"):
            if not getattr(self, name) > 0:
                raise ValueError(f"weight {name} must be positive")
        if self.synonym > self.original or self.derived > self.original:
            raise ValueError("synonym and derived weights may not exceed the original weight")

    def scaled(self, factor: float) -> Weights:
        return Weights(self.original * factor, self.synonym * factor, self.derived * factor)

    def of(self, kind: str) -> float:
        return {ORIGINAL: self.original, SYNONYM: self.synonym, DERIVED: self.derived}[kind]


def posting_weight(provenance: Iterable[str], weights: Weights) -> float:
    """Product of the non-original weights, relative to the original weight.

    An all-original match weighs exactly 1, a derived rewrite with a
    synonym slot weighs ``derived * synonym`` under the default weights.
    """
    w = 1.0
    for kind in sorted(set(provenance) - {ORIGINAL}):
        w *= weights.of(kind) / weights.original
    return w


@dataclass(frozen=True)
class MatchStep:
    query: LightDependency
    matched: str | None  # rendering of the record dependency, None when unmatched
    provenance: frozenset
    weight: float
    binding: dict | None = None


@dataclass
class Answer:
    doc_id: str
    sentence_index: int
    text: str
    score: float
    focus_filler: tuple[str, int] | None
    match_trace: list[MatchStep]
    record: int = -1

    @property
    def matched(self) -> int:
        return sum(1 for s in self.match_trace if s.matched is not None)


# ------------------------------------------------------------------ question side

def parse_question(text: str, lexicon: Lexicon, rules: Sequence[GrammarRule]) -> SentenceGraph:
    """Morphological and syntactic analysis only; the result may carry a FOCUS dependency.

    Multi-sentence input is folded into its first sentence.
    """
    graphs = parse_text(text, lexicon, rules, doc_id="question")
    if not graphs:
        return SentenceGraph("question", 0, "", [])
    return graphs[0]


def _is_interrogative(node) -> bool:
    return node.pos == POS.Interrog or node.lemma in INTERROGATIVES


def strip(graph: SentenceGraph, drops: Iterable[DropPattern] = ()) -> LightStructure:
    drops = list(drops)
    focus_ids = {d.head for d in graph.dependencies if d.name == "FOCUS"}
    focus_traits: frozenset = frozenset()
    for i in sorted(focus_ids):
        focus_traits |= frozenset(t for t in graph.nodes[i].traits if not t.startswith("sn="))

    def slot(i: int) -> Slot:
        node = graph.nodes[i]
        traits = frozenset(node.traits)
        if _is_interrogative(node):
            return Slot(None, traits, i in focus_ids, node.surface)
        return Slot(node.lemma, traits, i in focus_ids, node.surface)

    out: list[LightDependency] = []
    for dep in graph.dependencies:
        if dep.name == "FOCUS" or dep.dependent is None:
            continue
        if any(p.matches(graph, dep) for p in drops):
            continue
        head, dependent = slot(dep.head), slot(dep.dependent)
        if head.lemma is None and dependent.lemma is None:
            continue  # nothing left to anchor a match
        mediator = graph.nodes[dep.mediator].lemma if dep.mediator is not None else None
        light = LightDependency(dep.name, dep.tags, head, dependent, mediator)
        if light not in out:
            out.append(light)
    return LightStructure(out, focus_traits if any(d.head.focus or d.dependent.focus for d in out) else frozenset())


# -------------------------------------------------------------------- matching

def _slot_hits(structure: InfoStructure, qd: LightDependency) -> list[Hit]:
    head = qd.head.lemma if qd.head.lemma is not None else None
    dependent = qd.dependent.lemma if qd.dependent.lemma is not None else None
    hits = structure.lookup_dependency(qd.label, head, dependent, qd.mediator)
    out = []
    for h in hits:
        rec = h.record
        if qd.head.lemma is None and not qd.head.traits <= rec.node(h.binding["head"]).traits:
            continue
        if qd.dependent.lemma is None and not qd.dependent.traits <= rec.node(h.binding["dependent"]).traits:
            continue
        out.append(h)
    return out


def extract_focus(record: SentenceRecord, steps: Sequence[MatchStep], light: LightStructure) -> tuple[str, int] | None:
    """The node bound to the focus slot, if it carries every expected trait."""
    for step in steps:
        if step.binding is None:
            continue
        for role in ("head", "dependent"):
            if getattr(step.query, role).focus:
                node = record.node(step.binding[role])
                if light.focus_traits <= node.traits:
                    return (node.lemma, node.node_id)
                return None
    return None


def match(
    light: LightStructure,
    structure: InfoStructure,
    weights: Weights | None = None,
    threshold: float = 0.5,
) -> list[Answer]:
    """Rank sentences by how much of ``light`` they match and with what provenance."""
    weights = weights or Weights()
    deps = light.dependencies
    if not deps:
        return []
    per_record: dict[int, dict[int, tuple[float, Hit]]] = {}
    for q, qd in enumerate(deps):
        for hit in _slot_hits(structure, qd):
            w = posting_weight(hit.provenance, weights)
            best = per_record.setdefault(hit.posting.record, {})
            if q not in best or w > best[q][0]:
                best[q] = (w, hit)
    answers = []
    for ref, best in per_record.items():
        if len(best) / len(deps) < threshold:
            continue
        rec = structure.records[ref]
        steps = []
        for q, qd in enumerate(deps):
            if q in best:
                w, hit = best[q]
                dep = rec.dependency(hit.posting.layer, hit.posting.dep_index)
                steps.append(MatchStep(qd, rec.render(dep), hit.provenance, w, hit.binding))
            else:
                steps.append(MatchStep(qd, None, frozenset(), 0.0))
        score = sum(w for w, _ in best.values()) / len(deps)
        filler = extract_focus(rec, steps, light) if light.has_focus else None
        answers.append(Answer(rec.doc_id, rec.sentence_index, rec.text, score, filler, steps, ref))
    answers.sort(key=lambda a: (-round(a.score, 12), a.record))
    return answers
