"""Sense selection by conditional rules compiled from dictionary data.

Rules come from three sources, ranked by specificity:

* lexico-syntactic (3): a dependency of a parsed dictionary example,
  with the co-argument fixed to its lemma;
* semantico-syntactic (2): the same dependency with the co-argument
  generalized to one of its semantic traits;
* subcat (1): the sense's argument frame (presence or absence of an
  object, a required preposition, an object trait).

The selected sense is written onto the node as an ``sn=k`` trait together
with that sense's class tags.
"""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .lexicon import POS, Lexicon
from .parser import Dependency, GrammarRule, Node, SentenceGraph, dep_label, parse_text
from .sensedict import SenseDictionary, SenseEntry

__all__ = [
    "WsdRule",
    "WsdRuleSet",
    "compile_rules",
    "apply_rules",
    "sense_of",
    "dump_rules",
    "SPECIFICITY",
]

log = logging.getLogger(__name__)

SPECIFICITY = {"lexico_syntactic": 3, "semantico_syntactic": 2, "subcat": 1}


@dataclass(frozen=True)
class WsdRule:
    target_lemma: str
    target_pos: POS
    dep_name: str
    tags: frozenset | None  # None matches any tag set
    target_slot: str  # "head" or "dependent"
    constraint: tuple | None  # ("lemma", x), ("trait", t), ("prep", p) or None
    result_sense: int
    kind: str
    mediator: str | None = None
    absent: bool = False

    @property
    def specificity(self) -> int:
        return SPECIFICITY[self.kind]

    def describe(self) -> str:
        """Render like ``remporter : VARG[DIR](remporter, MIL) ⇒ remporter 03``."""
        kind, value = self.constraint or (None, None)
        co = value if kind in ("lemma", "trait") else "*"
        mediator = self.mediator or (value if kind == "prep" else None)
        args = [self.target_lemma, co] if self.target_slot == "head" else [co, self.target_lemma]
        if mediator:
            args.insert(1, mediator)
        neg = "no " if self.absent else ""
        label = dep_label(self.dep_name, self.tags or ())
        return f"{self.target_lemma} : {neg}{label}({', '.join(args)}) ⇒ {self.target_lemma} {self.result_sense:02d}"


@dataclass
class WsdRuleSet:
    rules: dict[tuple[str, POS], list[WsdRule]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def for_word(self, lemma: str, pos: POS) -> list[WsdRule]:
        return self.rules.get((lemma, pos), [])

    def all_rules(self) -> list[WsdRule]:
        return [r for rules in self.rules.values() for r in rules]

    def __len__(self) -> int:
        return sum(len(v) for v in self.rules.values())


def _subcat_rule(sense: SenseEntry) -> WsdRule | None:
    frame = sense.subcat
    if frame is None:
        return None
    base = dict(target_lemma=sense.lemma, target_pos=sense.pos, target_slot="head",
                result_sense=sense.sense_no, kind="subcat")
    if frame.kind == "I":
        return WsdRule(dep_name="VARG", tags=None, constraint=None, absent=True, **base)
    if frame.kind == "T":
        constraint = ("trait", frame.object_trait) if frame.object_trait else None
        return WsdRule(dep_name="VARG", tags=frozenset({"DIR"}), constraint=constraint, **base)
    return WsdRule(dep_name="VARG", tags=frozenset({"INDIR"}),
                   constraint=("prep", frame.preposition), **base)


def _example_rules(sense: SenseEntry, graph: SentenceGraph) -> list[WsdRule]:
    out: list[WsdRule] = []
    for dep in graph.dependencies:
        if dep.dependent is None:
            continue
        head, dependent = graph.nodes[dep.head], graph.nodes[dep.dependent]
        for slot, target, co in (("head", head, dependent), ("dependent", dependent, head)):
            if target.lemma != sense.lemma or target.pos != sense.pos:
                continue
            mediator = graph.nodes[dep.mediator].lemma if dep.mediator is not None else None
            common = dict(target_lemma=sense.lemma, target_pos=sense.pos, dep_name=dep.name,
                          tags=dep.tags, target_slot=slot, result_sense=sense.sense_no,
                          mediator=mediator)
            out.append(WsdRule(constraint=("lemma", co.lemma), kind="lexico_syntactic", **common))
            for trait in sorted(co.traits):
                out.append(WsdRule(constraint=("trait", trait), kind="semantico_syntactic", **common))
    return out


def compile_rules(
    dictionary: SenseDictionary,
    lexicon: Lexicon,
    grammar: Iterable[GrammarRule],
) -> WsdRuleSet:
    """Parse every dictionary example and read every subcat frame into rules.

    Examples yielding no dependency on the headword are skipped and
    recorded in ``warnings``.
    """
    grammar = list(grammar)
    ruleset = WsdRuleSet()
    for sense in sorted(dictionary.all_senses(), key=lambda s: (s.lemma, s.pos.value, s.sense_no)):
        produced: list[WsdRule] = []
        for example in sense.examples:
            found: list[WsdRule] = []
            for graph in parse_text(example, lexicon, grammar, doc_id="dict"):
                found.extend(_example_rules(sense, graph))
            if not found:
                msg = f"{sense.lemma} {sense.sense_no:02d}: no dependency on the headword in example {example!r}"
                log.warning(msg)
                ruleset.warnings.append(msg)
            produced.extend(found)
        sub = _subcat_rule(sense)
        if sub is not None:
            produced.append(sub)
        bucket = ruleset.rules.setdefault((sense.lemma, sense.pos), [])
        for rule in produced:
            if rule not in bucket:
                bucket.append(rule)
    ruleset.rules = {k: v for k, v in ruleset.rules.items() if v}
    return ruleset


def _co_ok(rule: WsdRule, dep: Dependency, node: Node, nodes: list[Node], traits: list[frozenset]) -> bool:
    if dep.name != rule.dep_name or dep.dependent is None:
        return False
    if rule.tags is not None and dep.tags != rule.tags:
        return False
    if rule.target_slot == "head":
        if dep.head != node.node_id:
            return False
        co = dep.dependent
    else:
        if dep.dependent != node.node_id:
            return False
        co = dep.head
    mediator = nodes[dep.mediator].lemma if dep.mediator is not None else None
    if rule.mediator is not None and mediator != rule.mediator:
        return False
    if rule.constraint is None:
        return True
    kind, value = rule.constraint
    if kind == "lemma":
        return nodes[co].lemma == value
    if kind == "trait":
        return value in traits[co]
    return mediator == value


def rule_matches(rule: WsdRule, node: Node, graph: SentenceGraph, traits=None) -> bool:
    if traits is None:
        traits = [frozenset(n.traits) for n in graph.nodes]
    hit = any(_co_ok(rule, d, node, graph.nodes, traits) for d in graph.dependencies)
    return hit != rule.absent


def apply_rules(
    graph: SentenceGraph,
    rules: WsdRuleSet,
    dictionary: SenseDictionary,
    trace: list | None = None,
) -> SentenceGraph:
    """Return a copy of ``graph`` with ``sn=k`` and class-tag traits written on resolved nodes.

    Rule conditions are evaluated against the traits the graph had on
    entry, so the result does not depend on node order.
    """
    out = copy.deepcopy(graph)
    snapshot = [frozenset(n.traits) for n in graph.nodes]
    decisions: list[tuple[Node, SenseEntry, WsdRule | None]] = []
    for node in out.nodes:
        senses = dictionary.senses_of(node.lemma, node.pos) if node.pos != POS.Punct else []
        if not senses:
            continue
        if len(senses) == 1:
            decisions.append((node, senses[0], None))
            continue
        matching = [r for r in rules.for_word(node.lemma, node.pos) if rule_matches(r, node, out, snapshot)]
        if not matching:
            continue
        best = min(matching, key=lambda r: (-r.specificity, r.result_sense))
        sense = dictionary.sense(node.lemma, node.pos, best.result_sense)
        if sense is not None:
            decisions.append((node, sense, best))
    for node, sense, rule in decisions:
        node.traits.add(f"sn={sense.sense_no}")
        node.traits.update(sense.class_tags)
        if trace is not None:
            trace.append((node.node_id, sense.key, rule))
    return out


def sense_of(node: Node) -> int | None:
    for t in node.traits:
        if t.startswith("sn="):
            return int(t[3:])
    return None


def dump_rules(ruleset: WsdRuleSet, path: str | Path | None = None) -> str:
    """Serialize rules as ``lemma;pos;kind;dep;tags;slot;constraint;sense`` lines."""
    lines = []
    for (lemma, pos), rules in sorted(ruleset.rules.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        for r in rules:
            if r.absent:
                constraint = "absent"
            elif r.constraint is None:
                constraint = "*"
            else:
                constraint = f"{r.constraint[0]}={r.constraint[1]}"
            if r.mediator:
                constraint += f"+prep={r.mediator}"
            tags = "*" if r.tags is None else ",".join(sorted(r.tags))
            lines.append(";".join([lemma, pos.value, r.kind, r.dep_name, tags, r.target_slot,
                                   constraint, f"{r.result_sense:02d}"]))
    text = "\n".join(lines) + ("\n" if lines else "")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
