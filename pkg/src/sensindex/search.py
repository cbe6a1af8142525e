"""Multi-level corpus search over an information structure.

Expressions are conjunctions joined by ``&``::

    lemma=X            a node with lemma X (an inflected corpus form also works)
    trait=T            a node carrying trait T
    dep=NAME[TAGS](a,b)   a dependency; ``a``/``b`` are lemmas, ``[T]`` traits or ``*``
    sense=lemma@k      a node of ``lemma`` resolved to sense k
    cooc(X,Y)          both lemmas in the same sentence

Only the original layer is searched unless ``expanded`` is set, in which
case synonym alternatives and derived rewrites count too.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .expansion import ORIGINAL
from .index import InfoStructure, SentenceRecord, Trait
from .parser import DEP_NAMES, dep_label

__all__ = ["Constraint", "SearchSyntaxError", "parse_expression", "search", "scan"]


class SearchSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Constraint:
    kind: str  # lemma, trait, dep, sense, cooc
    args: tuple


_DEP_RE = re.compile(r"^([A-Z]+)(?:\[([A-Z,]*)\])?\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)$")
_COOC_RE = re.compile(r"^cooc\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)$")
_SENSE_RE = re.compile(r"^(.+)@(\d+)$")


def _arg(text: str):
    if text == "*":
        return None
    if text.startswith("[") and text.endswith("]") and len(text) > 2:
        return Trait(text[1:-1])
    return text


def parse_expression(expr: str) -> list[Constraint]:
    parts = [p.strip() for p in expr.split("&")]
    if not expr.strip() or not all(parts):
        raise SearchSyntaxError("empty constraint")
    out = []
    for part in parts:
        m = _COOC_RE.match(part)
        if m:
            out.append(Constraint("cooc", (m.group(1), m.group(2))))
            continue
        key, eq, value = part.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not value:
            raise SearchSyntaxError(f"cannot read constraint {part!r}")
        if key in ("lemma", "trait"):
            out.append(Constraint(key, (value,)))
        elif key == "sense":
            sm = _SENSE_RE.match(value)
            if not sm:
                raise SearchSyntaxError(f"sense constraint must look like lemma@k: {value!r}")
            out.append(Constraint("sense", (sm.group(1), int(sm.group(2)))))
        elif key == "dep":
            dm = _DEP_RE.match(value)
            if not dm or dm.group(1) not in DEP_NAMES:
                raise SearchSyntaxError(f"bad dependency pattern {value!r}")
            tags = frozenset(t for t in (dm.group(2) or "").split(",") if t)
            out.append(Constraint("dep", (dep_label(dm.group(1), tags), _arg(dm.group(3)), _arg(dm.group(4)))))
        else:
            raise SearchSyntaxError(f"unknown constraint {key!r}")
    return out


def _lemma_records(structure: InfoStructure, word: str, expanded: bool) -> set[int]:
    refs = set()
    for lemma in structure.lemma_options(word):
        for p in structure.lemma_postings.get(lemma, ()):
            if expanded or p.provenance == ORIGINAL:
                refs.add(p.record)
    return refs


def _records_for(structure: InfoStructure, c: Constraint, expanded: bool) -> set[int]:
    if c.kind == "lemma":
        return _lemma_records(structure, c.args[0], expanded)
    if c.kind == "cooc":
        return _lemma_records(structure, c.args[0], expanded) & _lemma_records(structure, c.args[1], expanded)
    if c.kind == "trait":
        return {i for i, rec in enumerate(structure.records)
                if any(c.args[0] in n.traits for n in (rec.all_nodes() if expanded else rec.nodes))}
    if c.kind == "sense":
        lemma, k = c.args
        return {p.record for p in structure.lemma_postings.get(lemma, ())
                if p.provenance == ORIGINAL and f"sn={k}" in structure.records[p.record].node(p.node_id).traits}
    label, head, dependent = c.args
    return {h.posting.record for h in structure.lookup_dependency(label, head, dependent)
            if expanded or h.provenance == frozenset({ORIGINAL})}


def search(structure: InfoStructure, expr: str, expanded: bool = False) -> list[SentenceRecord]:
    """Records satisfying every constraint, in index order."""
    refs: set[int] | None = None
    for c in parse_expression(expr):
        found = _records_for(structure, c, expanded)
        refs = found if refs is None else refs & found
        if not refs:
            break
    return [structure.records[i] for i in sorted(refs or ())]


# ------------------------------------------------------------ reference scan

def _scan_one(structure: InfoStructure, rec: SentenceRecord, c: Constraint) -> bool:
    """Original-layer test of one constraint straight from the record."""

    def _fits(arg, node) -> bool:
        if arg is None:
            return True
        if isinstance(arg, Trait):
            return arg.name in node.traits
        return node.lemma in structure.lemma_options(arg)

    if c.kind == "lemma":
        return any(_fits(c.args[0], n) for n in rec.nodes)
    if c.kind == "cooc":
        return all(any(_fits(a, n) for n in rec.nodes) for a in c.args)
    if c.kind == "trait":
        return any(c.args[0] in n.traits for n in rec.nodes)
    if c.kind == "sense":
        lemma, k = c.args
        return any(n.lemma == lemma and f"sn={k}" in n.traits for n in rec.nodes)
    label, head, dependent = c.args
    return any(
        d.label == label and d.dependent is not None
        and _fits(head, rec.nodes[d.head]) and _fits(dependent, rec.nodes[d.dependent])
        for d in rec.base_dependencies
    )


def scan(structure: InfoStructure, expr: str) -> list[SentenceRecord]:
    """Brute-force original-layer search, one record at a time."""
    cs = parse_expression(expr)
    return [rec for rec in structure.records if all(_scan_one(structure, rec, c) for c in cs)]
