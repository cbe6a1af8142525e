"""Sense-faithful rephrasing: synonym redistribution, derivation, graph enrichment."""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .lexicon import POS, Lexicon
from .parser import Dependency, Node, SentenceGraph
from .sensedict import DerivationCode, SenseDictionary, Subcat
from .wsd import sense_of

__all__ = [
    "ORIGINAL",
    "SYNONYM",
    "DERIVED",
    "ExternalSynLexicon",
    "MergedSynonyms",
    "DerivationRecord",
    "DepSchema",
    "DerivationPattern",
    "ExtraDependency",
    "ExpandedGraph",
    "SynonymFileError",
    "PatternError",
    "load_synonyms",
    "redistribute_synonyms",
    "generate_derivation_candidates",
    "validate_derivations",
    "derive_all",
    "load_patterns",
    "parse_pattern",
    "expand_graph",
    "SUFFIXES",
    "ENDINGS",
]

ORIGINAL, SYNONYM, DERIVED = "Original", "Synonym", "Derived"


class SynonymFileError(ValueError):
    pass


class PatternError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


# ------------------------------------------------------------------ synonyms

@dataclass
class ExternalSynLexicon:
    name: str
    entries: dict[str, set[str]] = field(default_factory=dict)


@dataclass
class MergedSynonyms:
    table: dict[tuple[str, POS, int], set[str]] = field(default_factory=dict)
    skipped: list[tuple[str, str, str]] = field(default_factory=list)

    def get(self, lemma: str, pos: POS, sense_no: int) -> set[str]:
        return self.table.get((lemma, pos, sense_no), set())


def load_synonyms(path: str | Path, name: str | None = None) -> ExternalSynLexicon:
    path = Path(path)
    lex = ExternalSynLexicon(name or path.stem)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            lemma, tab, syns = line.partition("\t")
            lemma = lemma.strip()
            if not tab or not lemma:
                raise SynonymFileError(f"{path}:{lineno}: expected 'lemma<TAB>syn1,syn2'")
            found = {s.strip() for s in syns.split(",") if s.strip()}
            if lemma in found:
                raise SynonymFileError(f"{path}:{lineno}: {lemma!r} lists itself as a synonym")
            lex.entries.setdefault(lemma, set()).update(found)
    return lex


def redistribute_synonyms(dictionary: SenseDictionary, sources: Iterable[ExternalSynLexicon]) -> MergedSynonyms:
    """Attach flattened external synonyms to the senses whose class tags they share.

    A candidate's tags are the union over all of its own senses; it is
    added to every sense of the entry that has a tag in common.  The
    dictionary's own synonyms are kept unconditionally.
    """
    sources = list(sources)
    merged = MergedSynonyms()
    for (lemma, pos), senses in sorted(dictionary.entries.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        for sense in senses:
            own = {s for s in sense.synonyms if s != lemma}
            if own:
                merged.table.setdefault(sense.key, set()).update(own)
        for source in sources:
            for candidate in sorted(source.entries.get(lemma, ())):
                if candidate == lemma:
                    continue
                tags = dictionary.tags_of_lemma(candidate)
                if not tags:
                    merged.skipped.append((source.name, lemma, candidate))
                    continue
                for sense in senses:
                    if tags & sense.class_tags:
                        merged.table.setdefault(sense.key, set()).add(candidate)
    return merged


# --------------------------------------------------------------- derivation

# Suffixes a derived lexeme may end with.
SUFFIXES = (
    "eur", "euse", "trice", "ateur", "ation", "tion", "sion", "ion", "ment", "age",
    "ure", "ance", "ence", "ant", "ante", "ent", "ité", "isme", "iste", "ier", "ière",
    "able", "ible", "if", "ive", "al", "el", "elle", "eux", "ique", "er", "ir", "re",
    "ée", "e",
)
# Endings stripped from the source lemma before suffixing.
ENDINGS = ("er", "ir", "re", "oir", "e", "eur", "ion", "ment", "age", "ité", "ique", "if", "al", "el", "")
MAX_TRIM = 2  # further stem letters that may alternate (succéd- → succ-ess-)
MAX_LINK = 3  # letters allowed between stem and suffix
MIN_STEM = 3


def candidate_stems(lemma: str) -> set[str]:
    stems = set()
    for ending in ENDINGS:
        if ending and not lemma.endswith(ending):
            continue
        base = lemma[: len(lemma) - len(ending)]
        for trim in range(MAX_TRIM + 1):
            stem = base[: len(base) - trim]
            if len(stem) >= MIN_STEM:
                stems.add(stem)
    return stems


def generate_derivation_candidates(lemma: str, lexicon: Lexicon) -> list[tuple[str, POS]]:
    """Over-generate attested lexemes that look like derivatives of ``lemma``.

    Every stem obtained by stripping an ending (and up to two alternating
    letters) is extended by at most three linking letters and a suffix
    from the table; only lexemes attested in the lexicon are kept.
    """
    index = lexicon.lemma_index()
    ordered = sorted(index)
    found: set[tuple[str, POS]] = set()
    for stem in candidate_stems(lemma):
        i = bisect.bisect_left(ordered, stem)
        while i < len(ordered) and ordered[i].startswith(stem):
            cand = ordered[i]
            i += 1
            if cand == lemma:
                continue
            tail = cand[len(stem):]
            if any(tail.endswith(sfx) and len(tail) - len(sfx) <= MAX_LINK for sfx in SUFFIXES):
                found.update((cand, pos) for pos in index[cand])
    return sorted(found, key=lambda c: (c[0], c[1].value))


@dataclass(frozen=True)
class DerivationRecord:
    source: tuple  # (lemma, pos, sense_no)
    derived_lemma: str
    derived_pos: POS
    code: DerivationCode


def validate_derivations(
    candidates: Iterable[tuple[str, POS]],
    dictionary: SenseDictionary,
    lemma: str,
    pos: POS,
) -> list[DerivationRecord]:
    """Keep, for each sense of ``(lemma, pos)``, the candidates its derivation codes prescribe."""
    candidates = list(candidates)
    records = []
    for sense in dictionary.senses_of(lemma, pos):
        for code in sense.derivation_codes:
            for cand, cpos in candidates:
                if cpos != code.target_pos or not cand.endswith(code.ending):
                    continue
                if code.root_hint and not cand.startswith(code.root_hint):
                    continue
                records.append(DerivationRecord(sense.key, cand, cpos, code))
    return records


def derive_all(dictionary: SenseDictionary, lexicon: Lexicon) -> list[DerivationRecord]:
    records: list[DerivationRecord] = []
    for (lemma, pos), senses in sorted(dictionary.entries.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        if not any(s.derivation_codes for s in senses):
            continue
        cands = generate_derivation_candidates(lemma, lexicon)
        records.extend(validate_derivations(cands, dictionary, lemma, pos))
    return records


# ------------------------------------------------------------------ patterns

VARIABLES = ("$self", "$derived", "$subj", "$co")


@dataclass(frozen=True)
class DepSchema:
    name: str
    tags: frozenset
    head: str
    dependent: str
    mediator: str | None = None

    def __str__(self) -> str:
        label = f"{self.name}[{','.join(sorted(self.tags))}]" if self.tags else self.name
        args = [self.head, self.mediator, self.dependent] if self.mediator else [self.head, self.dependent]
        return f"{label}({', '.join(args)})"


@dataclass(frozen=True)
class DerivationPattern:
    source_pos: POS
    target_pos: POS
    match: DepSchema
    rewrite: tuple
    suffix: str | None = None
    line: int = 0


_SCHEMA_RE = re.compile(r"^([A-Z]+)(?:\[([A-Z,]*)\])?\(([^)]*)\)$")
_HEAD_RE = re.compile(r"^(\w+)>(\w+)(?:\[(-\w+)\])?$")


def _schema(text: str) -> DepSchema:
    m = _SCHEMA_RE.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse dependency schema {text.strip()!r}")
    tags = frozenset(t for t in (m.group(2) or "").split(",") if t)
    args = [a.strip() for a in m.group(3).split(",")]
    if len(args) == 2:
        if "INDIR" in tags:
            raise ValueError(f"{text.strip()}: INDIR needs a mediator")
        return DepSchema(m.group(1), tags, args[0], args[1])
    if len(args) == 3:
        if "INDIR" not in tags:
            raise ValueError(f"{text.strip()}: a mediator requires INDIR")
        return DepSchema(m.group(1), tags, args[0], args[2], args[1])
    raise ValueError(f"{text.strip()}: expected 2 or 3 arguments")


def _check_pattern(pattern: DerivationPattern) -> None:
    match = pattern.match
    for arg in (match.head, match.dependent):
        if arg.startswith("$") and arg not in ("$self", "$co"):
            raise ValueError(f"match may only bind $self and $co, found {arg}")
    if "$self" not in (match.head, match.dependent):
        raise ValueError("match must bind $self")
    if match.mediator and match.mediator.startswith("$"):
        raise ValueError(f"variable {match.mediator} used as a mediator constant")
    bound = {"$self", "$derived", "$subj"} | ({"$co"} if "$co" in (match.head, match.dependent) else set())
    for tpl in pattern.rewrite:
        for arg in (tpl.head, tpl.dependent):
            if not arg.startswith("$"):
                raise ValueError(f"template endpoint {arg!r} is not a variable")
            if arg not in VARIABLES:
                raise ValueError(f"unknown variable {arg}")
            if arg not in bound:
                raise ValueError(f"variable {arg} is not bound by the match")
        if tpl.mediator is not None and (tpl.mediator.startswith("$") or tpl.mediator == "*"):
            raise ValueError(f"template mediator must be a constant lemma, found {tpl.mediator}")
        if "$derived" not in (tpl.head, tpl.dependent):
            raise ValueError(f"template {tpl} does not mention $derived")


def parse_pattern(line: str, lineno: int = 0) -> DerivationPattern:
    head, colon, rest = line.partition(":")
    match_text, arrow, rewrite_text = rest.partition("=>")
    if not colon or not arrow:
        raise ValueError("expected 'SRC>TGT : MATCH => TEMPLATE ; TEMPLATE'")
    hm = _HEAD_RE.match(head.strip())
    if not hm:
        raise ValueError(f"bad category header {head.strip()!r}")
    pattern = DerivationPattern(
        source_pos=POS(hm.group(1)),
        target_pos=POS(hm.group(2)),
        match=_schema(match_text),
        rewrite=tuple(_schema(t) for t in rewrite_text.split(";") if t.strip()),
        suffix=hm.group(3),
        line=lineno,
    )
    if not pattern.rewrite:
        raise ValueError("pattern has no templates")
    _check_pattern(pattern)
    return pattern


def load_patterns(path: str | Path) -> list[DerivationPattern]:
    path = Path(path)
    patterns = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                patterns.append(parse_pattern(line, lineno))
            except ValueError as exc:
                raise PatternError(path, lineno, str(exc)) from None
    return patterns


# ---------------------------------------------------------------- expansion

@dataclass(frozen=True)
class ExtraDependency:
    dependency: Dependency
    provenance: frozenset
    origin: tuple  # ("derived", record, pattern, base_dep) or ("valency", base_dep, synonym)


@dataclass
class ExpandedGraph:
    base: SentenceGraph
    alternatives: dict[int, set[tuple[str, str]]] = field(default_factory=dict)
    extra_dependencies: list[ExtraDependency] = field(default_factory=list)
    virtual_nodes: list[Node] = field(default_factory=list)
    virtual_provenance: dict[int, str] = field(default_factory=dict)
    # (base dependency index, node id, synonym) combinations replaced by a valency rewrite
    blocked: set[tuple[int, int, str]] = field(default_factory=set)

    @property
    def nodes(self) -> list[Node]:
        return self.base.nodes + self.virtual_nodes

    def node(self, node_id: int) -> Node:
        return self.nodes[node_id]

    def render(self, dep: Dependency, alternatives: bool = True) -> str:
        parts = []
        for i in dep.endpoints():
            names = [self.node(i).surface]
            if alternatives and i != dep.mediator:
                names += sorted(lemma for lemma, _ in self.alternatives.get(i, ()))
            parts.append("/".join(names))
        return f"{dep.label}({', '.join(parts)})"


class _Builder:
    def __init__(self, graph: SentenceGraph, lexicon: Lexicon | None):
        self.expanded = ExpandedGraph(graph)
        self.lexicon = lexicon
        self._cache: dict[tuple, int] = {}

    def virtual(self, lemma: str, pos: POS, provenance: str, anchor: object) -> int:
        key = (lemma, pos, provenance, anchor)
        if key in self._cache:
            return self._cache[key]
        node_id = len(self.expanded.nodes)
        traits = set(self.lexicon.traits_of_lemma(lemma, pos)) if self.lexicon else set()
        self.expanded.virtual_nodes.append(Node(node_id, lemma, lemma, pos, frozenset(), traits))
        self.expanded.virtual_provenance[node_id] = provenance
        self._cache[key] = node_id
        return node_id

    def add(self, dep: Dependency, provenance: str, origin: tuple) -> None:
        extra = ExtraDependency(dep, frozenset({provenance}), origin)
        if all(e.dependency != dep or e.provenance != extra.provenance for e in self.expanded.extra_dependencies):
            self.expanded.extra_dependencies.append(extra)


def _synonym_frame(dictionary: SenseDictionary, synonym: str, source_tags: frozenset) -> Subcat | None:
    senses = dictionary.senses_of(synonym, POS.Verb)
    for s in senses:
        if s.class_tags & source_tags and s.subcat is not None:
            return s.subcat
    for s in senses:
        if s.subcat is not None:
            return s.subcat
    return None


def _unify(schema: DepSchema, dep: Dependency, self_id: int, nodes: list[Node]) -> dict | None:
    if dep.name != schema.name or dep.tags != schema.tags or dep.dependent is None:
        return None
    binding = {}
    for var, node_id in ((schema.head, dep.head), (schema.dependent, dep.dependent)):
        if var == "$self":
            if node_id != self_id:
                return None
        elif var.startswith("$"):
            binding[var] = node_id
        elif nodes[node_id].lemma != var:
            return None
    if schema.mediator not in (None, "*"):
        if dep.mediator is None or nodes[dep.mediator].lemma != schema.mediator:
            return None
    binding["$self"] = self_id
    return binding


def expand_graph(
    graph: SentenceGraph,
    syn: MergedSynonyms,
    derivs: Sequence[DerivationRecord],
    patterns: Sequence[DerivationPattern],
    dictionary: SenseDictionary | None = None,
    lexicon: Lexicon | None = None,
) -> ExpandedGraph:
    """Add synonym alternatives and derivation rewrites to a disambiguated graph.

    Only nodes carrying an ``sn=k`` trait are expanded.  The base graph is
    not modified.
    """
    b = _Builder(graph, lexicon)
    out = b.expanded
    nodes = graph.nodes
    for node in nodes:
        k = sense_of(node)
        if k is None:
            continue
        alts = {(s, SYNONYM) for s in syn.get(node.lemma, node.pos, k) if s != node.lemma}
        if alts:
            out.alternatives[node.node_id] = alts

        # valency change of verb synonyms
        if dictionary is not None and node.pos == POS.Verb and alts:
            sense = dictionary.sense(node.lemma, node.pos, k)
            source_tags = sense.class_tags if sense else frozenset()
            for j, dep in enumerate(graph.dependencies):
                if dep.name != "VARG" or dep.head != node.node_id or dep.dependent is None:
                    continue
                current = nodes[dep.mediator].lemma if dep.mediator is not None else None
                for synonym, _ in sorted(alts):
                    frame = _synonym_frame(dictionary, synonym, source_tags)
                    if frame is None:
                        continue
                    if frame.kind == "T" and current is not None:
                        head = b.virtual(synonym, POS.Verb, SYNONYM, node.node_id)
                        b.add(Dependency("VARG", frozenset({"DIR"}), head, dep.dependent),
                              SYNONYM, ("valency", j, synonym))
                    elif frame.kind == "Ti" and frame.preposition != current:
                        head = b.virtual(synonym, POS.Verb, SYNONYM, node.node_id)
                        prep = b.virtual(frame.preposition, POS.Prep, SYNONYM, ("prep", node.node_id))
                        b.add(Dependency("VARG", frozenset({"INDIR"}), head, dep.dependent, prep),
                              SYNONYM, ("valency", j, synonym))
                    elif frame.kind == "I":
                        pass
                    else:
                        continue
                    out.blocked.add((j, node.node_id, synonym))

        # derivation rewrites
        for r_idx, record in enumerate(derivs):
            if record.source != (node.lemma, node.pos, k):
                continue
            for p_idx, pattern in enumerate(patterns):
                if pattern.source_pos != node.pos or pattern.target_pos != record.derived_pos:
                    continue
                if pattern.suffix is not None and pattern.suffix != record.code.suffix:
                    continue
                for j, dep in enumerate(graph.dependencies):
                    binding = _unify(pattern.match, dep, node.node_id, nodes)
                    if binding is None:
                        continue
                    subjects = [d.dependent for d in graph.dependencies
                                if d.name == "SUBJ" and d.head == node.node_id and d.dependent is not None]
                    if subjects:
                        binding["$subj"] = subjects[0]
                    binding["$derived"] = b.virtual(record.derived_lemma, record.derived_pos, DERIVED, node.node_id)
                    for tpl in pattern.rewrite:
                        if tpl.head not in binding or tpl.dependent not in binding:
                            continue  # e.g. no subject in this sentence
                        mediator = None
                        if tpl.mediator is not None:
                            mediator = b.virtual(tpl.mediator, POS.Prep, DERIVED, ("prep", node.node_id))
                        new = Dependency(tpl.name, tpl.tags, binding[tpl.head], binding[tpl.dependent], mediator)
                        b.add(new, DERIVED, ("derived", r_idx, p_idx, j))
    return out
