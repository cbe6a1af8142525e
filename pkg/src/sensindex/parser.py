"""Incremental rule grammar: POS disambiguation then dependency extraction.

Grammar files hold one rule per line::

    STAGE PRIORITY : SLOT SLOT ... => ACTION ; ACTION

``STAGE`` is ``pos_disamb`` or ``dependency``.  A slot is written
``[key=v1,v2|key=v]`` with keys ``lemma``, ``form``, ``pos``, ``trait`` and
``feat``; a leading ``!`` negates a constraint and ``[]`` matches any token.
Actions are ``pick(i,k)`` (``k`` an analysis index or a POS name) and
``dep NAME[TAGS](i,j)``, ``dep NAME[INDIR](i,m,j)`` or the unary marking
form ``dep FOCUS(i)``.  Slot indices are 0-based.

``@section NAME`` switches the section of subsequent rules (``main`` by
default), and ``drop NAME(HEAD,DEP)`` lines list functional dependencies
to be removed from question structures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .lexicon import POS, AnalyzedToken, Lexicon, analyze_sentence, normalize, tokenize

__all__ = [
    "Node",
    "Dependency",
    "SentenceGraph",
    "SlotConstraint",
    "PickAction",
    "DepAction",
    "GrammarRule",
    "DropPattern",
    "Grammar",
    "GrammarError",
    "DEP_NAMES",
    "DEP_TAGS",
    "read_grammar",
    "load_grammar",
    "disambiguate_pos",
    "parse",
    "parse_text",
]

DEP_NAMES = frozenset({"SUBJ", "VARG", "VMOD", "NMOD", "NN", "FOCUS"})
DEP_TAGS = frozenset({"DIR", "INDIR", "ADJ"})
STAGES = ("pos_disamb", "dependency")


class GrammarError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


@dataclass
class Node:
    node_id: int
    surface: str
    lemma: str
    pos: POS
    features: frozenset = frozenset()
    traits: set = field(default_factory=set)

    def render(self, with_traits: bool = False) -> str:
        if with_traits and self.traits:
            return f"{self.surface}[{','.join(sorted(self.traits))}]"
        return self.surface


def dep_label(name: str, tags: Iterable[str]) -> str:
    tags = sorted(tags)
    return f"{name}[{','.join(tags)}]" if tags else name


@dataclass(frozen=True)
class Dependency:
    """A named relation between node ids.

    ``dependent`` is ``None`` only for unary marking relations (FOCUS).
    """

    name: str
    tags: frozenset
    head: int
    dependent: int | None = None
    mediator: int | None = None

    def __post_init__(self):
        if ("INDIR" in self.tags) != (self.mediator is not None):
            raise ValueError(f"{self.label}: mediator must be present iff INDIR is tagged")
        if self.head == self.dependent:
            raise ValueError(f"{self.label}: head and dependent must differ")

    @property
    def label(self) -> str:
        return dep_label(self.name, self.tags)

    def endpoints(self) -> tuple[int, ...]:
        return tuple(i for i in (self.head, self.mediator, self.dependent) if i is not None)


@dataclass
class SentenceGraph:
    doc_id: str
    sentence_index: int
    text: str
    nodes: list[Node]
    dependencies: list[Dependency] = field(default_factory=list)

    def node(self, node_id: int) -> Node:
        return self.nodes[node_id]

    def render(self, dep: Dependency, with_traits: bool = False) -> str:
        parts = [self.nodes[i].render(with_traits) for i in dep.endpoints()]
        return f"{dep.label}({', '.join(parts)})"

    def rendered(self, with_traits: bool = False) -> list[str]:
        return [self.render(d, with_traits) for d in self.dependencies]


# --------------------------------------------------------------------- rules

_SLOT_KEYS = ("lemma", "form", "pos", "trait", "feat")


@dataclass(frozen=True)
class SlotConstraint:
    """Constraints on one token; each entry is ``(key, values, negated)``."""

    constraints: tuple = ()

    def accepts(self, lemma: str, surface: str, pos: POS, feats, traits) -> bool:
        for key, values, negated in self.constraints:
            if key == "lemma":
                ok = lemma in values
            elif key == "form":
                ok = surface.lower() in values
            elif key == "pos":
                ok = pos.value in values
            elif key == "trait":
                ok = values <= traits
            else:
                ok = values <= feats
            if ok == negated:
                return False
        return True

    def accepts_node(self, node: Node) -> bool:
        return self.accepts(node.lemma, node.surface, node.pos, node.features, node.traits)

    def render(self) -> str:
        parts = [
            f"{'!' if neg else ''}{key}={','.join(sorted(values))}"
            for key, values, neg in self.constraints
        ]
        return "[" + "|".join(parts) + "]"


@dataclass(frozen=True)
class PickAction:
    slot: int
    choice: int | POS


@dataclass(frozen=True)
class DepAction:
    name: str
    tags: frozenset
    head: int
    dependent: int | None = None
    mediator: int | None = None

    def slots(self) -> tuple[int, ...]:
        return tuple(i for i in (self.head, self.mediator, self.dependent) if i is not None)


@dataclass(frozen=True)
class GrammarRule:
    stage: str
    priority: int
    pattern: tuple
    actions: tuple
    order: int = 0
    section: str = "main"
    line: int = 0

    def __post_init__(self):
        if not self.pattern:
            raise ValueError("pattern must have at least one slot")
        for action in self.actions:
            refs = (action.slot,) if isinstance(action, PickAction) else action.slots()
            for ref in refs:
                if not 0 <= ref < len(self.pattern):
                    raise ValueError(f"slot {ref} out of range for a {len(self.pattern)}-slot pattern")


@dataclass(frozen=True)
class DropPattern:
    """A functional dependency shape removed from question structures."""

    name: str  # "*" matches any name
    tags: frozenset | None
    head: SlotConstraint | None
    dependent: SlotConstraint | None

    def matches(self, graph: SentenceGraph, dep: Dependency) -> bool:
        if self.name != "*" and dep.name != self.name:
            return False
        if self.tags is not None and dep.tags != self.tags:
            return False
        if self.head is not None and not self.head.accepts_node(graph.nodes[dep.head]):
            return False
        if self.dependent is not None:
            if dep.dependent is None or not self.dependent.accepts_node(graph.nodes[dep.dependent]):
                return False
        return True


@dataclass
class Grammar:
    rules: list[GrammarRule] = field(default_factory=list)
    drops: list[DropPattern] = field(default_factory=list)

    def section(self, *names: str) -> list[GrammarRule]:
        return [r for r in self.rules if r.section in names]


_SLOT_RE = re.compile(r"\[([^\]]*)\]")
_DEP_RE = re.compile(r"^dep\s+([A-Z]+)(?:\[([A-Z,]*)\])?\(([^)]*)\)$")
_PICK_RE = re.compile(r"^pick\((\d+)\s*,\s*(\w+)\)$")
_DROP_RE = re.compile(r"^drop\s+(\*|[A-Z]+)(?:\[([A-Z,]*)\])?\((.*)\)$")


def _parse_slot(body: str) -> SlotConstraint:
    constraints = []
    for part in filter(None, (p.strip() for p in body.split("|"))):
        negated = part.startswith("!")
        key, sep, raw = part.lstrip("!").partition("=")
        key = key.strip()
        if not sep or key not in _SLOT_KEYS:
            raise ValueError(f"bad slot constraint {part!r}")
        values = frozenset(v.strip() for v in raw.split(",") if v.strip())
        if not values:
            raise ValueError(f"empty value list in {part!r}")
        if key == "pos":
            for v in values:
                POS(v)
        if key == "form":
            values = frozenset(v.lower() for v in values)
        constraints.append((key, values, negated))
    return SlotConstraint(tuple(constraints))


def _parse_tags(raw: str | None) -> frozenset:
    tags = frozenset(t for t in (raw or "").split(",") if t)
    bad = tags - DEP_TAGS
    if bad:
        raise ValueError(f"unknown dependency tag {sorted(bad)[0]!r}")
    return tags


def _parse_action(text: str):
    text = text.strip()
    m = _PICK_RE.match(text)
    if m:
        raw = m.group(2)
        return PickAction(int(m.group(1)), int(raw) if raw.isdigit() else POS(raw))
    m = _DEP_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse action {text!r}")
    name, tags = m.group(1), _parse_tags(m.group(2))
    if name not in DEP_NAMES:
        raise ValueError(f"unknown dependency name {name!r}")
    args = [int(a) for a in m.group(3).split(",") if a.strip()]
    if len(args) == 1:
        return DepAction(name, tags, args[0])
    if len(args) == 2:
        if "INDIR" in tags:
            raise ValueError("INDIR dependencies need a mediator slot")
        return DepAction(name, tags, args[0], args[1])
    if len(args) == 3:
        if "INDIR" not in tags:
            raise ValueError("a mediator slot requires the INDIR tag")
        return DepAction(name, tags, args[0], args[2], args[1])
    raise ValueError(f"wrong number of slots in {text!r}")


def _parse_drop(line: str) -> DropPattern:
    m = _DROP_RE.match(line)
    if not m:
        raise ValueError(f"cannot parse drop directive {line!r}")
    name = m.group(1)
    tags = _parse_tags(m.group(2)) if m.group(2) is not None else None
    args = [a.strip() for a in re.split(r",(?![^\[]*\])", m.group(3))]
    if len(args) != 2:
        raise ValueError("drop directives take exactly two slots")

    def slot(arg):
        if arg == "*":
            return None
        sm = _SLOT_RE.fullmatch(arg)
        if not sm:
            raise ValueError(f"bad drop slot {arg!r}")
        return _parse_slot(sm.group(1))

    return DropPattern(name, tags, slot(args[0]), slot(args[1]))


def read_grammar(path: str | Path) -> Grammar:
    path = Path(path)
    grammar = Grammar()
    section = "main"
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                if line.startswith("@section"):
                    section = line.split(None, 1)[1].strip()
                    continue
                if line.startswith("drop"):
                    grammar.drops.append(_parse_drop(line))
                    continue
                head, arrow, action_text = line.partition("=>")
                if not arrow:
                    raise ValueError("missing '=>'")
                stage_prio, colon, slots_text = head.partition(":")
                if not colon:
                    raise ValueError("missing ':' after stage and priority")
                stage, priority = stage_prio.split()
                if stage not in STAGES:
                    raise ValueError(f"unknown stage {stage!r}")
                leftover = _SLOT_RE.sub("", slots_text).strip()
                if leftover:
                    raise ValueError(f"unexpected text in pattern: {leftover!r}")
                pattern = tuple(_parse_slot(b) for b in _SLOT_RE.findall(slots_text))
                actions = tuple(_parse_action(a) for a in action_text.split(";"))
                wanted = PickAction if stage == "pos_disamb" else DepAction
                if not all(isinstance(a, wanted) for a in actions):
                    raise ValueError(f"stage {stage} only accepts {wanted.__name__} actions")
                rule = GrammarRule(
                    stage, int(priority), pattern, actions,
                    order=len(grammar.rules), section=section, line=lineno,
                )
            except ValueError as exc:
                raise GrammarError(path, lineno, str(exc)) from None
            grammar.rules.append(rule)
    return grammar


def load_grammar(path: str | Path) -> list[GrammarRule]:
    return read_grammar(path).rules


def _ordered(rules: Iterable[GrammarRule], stage: str) -> list[GrammarRule]:
    return sorted((r for r in rules if r.stage == stage), key=lambda r: (-r.priority, r.order))


# ------------------------------------------------------------------- engines

def disambiguate_pos(sentence: Sequence[AnalyzedToken], grammar: Iterable[GrammarRule]) -> list[Node]:
    """Choose one analysis per token; first matching rule wins, default is the first reading."""
    chosen: list[int | None] = [None] * len(sentence)

    def candidates(i):
        analyses = sentence[i].analyses
        return [analyses[chosen[i]]] if chosen[i] is not None else analyses

    for rule in _ordered(grammar, "pos_disamb"):
        width = len(rule.pattern)
        for anchor in range(len(sentence) - width + 1):
            if not all(
                any(
                    slot.accepts(a.lemma, sentence[anchor + k].token.surface, a.pos,
                                 a.morph_features, a.semantic_traits)
                    for a in candidates(anchor + k)
                )
                for k, slot in enumerate(rule.pattern)
            ):
                continue
            for action in rule.actions:
                i = anchor + action.slot
                if chosen[i] is not None:
                    continue
                analyses = sentence[i].analyses
                if isinstance(action.choice, int):
                    if action.choice < len(analyses):
                        chosen[i] = action.choice
                else:
                    for k, a in enumerate(analyses):
                        if a.pos == action.choice:
                            chosen[i] = k
                            break

    nodes = []
    for i, at in enumerate(sentence):
        a = at.analyses[chosen[i] or 0]
        nodes.append(Node(i, at.token.surface, a.lemma, a.pos, a.morph_features, set(a.semantic_traits)))
    return nodes


def parse(
    nodes: Sequence[Node],
    grammar: Iterable[GrammarRule],
    doc_id: str = "",
    sentence_index: int = 0,
    text: str = "",
) -> SentenceGraph:
    """Apply dependency rules by priority; never fails.

    A rule fires at every non-overlapping anchor, left to right.  A
    dependent keeps the first governor it receives for a relation name, so
    higher-priority rules and leftmost anchors win conflicts; a unary
    marking relation is emitted at most once per sentence.
    """
    deps: list[Dependency] = []
    seen: set[Dependency] = set()
    governed: set[tuple] = set()
    for rule in _ordered(grammar, "dependency"):
        width = len(rule.pattern)
        next_free = 0
        for anchor in range(len(nodes) - width + 1):
            if anchor < next_free:
                continue
            if not all(slot.accepts_node(nodes[anchor + k]) for k, slot in enumerate(rule.pattern)):
                continue
            next_free = anchor + width
            for action in rule.actions:
                head = anchor + action.head
                dependent = None if action.dependent is None else anchor + action.dependent
                mediator = None if action.mediator is None else anchor + action.mediator
                if head == dependent:
                    continue
                key = (action.name, dependent if dependent is not None else "unary")
                dep = Dependency(action.name, action.tags, head, dependent, mediator)
                if dep in seen or key in governed:
                    continue
                seen.add(dep)
                governed.add(key)
                deps.append(dep)
    return SentenceGraph(doc_id, sentence_index, text, list(nodes), deps)


def parse_text(
    text: str,
    lexicon: Lexicon,
    grammar: Iterable[GrammarRule],
    doc_id: str = "",
    first_index: int = 0,
) -> list[SentenceGraph]:
    """Normalize, tokenize, analyze, disambiguate and parse every sentence."""
    grammar = list(grammar)
    norm = normalize(text)
    graphs = []
    for k, tokens in enumerate(tokenize(norm, lexicon)):
        start = tokens[0].char_offset
        end = tokens[-1].char_offset + len(tokens[-1].surface)
        nodes = disambiguate_pos(analyze_sentence(tokens, lexicon), grammar)
        graphs.append(parse(nodes, grammar, doc_id, first_index + k, norm[start:end]))
    return graphs
