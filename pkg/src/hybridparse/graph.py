"""Hybrid dependency-constituency graph model.

Terminals are an ordered sequence of morphological segments and empty
categories; empty categories occupy real indices. Phrase nodes are
inclusive spans over terminal indices. Edges point from dependents to
heads. Node identity is structural: a terminal is addressed by its
0-based index, a phrase by its (start, end, tag) triple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

from .vocab import DEFAULT_TAGS, TagSet


class GraphError(Exception):
    """Invalid reference or ill-formed structure."""


class IllFormedPhraseError(GraphError):
    """Phrase span does not cover a uniquely-rooted subgraph."""


class NonProjectiveError(GraphError):
    """Subgraph yield is not a contiguous interval."""


@dataclass(frozen=True, order=True)
class Location:
    """Chapter:verse:token[:segment] reference. All components >= 1."""

    chapter: int
    verse: int
    token: int = 1
    segment: int = 1

    def __post_init__(self):
        for name in ("chapter", "verse", "token", "segment"):
            if getattr(self, name) < 1:
                raise ValueError(f"location {name} must be >= 1")

    def __str__(self) -> str:
        if self.segment != 1:
            return f"({self.chapter}:{self.verse}:{self.token}:{self.segment})"
        return f"({self.chapter}:{self.verse}:{self.token})"


@dataclass(frozen=True)
class MorphSegment:
    """One syntactic unit: a prefix, stem or suffix of a word-form."""

    location: Location
    form: str
    pos: str
    features: tuple = ()
    lemma: Optional[str] = None
    root: Optional[str] = None
    is_reference: bool = False

    def __post_init__(self):
        feats = self.features
        if isinstance(feats, Mapping):
            feats = tuple(sorted(feats.items()))
        else:
            feats = tuple(sorted(feats))
        object.__setattr__(self, "features", feats)

    def feature(self, name: str, default: str = "") -> str:
        for key, value in self.features:
            if key == name:
                return value
        return default

    @property
    def feature_map(self) -> dict:
        return dict(self.features)


@dataclass(frozen=True)
class EmptyCategory:
    """Terminal node for a reconstructed word. Position in the terminal
    sequence carries its anchoring; the form is the reconstructed surface.
    """

    pos: str
    form: str

    def __post_init__(self):
        if not self.form:
            raise ValueError("empty category needs a non-empty form")


Terminal = Union[MorphSegment, EmptyCategory]


@dataclass(frozen=True, order=True)
class Phrase:
    """Phrase node: inclusive (start, end) span over terminal indices."""

    start: int
    end: int
    tag: str

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("phrase span start must be <= end")

    def shifted(self, at: int) -> "Phrase":
        """Span after inserting one terminal at index ``at``."""
        start = self.start + 1 if self.start >= at else self.start
        end = self.end + 1 if self.end >= at else self.end
        return Phrase(start, end, self.tag)


NodeRef = Union[int, Phrase]


@dataclass(frozen=True)
class Edge:
    dependent: NodeRef
    head: NodeRef
    relation: str

    def __post_init__(self):
        if self.dependent == self.head:
            raise ValueError("edge endpoints must differ")


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.subject}"


def _shift_ref(ref: NodeRef, at: int) -> NodeRef:
    if isinstance(ref, Phrase):
        return ref.shifted(at)
    return ref + 1 if ref >= at else ref


def ref_key(ref: NodeRef) -> tuple:
    """Deterministic sort key over mixed terminal/phrase references."""
    if isinstance(ref, Phrase):
        return (1, ref.start, ref.end, ref.tag)
    return (0, ref, 0, "")


@dataclass(frozen=True)
class HybridGraph:
    """Immutable hybrid graph value. Equality is structural."""

    terminals: tuple = ()
    phrases: frozenset = frozenset()
    edges: frozenset = frozenset()
    _head_index: dict = field(init=False, compare=False, repr=False, default=None)
    _dep_index: dict = field(init=False, compare=False, repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "terminals", tuple(self.terminals))
        object.__setattr__(self, "phrases", frozenset(self.phrases))
        object.__setattr__(self, "edges", frozenset(self.edges))
        heads: dict = {}
        deps: dict = {}
        for edge in self.edges:
            heads.setdefault(edge.dependent, []).append(edge)
            deps.setdefault(edge.head, []).append(edge)
        object.__setattr__(self, "_head_index", heads)
        object.__setattr__(self, "_dep_index", deps)

    # -- node access ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.terminals)

    @property
    def segments(self) -> tuple:
        return tuple(t for t in self.terminals if isinstance(t, MorphSegment))

    def terminal(self, index: int) -> Terminal:
        if not 0 <= index < len(self.terminals):
            raise GraphError(f"unknown terminal index {index}")
        return self.terminals[index]

    def has_node(self, ref: NodeRef) -> bool:
        if isinstance(ref, Phrase):
            return ref in self.phrases
        return 0 <= ref < len(self.terminals)

    def _check_node(self, ref: NodeRef) -> None:
        if not self.has_node(ref):
            raise GraphError(f"unknown node {ref!r}")

    def pos_of(self, ref: NodeRef) -> str:
        """POS tag of a terminal, or the phrase tag for phrase nodes."""
        self._check_node(ref)
        if isinstance(ref, Phrase):
            return ref.tag
        return self.terminals[ref].pos

    def extent(self, ref: NodeRef) -> tuple:
        """Surface interval occupied by the node itself (not its subgraph)."""
        if isinstance(ref, Phrase):
            return (ref.start, ref.end)
        return (ref, ref)

    # -- subgraph functions ----------------------------------------------

    def head_of(self, ref: NodeRef) -> Optional[NodeRef]:
        """Head of ``ref`` if it is a dependent in some edge, else None."""
        self._check_node(ref)
        edges = self._head_index.get(ref, ())
        return edges[0].head if edges else None

    def head_edges(self, ref: NodeRef) -> tuple:
        return tuple(self._head_index.get(ref, ()))

    def dependent_edges(self, ref: NodeRef) -> tuple:
        """Edges in which ``ref`` is the head, sorted for determinism."""
        return tuple(
            sorted(
                self._dep_index.get(ref, ()),
                key=lambda e: (ref_key(e.dependent), e.relation),
            )
        )

    def dependents(self, ref: NodeRef) -> tuple:
        return tuple(e.dependent for e in self.dependent_edges(ref))

    def yield_of(self, ref: NodeRef) -> frozenset:
        """Terminal indices covered by the node and its transitive dependents."""
        self._check_node(ref)
        seen = set()
        out = set()
        stack = [ref]
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            if isinstance(node, Phrase):
                out.update(range(node.start, node.end + 1))
            else:
                out.add(node)
            stack.extend(self.dependents(node))
        return frozenset(out)

    def subgraph_span(self, ref: NodeRef) -> tuple:
        """Contiguous (start, end) interval of the node's subgraph yield.

        Raises NonProjectiveError when the yield has gaps.
        """
        covered = self.yield_of(ref)
        start, end = min(covered), max(covered)
        if len(covered) != end - start + 1:
            raise NonProjectiveError(
                f"subgraph of {ref!r} yields a non-contiguous set {sorted(covered)}"
            )
        return (start, end)

    def subgraph_root(self, phrase: Phrase) -> NodeRef:
        """The unique headless node whose subgraph the phrase spans."""
        self._check_node(phrase)
        inside = [i for i in range(phrase.start, phrase.end + 1)]
        candidates: list = []
        for node in inside + sorted(
            p for p in self.phrases
            if p != phrase and p.start >= phrase.start and p.end <= phrase.end
        ):
            if self.head_of(node) is not None:
                continue
            covered = self.yield_of(node)
            if all(phrase.start <= i <= phrase.end for i in covered):
                candidates.append((node, covered))
        # A headless node whose yield sits strictly inside another
        # candidate's yield is covered by that subgraph (e.g. a preposition
        # under an attached prepositional phrase), not a root of its own.
        roots = []
        for cand, covered in candidates:
            dominated = any(
                cand != other and covered < other_covered
                for other, other_covered in candidates
            )
            if not dominated:
                roots.append(cand)
        if len(roots) != 1:
            raise IllFormedPhraseError(
                f"phrase {phrase} covers {len(roots)} headless root(s)"
            )
        return roots[0]

    # -- construction ----------------------------------------------------

    def with_edge(self, edge: Edge) -> "HybridGraph":
        self._check_node(edge.dependent)
        self._check_node(edge.head)
        return HybridGraph(self.terminals, self.phrases, self.edges | {edge})

    def with_phrase(self, phrase: Phrase) -> "HybridGraph":
        return HybridGraph(self.terminals, self.phrases | {phrase}, self.edges)

    def with_terminal_inserted(self, at: int, terminal: Terminal) -> "HybridGraph":
        """Insert a terminal at index ``at``, shifting later indices and spans."""
        if not 0 <= at <= len(self.terminals):
            raise GraphError(f"insert position {at} out of range")
        terminals = self.terminals[:at] + (terminal,) + self.terminals[at:]
        phrases = frozenset(p.shifted(at) for p in self.phrases)
        edges = frozenset(
            Edge(_shift_ref(e.dependent, at), _shift_ref(e.head, at), e.relation)
            for e in self.edges
        )
        return HybridGraph(terminals, phrases, edges)

    # -- validation --------------------------------------------------------

    def validate(self, tags: TagSet = DEFAULT_TAGS) -> list:
        """All invariant violations, as data. Never raises on bad structure."""
        out: list[Violation] = []
        n = len(self.terminals)
        for i, term in enumerate(self.terminals):
            if isinstance(term, EmptyCategory) and not tags.is_pos(term.pos):
                out.append(Violation("unknown-pos", f"terminal {i}: {term.pos}"))
            elif isinstance(term, MorphSegment) and not tags.is_pos(term.pos):
                out.append(Violation("unknown-pos", f"terminal {i}: {term.pos}"))
        for phrase in sorted(self.phrases):
            if not (0 <= phrase.start <= phrase.end < n):
                out.append(Violation("phrase-bounds", str(phrase)))
            if not tags.is_phrase_tag(phrase.tag):
                out.append(Violation("unknown-phrase-tag", str(phrase)))
            for other in sorted(self.phrases):
                if other == phrase or other < phrase:
                    continue
                disjoint = other.end < phrase.start or other.start > phrase.end
                nested = (
                    (other.start >= phrase.start and other.end <= phrase.end)
                    or (phrase.start >= other.start and phrase.end <= other.end)
                )
                if not (disjoint or nested):
                    out.append(
                        Violation("phrase-overlap", f"{phrase} crosses {other}")
                    )
        seen_dependents = set()
        for edge in sorted(self.edges, key=lambda e: (ref_key(e.dependent), ref_key(e.head))):
            for ref in (edge.dependent, edge.head):
                if not self.has_node(ref):
                    out.append(Violation("dangling-edge", f"{edge} references {ref!r}"))
            base = edge.relation
            if not tags.is_relation(base) and not _is_enriched(base, tags):
                out.append(Violation("unknown-relation", edge.relation))
            if edge.dependent in seen_dependents:
                out.append(
                    Violation("single-governor", f"{edge.dependent!r} has two heads")
                )
            seen_dependents.add(edge.dependent)
        out.extend(self._cycle_violations())
        return out

    def _cycle_violations(self) -> list:
        out = []
        for start in list(self._head_index):
            node = start
            trail = set()
            while node is not None:
                if node in trail:
                    out.append(Violation("acyclicity", f"cycle through {start!r}"))
                    break
                trail.add(node)
                edges = self._head_index.get(node, ())
                node = edges[0].head if edges else None
        # Deduplicate: one report per cycle member set.
        unique = []
        seen = set()
        for v in out:
            if v.subject not in seen:
                seen.add(v.subject)
                unique.append(v)
        return unique

    def would_cycle(self, dependent: NodeRef, head: NodeRef) -> bool:
        """True if adding dependent->head would close a head-chain cycle."""
        node = head
        while node is not None:
            if node == dependent:
                return True
            edges = self._head_index.get(node, ())
            node = edges[0].head if edges else None
        return False


def _is_enriched(label: str, tags: TagSet) -> bool:
    from .convert import parse_label  # local import to avoid a cycle

    try:
        parsed = parse_label(label, tags)
    except ValueError:
        return False
    return parsed is not None


def graph_from(
    terminals: Iterable[Terminal],
    edges: Iterable[tuple] = (),
    phrases: Iterable[Phrase] = (),
) -> HybridGraph:
    """Convenience constructor: edges given as (dependent, head, relation)."""
    return HybridGraph(
        tuple(terminals),
        frozenset(phrases),
        frozenset(Edge(d, h, r) for d, h, r in edges),
    )
