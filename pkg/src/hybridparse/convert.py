"""Reversible transformation between hybrid and pure dependency graphs.

Hybrid-to-pure removes dropped subject pronouns, folds phrase nodes into
``+r`` / ``r+`` / ``+r+`` enriched labels anchored at the subgraph root,
and collapses two-edge chains through an empty category into a single
``r1|pos|r2`` bridge label. Pure-to-hybrid runs the inverse in the order
bridges, then phrase expansions, then dropped-pronoun reinsertion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graph import (
    Edge,
    EmptyCategory,
    GraphError,
    HybridGraph,
    MorphSegment,
    Phrase,
    ref_key,
)
from .vocab import DEFAULT_TAGS, TagSet

ELLIPTICAL_FORM = "*"


@dataclass(frozen=True)
class EnrichedLabel:
    """Parsed form of an enriched dependency label.

    Expansion flags and the ellipsis bridge are mutually exclusive; inside
    a bridge, the first component may itself carry a dependent-expansion
    flag (e.g. ``+link|N|circ``).
    """

    base: str
    dependent_expansion: bool = False
    head_expansion: bool = False
    bridge: Optional[tuple] = None  # (relation1, pos, relation2)

    def __str__(self) -> str:
        if self.bridge:
            return "|".join(self.bridge)
        out = self.base
        if self.dependent_expansion:
            out = "+" + out
        if self.head_expansion:
            out = out + "+"
        return out


def parse_label(label: str, tags: TagSet = DEFAULT_TAGS) -> Optional[EnrichedLabel]:
    """Parse an enriched label; None for a plain relation; ValueError if bad."""
    if tags.is_relation(label):
        return None
    if "|" in label:
        parts = label.split("|")
        if len(parts) != 3:
            raise ValueError(f"malformed bridge label {label!r}")
        rel1, pos, rel2 = parts
        inner = parse_label(rel1, tags)
        if inner is not None and (inner.head_expansion or inner.bridge):
            raise ValueError(f"unsupported bridge component {rel1!r} in {label!r}")
        outer = parse_label(rel2, tags)
        if outer is not None and (outer.dependent_expansion or outer.bridge):
            raise ValueError(f"unsupported bridge component {rel2!r} in {label!r}")
        if not tags.is_pos(pos):
            raise ValueError(f"unknown POS {pos!r} in bridge label {label!r}")
        return EnrichedLabel(rel1, bridge=(rel1, pos, rel2))
    dep_flag = label.startswith("+")
    head_flag = label.endswith("+")
    base = label.strip("+")
    if (dep_flag or head_flag) and tags.is_relation(base):
        return EnrichedLabel(base, dep_flag, head_flag)
    raise ValueError(f"unknown relation label {label!r}")


@dataclass
class ConversionReport:
    converted_phrases: int = 0
    converted_empty_categories: int = 0
    dropped_pronouns: int = 0
    loss_details: list = field(default_factory=list)
    reconstruction_errors: list = field(default_factory=list)

    @property
    def lossy(self) -> bool:
        return bool(self.loss_details)


def _drop_subject_pronouns(graph: HybridGraph) -> tuple:
    """Remove dependent-less PRON empty categories with a subj edge to a verb."""
    dropped = 0
    while True:
        target = None
        for i, term in enumerate(graph.terminals):
            if not isinstance(term, EmptyCategory) or term.pos != "PRON":
                continue
            head_edges = graph.head_edges(i)
            if len(head_edges) != 1 or head_edges[0].relation != "subj":
                continue
            head = head_edges[0].head
            if isinstance(head, Phrase):
                continue
            head_term = graph.terminals[head]
            if not isinstance(head_term, MorphSegment) or head_term.pos != "V":
                continue
            if graph.dependents(i):
                continue
            if any(p.start == i == p.end for p in graph.phrases):
                continue
            target = (i, head_edges[0])
            break
        if target is None:
            return graph, dropped
        index, edge = target
        graph = _remove_terminal(graph, index, drop_edges={edge})
        dropped += 1


def _remove_terminal(graph: HybridGraph, index: int, drop_edges=frozenset()) -> HybridGraph:
    """Delete a terminal, renumbering indices and spans above it. Callers
    must not remove the sole terminal of a phrase span."""

    def fix(ref):
        if isinstance(ref, Phrase):
            start = ref.start - 1 if ref.start > index else ref.start
            end = ref.end - 1 if ref.end >= index else ref.end
            return Phrase(start, end, ref.tag)
        return ref - 1 if ref > index else ref

    terminals = graph.terminals[:index] + graph.terminals[index + 1 :]
    edges = []
    for edge in graph.edges:
        if edge in drop_edges or index in (edge.dependent, edge.head):
            continue
        edges.append(Edge(fix(edge.dependent), fix(edge.head), edge.relation))
    phrases = frozenset(fix(p) for p in graph.phrases)
    return HybridGraph(terminals, phrases, frozenset(edges))


def _fold_phrases(graph: HybridGraph, report: ConversionReport) -> HybridGraph:
    """Remove phrase nodes bottom-up, re-anchoring their edges at the root."""
    for phrase in sorted(graph.phrases, key=lambda p: (p.end - p.start, p.start, p.tag)):
        try:
            root = graph.subgraph_root(phrase)
        except GraphError as exc:
            report.loss_details.append((str(phrase), f"no unique root: {exc}"))
            edges = frozenset(
                e for e in graph.edges if phrase not in (e.dependent, e.head)
            )
            for e in sorted(graph.edges - edges, key=lambda e: ref_key(e.dependent)):
                report.loss_details.append((_edge_str(e), "edge dropped with phrase"))
            graph = HybridGraph(graph.terminals, graph.phrases - {phrase}, edges)
            continue
        edges = set(graph.edges)
        for edge in graph.head_edges(phrase):
            edges.discard(edge)
            edges.add(Edge(root, edge.head, "+" + edge.relation))
        for edge in graph.dependent_edges(phrase):
            edges.discard(edge)
            edges.add(Edge(edge.dependent, root, edge.relation + "+"))
        graph = HybridGraph(graph.terminals, graph.phrases - {phrase}, frozenset(edges))
        report.converted_phrases += 1
    return graph


def _collapse_chains(graph: HybridGraph, report: ConversionReport) -> HybridGraph:
    """Fold each a -> e -> b chain through an empty category into one edge."""
    while True:
        target = None
        for i, term in enumerate(graph.terminals):
            if not isinstance(term, EmptyCategory):
                continue
            incoming = graph.dependent_edges(i)
            outgoing = graph.head_edges(i)
            if any(p.start == i == p.end for p in graph.phrases):
                continue
            if len(incoming) == 1 and len(outgoing) == 1:
                a_edge, b_edge = incoming[0], outgoing[0]
                endpoints_ok = not any(
                    isinstance(r, int) and isinstance(graph.terminals[r], EmptyCategory)
                    for r in (a_edge.dependent, b_edge.head)
                )
                if endpoints_ok:
                    target = (i, a_edge, b_edge)
                    break
        if target is None:
            break
        index, a_edge, b_edge = target
        bridged = Edge(
            a_edge.dependent,
            b_edge.head,
            f"{a_edge.relation}|{graph.terminals[index].pos}|{b_edge.relation}",
        )
        graph = _remove_terminal(graph, index, drop_edges={a_edge, b_edge})
        fixed = Edge(
            _unshift(bridged.dependent, index),
            _unshift(bridged.head, index),
            bridged.relation,
        )
        graph = graph.with_edge(fixed)
        report.converted_empty_categories += 1
    for i, term in enumerate(graph.terminals):
        if isinstance(term, EmptyCategory):
            report.loss_details.append(
                (f"terminal {i} ({term.pos} {term.form})", "unconverted empty category")
            )
    return graph


def _unshift(ref, index):
    if isinstance(ref, Phrase):
        return ref
    return ref - 1 if ref > index else ref


def _edge_str(edge: Edge) -> str:
    return f"{edge.dependent!r} -{edge.relation}-> {edge.head!r}"


def to_pure_dependency(
    hybrid: HybridGraph, tags: TagSet = DEFAULT_TAGS
) -> tuple:
    """Convert a hybrid graph to pure dependency with enriched labels.

    Returns (pure_graph, report). Residue outside the conversion rules is
    recorded in the report; unconverted empty categories are passed
    through, phrase nodes are always removed.
    """
    violations = hybrid.validate(tags)
    if violations:
        raise GraphError(f"invalid input graph: {violations[0]}")
    report = ConversionReport()
    graph, report.dropped_pronouns = _drop_subject_pronouns(hybrid)
    graph = _fold_phrases(graph, report)
    graph = _collapse_chains(graph, report)
    return graph, report


# ---------------------------------------------------------------------------
# Inverse direction
# ---------------------------------------------------------------------------

PHRASE_RULES_DOC = """Phrase tags are reassigned from the subgraph:
PP when the root is a preposition; VS when the root is a verb with a
subject dependent; NS when the span contains a pred or predx edge;
CS when the root is a conditional particle or time adverb; SC when the
root is a subordinating conjunction; otherwise S."""


def _phrase_tag_for(graph: HybridGraph, root, span) -> str:
    root_pos = graph.pos_of(root)
    if root_pos == "P":
        return "PP"
    if root_pos == "V" and any(
        e.relation in ("subj", "subjx") for e in graph.dependent_edges(root)
    ):
        return "VS"
    start, end = span
    for edge in graph.edges:
        if edge.relation in ("pred", "predx"):
            dep_ext = graph.extent(edge.dependent)
            head_ext = graph.extent(edge.head)
            if start <= dep_ext[0] and dep_ext[1] <= end and start <= head_ext[0] and head_ext[1] <= end:
                return "NS"
    if root_pos in ("COND", "T"):
        return "CS"
    if root_pos == "SUB":
        return "SC"
    return "S"


def expand_bridges(
    pure: HybridGraph, tags: TagSet = DEFAULT_TAGS, report: Optional[ConversionReport] = None
) -> HybridGraph:
    """First restoration stage: bridge labels become an empty category and
    two edges. The restored node is inserted directly before its dependent.
    """
    while True:
        target = None
        for edge in sorted(pure.edges, key=lambda e: (ref_key(e.dependent), e.relation)):
            try:
                parsed = parse_label(edge.relation, tags)
            except ValueError:
                continue
            if parsed and parsed.bridge:
                target = (edge, parsed)
                break
        if target is None:
            return pure
        edge, parsed = target
        rel1, pos, rel2 = parsed.bridge
        dep_pos = edge.dependent.start if isinstance(edge.dependent, Phrase) else edge.dependent
        form = ELLIPTICAL_FORM
        if pos == "PRON":
            head_ref = edge.head
            if isinstance(head_ref, int):
                head_term = pure.terminals[head_ref]
                if isinstance(head_term, MorphSegment) and head_term.pos == "V":
                    form = tags.pronoun_form(
                        head_term.feature("Person"),
                        head_term.feature("Gender"),
                        head_term.feature("Number"),
                    )
        without = HybridGraph(pure.terminals, pure.phrases, pure.edges - {edge})
        grown = without.with_terminal_inserted(dep_pos, EmptyCategory(pos, form))
        ec = dep_pos
        dep = _shift_after(edge.dependent, dep_pos)
        head = _shift_after(edge.head, dep_pos)
        grown = grown.with_edge(Edge(dep, ec, rel1)).with_edge(Edge(ec, head, rel2))
        pure = grown


def _shift_after(ref, at):
    if isinstance(ref, Phrase):
        return ref.shifted(at)
    return ref + 1 if ref >= at else ref


def expand_phrases(
    graph: HybridGraph, tags: TagSet = DEFAULT_TAGS, report: Optional[ConversionReport] = None
) -> HybridGraph:
    """Second restoration stage: expansion flags materialize phrase nodes
    over the flagged endpoint's subgraph span.
    """
    while True:
        target = None
        for edge in sorted(graph.edges, key=lambda e: (ref_key(e.dependent), e.relation)):
            try:
                parsed = parse_label(edge.relation, tags)
            except ValueError:
                continue
            if parsed and (parsed.dependent_expansion or parsed.head_expansion):
                target = (edge, parsed)
                break
        if target is None:
            return graph
        edge, parsed = target
        dep, head, relation = edge.dependent, edge.head, parsed.base
        edges = set(graph.edges)
        edges.discard(edge)
        phrases = set(graph.phrases)
        # Spans are measured without the edge being expanded, so the
        # re-anchored endpoint's subtree does not leak into the other side.
        stripped = HybridGraph(graph.terminals, graph.phrases, frozenset(edges))
        try:
            if parsed.dependent_expansion:
                span = stripped.subgraph_span(dep)
                phrase = Phrase(span[0], span[1], _phrase_tag_for(stripped, dep, span))
                phrases.add(phrase)
                dep = phrase
            if parsed.head_expansion:
                span = stripped.subgraph_span(head)
                phrase = Phrase(span[0], span[1], _phrase_tag_for(stripped, head, span))
                phrases.add(phrase)
                head = phrase
        except GraphError as exc:
            if report is not None:
                report.reconstruction_errors.append((_edge_str(edge), str(exc)))
            # Label kept verbatim; edge left in place so nothing is lost.
            graph = HybridGraph(
                graph.terminals,
                graph.phrases,
                (graph.edges - {edge})
                | {Edge(edge.dependent, edge.head, "\x00" + edge.relation)},
            )
            continue
        if dep == head:
            # Both endpoints expanded onto one identical span; unsalvageable.
            if report is not None:
                report.reconstruction_errors.append(
                    (_edge_str(edge), "expansion collapses endpoints")
                )
            graph = HybridGraph(
                graph.terminals,
                graph.phrases,
                (graph.edges - {edge})
                | {Edge(edge.dependent, edge.head, "\x00" + edge.relation)},
            )
            continue
        graph = HybridGraph(graph.terminals, frozenset(phrases), frozenset(edges | {Edge(dep, head, relation)}))


def _restore_marked_labels(graph: HybridGraph) -> HybridGraph:
    edges = frozenset(
        Edge(e.dependent, e.head, e.relation.lstrip("\x00")) for e in graph.edges
    )
    return HybridGraph(graph.terminals, graph.phrases, edges)


def reinsert_dropped_pronouns(
    graph: HybridGraph, tags: TagSet = DEFAULT_TAGS
) -> HybridGraph:
    """Give every plain verb without a subject a dropped-pronoun subject.

    Verbs carrying a special-group (SP) feature are skipped: the copula
    group takes subjx/predx instead of a subject.
    """
    index = 0
    while index < len(graph.terminals):
        term = graph.terminals[index]
        if (
            isinstance(term, MorphSegment)
            and term.pos == "V"
            and not term.feature("SP")
            and not any(
                e.relation in ("subj", "subjx") for e in graph.dependent_edges(index)
            )
        ):
            form = tags.pronoun_form(
                term.feature("Person"), term.feature("Gender"), term.feature("Number")
            )
            graph = graph.with_terminal_inserted(
                index + 1, EmptyCategory("PRON", form)
            )
            graph = graph.with_edge(Edge(index + 1, index, "subj"))
            index += 2
            continue
        index += 1
    return graph


def from_pure_dependency(
    pure: HybridGraph, tags: TagSet = DEFAULT_TAGS
) -> tuple:
    """Reconstruct a hybrid graph from an enriched pure dependency graph.

    Returns (hybrid, report); reconstruction errors are recorded per edge
    with the enriched label kept verbatim. Dropped pronouns are restored
    before phrase expansion so that a clause-final pronoun falls inside
    its clause's reconstructed span.
    """
    if pure.phrases:
        raise GraphError("input already contains phrase nodes")
    report = ConversionReport()
    graph = expand_bridges(pure, tags, report)
    graph = reinsert_dropped_pronouns(graph, tags)
    graph = expand_phrases(graph, tags, report)
    graph = _restore_marked_labels(graph)
    return graph, report


def is_convertible(hybrid: HybridGraph, tags: TagSet = DEFAULT_TAGS) -> bool:
    """True when the hybrid->pure->hybrid roundtrip is lossless and exact."""
    try:
        pure, report = to_pure_dependency(hybrid, tags)
    except GraphError:
        return False
    if report.lossy:
        return False
    restored, back_report = from_pure_dependency(pure, tags)
    if back_report.reconstruction_errors:
        return False
    return restored == hybrid
