"""Evaluation metrics: LAS, Parseval, and the extended attachment score.

All scores are exact rationals. Edge equivalence for the extended score:
segment vertices match by their position among segments, phrase vertices
by labelled span, empty categories by POS tag and surface form. Matching
never double-counts: within one equivalence class the number of matches
is the smaller of the gold and predicted counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .graph import EmptyCategory, HybridGraph, MorphSegment, Phrase


class MetricError(Exception):
    pass


@dataclass(frozen=True)
class EvalReport:
    true_positives: int
    gold_count: int
    predicted_count: int

    @property
    def precision(self) -> Fraction:
        if self.predicted_count == 0:
            return Fraction(1) if self.true_positives == 0 else Fraction(0)
        return Fraction(self.true_positives, self.predicted_count)

    @property
    def recall(self) -> Fraction:
        if self.gold_count == 0:
            return Fraction(1) if self.true_positives == 0 else Fraction(0)
        return Fraction(self.true_positives, self.gold_count)

    @property
    def f1(self) -> Fraction:
        p, r = self.precision, self.recall
        if p + r == 0:
            return Fraction(0)
        return 2 * p * r / (p + r)

    def key_values(self) -> str:
        return (
            f"precision={float(self.precision):.6f}\n"
            f"recall={float(self.recall):.6f}\n"
            f"f1={float(self.f1):.6f}\n"
            f"tp={self.true_positives}\n"
            f"gold={self.gold_count}\n"
            f"pred={self.predicted_count}"
        )

    @staticmethod
    def combine(reports: Iterable["EvalReport"]) -> "EvalReport":
        tp = gold = pred = 0
        for r in reports:
            tp += r.true_positives
            gold += r.gold_count
            pred += r.predicted_count
        return EvalReport(tp, gold, pred)


def _segment_ordinals(graph: HybridGraph) -> dict:
    ordinals = {}
    count = 0
    for i, term in enumerate(graph.terminals):
        if isinstance(term, MorphSegment):
            ordinals[i] = count
            count += 1
    return ordinals


def _check_same_sentence(gold: HybridGraph, predicted: HybridGraph) -> None:
    gold_forms = [(s.form, s.pos) for s in gold.segments]
    pred_forms = [(s.form, s.pos) for s in predicted.segments]
    if gold_forms != pred_forms:
        raise MetricError("graphs are not over the same segment sequence")


def _vertex_signature(graph: HybridGraph, ordinals: dict, ref):
    if isinstance(ref, Phrase):
        inside = [ordinals[i] for i in range(ref.start, ref.end + 1) if i in ordinals]
        if inside:
            return ("phrase", min(inside), max(inside), ref.tag)
        content = tuple(
            (graph.terminals[i].pos, graph.terminals[i].form)
            for i in range(ref.start, ref.end + 1)
        )
        return ("phrase-empty", content, ref.tag)
    term = graph.terminals[ref]
    if isinstance(term, EmptyCategory):
        return ("ec", term.pos, term.form)
    return ("segment", ordinals[ref])


def edge_signatures(graph: HybridGraph) -> list:
    """(edge, signature) pairs under the vertex equivalence relation."""
    ordinals = _segment_ordinals(graph)
    out = []
    for edge in graph.edges:
        sig = (
            _vertex_signature(graph, ordinals, edge.dependent),
            _vertex_signature(graph, ordinals, edge.head),
            edge.relation,
        )
        out.append((edge, sig))
    return out


def elas(gold: HybridGraph, predicted: HybridGraph) -> EvalReport:
    """Extended labelled attachment score over hybrid graph edges."""
    _check_same_sentence(gold, predicted)
    gold_sigs = [sig for _, sig in edge_signatures(gold)]
    pred_sigs = [sig for _, sig in edge_signatures(predicted)]
    remaining = list(gold_sigs)
    tp = 0
    for sig in pred_sigs:
        if sig in remaining:
            remaining.remove(sig)
            tp += 1
    return EvalReport(tp, len(gold_sigs), len(pred_sigs))


def las(gold: HybridGraph, predicted: HybridGraph) -> Fraction:
    """Fraction of headed gold segments with matching head and label."""
    _check_same_sentence(gold, predicted)
    for graph in (gold, predicted):
        if graph.phrases or any(
            isinstance(t, EmptyCategory) for t in graph.terminals
        ):
            raise MetricError("labelled attachment is defined on pure dependency graphs")
    gold_heads = _segment_heads(gold)
    pred_heads = _segment_heads(predicted)
    headed = [k for k, v in gold_heads.items() if v is not None]
    if not headed:
        return Fraction(1)
    correct = sum(1 for k in headed if pred_heads.get(k) == gold_heads[k])
    return Fraction(correct, len(headed))


def _segment_heads(graph: HybridGraph) -> dict:
    ordinals = _segment_ordinals(graph)
    out = {}
    for i in ordinals:
        edges = graph.head_edges(i)
        if edges and isinstance(edges[0].head, int):
            out[ordinals[i]] = (ordinals[edges[0].head], edges[0].relation)
        else:
            out[ordinals[i]] = None
    return out


def parseval(gold: Iterable[Phrase], predicted: Iterable[Phrase]) -> tuple:
    """(precision, recall) over labelled phrase spans."""
    gold_list = list(gold)
    pred_list = list(predicted)
    remaining = list(gold_list)
    tp = 0
    for phrase in pred_list:
        if phrase in remaining:
            remaining.remove(phrase)
            tp += 1
    precision = Fraction(1) if not pred_list else Fraction(tp, len(pred_list))
    recall = Fraction(1) if not gold_list else Fraction(tp, len(gold_list))
    return (precision, recall)


def parseval_graphs(gold: HybridGraph, predicted: HybridGraph) -> tuple:
    """Parseval over the phrase sets of two graphs, spans projected onto
    segment ordinals so differing empty categories do not misalign spans."""
    _check_same_sentence(gold, predicted)

    def project(graph):
        ordinals = _segment_ordinals(graph)
        out = []
        for p in graph.phrases:
            sig = _vertex_signature(graph, ordinals, p)
            out.append(sig)
        return out

    gold_list = project(gold)
    pred_list = project(predicted)
    remaining = list(gold_list)
    tp = 0
    for item in pred_list:
        if item in remaining:
            remaining.remove(item)
            tp += 1
    precision = Fraction(1) if not pred_list else Fraction(tp, len(pred_list))
    recall = Fraction(1) if not gold_list else Fraction(tp, len(gold_list))
    return (precision, recall)
