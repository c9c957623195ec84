"""Feature extraction, binarization and the trainable classifier bank.

Configurations are described by binary predicates over the top three
stack items and the queue front. Static predicates follow the nested
feature sets Pos < Morph6 < Morph9 < Lemma < Phi; dynamic predicates
describe the partially built graph (existing dependent relations, rooted
subgraphs, and previously parsed edges between slot pairs).

One multiclass scorer is trained per part-of-speech at the top of the
stack; the reference scorer is an averaged perceptron over the binary
predicates plus explicit pairwise conjunctions of the s1 and s2 slot
predicates, standing in for a quadratic-kernel maximum-margin machine
whose hyperparameters are carried as model metadata.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .graph import EmptyCategory, HybridGraph, MorphSegment, NonProjectiveError, Phrase
from .oracle import oracle_sequence
from .transitions import (
    Configuration,
    Reduce,
    Shift,
    Transition,
    apply,
    initial,
    legal,
    parse_transition,
)
from .vocab import COPULA_GROUP, DEFAULT_TAGS, TagSet

FEATURE_SETS = ("pos", "morph6", "morph9", "lemma", "phi")

# Static morphological predicates added by each nested feature set.
_SET_LEVELS = {name: i for i, name in enumerate(FEATURE_SETS)}
_MORPH6 = ("Voice", "Mood", "Case", "State")
_MORPH9 = ("PronType", "SegType")
_PHI = ("Person", "Gender", "Number")

SLOTS = ("s1", "s2", "s3", "q1")
EDGE_PAIRS = (("s1", "s2"), ("s1", "q1"), ("s2", "s3"))

HYPERPARAMETERS = {
    "penalty_c": 0.5,
    "termination_epsilon": 1,
    "kernel_gamma": 0.2,
    "kernel_r": 0,
    "kernel_degree": 2,
}


class TrainingError(Exception):
    pass


@dataclass(frozen=True)
class FeatureSetSpec:
    name: str

    def __post_init__(self):
        if self.name not in FEATURE_SETS:
            raise ValueError(f"unknown feature set {self.name!r}")

    @property
    def level(self) -> int:
        return _SET_LEVELS[self.name]

    def includes(self, other: "FeatureSetSpec") -> bool:
        return self.level >= other.level


def _slot_ref(config: Configuration, slot: str):
    if slot == "q1":
        return config.q1
    return config.stack_item(int(slot[1]))


def _static_predicates(config: Configuration, slot: str, ref, spec: FeatureSetSpec) -> List[str]:
    graph = config.graph
    if ref is None:
        return [f"{slot}:absent"]
    out = []
    if isinstance(ref, Phrase):
        out.append(f"{slot}:phrase={ref.tag}")
        return out
    term = graph.terminals[ref]
    out.append(f"{slot}:pos={term.pos}")
    if isinstance(term, EmptyCategory):
        return out
    feats = term.feature_map
    level = spec.level
    if level >= 1:
        for key in _MORPH6:
            if key in feats:
                out.append(f"{slot}:{key.lower()}={feats[key]}")
    if level >= 2:
        for key in _MORPH9:
            if key in feats:
                out.append(f"{slot}:{key.lower()}={feats[key]}")
        if feats.get("SP") == COPULA_GROUP:
            out.append(f"{slot}:copula")
    if level >= 3 and term.lemma:
        out.append(f"{slot}:lemma={term.lemma}")
    if level >= 4:
        for key in _PHI:
            if key in feats:
                out.append(f"{slot}:{key.lower()}={feats[key]}")
    return out


def _dynamic_predicates(config: Configuration, slot: str, ref) -> List[str]:
    if ref is None:
        return []
    graph = config.graph
    out = []
    for edge in graph.dependent_edges(ref):
        out.append(f"{slot}:deprel({edge.relation})")
    if graph.head_of(ref) is None:
        try:
            graph.subgraph_span(ref)
            out.append(f"{slot}:isroot")
        except NonProjectiveError:
            pass
    return out


def extract_features(config: Configuration, spec: FeatureSetSpec) -> frozenset:
    """Binary predicate set describing a configuration under a feature set."""
    refs = {slot: _slot_ref(config, slot) for slot in SLOTS}
    out: List[str] = []
    for slot in SLOTS:
        out.extend(_static_predicates(config, slot, refs[slot], spec))
        out.extend(_dynamic_predicates(config, slot, refs[slot]))
    graph = config.graph
    for a, b in EDGE_PAIRS:
        ra, rb = refs[a], refs[b]
        if ra is None or rb is None:
            continue
        linked = any(
            {edge.dependent, edge.head} == {ra, rb} for edge in graph.edges
        )
        if linked:
            out.append(f"graph:edge({a},{b})")
    return frozenset(out)


def _conjoined(features: frozenset) -> List[str]:
    """Feature vector expanded with s1 x s2 predicate conjunctions."""
    items = sorted(features)
    s1 = [f for f in items if f.startswith("s1:")]
    s2 = [f for f in items if f.startswith("s2:")]
    out = list(items)
    for a in s1:
        for b in s2:
            out.append(f"{a}&{b}")
    return out


class AveragedPerceptron:
    """One-vs-rest averaged perceptron over sparse binary features."""

    def __init__(self, labels: Sequence[str], epochs: int = 8, seed: int = 0):
        self.labels = list(labels)
        self.epochs = epochs
        self.seed = seed
        self.weights: Dict[str, Dict[str, float]] = {}

    def fit(self, pairs: Sequence[Tuple[frozenset, str]]) -> None:
        weights: Dict[str, Dict[str, float]] = {label: {} for label in self.labels}
        totals: Dict[str, Dict[str, float]] = {label: {} for label in self.labels}
        stamps: Dict[str, Dict[str, int]] = {label: {} for label in self.labels}
        expanded = [(_conjoined(f), label) for f, label in pairs]
        rng = random.Random(self.seed)
        order = list(range(len(expanded)))
        step = 0

        def upd(label, feat, delta):
            w = weights[label]
            totals[label][feat] = (
                totals[label].get(feat, 0.0)
                + (step - stamps[label].get(feat, 0)) * w.get(feat, 0.0)
            )
            stamps[label][feat] = step
            w[feat] = w.get(feat, 0.0) + delta

        for _ in range(self.epochs):
            rng.shuffle(order)
            for idx in order:
                feats, gold = expanded[idx]
                step += 1
                scores = {label: 0.0 for label in self.labels}
                for feat in feats:
                    for label in self.labels:
                        w = weights[label].get(feat)
                        if w:
                            scores[label] += w
                best = max(self.labels, key=lambda l: (scores[l], l))
                if best != gold:
                    for feat in feats:
                        upd(gold, feat, 1.0)
                        upd(best, feat, -1.0)
        averaged: Dict[str, Dict[str, float]] = {}
        for label in self.labels:
            avg = {}
            for feat, w in weights[label].items():
                total = totals[label].get(feat, 0.0) + (step - stamps[label].get(feat, 0)) * w
                value = total / max(step, 1)
                if value:
                    avg[feat] = value
            averaged[label] = avg
        self.weights = averaged

    def score(self, features: frozenset) -> Dict[str, float]:
        feats = _conjoined(features)
        scores = {label: 0.0 for label in self.labels}
        for feat in feats:
            for label, table in self.weights.items():
                w = table.get(feat)
                if w:
                    scores[label] += w
        return scores


ClassifierChoice = AveragedPerceptron


@dataclass
class Model:
    feature_set: FeatureSetSpec
    transition_vocabulary: List[str]
    classifiers: Dict[str, AveragedPerceptron]
    hyperparameters: dict = field(default_factory=lambda: dict(HYPERPARAMETERS))
    relation_vocab: List[str] = field(default_factory=list)
    corpus_fingerprint: str = ""
    counts: dict = field(default_factory=dict)

    def serialize(self) -> str:
        payload = {
            "format": "hybridparse-model",
            "version": 1,
            "feature_set": self.feature_set.name,
            "hyperparameters": self.hyperparameters,
            "transitions": self.transition_vocabulary,
            "relations": sorted(self.relation_vocab),
            "fingerprint": self.corpus_fingerprint,
            "counts": self.counts,
            "classifiers": {
                pos: {
                    "labels": clf.labels,
                    "epochs": clf.epochs,
                    "seed": clf.seed,
                    "weights": {
                        label: dict(sorted(table.items()))
                        for label, table in sorted(clf.weights.items())
                    },
                }
                for pos, clf in sorted(self.classifiers.items())
            },
        }
        return json.dumps(payload, sort_keys=True, indent=1)

    @staticmethod
    def deserialize(text: str, tags: TagSet = DEFAULT_TAGS) -> "Model":
        payload = json.loads(text)
        if payload.get("format") != "hybridparse-model":
            raise TrainingError("not a model file")
        known = set(tags.relations)
        for rel in payload["relations"]:
            base = rel
            if base not in known:
                from .convert import parse_label

                try:
                    parse_label(base, tags)
                except ValueError:
                    raise TrainingError(f"model relation vocabulary mismatch: {rel!r}")
        classifiers = {}
        for pos, data in payload["classifiers"].items():
            clf = AveragedPerceptron(data["labels"], data["epochs"], data["seed"])
            clf.weights = {
                label: dict(table) for label, table in data["weights"].items()
            }
            classifiers[pos] = clf
        model = Model(
            FeatureSetSpec(payload["feature_set"]),
            list(payload["transitions"]),
            classifiers,
            dict(payload["hyperparameters"]),
            list(payload["relations"]),
            payload.get("fingerprint", ""),
            dict(payload.get("counts", {})),
        )
        return model


EMPTY_PARTITION = "(empty)"


def _partition_key(config: Configuration) -> str:
    s1 = config.s1
    if s1 is None:
        return EMPTY_PARTITION
    return config.graph.pos_of(s1)


def training_pairs(
    gold: HybridGraph, spec: FeatureSetSpec, tags: TagSet = DEFAULT_TAGS
) -> Optional[list]:
    """(partition, features, transition) triples from the oracle sequence,
    or None when the graph is oracle-unreachable."""
    outcome = oracle_sequence(gold, tags)
    if not outcome.reachable:
        return None
    out = []
    config = initial(gold.segments)
    for t in outcome.sequence:
        out.append((_partition_key(config), extract_features(config, spec), str(t)))
        config = apply(config, t, tags)
    return out


def train(
    corpus,
    spec: FeatureSetSpec,
    algorithm=AveragedPerceptron,
    seed: int = 0,
    epochs: int = 8,
    tags: TagSet = DEFAULT_TAGS,
    include_unreachable: bool = False,
) -> Model:
    """Fit one classifier per POS partition from oracle-derived pairs."""
    graphs = list(corpus.graphs if hasattr(corpus, "graphs") else corpus)
    if not graphs:
        raise TrainingError("empty corpus")
    by_partition: Dict[str, list] = {}
    transitions: set = set()
    relations: set = set()
    used = excluded = 0
    for gold in graphs:
        pairs = training_pairs(gold, spec, tags)
        if pairs is None:
            if include_unreachable:
                pairs = _partial_pairs(gold, spec, tags)
            else:
                excluded += 1
                continue
        used += 1
        for partition, feats, label in pairs:
            by_partition.setdefault(partition, []).append((feats, label))
            transitions.add(label)
        for edge in gold.edges:
            relations.add(edge.relation)
    if not by_partition:
        raise TrainingError("no trainable graphs in corpus")
    vocab = sorted(transitions)
    classifiers: Dict[str, AveragedPerceptron] = {}
    for partition in sorted(by_partition):
        pairs = by_partition[partition]
        labels = sorted({label for _, label in pairs})
        clf = algorithm(labels, epochs=epochs, seed=seed)
        clf.fit(pairs)
        classifiers[partition] = clf
    fingerprint = _corpus_fingerprint(graphs)
    counts = {
        "graphs_used": used,
        "graphs_excluded": excluded,
        "pairs_per_partition": {k: len(v) for k, v in sorted(by_partition.items())},
    }
    return Model(
        spec,
        vocab,
        classifiers,
        dict(HYPERPARAMETERS),
        sorted(relations),
        fingerprint,
        counts,
    )


def _corpus_fingerprint(graphs: list) -> str:
    from .corpus_io import TreebankDocument, dumps_treebank

    text = dumps_treebank(TreebankDocument(list(graphs)))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _partial_pairs(gold: HybridGraph, spec: FeatureSetSpec, tags: TagSet) -> list:
    """Pairs from the consistent prefix of an unreachable graph's sequence."""
    outcome = oracle_sequence(gold, tags)
    out = []
    config = initial(gold.segments)
    for t in outcome.sequence:
        out.append((_partition_key(config), extract_features(config, spec), str(t)))
        config = apply(config, t, tags)
    return out


def predict(
    model: Model,
    config: Configuration,
    tags: TagSet = DEFAULT_TAGS,
    allowed_kinds: Optional[tuple] = None,
) -> Transition:
    """Highest-scoring legal transition; total via the reduce/shift fallback."""
    partition = _partition_key(config)
    clf = model.classifiers.get(partition)
    candidates: List[Tuple[float, str, Transition]] = []
    if clf is not None:
        feats = extract_features(config, model.feature_set)
        scores = clf.score(feats)
        for label, score in scores.items():
            t = parse_transition(label)
            if allowed_kinds and not isinstance(t, allowed_kinds):
                continue
            candidates.append((score, label, t))
    for _, label, t in sorted(candidates, key=lambda c: (-c[0], c[1])):
        if legal(config, t, tags):
            return t
    fallback = Reduce(1)
    if legal(config, fallback, tags):
        return fallback
    return Shift()
