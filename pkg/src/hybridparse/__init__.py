"""Trainable statistical parser for hybrid dependency-constituency graphs."""

__version__ = "0.1.0"

from .graph import (
    Edge,
    EmptyCategory,
    HybridGraph,
    Location,
    MorphSegment,
    Phrase,
    graph_from,
)
from .transitions import (
    AddPhrase,
    Configuration,
    InsertEmpty,
    InsertPronoun,
    LeftArc,
    Reduce,
    RightArc,
    Shift,
    apply,
    initial,
    legal,
)
from .oracle import oracle_next, oracle_sequence
from .convert import from_pure_dependency, is_convertible, to_pure_dependency
from .metrics import elas, las, parseval
from .learning import FeatureSetSpec, Model, extract_features, predict, train
from .engine import parse_integrated, parse_multi_step
from .crossval import cross_validate
from .synth import Profile, generate

__all__ = [
    "AddPhrase",
    "Configuration",
    "Edge",
    "EmptyCategory",
    "FeatureSetSpec",
    "HybridGraph",
    "InsertEmpty",
    "InsertPronoun",
    "LeftArc",
    "Location",
    "Model",
    "MorphSegment",
    "Phrase",
    "Profile",
    "Reduce",
    "RightArc",
    "Shift",
    "apply",
    "cross_validate",
    "elas",
    "extract_features",
    "from_pure_dependency",
    "generate",
    "graph_from",
    "initial",
    "is_convertible",
    "las",
    "legal",
    "oracle_next",
    "oracle_sequence",
    "parse_integrated",
    "parse_multi_step",
    "parseval",
    "predict",
    "to_pure_dependency",
    "train",
]
