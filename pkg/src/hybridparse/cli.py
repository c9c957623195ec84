"""Command-line interface binding the modules into reproducible workflows.

Exit codes: 0 success, 1 usage error, 2 data error, 3 acceptance failure
(oracle-check mismatches, threshold misses). Any flag may also be given
in a key=value config file via --config; command-line flags win. The
resolved configuration is echoed into output headers for provenance.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .convert import from_pure_dependency, is_convertible, to_pure_dependency
from .corpus_io import (
    GraphMetadata,
    TreebankDocument,
    TreebankFormatError,
    dumps_treebank,
    read_feature_notation,
    read_treebank,
    sentences_from_notation,
    write_treebank,
)
from .crossval import cross_validate, evaluate_split
from .engine import parse_integrated, parse_multi_step
from .graph import GraphError
from .learning import FeatureSetSpec, Model, TrainingError, train
from .metrics import MetricError, elas, las, parseval_graphs
from .oracle import oracle_sequence
from .render import emit, emit_dot, layout
from .synth import Profile, generate
from .transitions import parse_transition

USAGE_ERROR, DATA_ERROR, ACCEPT_ERROR = 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_config(path: str) -> dict:
    out = {}
    for line_no, raw in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{line_no}: expected key=value", USAGE_ERROR)
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _resolve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> argparse.Namespace:
    if getattr(args, "config", None):
        defaults = _load_config(args.config)
        known = {a.dest for a in parser._actions}
        for key, value in defaults.items():
            if key not in known:
                raise CliError(f"unknown config key {key!r}", USAGE_ERROR)
            if parser.get_default(key) == getattr(args, key):
                setattr(args, key, type(parser.get_default(key))(value)
                        if parser.get_default(key) is not None else value)
    return args


def _provenance(args: argparse.Namespace, keys: list) -> str:
    parts = [f"{k} = {getattr(args, k)}" for k in keys if getattr(args, k, None) is not None]
    return "# " + ", ".join(parts)


def _read_corpus(path: str) -> TreebankDocument:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return read_treebank(handle)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}", USAGE_ERROR)
    except (TreebankFormatError, GraphError) as exc:
        raise CliError(f"{path}: {exc}", DATA_ERROR)


def _read_sentences(path: str):
    """Sentences from CoNLL-X or feature-notation input, detected by shape."""
    text = Path(path).read_text("utf-8")
    first = next((l for l in text.splitlines() if l.strip() and not l.startswith("#")), "")
    if "[" in first and first.lstrip().startswith("("):
        entries = read_feature_notation(text)
        return sentences_from_notation(entries)
    doc = read_treebank(text)
    return [graph.segments for graph in doc.graphs]


def cmd_train(args) -> int:
    corpus = _read_corpus(args.corpus)
    spec = FeatureSetSpec(args.features)
    graphs = list(corpus.graphs)
    if args.pipeline == "multistep":
        converted = []
        lossy = 0
        for graph in graphs:
            pure, report = to_pure_dependency(graph)
            if report.lossy:
                lossy += 1
                continue
            converted.append(pure)
        print(f"# lossy graphs excluded from conversion: {lossy}")
        graphs = converted
    try:
        model = train(graphs, spec, seed=args.seed, epochs=args.epochs)
    except TrainingError as exc:
        raise CliError(str(exc), DATA_ERROR)
    Path(args.out).write_text(model.serialize(), encoding="utf-8")
    print(_provenance(args, ["corpus", "features", "pipeline", "seed", "out"]))
    print(f"# graphs used = {model.counts['graphs_used']}, "
          f"excluded (oracle-unreachable) = {model.counts['graphs_excluded']}")
    print(f"model written to {args.out}")
    return 0


def cmd_parse(args) -> int:
    model = Model.deserialize(Path(args.model).read_text("utf-8"))
    sentences = _read_sentences(args.input)
    parse = parse_multi_step if args.pipeline == "multistep" else parse_integrated
    doc = TreebankDocument()
    traces = []
    for sentence in sentences:
        if not sentence:
            continue
        graph, report = parse(model, sentence)
        doc.graphs.append(graph)
        doc.metadata.append(GraphMetadata())
        traces.append(report)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(_provenance(args, ["model", "input", "pipeline"]) + "\n")
        write_treebank(doc, handle)
    if args.trace:
        for i, report in enumerate(traces):
            print(f"# sentence {i + 1}")
            print(report.trace_text())
    print(f"parsed {len(doc.graphs)} sentence(s) into {args.out}")
    return 0


def cmd_eval(args) -> int:
    gold = _read_corpus(args.gold)
    pred = _read_corpus(args.pred)
    if len(gold.graphs) != len(pred.graphs):
        raise CliError("gold and prediction differ in graph count", DATA_ERROR)
    print(_provenance(args, ["gold", "pred", "metric"]))
    try:
        if args.metric == "elas":
            from .metrics import EvalReport

            report = EvalReport.combine(
                elas(g, p) for g, p in zip(gold.graphs, pred.graphs)
            )
            print(report.key_values())
        elif args.metric == "las":
            scores = [las(g, p) for g, p in zip(gold.graphs, pred.graphs)]
            overall = sum(scores) / len(scores)
            print(f"las={float(overall):.6f}")
        else:
            from fractions import Fraction

            precisions, recalls = [], []
            for g, p in zip(gold.graphs, pred.graphs):
                pr, rc = parseval_graphs(g, p)
                precisions.append(pr)
                recalls.append(rc)
            p = sum(precisions) / len(precisions)
            r = sum(recalls) / len(recalls)
            print(f"precision={float(p):.6f}")
            print(f"recall={float(r):.6f}")
    except MetricError as exc:
        raise CliError(str(exc), DATA_ERROR)
    return 0


def cmd_crossval(args) -> int:
    corpus = _read_corpus(args.corpus)
    spec = FeatureSetSpec(args.features)
    try:
        report = cross_validate(
            corpus, args.folds, spec, args.pipeline, seed=args.seed, epochs=args.epochs
        )
    except (ValueError, TrainingError) as exc:
        raise CliError(str(exc), DATA_ERROR)
    print(_provenance(args, ["corpus", "folds", "features", "pipeline", "seed"]))
    print(f"{'pipeline':<12}{'P':>8}{'R':>8}{'F1':>8}")
    print(
        f"{args.pipeline:<12}"
        f"{float(report.precision) * 100:>8.2f}"
        f"{float(report.recall) * 100:>8.2f}"
        f"{float(report.f1) * 100:>8.2f}"
    )
    print(report.key_values())
    print(f"folds={args.folds}")
    print(f"spec={args.features}")
    print(f"pipeline={args.pipeline}")
    print(f"seed={args.seed}")
    if args.min_f1 is not None and float(report.f1) < args.min_f1:
        raise CliError(
            f"f1 {float(report.f1):.4f} below threshold {args.min_f1}", ACCEPT_ERROR
        )
    return 0


def cmd_convert(args) -> int:
    corpus = _read_corpus(args.input)
    out_doc = TreebankDocument()
    lossy = 0
    for graph, meta in zip(corpus.graphs, corpus.metadata):
        if args.direction == "to-pure":
            converted, report = to_pure_dependency(graph)
            lossy += 1 if report.lossy else 0
            print(
                f"# {meta.location or 'graph'}: phrases={report.converted_phrases} "
                f"ellipsis={report.converted_empty_categories} "
                f"dropped={report.dropped_pronouns} lossy={report.lossy}"
            )
            for subject, reason in report.loss_details:
                print(f"#   loss: {subject}: {reason}")
        else:
            converted, report = from_pure_dependency(graph)
            for subject, reason in report.reconstruction_errors:
                print(f"#   reconstruction error: {subject}: {reason}")
        out_doc.graphs.append(converted)
        out_doc.metadata.append(meta)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            write_treebank(out_doc, handle)
    print(f"# lossy graphs: {lossy}/{len(corpus.graphs)}")
    return 0


def cmd_oracle_check(args) -> int:
    corpus = _read_corpus(args.corpus)
    failures = 0
    for i, graph in enumerate(corpus.graphs):
        outcome = oracle_sequence(graph)
        label = corpus.metadata[i].location or f"graph {i + 1}"
        if not outcome.reachable:
            failures += 1
            print(f"UNREACHABLE {label}: {len(outcome.uncovered_edges)} uncovered edge(s)")
        else:
            print(f"ok {label}: {len(outcome.sequence)} transitions")
    if args.fixtures:
        for path in sorted(Path(args.fixtures).glob("*.transitions")):
            corpus_path = path.with_suffix(".conllx")
            if not corpus_path.exists():
                raise CliError(f"no graph fixture next to {path}", USAGE_ERROR)
            doc = _read_corpus(str(corpus_path))
            expected = [
                parse_transition(line)
                for line in path.read_text("utf-8").splitlines()
                if line.strip() and not line.startswith("#")
            ]
            outcome = oracle_sequence(doc.graphs[0])
            if outcome.sequence != expected:
                failures += 1
                print(f"MISMATCH {path.name}")
                for got, want in zip(outcome.sequence, expected):
                    marker = "" if str(got) == str(want) else "   <-- differs"
                    print(f"  {str(got):<16}{str(want)}{marker}")
            else:
                print(f"ok {path.name}: fixture reproduced")
    if failures:
        raise CliError(f"{failures} oracle failure(s)", ACCEPT_ERROR)
    return 0


def cmd_synth(args) -> int:
    try:
        profile = Profile.parse(args.profile)
    except ValueError as exc:
        raise CliError(str(exc), USAGE_ERROR)
    doc = generate(args.seed, args.count, profile)
    with open(args.out, "w", encoding="utf-8") as handle:
        write_treebank(doc, handle)
    print(_provenance(args, ["seed", "count", "profile", "out"]))
    print(f"wrote {len(doc.graphs)} graph(s) to {args.out}")
    return 0


def cmd_render(args) -> int:
    corpus = _read_corpus(args.input)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, graph in enumerate(corpus.graphs):
        tree = layout(graph, rtl=not args.ltr)
        if args.format == "svg":
            document = emit(tree, "svg")
        else:
            document = emit_dot(graph)
        path = out_dir / f"graph{i + 1:04d}.{args.format}"
        path.write_text(document, encoding="utf-8")
    print(f"rendered {len(corpus.graphs)} document(s) into {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridparse",
        description="Hybrid dependency-constituency statistical parser",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value defaults file")

    p = sub.add_parser("train", help="fit and serialize a model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--features", default="lemma",
                   choices=["pos", "morph6", "morph9", "lemma", "phi"])
    p.add_argument("--pipeline", default="integrated", choices=["integrated", "multistep"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=8)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("parse", help="parse sentences with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--pipeline", default="integrated", choices=["integrated", "multistep"])
    p.add_argument("--out", required=True)
    p.add_argument("--trace", action="store_true")
    common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="score predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--metric", default="elas", choices=["elas", "las", "parseval"])
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("crossval", help="k-fold cross-validation report")
    p.add_argument("--corpus", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--features", default="lemma",
                   choices=["pos", "morph6", "morph9", "lemma", "phi"])
    p.add_argument("--pipeline", default="integrated", choices=["integrated", "multistep"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=8)
    p.add_argument("--min-f1", type=float, default=None, dest="min_f1")
    common(p)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("convert", help="hybrid/pure dependency conversion")
    p.add_argument("--input", required=True)
    p.add_argument("--direction", required=True, choices=["to-pure", "to-hybrid"])
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("oracle-check", help="verify oracle fidelity")
    p.add_argument("--corpus", required=True)
    p.add_argument("--fixtures", help="directory of .conllx/.transitions pairs")
    common(p)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("synth", help="emit a synthetic corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--profile", default="pure")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("render", help="draw graphs as SVG or DOT")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="svg", choices=["svg", "dot"])
    p.add_argument("--out", required=True)
    p.add_argument("--ltr", action="store_true", help="left-to-right word order")
    common(p)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _resolve(args, parser)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (TreebankFormatError, GraphError, MetricError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
