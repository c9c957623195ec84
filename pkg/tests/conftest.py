from __future__ import annotations

from pathlib import Path

import pytest

from hybridparse.corpus_io import read_treebank
from hybridparse.transitions import parse_transition
from hybridparse.vocab import DEFAULT_TAGS

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance_lines: list = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def load_graph(name: str, tags=DEFAULT_TAGS):
    text = (FIXTURES / name).read_text("utf-8")
    doc = read_treebank(text, tags)
    return doc.graphs[0]


def load_transitions(name: str):
    lines = (FIXTURES / name).read_text("utf-8").splitlines()
    return [parse_transition(l) for l in lines if l.strip() and not l.startswith("#")]


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def english_tags():
    return DEFAULT_TAGS.with_relations("det")
