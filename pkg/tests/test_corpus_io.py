import io

import pytest

from hybridparse import EmptyCategory, Location, Phrase, generate
from hybridparse.corpus_io import (
    FeatureNotationError,
    TreebankFormatError,
    dumps_treebank,
    format_feature_line,
    parse_feature_line,
    parse_location,
    read_feature_notation,
    read_treebank,
    sentences_from_notation,
    write_treebank,
)

from conftest import FIXTURES


def test_parse_location_examples():
    assert parse_location("(6:76)") == Location(6, 76)
    assert parse_location("(1:1:1)") == Location(1, 1, 1)
    assert parse_location("(4:68:1)") == Location(4, 68, 1)
    assert parse_location("(4:68:1:2)") == Location(4, 68, 1, 2)
    with pytest.raises(ValueError):
        parse_location("4:68")
    with pytest.raises(ValueError):
        parse_location("(4:x)")


def test_parse_feature_line_prefixed_preposition():
    segs = parse_feature_line(
        "[bi+ POS:N ACT PCPL (IV) LEM:muSorix ROOT:Srx M GEN PRON:2MP]",
        Location(70, 8, 3),
    )
    assert [s.pos for s in segs] == ["P", "N", "PRON"]
    prefix, stem, suffix = segs
    assert prefix.form == "bi"
    assert prefix.feature("SegType") == "prefix"
    assert stem.feature("Derivation") == "ACT PCPL"
    assert stem.feature("Form") == "IV"
    assert stem.lemma == "muSorix" and stem.root == "Srx"
    assert stem.feature("Gender") == "M" and stem.feature("Case") == "GEN"
    assert suffix.feature("Person") == "2"
    assert suffix.feature("Gender") == "M"
    assert suffix.feature("Number") == "P"
    assert suffix.feature("PronType") == "object"


def test_parse_feature_line_verb_with_two_prefixes():
    segs = parse_feature_line(
        "[w:CONJ+ l:EMPH+ POS:V PERF LEM:hadaY ROOT:hdy 1P PRON:3MP]",
        Location(4, 68, 1),
    )
    assert [s.pos for s in segs] == ["CONJ", "EMPH", "V", "PRON"]
    verb = segs[2]
    assert verb.feature("Aspect") == "PERF"
    assert verb.feature("Person") == "1" and verb.feature("Number") == "P"
    assert segs[3].feature("Person") == "3"
    assert [s.location.segment for s in segs] == [1, 2, 3, 4]


def test_parse_feature_line_bare_preposition():
    segs = parse_feature_line("[POS:P LEM:fiY]", Location(74, 42, 3))
    assert len(segs) == 1
    assert segs[0].pos == "P" and segs[0].lemma == "fiY"


def test_parse_feature_line_errors():
    with pytest.raises(FeatureNotationError) as exc:
        parse_feature_line("[POS:N WIBBLE]", Location(1, 1, 1))
    assert "WIBBLE" in str(exc.value)
    with pytest.raises(FeatureNotationError):
        parse_feature_line("[GEN POS:N]", Location(1, 1, 1))  # feature before segment
    with pytest.raises(FeatureNotationError):
        parse_feature_line("no brackets", Location(1, 1, 1))


def test_feature_line_roundtrip():
    line = "[bi+ POS:N ACT PCPL (IV) LEM:muSorix ROOT:Srx M GEN PRON:2MP]"
    segs = parse_feature_line(line, Location(70, 8, 3))
    assert format_feature_line(segs) == line


def test_read_table_8_2_rows():
    graph = read_treebank((FIXTURES / "table_8_2.conllx").read_text("utf-8")).graphs[0]
    assert len(graph.terminals) == 5
    assert isinstance(graph.terminals[1], EmptyCategory)
    assert graph.terminals[1].pos == "PRON"
    ns = next(iter(graph.phrases))
    assert (ns.start, ns.end, ns.tag) == (2, 4, "NS")
    relations = sorted(e.relation for e in graph.edges)
    assert relations == ["obj", "poss", "pred", "subj"]
    # the NS phrase is the object of the verb
    obj = next(e for e in graph.edges if e.relation == "obj")
    assert isinstance(obj.dependent, Phrase) and obj.head == 0


def test_read_headless_marks():
    text = (
        "1\tT\t_\tqaAla\tV\t_\t–\t_\n"
        "2\tT\t_\tman\tCOND\t_\t-\t_\n"
        "3\tT\t_\thuwa\tPRON\t_\t0\t_\n\n"
    )
    doc = read_treebank(text)
    assert len(doc.graphs[0].edges) == 0
    assert dumps_treebank(doc).count("\t_\t_\n") == 3


def test_empty_stream():
    assert len(read_treebank("")) == 0


def test_malformed_row_reports_line():
    with pytest.raises(TreebankFormatError) as exc:
        read_treebank("1\tT\tqaAla\n")
    assert exc.value.line == 1
    with pytest.raises(TreebankFormatError) as exc:
        read_treebank("1\tT\t_\tqaAla\tV\t_\t9\tsubj\n\n")
    assert "dangling" in str(exc.value)


def test_extent_out_of_bounds():
    text = "1\tT\t_\tqaAla\tV\t_\t_\t_\n2\tP\t1-4\t_\tNS\t_\t_\t_\n\n"
    with pytest.raises(TreebankFormatError):
        read_treebank(text)


def test_unknown_relation_rejected():
    text = (
        "1\tT\t_\ta\tN\t_\t2\tfrobnicate\n"
        "2\tT\t_\tb\tV\t_\t_\t_\n\n"
    )
    with pytest.raises(TreebankFormatError):
        read_treebank(text)


def test_roundtrip_byte_identity_on_synth():
    doc = generate(13, 40, "+phrases,+ellipsis,+disconnected")
    text = dumps_treebank(doc)
    doc2 = read_treebank(text)
    assert dumps_treebank(doc2) == text
    assert list(doc.graphs) == list(doc2.graphs)


def test_read_write_read_idempotent():
    # hand-written, non-canonical spacing of metadata
    text = (
        "# location = (9:9)\n"
        "# a comment\n"
        "1\tT\t_\tqaAla\tV\tloc=9:9:1:1|SegType=stem\t–\t_\n"
        "2\tE\t_\thuwa\tPRON\t_\t1\tsubj\n"
        "\n"
    )
    once = dumps_treebank(read_treebank(text))
    twice = dumps_treebank(read_treebank(once))
    assert once == twice


def test_comments_preserved():
    doc = generate(3, 2, "pure")
    doc.metadata[0].comments.append("checked by hand")
    text = dumps_treebank(doc)
    assert "# checked by hand" in text
    again = read_treebank(text)
    assert again.metadata[0].comments == ["checked by hand"]


def test_write_to_stream():
    doc = generate(1, 1, "pure")
    buf = io.StringIO()
    write_treebank(doc, buf)
    assert buf.getvalue().endswith("\n\n")


def test_feature_notation_file():
    text = (
        "(4:68:1) [w:CONJ+ l:EMPH+ POS:V PERF LEM:hadaY ROOT:hdy 1P PRON:3MP]\n"
        "(4:68:2) [POS:N LEM:Sira`T ROOT:SrT M INDEF ACC]\n"
        "(4:69:1) [POS:P LEM:fiY]\n"
    )
    entries = read_feature_notation(text)
    assert len(entries) == 3
    sentences = sentences_from_notation(entries)
    assert len(sentences) == 2
    assert len(sentences[0]) == 5  # four segments + noun
    assert sentences[0][0].location == Location(4, 68, 1, 1)


def test_feature_notation_error_line():
    with pytest.raises(TreebankFormatError) as exc:
        read_feature_notation("(1:1:1) [POS:N]\nbroken line\n")
    assert exc.value.line == 2
