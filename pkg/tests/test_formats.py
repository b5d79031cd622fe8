import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modcollinear.errors import CorruptStore, ParseError
from modcollinear.formats import (BestKnownStore, ResultRecord, parse_permutation, parse_pointset,
                                  registry_file, registry_pointset, serialize_pointset)
from modcollinear.plane import PointSet

GAMMA1_TEXT = "modulus: 5\n0,0\n0,1\n1,2\n1,3\n2,2\n4,1\n"
GAMMA2_TEXT = "modulus: 5\n0,0\n0,1\n1,2\n1,3\n2,2\n4,1\n2,1\n"


def test_registry_fidelity():
    assert registry_file("gamma1") == GAMMA1_TEXT
    assert registry_file("gamma2") == GAMMA2_TEXT
    assert registry_pointset("gamma2").as_set() - registry_pointset("gamma1").as_set() == {(2, 1)}
    with pytest.raises(KeyError):
        registry_pointset("gamma3")


@st.composite
def pointsets(draw):
    n = draw(st.sampled_from([3, 5, 7, 11]))
    cells = draw(st.lists(st.integers(0, n * n - 1), unique=True, max_size=min(40, n * n)))
    return PointSet.from_points([(c // n, c % n) for c in cells], n)


@settings(max_examples=200, deadline=None)
@given(pointsets())
def test_pointset_round_trip(g):
    text = serialize_pointset(g)
    assert parse_pointset(text) == g
    assert serialize_pointset(parse_pointset(text)) == text


def test_parse_ignores_comments_and_blanks():
    text = "# header comment\n\nmodulus: 5  # prime\n0,0\n\n  1, 2 # a point\n# done\n"
    g = parse_pointset(text)
    assert g.n == 5 and g.points == ((0, 0), (1, 2))


@pytest.mark.parametrize("text, line", [
    ("0,0\n", 1),
    ("modulus: 9\n", 1),
    ("modulus: 5\n0,0\n0;1\n", 3),
    ("modulus: 5\n0,0\nx,1\n", 3),
    ("modulus: 5\n0,0\n5,1\n", 3),
    ("modulus: 5\n0,0\n\n0,0\n", 4),
])
def test_parse_errors_report_lines(text, line):
    with pytest.raises(ParseError) as info:
        parse_pointset(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_parse_requires_header():
    with pytest.raises(ParseError):
        parse_pointset("# nothing\n")


def test_parse_permutation():
    p = parse_permutation("0,2,4,1,3")
    assert p.image == (0, 2, 4, 1, 3) and p.n == 5
    for bad in ("0,1,1,2,3", "0,1,2,3", "a,b", ""):
        with pytest.raises(ParseError):
            parse_permutation(bad)
    with pytest.raises(ParseError):
        parse_permutation("0,1,2,3,4", modulus=7)


def test_result_record_round_trip(tmp_path):
    rec = ResultRecord("count", 5, {"source": "gamma2"}, {"psi": 2, "per_slope": {"0": 1, "3": 1}},
                       seed=None, elapsed=0.25)
    assert ResultRecord.from_json(rec.to_json()) == rec
    path = tmp_path / "r.json"
    rec.save(path)
    assert ResultRecord.load(path) == rec
    assert path.read_text() == ResultRecord.load(path).to_json()


def test_result_record_needs_schema_version():
    d = ResultRecord("count", 5).to_dict()
    del d["schema_version"]
    with pytest.raises(ParseError):
        ResultRecord.from_dict(d)
    d["schema_version"] = 99
    with pytest.raises(ParseError):
        ResultRecord.from_dict(d)


def test_store_is_monotone(tmp_path):
    store = BestKnownStore(tmp_path / "best.jsonl")
    assert store.get(13, "permutation-min") is None
    assert store.offer(13, "permutation-min", 8, [0, 1])
    assert not store.offer(13, "permutation-min", 9, [0, 2])
    assert not store.offer(13, "permutation-min", 8, [0, 3])
    assert store.offer(13, "permutation-min", 6, [0, 4])
    assert store.offer(11, "permutation-min", 5, [1])
    entry = store.get(13, "permutation-min")
    assert entry.psi == 6 and entry.witness == [0, 4]
    # a hand-appended regression never wins on read
    with store.path.open("a") as fh:
        fh.write(json.dumps({"schema_version": 1, "n": 13, "problem": "permutation-min",
                             "psi": 7, "witness": [9]}) + "\n")
    assert store.get(13, "permutation-min").psi == 6
    store.compact()
    assert len(store.path.read_text().splitlines()) == 2
    assert store.get(13, "permutation-min").witness == [0, 4]


def test_store_reports_corruption(tmp_path):
    path = tmp_path / "best.jsonl"
    path.write_text('{"schema_version": 1, "n": 5, "problem": "p", "psi": 2, "witness": []}\n{"trunc\n')
    store = BestKnownStore(path)
    with pytest.raises(CorruptStore) as info:
        store.load()
    assert ":2:" in str(info.value)
    before = path.read_text()
    with pytest.raises(CorruptStore):
        store.offer(5, "p", 1, [])
    assert path.read_text() == before
