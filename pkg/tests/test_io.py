import random

import pytest
from hypothesis import given, strategies as st

from puremix.certificate import Certificate
from puremix.graph import PointRef
from puremix.io import (
    SpecError, dump_certificates, dump_map, graph_to_data, load_certificates, parse_graph, parse_map, parse_point,
)
from puremix.extension import tietze_extend
from puremix.rational import Q
from puremix.spaces import circle_doubling, random_graph, rotation, sawtooth, tent, theta, y_tree
import yaml

THETA = """\
vertices: [u, v]
edges:
  - {id: 0, from: u, to: v, length: 1}
  - {id: 1, from: u, to: v, length: 1}
  - {id: 2, from: u, to: v, length: 2}
"""


def test_parse_theta():
    assert parse_graph(THETA) == theta()


@given(st.integers(0, 10**6))
def test_graph_round_trip(seed):
    g = random_graph(random.Random(seed))
    assert parse_graph(yaml.safe_dump(graph_to_data(g))) == g


@pytest.mark.parametrize("m", [tent(), sawtooth(4), circle_doubling(), rotation(2, 5)])
def test_map_round_trip(m):
    text = dump_map(m)
    back = parse_map(text)
    assert dump_map(back) == text
    assert list(back.all_pieces()) == list(m.all_pieces())


def test_map_between_graphs_round_trip():
    g = y_tree((1, 2, 3))
    f = tietze_extend(g, {g.vertex_point("l0"): Q(0), g.vertex_point("l2"): Q(1)})
    back = parse_map(dump_map(f))
    assert back.codomain == f.codomain and back.domain == g
    assert list(back.all_pieces()) == list(f.all_pieces())


@pytest.mark.parametrize("text,line,col", [
    (THETA.replace("length: 2", "length: 0"), 5, 37),
    (THETA.replace("to: v, length: 1}\n  - {id: 1", "to: w, length: 1}\n  - {id: 1"), 3, 26),
    (THETA.replace("length: 2", "length: two"), 5, 37),
    ("vertices: [u]\nedges: [\n", 3, 1),
    ("vertices: [u, v]\n", 1, 1),
])
def test_graph_errors_carry_position(text, line, col):
    with pytest.raises(SpecError) as info:
        parse_graph(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_disconnected_spec():
    text = "vertices: [a, b, c, d]\nedges:\n  - {id: 0, from: a, to: b, length: 1}\n  - {id: 1, from: c, to: d, length: 1}\n"
    with pytest.raises(SpecError, match="not connected"):
        parse_graph(text)


def test_map_errors():
    text = dump_map(tent())
    jump = text.replace("to: '1'", "to: 3/4", 1)
    assert jump != text
    with pytest.raises(SpecError, match="jumps"):
        parse_map(jump)
    with pytest.raises(SpecError, match="schema"):
        parse_map(text.replace("puremix-map/1", "other/2"))
    with pytest.raises(SpecError, match="missing 'pieces'"):
        parse_map(text.split("pieces:")[0])


def test_parse_point():
    assert parse_point("2,3/4") == PointRef(2, Q(3, 4))
    with pytest.raises(SpecError):
        parse_point("half")


def test_certificate_documents():
    certs = [Certificate("mixing", "MIXING", True, "1/8", {"n0": 1, "p": PointRef(0, Q(1, 3))})]
    a, b = dump_certificates(certs, timestamp=False), dump_certificates(certs, timestamp=False)
    assert a == b and a.startswith("# generated -\n")
    stamped = dump_certificates(certs)
    assert stamped.splitlines()[1:] == a.splitlines()[1:]
    (doc,) = load_certificates(a)
    assert doc["verdict"] == "MIXING" and doc["witnesses"]["p"] == {"edge": 0, "param": "1/3"}
    with pytest.raises(SpecError):
        load_certificates("schema: nope\n")
