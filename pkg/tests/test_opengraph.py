from __future__ import annotations

import itertools
import json
import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DEMO_GRAPHS, six_vertex, grid, open_graphs, path
from gflowkit import census
from gflowkit.opengraph import GraphError, OpenGraph, ParseError, load, parse, to_dot
from oracles import odd_by_counting

FIG1_TEXT = """
# six-vertex equiprobable graph without gflow
vertices: v1 v2 v3 v4 v5 v6
edge: v1 v2
edge: v1 v6
edge: v2 v6
edge: v2 v5
edge: v6 v4
edge: v3 v4
edge: v3 v5
edge: v4 v5
inputs: v1
outputs: v5 v6
"""


def test_parse_six_vertex_graph():
    og = parse(FIG1_TEXT)
    assert og.n == 6 and og.num_edges() == 8
    assert og.names(og.inputs) == ["v1"] and og.names(og.outputs) == ["v5", "v6"]
    assert og == six_vertex()


def test_parse_trivial_graph():
    og = parse("vertices: v1\ninputs: v1\noutputs: v1\n")
    assert og.n == 1 and og.num_edges() == 0
    assert og.inputs == og.outputs == 1


@pytest.mark.parametrize(
    "text, lineno, fragment",
    [
        ("edge: v1 v1", 1, "self-loop"),
        ("edge: v1 v2\nedge: v2 v1", 2, "duplicate edge"),
        ("edge: v1 v2\ninputs: v9", 2, "unknown vertex"),
        ("vertices: a b\nedge: a c", 2, "unknown vertex"),
        ("edge v1 v2", 1, "expected"),
        ("edge: v1", 1, "two endpoints"),
        ("colour: red", 1, "unknown key"),
        ("edge: a b\ninputs: a\ninputs: b", 3, "duplicate"),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno, fragment):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.lineno == lineno
    assert fragment in str(err.value)


def test_parse_orders_labels_naturally_without_vertices_line():
    og = parse("edge: v10 v2\nedge: v2 v1")
    assert og.labels == ("v1", "v2", "v10")


def test_parse_warns_above_soft_cap():
    text = "\n".join(f"edge: a{i} a{i + 1}" for i in range(40))
    with pytest.warns(UserWarning, match="soft cap"):
        parse(text)


def test_construction_rejects_bad_adjacency():
    with pytest.raises(GraphError):
        OpenGraph(("a", "b"), (0b10, 0))
    with pytest.raises(GraphError):
        OpenGraph(("a",), (0b1,))
    with pytest.raises(GraphError):
        OpenGraph(("a",), (0,), inputs=0b10)


def test_odd_examples():
    assert six_vertex().odd(0) == 0
    p = path(3)
    assert p.odd(0b010) == 0b101
    og = six_vertex()
    # v2 and v6 are adjacent, so each lies in the odd neighbourhood of the pair
    s = og.mask(["v2", "v6"])
    assert og.names(og.odd(s)) == ["v2", "v4", "v5", "v6"]
    assert og.odd(s) == odd_by_counting(og, s)


def test_local_set_examples():
    p = path(3)
    assert p.local_set(0) == 0
    assert p.local_set(0b010) == 0b111


def test_induced_matrix_examples():
    p = path(2)
    m = p.induced_matrix()
    assert m.to_lists() == [[1]] and m.row_labels == (0,) and m.col_labels == (1,)
    og = six_vertex()
    m = og.induced_matrix()
    assert m.shape == (4, 5)
    assert [og.labels[i] for i in m.row_labels] == ["v1", "v2", "v3", "v4"]
    assert [og.labels[i] for i in m.col_labels] == ["v2", "v3", "v4", "v5", "v6"]


def test_odd_is_linear_exhaustive_small():
    for og in census.atlas(5):
        for a, b in itertools.product(range(1 << og.n), repeat=2):
            assert og.odd(a ^ b) == og.odd(a) ^ og.odd(b)


@settings(max_examples=60)
@given(open_graphs(max_n=20, io=False), st.data())
def test_odd_is_linear_random(og, data):
    a = data.draw(st.integers(0, og.full))
    b = data.draw(st.integers(0, og.full))
    assert og.odd(a ^ b) == og.odd(a) ^ og.odd(b)
    assert og.odd(a) == odd_by_counting(og, a)


@given(open_graphs(max_n=7), st.data())
def test_local_set_contains_set(og, data):
    w = data.draw(st.integers(0, og.full))
    assert og.local_set(w) & w == w


@given(open_graphs(max_n=7), st.data())
def test_induced_matrix_is_odd_map(og, data):
    m = og.induced_matrix()
    w = data.draw(st.integers(0, og.full)) & og.non_outputs
    # w as a column vector over the O^C ordering, read back over I^C
    x = sum(1 << j for j, v in enumerate(m.row_labels) if (w >> v) & 1)
    from gflowkit import gf2

    y = gf2.transpose(m).matvec(x)
    image = sum(1 << v for j, v in enumerate(m.col_labels) if (y >> j) & 1)
    assert image == og.odd(w) & og.non_inputs


def test_io_extension_path():
    ext = path(2).io_extension()
    assert ext.labels == ("v1", "v2", "v1'", "v2'")
    assert sorted((ext.labels[a], ext.labels[b]) for a, b in ext.edges()) == [
        ("v1", "v1'"),
        ("v1", "v2"),
        ("v2", "v2'"),
    ]
    assert ext.names(ext.inputs) == ["v1'"] and ext.names(ext.outputs) == ["v2'"]


def test_io_extension_without_io_is_identity():
    og = grid()
    assert og.io_extension() == og


def test_io_extension_avoids_label_clash():
    og = OpenGraph.from_edges(["a", "a'"], [("a", "a'")], ["a"], [])
    assert og.io_extension().labels == ("a", "a'", "a''")


@given(open_graphs(max_n=7))
def test_io_extension_counts_and_interior(og):
    ext = og.io_extension()
    assert ext.n == og.n + og.inputs.bit_count() + og.outputs.bit_count()
    interior = og.full & ~(og.inputs | og.outputs)
    assert ext.subgraph(interior).adj == og.subgraph(interior).adj
    for v in range(og.n, ext.n):
        assert ext.degree(v) == 1


def test_overlapping_io_extension():
    og = OpenGraph.from_edges(2, [(0, 1)], [0], [0])
    ext = og.io_extension()
    assert ext.n == 4 and ext.degree(0) == 3


def test_to_dot_single_vertex():
    dot = to_dot(OpenGraph.from_edges(1, []))
    assert dot.startswith("graph G {") and dot.rstrip().endswith("}")
    assert dot.count('"v1"') == 1


def test_to_dot_conventions():
    og = grid().with_io(0b000011, 0b110000)
    dot = to_dot(og)
    assert len(re.findall(r"shape=box", dot)) == 2
    assert len(re.findall(r"fillcolor=white", dot)) == 2


def test_to_dot_highlight_arcs():
    dot = to_dot(path(2), {0: 0b10})
    assert '"v1" -- "v2" [dir=forward, color=red' in dot


@given(open_graphs(max_n=8))
def test_text_round_trip(og):
    assert parse(og.dumps()) == og


@given(open_graphs(max_n=8))
def test_json_round_trip(og):
    data = json.loads(og.to_json())
    assert set(data) == {"n", "labels", "edges", "inputs", "outputs"}
    assert OpenGraph.from_json(og.to_json()) == og


def test_load_text_and_json(tmp_path):
    og = load(DEMO_GRAPHS / "equi_no_gflow.txt")
    assert og == six_vertex()
    p = tmp_path / "g.json"
    p.write_text(og.to_json())
    assert load(p) == og
    p.write_text("{")
    with pytest.raises(ParseError):
        load(p)


def test_mask_and_names():
    og = six_vertex()
    assert og.names(og.mask(["v6", "v1"])) == ["v1", "v6"]
    with pytest.raises(GraphError):
        og.mask([17])
    with pytest.raises(GraphError):
        og.index("nope")


def test_subgraph_keeps_io():
    og = six_vertex()
    sub = og.subgraph(og.mask(["v1", "v2", "v5"]))
    assert sub.labels == ("v1", "v2", "v5")
    assert sub.names(sub.inputs) == ["v1"] and sub.names(sub.outputs) == ["v5"]


def test_edges_within_random():
    rng = random.Random(1)
    for _ in range(50):
        og = OpenGraph.from_edges(6, [(a, b) for a in range(6) for b in range(a + 1, 6) if rng.random() < 0.5])
        s = rng.getrandbits(6)
        assert og.edges_within(s) == sum(1 for a, b in og.edges() if (s >> a) & 1 and (s >> b) & 1)
