from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treedecomp.graph import (
    Color,
    Graph,
    GraphFormatError,
    color_randomly,
    connected_components,
    format_graph,
    gen_colored_gnp,
    gen_gnp,
    in_count,
    out_count,
    parse_graph,
    peel_to_min_degree,
    read_graph,
    write_graph,
)

from oracles import complete_graph, petersen


@st.composite
def graphs(draw, max_n=9, colored=False):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [e for e, k in zip(pairs, keep) if k]
    colors = None
    if colored:
        reds = draw(st.lists(st.booleans(), min_size=len(edges), max_size=len(edges)))
        colors = {e: Color.RED if r else Color.BLUE for e, r in zip(edges, reds)}
    return Graph(n, edges, colors)


def test_graph_rejects_loops_duplicates_and_range():
    with pytest.raises(ValueError):
        Graph(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 3)])


def test_gnp_extremes():
    g = gen_gnp(5, 0.0, 3)
    assert g.n == 5 and g.m == 0
    k4 = gen_gnp(4, 1.0, 3)
    assert k4.m == 6


def test_gnp_edge_count_near_mean():
    g = gen_gnp(1000, 0.01, 7)
    pairs = 1000 * 999 // 2
    mean, sd = 0.01 * pairs, math.sqrt(0.01 * 0.99 * pairs)
    assert abs(g.m - mean) <= 5 * sd


def test_gnp_reproducible():
    assert gen_gnp(60, 0.2, 11) == gen_gnp(60, 0.2, 11)
    assert gen_gnp(60, 0.2, 11) != gen_gnp(60, 0.2, 12)


def test_colored_gnp():
    assert gen_colored_gnp(10, 0.0, 1).m == 0
    g3 = gen_colored_gnp(3, 1.0, 5)
    assert g3.m == 3 and all(g3.color(*e) in (Color.RED, Color.BLUE) for e in g3.edges)
    g = gen_colored_gnp(500, 0.1, 1)
    red, blue = g.red(), g.blue()
    assert red.edge_set() | blue.edge_set() == g.edge_set()
    assert not red.edge_set() & blue.edge_set()
    frac = red.m / g.m
    sd = math.sqrt((1 / 15) * (14 / 15) / g.m)
    assert abs(frac - 1 / 15) <= 5 * sd


def test_color_randomly_keeps_edges():
    g = gen_gnp(40, 0.3, 2)
    c = color_randomly(g, 9)
    assert c.uncolored() == g and c.is_colored


def test_out_and_in_examples():
    k4 = complete_graph(4)
    assert out_count(k4, {0}) == 3
    assert in_count(k4, range(4)) == 6
    assert in_count(k4, {0, 1}) == 1
    path = Graph(3, [(0, 1), (1, 2)])
    assert out_count(path, {1}) == 2
    assert out_count(petersen(), range(5)) == 5
    tri_pendant = Graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert in_count(tri_pendant, {0, 1, 2}) == 3
    with pytest.raises(ValueError):
        out_count(k4, set())


def test_color_filter():
    g = Graph(3, [(0, 1), (1, 2)], {(0, 1): Color.RED, (1, 2): Color.BLUE})
    assert out_count(g, {1}, Color.RED) == 1
    assert out_count(g, {1}, Color.BLUE) == 1
    assert in_count(g, {0, 1}, Color.BLUE) == 0


@given(graphs(), st.data())
def test_handshake_identity(g, data):
    xs = data.draw(st.sets(st.integers(0, g.n - 1), min_size=1))
    assert 2 * in_count(g, xs) + out_count(g, xs) == sum(g.degree(v) for v in xs)


def test_peel_examples():
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    assert peel_to_min_degree(star, 2).m == 0
    k4 = complete_graph(4)
    assert peel_to_min_degree(k4, 3) == k4
    tri_pendant = Graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert peel_to_min_degree(tri_pendant, 2).edge_set() == {(0, 1), (1, 2), (0, 2)}
    assert peel_to_min_degree(k4, 3, forbidden=[(0, 1)]).m == 0


@given(graphs(max_n=10), st.integers(0, 5))
def test_peel_properties(g, d):
    core = peel_to_min_degree(g, d)
    assert core.edge_set() <= g.edge_set()
    assert all(core.degree(v) >= d for v in range(core.n) if core.degree(v))
    assert peel_to_min_degree(core, d) == core


@given(graphs(max_n=10, colored=True))
def test_edge_list_round_trip(g):
    text = format_graph(g)
    back = parse_graph(text)
    # an edgeless graph carries no color tags, so only the edge sets can agree
    assert back == g if g.m else back.uncolored() == g.uncolored()
    assert format_graph(parse_graph(text)) == text


def test_uncolored_round_trip_and_files(tmp_path):
    g = gen_gnp(20, 0.3, 4)
    path = tmp_path / "g.txt"
    write_graph(g, path)
    assert read_graph(path) == g
    assert path.read_text().splitlines()[0] == f"20 {g.m}"


@pytest.mark.parametrize(
    "text",
    ["", "3\n", "3 1\n0 0\n", "3 2\n0 1\n", "3 1\n0 5\n", "3 2\n0 1 r\n1 2\n", "3 1\n0 1 g\n", "a b\n"],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_components():
    comps = connected_components(5, [(0, 1), (3, 4)])
    assert sorted(map(sorted, comps)) == [[0, 1], [2], [3, 4]]


@settings(max_examples=25)
@given(st.integers(2, 40), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_colored_gnp_partition_property(n, p, seed):
    g = gen_colored_gnp(n, p, np.random.default_rng(seed))
    assert g.red().m + g.blue().m == g.m
