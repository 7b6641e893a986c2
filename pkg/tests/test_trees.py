from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treedecomp.graph import Graph, canon, gen_gnp
from treedecomp.trees import (
    Tree,
    TreeFormatError,
    ahu_canonical,
    canonical_centroid,
    centroids,
    concatenate,
    descendents,
    embed_tree,
    format_family,
    parse_family,
    parse_tree_line,
    path_tree,
    read_family,
    root_at_leaf,
    star_tree,
    tree_by_name,
    write_family,
)
from treedecomp.verify import _as_tree

from oracles import all_labeled_trees, backtrack_embed, brute_isomorphic, complete_graph, random_tree, shuffled

seeds = st.integers(0, 2**32 - 1)


@st.composite
def trees(draw, min_k=2, max_k=10):
    k = draw(st.integers(min_k, max_k))
    return random_tree(k, np.random.default_rng(draw(seeds)))


def test_tree_validation():
    with pytest.raises(ValueError):
        Tree(1, [])
    with pytest.raises(ValueError):
        Tree(4, [(0, 1), (1, 2), (2, 0)])
    with pytest.raises(ValueError):
        Tree(3, [(0, 1)])


def test_named_trees():
    assert tree_by_name("K2").h == 1
    assert tree_by_name("P3").h == 3 and tree_by_name("P3").max_degree() == 2
    assert tree_by_name("K13").max_degree() == 3
    assert ahu_canonical(tree_by_name("K1,3")) == ahu_canonical(star_tree(3))
    with pytest.raises(ValueError):
        tree_by_name("Q7")


def test_root_at_leaf_path():
    rt = root_at_leaf(path_tree(2), 0)
    assert rt.edges == ((0, 1), (1, 2))
    assert rt.parent[1] == 0


def test_root_at_leaf_star():
    rt = root_at_leaf(star_tree(3), 1)
    assert rt.edges[0] == (1, 0)
    assert rt.edges[1][0] == 0 and rt.edges[2][0] == 0
    assert rt.parent[1] == rt.parent[2] == 0


def test_root_at_leaf_rejects_inner_vertex():
    with pytest.raises(ValueError):
        root_at_leaf(path_tree(2), 1)


def test_default_root_is_lowest_leaf():
    t = Tree(4, [(0, 1), (0, 2), (0, 3)])
    assert root_at_leaf(t).root == 1


@given(trees(), st.data())
def test_rooted_structure(tree, data):
    q = data.draw(st.sampled_from(tree.leaves()))
    rt = root_at_leaf(tree, q)
    assert rt.edges[0][0] == q
    heads = [b for _, b in rt.edges]
    assert sorted(heads + [q]) == list(range(tree.k))
    for i in range(1, tree.h):
        assert rt.parent[i] < i
        assert rt.edges[i][0] == rt.edges[rt.parent[i]][1]
    for i, j in enumerate(rt.base_index):
        assert canon(*rt.edges[i]) == canon(*tree.edges[j])


def test_descendents_examples():
    h = 5
    rt = root_at_leaf(path_tree(h), 0)
    assert descendents(rt, 0) == set(range(h))
    assert descendents(rt, h - 1) == {h - 1}
    star = root_at_leaf(star_tree(3), 1)
    assert descendents(star, 1) == {1}


@given(trees())
def test_descendents_closure(tree):
    rt = root_at_leaf(tree)
    for i in range(tree.h):
        d = descendents(rt, i)
        expect = {i}
        for j in range(i + 1, tree.h):
            if rt.parent[j] in expect:
                expect.add(j)
        assert d == expect


def test_concatenate_examples():
    k2 = tree_by_name("K2")
    c = concatenate([(k2, 0), (k2, 0)])
    assert ahu_canonical(c.tree) == ahu_canonical(path_tree(2))
    c = concatenate([(k2, 1)] * 5)
    assert ahu_canonical(c.tree) == ahu_canonical(star_tree(5))
    with pytest.raises(ValueError):
        concatenate([])


@given(st.lists(trees(max_k=6), min_size=1, max_size=5))
def test_concatenation_splits_back(parts):
    c = concatenate([(t, None) for t in parts])
    assert c.tree.h == sum(t.h for t in parts)
    pieces = c.split(list(c.tree.edges))
    for t, edges in zip(parts, pieces):
        rebuilt = _as_tree(edges)
        assert rebuilt is not None
        assert ahu_canonical(rebuilt) == ahu_canonical(t)


def test_ahu_examples():
    assert ahu_canonical(path_tree(3)) != ahu_canonical(star_tree(3))
    rng = np.random.default_rng(5)
    t = random_tree(8, rng)
    assert ahu_canonical(shuffled(t, rng)) == ahu_canonical(shuffled(t, rng))


def test_six_vertex_census():
    codes = {ahu_canonical(t) for t in all_labeled_trees(6)}
    assert len(codes) == 6


@pytest.mark.parametrize("k,classes", [(2, 1), (3, 1), (4, 2), (5, 3), (6, 6)])
def test_ahu_matches_brute_force_small(k, classes):
    groups = {}
    for t in all_labeled_trees(k):
        groups.setdefault(ahu_canonical(t), []).append(t)
    assert len(groups) == classes
    reps = [g[0] for g in groups.values()]
    for a, b in itertools.combinations(reps, 2):
        assert not brute_isomorphic(a, b)
    for members in groups.values():
        for t in members:
            assert brute_isomorphic(members[0], t)


@given(trees(max_k=9), trees(max_k=9))
def test_ahu_agrees_with_brute_force_random(a, b):
    assert (ahu_canonical(a) == ahu_canonical(b)) == brute_isomorphic(a, b)


@given(trees(), seeds)
def test_centroid_is_invariant(tree, seed):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(tree.k).tolist()
    moved = tree.relabel(perm)
    assert len(centroids(tree)) in (1, 2)
    assert perm[canonical_centroid(tree)] in centroids(moved)


def test_tree_line_format():
    t = parse_tree_line("4 0 0 0")
    assert ahu_canonical(t) == ahu_canonical(star_tree(3))
    with pytest.raises(TreeFormatError):
        parse_tree_line("4 0 0")
    with pytest.raises(TreeFormatError):
        parse_tree_line("3 0 x")
    with pytest.raises(TreeFormatError):
        parse_tree_line("3 2 1")


@given(st.lists(trees(), min_size=1, max_size=4))
def test_family_round_trip(fam):
    back = parse_family(format_family(fam))
    assert [ahu_canonical(t) for t in back] == [ahu_canonical(t) for t in fam]


def test_family_file(tmp_path):
    fam = [tree_by_name("K13"), tree_by_name("P3"), tree_by_name("K2")]
    path = tmp_path / "fam.txt"
    write_family(fam, path)
    assert [t.h for t in read_family(path)] == [3, 3, 1]
    assert parse_family("# comment\n2 0\n")[0].h == 1
    with pytest.raises(TreeFormatError):
        parse_family("# nothing\n")


def _check_embedding(g, tree, forbidden, got):
    banned = {canon(*e) for e in forbidden}
    assert len(got) == tree.h
    assert all(g.has_edge(*e) and canon(*e) not in banned for e in got)
    rebuilt = _as_tree(got)
    assert rebuilt is not None and ahu_canonical(rebuilt) == ahu_canonical(tree)


def test_embed_examples():
    k5 = complete_graph(5)
    got = embed_tree(k5, path_tree(3), seed=1)
    _check_embedding(k5, path_tree(3), (), got)
    tri = Graph(3, [(0, 1), (1, 2), (0, 2)])
    assert embed_tree(tri, star_tree(3), seed=1) is None


@settings(max_examples=60)
@given(st.integers(4, 12), st.floats(0.2, 1.0), trees(max_k=6), seeds)
def test_embed_matches_backtracking(n, p, tree, seed):
    g = gen_gnp(n, p, seed)
    forbidden = list(g.edges[::4])
    got = embed_tree(g, tree, forbidden, seed=seed)
    if got is not None:
        _check_embedding(g, tree, forbidden, got)
    rest = g.spanning([e for e in g.edges if e not in set(forbidden)])
    if rest.m and min(rest.degree(v) for v in range(n) if rest.degree(v)) >= tree.h and rest.m >= tree.h:
        # every non-isolated vertex has degree >= e(T): greedy must succeed
        assert got is not None
    if backtrack_embed(g, tree, forbidden) is None:
        assert got is None
