"""Slow, obviously-correct reference routines used only by the tests."""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from treedecomp.graph import Graph, canon
from treedecomp.trees import Tree


def prufer_decode(seq: Sequence[int], k: int) -> List[Tuple[int, int]]:
    degree = [1] * k
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(k) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [w for w in range(k) if degree[w] == 1]
    edges.append((u, v))
    return edges


def all_labeled_trees(k: int):
    """Every labeled tree on k >= 2 vertices, via Prufer sequences."""
    if k == 2:
        yield Tree(2, [(0, 1)])
        return
    for seq in itertools.product(range(k), repeat=k - 2):
        yield Tree(k, prufer_decode(seq, k))


def random_tree(k: int, rng: np.random.Generator) -> Tree:
    if k == 2:
        return Tree(2, [(0, 1)])
    return Tree(k, prufer_decode(rng.integers(0, k, size=k - 2).tolist(), k))


def shuffled(tree: Tree, rng: np.random.Generator) -> Tree:
    perm = rng.permutation(tree.k).tolist()
    return Tree(tree.k, [(perm[u], perm[v]) for u, v in tree.edges])


def brute_isomorphic(a: Tree, b: Tree) -> bool:
    """Backtracking search for a bijection V(a) -> V(b) preserving adjacency."""
    if a.k != b.k or sorted(a.degree(v) for v in range(a.k)) != sorted(b.degree(v) for v in range(b.k)):
        return False
    adj_a = [set(a.neighbors(v)) for v in range(a.k)]
    adj_b = [set(b.neighbors(v)) for v in range(b.k)]
    order = sorted(range(a.k), key=lambda v: -len(adj_a[v]))
    image: Dict[int, int] = {}
    taken: Set[int] = set()

    def go(pos: int) -> bool:
        if pos == len(order):
            return True
        x = order[pos]
        for y in range(b.k):
            if y in taken or len(adj_b[y]) != len(adj_a[x]):
                continue
            if all((image[z] in adj_b[y]) == (z in adj_a[x]) for z in image):
                image[x] = y
                taken.add(y)
                if go(pos + 1):
                    return True
                del image[x]
                taken.discard(y)
        return False

    return go(0)


def backtrack_embed(g: Graph, tree: Tree, forbidden=()) -> Optional[List[Tuple[int, int]]]:
    """Exhaustive search for a copy of ``tree`` in ``g`` minus ``forbidden``."""
    banned = {canon(*e) for e in forbidden}
    adj = [[u for u in g.neighbors(v) if canon(u, v) not in banned] for v in range(g.n)]
    order = [0]
    par = {0: None}
    for x in order:
        for y in tree.neighbors(x):
            if y not in par:
                par[y] = x
                order.append(y)
    image: Dict[int, int] = {}

    def go(pos: int) -> bool:
        if pos == len(order):
            return True
        x = order[pos]
        for y in adj[image[par[x]]]:
            if y not in image.values():
                image[x] = y
                if go(pos + 1):
                    return True
                del image[x]
        return False

    for v in range(g.n):
        image = {0: v}
        if go(1):
            return [canon(image[par[x]], image[x]) for x in order[1:]]
    return None


def complete_graph(n: int, colored: bool = False) -> Graph:
    from treedecomp.graph import Color

    edges = list(itertools.combinations(range(n), 2))
    colors = {e: Color.BLUE for e in edges} if colored else None
    return Graph(n, edges, colors)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)
