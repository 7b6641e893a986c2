"""Trees, rooted orientations, concatenation, canonical codes and greedy embedding."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .graph import Edge, Graph, canon, core_adjacency


class TreeFormatError(ValueError):
    pass


class Tree:
    """A tree on vertices ``0..k-1`` given by its ``k-1`` edges."""

    __slots__ = ("k", "edges", "_adj")

    def __init__(self, k: int, edges: Iterable[Sequence[int]]):
        edges = [(int(u), int(v)) for u, v in edges]
        if k < 2:
            raise ValueError("a tree needs at least one edge")
        if len(edges) != k - 1:
            raise ValueError(f"a tree on {k} vertices has {k - 1} edges, got {len(edges)}")
        adj: List[List[int]] = [[] for _ in range(k)]
        for u, v in edges:
            if u == v or not (0 <= u < k and 0 <= v < k):
                raise ValueError(f"bad tree edge ({u},{v})")
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != k:
            raise ValueError("edges do not form a connected acyclic graph")
        self.k = k
        self.edges: Tuple[Edge, ...] = tuple(edges)
        self._adj = tuple(tuple(sorted(a)) for a in adj)

    @property
    def h(self) -> int:
        return self.k - 1

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def max_degree(self) -> int:
        return max(len(a) for a in self._adj)

    def leaves(self) -> List[int]:
        return [v for v in range(self.k) if len(self._adj[v]) == 1]

    def relabel(self, perm: Sequence[int]) -> "Tree":
        return Tree(self.k, [(perm[u], perm[v]) for u, v in self.edges])

    def __repr__(self) -> str:
        return f"Tree(k={self.k}, edges={list(self.edges)})"


def path_tree(h: int) -> Tree:
    """Path with ``h`` edges."""
    return Tree(h + 1, [(i, i + 1) for i in range(h)])


def star_tree(t: int) -> Tree:
    """Star K_{1,t} with center 0."""
    return Tree(t + 1, [(0, i) for i in range(1, t + 1)])


def tree_by_name(name: str) -> Tree:
    """``K2``, ``P<h>`` (path with h edges) or ``K1<t>`` / ``K1,<t>`` (star)."""
    s = name.strip().upper().replace("_", "").replace("{", "").replace("}", "")
    if s == "K2":
        return path_tree(1)
    m = re.fullmatch(r"P(\d+)", s)
    if m:
        return path_tree(int(m.group(1)))
    m = re.fullmatch(r"K1,?(\d+)", s)
    if m:
        return star_tree(int(m.group(1)))
    raise ValueError(f"unknown tree name {name!r}")


# --- rooted orientation ------------------------------------------------------

@dataclass(frozen=True)
class RootedTree:
    """Tree rooted at a leaf with edges e_0..e_{h-1} in BFS discovery order.

    Indices are 0-based: ``parent[i]`` is the index of the edge entering the
    tail of ``edges[i]`` (``None`` for ``i == 0``) and ``base_index[i]`` is the
    position of that edge in ``base.edges``.
    """

    base: Tree
    root: int
    edges: Tuple[Edge, ...]
    parent: Tuple[Optional[int], ...]
    base_index: Tuple[int, ...]
    children: Tuple[Tuple[int, ...], ...] = field(repr=False)

    @property
    def h(self) -> int:
        return len(self.edges)


def root_at_leaf(tree: Tree, q: Optional[int] = None) -> RootedTree:
    """Orient ``tree`` away from leaf ``q`` (default: lowest-id leaf) by BFS."""
    if q is None:
        q = min(tree.leaves())
    if not 0 <= q < tree.k or tree.degree(q) != 1:
        raise ValueError(f"root {q} is not a leaf")
    index_of = {canon(u, v): i for i, (u, v) in enumerate(tree.edges)}
    edges: List[Edge] = []
    parent: List[Optional[int]] = []
    base_index: List[int] = []
    entering: Dict[int, Optional[int]] = {q: None}
    queue = deque([q])
    while queue:
        x = queue.popleft()
        for y in tree.neighbors(x):
            if y in entering:
                continue
            entering[y] = len(edges)
            parent.append(entering[x])
            edges.append((x, y))
            base_index.append(index_of[canon(x, y)])
            queue.append(y)
    children: List[List[int]] = [[] for _ in edges]
    for i, p in enumerate(parent):
        if p is not None:
            children[p].append(i)
    return RootedTree(
        base=tree,
        root=q,
        edges=tuple(edges),
        parent=tuple(parent),
        base_index=tuple(base_index),
        children=tuple(tuple(c) for c in children),
    )


def descendents(rt: RootedTree, i: int) -> Set[int]:
    """Indices j with j == i or parent[j] a descendent of i (0-based)."""
    if not 0 <= i < rt.h:
        raise IndexError(i)
    out = {i}
    stack = [i]
    while stack:
        j = stack.pop()
        for c in rt.children[j]:
            out.add(c)
            stack.append(c)
    return out


# --- canonical codes -----------------------------------------------------------

def centroids(tree: Tree) -> List[int]:
    k = tree.k
    order: List[int] = []
    par = [-1] * k
    seen = [False] * k
    seen[0] = True
    stack = [0]
    while stack:
        x = stack.pop()
        order.append(x)
        for y in tree.neighbors(x):
            if not seen[y]:
                seen[y] = True
                par[y] = x
                stack.append(y)
    size = [1] * k
    for x in reversed(order):
        if par[x] >= 0:
            size[par[x]] += size[x]
    best: List[int] = []
    best_val = k + 1
    for x in range(k):
        worst = k - size[x]
        for y in tree.neighbors(x):
            if y != par[x]:
                worst = max(worst, size[y])
        if worst < best_val:
            best, best_val = [x], worst
        elif worst == best_val:
            best.append(x)
    return best


def rooted_code(tree: Tree, root: int) -> bytes:
    """AHU parenthesis code of ``tree`` rooted at ``root``."""
    par = {root: -1}
    order = [root]
    for x in order:
        for y in tree.neighbors(x):
            if y not in par:
                par[y] = x
                order.append(y)
    kids: Dict[int, List[bytes]] = {x: [] for x in order}
    code: Dict[int, bytes] = {}
    for x in reversed(order):
        code[x] = b"(" + b"".join(sorted(kids[x])) + b")"
        if par[x] >= 0:
            kids[par[x]].append(code[x])
    return code[root]


def ahu_canonical(tree: Tree) -> bytes:
    """Isomorphism-invariant code: smallest rooted code over the centroids."""
    return min(rooted_code(tree, c) for c in centroids(tree))


def canonical_centroid(tree: Tree) -> int:
    return min(centroids(tree), key=lambda c: (rooted_code(tree, c), c))


# --- concatenation ---------------------------------------------------------

@dataclass(frozen=True)
class Concatenation:
    """Result of gluing trees at one vertex each.

    ``origin[j] = (part, edge)`` names the input part and its edge index
    that became edge ``j`` of ``tree``.
    """

    tree: Tree
    origin: Tuple[Tuple[int, int], ...]
    n_parts: int

    def split(self, edges: Sequence) -> List[List]:
        """Split per-edge data aligned with ``tree.edges`` back into the parts."""
        out: List[List] = [[] for _ in range(self.n_parts)]
        for (part, _), item in zip(self.origin, edges):
            out[part].append(item)
        return out


def concatenate(parts: Sequence[Tuple[Tree, Optional[int]]]) -> Concatenation:
    """Identify one chosen vertex of every part; merged vertex becomes 0.

    An attach vertex of ``None`` selects the part's canonical centroid.
    """
    if not parts:
        raise ValueError("nothing to concatenate")
    edges: List[Edge] = []
    origin: List[Tuple[int, int]] = []
    next_id = 1
    for pi, (tree, attach) in enumerate(parts):
        if attach is None:
            attach = canonical_centroid(tree)
        if not 0 <= attach < tree.k:
            raise ValueError(f"attach vertex {attach} not in part {pi}")
        label = {}
        for v in range(tree.k):
            if v == attach:
                label[v] = 0
            else:
                label[v] = next_id
                next_id += 1
        for ei, (u, v) in enumerate(tree.edges):
            edges.append((label[u], label[v]))
            origin.append((pi, ei))
    return Concatenation(Tree(next_id, edges), tuple(origin), len(parts))


# --- parent-array file format ----------------------------------------------

def parse_tree_line(line: str) -> Tree:
    toks = line.split()
    try:
        nums = [int(t) for t in toks]
    except ValueError as exc:
        raise TreeFormatError(f"bad tree line {line!r}") from exc
    if not nums:
        raise TreeFormatError("empty tree line")
    k = nums[0]
    if len(nums) != k:
        raise TreeFormatError(f"tree on {k} vertices needs {k - 1} parents")
    try:
        return Tree(k, [(j, nums[j]) for j in range(1, k)])
    except ValueError as exc:
        raise TreeFormatError(str(exc)) from exc


def format_tree_line(tree: Tree) -> str:
    par = [-1] * tree.k
    par[0] = 0
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y in tree.neighbors(x):
            if par[y] < 0:
                par[y] = x
                queue.append(y)
    return " ".join(str(x) for x in [tree.k] + par[1:])


def parse_family(text: str) -> List[Tree]:
    trees = [parse_tree_line(ln) for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not trees:
        raise TreeFormatError("family file holds no trees")
    return trees


def format_family(trees: Sequence[Tree]) -> str:
    return "".join(format_tree_line(t) + "\n" for t in trees)


def read_family(path) -> List[Tree]:
    with open(path) as fh:
        return parse_family(fh.read())


def write_family(trees: Sequence[Tree], path) -> None:
    with open(path, "w") as fh:
        fh.write(format_family(trees))


# --- greedy embedding --------------------------------------------------------

def _bfs_plan(tree: Tree) -> Tuple[int, List[int], List[int]]:
    """Root at a max-degree vertex; return (root, BFS order, parent)."""
    root = max(range(tree.k), key=lambda v: (tree.degree(v), -v))
    par = [-1] * tree.k
    order = [root]
    seen = {root}
    for x in order:
        for y in sorted(tree.neighbors(x), key=lambda y: -tree.degree(y)):
            if y not in seen:
                seen.add(y)
                par[y] = x
                order.append(y)
    return root, order, par


def _greedy_once(
    adj: Dict[int, Set[int]],
    tree: Tree,
    plan: Tuple[int, List[int], List[int]],
    starts: List[int],
    rng: np.random.Generator,
    capacity: Optional[Sequence[int]],
) -> Optional[List[Edge]]:
    root, order, par = plan
    need = [tree.degree(x) for x in range(tree.k)]

    def fits(v: int, x: int) -> bool:
        if len(adj.get(v, ())) < need[x]:
            return False
        return capacity is None or capacity[v] >= need[x]

    start = None
    for v in starts:
        if fits(v, root):
            start = v
            break
    if start is None:
        return None
    image = {root: start}
    used = {start}
    out: List[Edge] = []
    for x in order[1:]:
        px = image[par[x]]
        cands = [y for y in adj[px] if y not in used and fits(y, x)]
        if not cands:
            return None
        # prefer roomy vertices, random tie-breaking among the top few
        if len(cands) > 4:
            idx = rng.choice(len(cands), size=4, replace=False)
            cands = [cands[i] for i in idx]
        y = max(cands, key=lambda y: len(adj[y]))
        image[x] = y
        used.add(y)
        out.append(canon(px, y))
    return out


def embed_in_adjacency(
    adj: Dict[int, Set[int]],
    tree: Tree,
    rng: np.random.Generator,
    attempts: int = 32,
    capacity: Optional[Sequence[int]] = None,
    use_core: bool = True,
) -> Optional[List[Edge]]:
    """Find a copy of ``tree`` in the available-edge adjacency ``adj``.

    Up to ``attempts`` randomized greedy passes; if they all fail, falls back
    to the (e(tree))-core, where greedy placement cannot get stuck.  Vertices
    with ``capacity[v] < deg`` are never used for a tree vertex of degree
    ``deg``.  ``adj`` is not modified.
    """
    plan = _bfs_plan(tree)
    verts = [v for v, nb in adj.items() if nb]
    if not verts:
        return None
    for _ in range(attempts):
        k = min(len(verts), 16)
        idx = rng.choice(len(verts), size=k, replace=False)
        starts = sorted((verts[i] for i in idx), key=lambda v: -len(adj[v]))
        got = _greedy_once(adj, tree, plan, starts, rng, capacity)
        if got is not None:
            return got
    if not use_core:
        return None
    sub = adj
    if capacity is not None:
        dmax = tree.max_degree()
        ok = {v for v in adj if capacity[v] >= dmax}
        sub = {v: {u for u in nb if u in ok} for v, nb in adj.items() if v in ok}
    core = core_adjacency(sub, tree.h)
    if not core:
        return None
    starts = sorted(core, key=lambda v: -len(core[v]))
    return _greedy_once(core, tree, plan, starts, rng, None)


def embed_tree(
    g: Graph,
    tree: Tree,
    forbidden: Iterable[Sequence[int]] = (),
    seed=None,
    attempts: int = 32,
) -> Optional[List[Edge]]:
    """Edges of a subgraph of ``g - forbidden`` isomorphic to ``tree``, or None.

    None only means this strategy found nothing; it does not prove that no
    copy exists.
    """
    rng = np.random.default_rng(seed)
    banned = {canon(*e) for e in forbidden}
    adj: Dict[int, Set[int]] = {v: set() for v in range(g.n)}
    for u, v in g.edges:
        if (u, v) not in banned:
            adj[u].add(v)
            adj[v].add(u)
    return embed_in_adjacency(adj, tree, rng, attempts)
