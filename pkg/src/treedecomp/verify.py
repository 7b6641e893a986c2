"""Independent certification of decompositions and brute-force ground truth.

Nothing here imports the decomposer; only the graph core and the canonical
tree code are shared.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .graph import Edge, Graph, canon
from .trees import Tree, ahu_canonical

PACKING_EDGE_LIMIT = 16
TOTAL_EDGE_LIMIT = 12

VIOLATION_KINDS = (
    "overlap",
    "coverage-gap",
    "wrong-size",
    "not-a-tree",
    "wrong-isomorphism-type",
    "count-mismatch",
)


class OracleGuardError(ValueError):
    """Instance is too large for exhaustive search."""


@dataclass(frozen=True)
class Violation:
    kind: str
    cls: Optional[int]
    edges: Tuple[Edge, ...] = ()
    detail: str = ""

    def render(self) -> str:
        cls = "-" if self.cls is None else str(self.cls)
        edges = ",".join(f"{u}-{v}" for u, v in self.edges)
        text = f"{self.kind}: class={cls} edges={edges}"
        return f"{text} ({self.detail})" if self.detail else text


def _as_tree(edges: Sequence[Edge]) -> Optional[Tree]:
    """Relabel an edge set to 0..k-1 and return it as a Tree if it is one."""
    verts = sorted({x for e in edges for x in e})
    if len(verts) != len(edges) + 1:
        return None
    label = {v: i for i, v in enumerate(verts)}
    parent = list(range(len(verts)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(label[u]), find(label[v])
        if ru == rv:
            return None
        parent[ru] = rv
    return Tree(len(verts), [(label[u], label[v]) for u, v in edges])


def verify_decomposition(
    g: Graph,
    family: Sequence[Tree],
    alpha: Sequence[int],
    classes: Sequence[Tuple[int, Sequence[Sequence[int]]]],
) -> List[Violation]:
    """Check ``classes`` (pairs of family index and edge list); empty list means ok."""
    out: List[Violation] = []
    codes = [ahu_canonical(t) for t in family]
    owner: Dict[Edge, int] = {}
    counts = [0] * len(family)
    for ci, (fi, raw) in enumerate(classes):
        edges = [canon(int(u), int(v)) for u, v in raw]
        if not 0 <= fi < len(family):
            out.append(Violation("count-mismatch", ci, tuple(edges), f"family index {fi} out of range"))
            continue
        counts[fi] += 1
        foreign = [e for e in edges if not g.has_edge(*e)]
        if foreign:
            out.append(Violation("coverage-gap", ci, tuple(foreign), "edge not in graph"))
        dup_inside = len(set(edges)) != len(edges)
        for e in set(edges):
            if e in owner:
                out.append(Violation("overlap", ci, (e,), f"also in class {owner[e]}"))
            else:
                owner[e] = ci
        if len(edges) != family[fi].h:
            out.append(Violation("wrong-size", ci, tuple(edges), f"expected {family[fi].h} edges"))
            continue
        tree = None if dup_inside else _as_tree(edges)
        if tree is None:
            out.append(Violation("not-a-tree", ci, tuple(edges)))
            continue
        if ahu_canonical(tree) != codes[fi]:
            out.append(Violation("wrong-isomorphism-type", ci, tuple(edges), f"not a copy of member {fi}"))
    missing = [e for e in g.edges if e not in owner]
    if missing:
        out.append(Violation("coverage-gap", None, tuple(missing), "edges not covered"))
    for fi, (have, want) in enumerate(zip(counts, alpha)):
        if have != want:
            out.append(Violation("count-mismatch", None, (), f"member {fi}: {have} classes, alpha={want}"))
    if len(alpha) != len(family):
        out.append(Violation("count-mismatch", None, (), "alpha length differs from family size"))
    return out


# --- brute force -----------------------------------------------------------

def tree_copies(g: Graph, tree: Tree) -> List[FrozenSet[Edge]]:
    """Every subgraph of ``g`` isomorphic to ``tree``, each listed once."""
    order = [0]
    par = {0: -1}
    for x in order:
        for y in tree.neighbors(x):
            if y not in par:
                par[y] = x
                order.append(y)
    found = set()

    def extend(pos: int, image: Dict[int, int], used: set) -> None:
        if pos == len(order):
            found.add(frozenset(canon(image[par[x]], image[x]) for x in order[1:]))
            return
        x = order[pos]
        for y in g.neighbors(image[par[x]]):
            if y not in used:
                image[x] = y
                used.add(y)
                extend(pos + 1, image, used)
                used.discard(y)
                del image[x]

    for v in range(g.n):
        extend(1, {order[0]: v}, {v})
    return sorted(found, key=lambda s: sorted(s))


def _masks(g: Graph, copies: Sequence[FrozenSet[Edge]]) -> List[int]:
    bit = {e: 1 << i for i, e in enumerate(g.edges)}
    return [sum(bit[e] for e in c) for c in copies]


def brute_force_packing(g: Graph, tree: Tree) -> int:
    """Exact maximum number of edge-disjoint copies of ``tree`` in ``g``."""
    if g.m > PACKING_EDGE_LIMIT:
        raise OracleGuardError(f"packing oracle limited to {PACKING_EDGE_LIMIT} edges, got {g.m}")
    h = tree.h
    masks = _masks(g, tree_copies(g, tree))
    containing: Dict[int, List[int]] = {}
    for i in range(g.m):
        b = 1 << i
        containing[b] = [mk for mk in masks if mk & b]

    @lru_cache(maxsize=None)
    def best(avail: int) -> int:
        if bin(avail).count("1") < h:
            return 0
        low = avail & -avail
        val = best(avail ^ low)
        cap = bin(avail).count("1") // h
        if val == cap:
            return val
        for mk in containing[low]:
            if mk & avail == mk:
                val = max(val, 1 + best(avail & ~mk))
                if val == cap:
                    break
        return val

    result = best((1 << g.m) - 1)
    assert result <= g.m // h
    return result


def brute_force_total(g: Graph, family: Sequence[Tree], alpha: Sequence[int]) -> bool:
    """Exact decision: can ``g`` be split into alpha_i copies of member i?"""
    if g.m > TOTAL_EDGE_LIMIT:
        raise OracleGuardError(f"total-decomposition oracle limited to {TOTAL_EDGE_LIMIT} edges, got {g.m}")
    if len(alpha) != len(family) or any(a < 0 for a in alpha):
        return False
    if sum(a * t.h for a, t in zip(alpha, family)) != g.m:
        return False
    member_masks = [_masks(g, tree_copies(g, t)) for t in family]

    @lru_cache(maxsize=None)
    def solve(avail: int, left: Tuple[int, ...]) -> bool:
        if avail == 0:
            return not any(left)
        low = avail & -avail
        for fi, need in enumerate(left):
            if need == 0:
                continue
            nxt = left[:fi] + (need - 1,) + left[fi + 1:]
            for mk in member_masks[fi]:
                if mk & low and mk & avail == mk and solve(avail & ~mk, nxt):
                    return True
        return False

    return solve((1 << g.m) - 1, tuple(alpha))
