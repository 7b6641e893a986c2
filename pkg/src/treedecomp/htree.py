"""Decompose a graph with m*h edges into m copies of a fixed tree H.

Pipeline: feasible partition -> feasible orientation -> random matchings at
every vertex (the class set L*) -> bad-edge mending by descendent swaps.
All slot indices are 0-based; slot ``i`` holds the image of edge ``e_i`` of
the rooted tree and ``rt.parent[i]`` is its parent slot.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .graph import Edge, Graph, canon
from .trees import RootedTree, Tree, descendents, root_at_leaf

log = logging.getLogger(__name__)

Arc = Tuple[int, int]


class HTreeError(RuntimeError):
    stage = "engine"


class PartitionFailed(HTreeError):
    stage = "partition"


class OrientationFailed(HTreeError):
    stage = "orientation"

    def __init__(self, msg: str, slot: int = -1, witness: Sequence[int] = ()):
        super().__init__(msg)
        self.slot = slot
        self.witness = tuple(witness)


class MendStuck(HTreeError):
    stage = "mend"


class DecompositionFailed(HTreeError):
    stage = "decompose"

    def __init__(self, msg: str, histogram: Optional[Dict[str, int]] = None):
        super().__init__(msg)
        self.histogram = dict(histogram or {})


@dataclass
class EngineParams:
    """Knobs for :func:`decompose_H`.

    ``strict`` enforces the degree-balance bound of a feasible partition;
    otherwise balance is measured only.  ``rebalance`` runs pairwise Euler
    splits after the random assignment so per-vertex class degrees are within
    one or two of ``d(v)/h``.  ``relaxed_mend`` lets the mending search fall
    back to any class meeting the vertex-disjointness requirement when no
    untouched class of the right color exists.
    """

    eps: float = 0.05
    strict: bool = False
    rebalance: bool = True
    relaxed_mend: bool = True
    retries: int = 16
    color_retries: int = 3
    matching_retries: int = 3
    partition_tries: int = 64


# --- Euler tours -------------------------------------------------------------

def euler_trails(n: int, edges: Sequence[Edge], rng: Optional[np.random.Generator] = None) -> List[List[Tuple[int, int, int]]]:
    """Split ``edges`` into trails ``[(edge_id, tail, head), ...]``.

    Odd-degree vertices are joined to a virtual vertex so every component
    has an Euler circuit; circuits are cut at the virtual edges.  Every
    vertex is then an endpoint of at most one trail per odd degree unit, so
    orienting along the trails gives ``|out - in| <= 1`` everywhere.
    """
    virtual = n
    deg = [0] * (n + 1)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    all_edges = list(edges) + [(v, virtual) for v in range(n) if deg[v] % 2]
    n_real = len(edges)
    adj: List[List[Tuple[int, int]]] = [[] for _ in range(n + 1)]
    for eid, (u, v) in enumerate(all_edges):
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    if rng is not None:
        for a in adj:
            if len(a) > 1:
                perm = rng.permutation(len(a))
                a[:] = [a[k] for k in perm]
    used = [False] * len(all_edges)
    ptr = [0] * (n + 1)
    trails: List[List[Tuple[int, int, int]]] = []
    starts = [virtual] + list(range(n))
    for s in starts:
        while ptr[s] < len(adj[s]) and used[adj[s][ptr[s]][1]]:
            ptr[s] += 1
        if ptr[s] == len(adj[s]):
            continue
        stack: List[Tuple[int, int]] = [(s, -1)]
        circuit: List[Tuple[int, int, int]] = []
        while stack:
            v, eid = stack[-1]
            a = adj[v]
            while ptr[v] < len(a) and used[a[ptr[v]][1]]:
                ptr[v] += 1
            if ptr[v] == len(a):
                stack.pop()
                if eid >= 0:
                    circuit.append((eid, stack[-1][0], v))
            else:
                w, e2 = a[ptr[v]]
                used[e2] = True
                stack.append((w, e2))
        circuit.reverse()
        cuts = [k for k, (eid, _, _) in enumerate(circuit) if eid >= n_real]
        if not cuts:
            trails.append(circuit)
            continue
        # rotate so the circuit starts just after a virtual edge
        first = cuts[0]
        rotated = circuit[first + 1:] + circuit[: first + 1]
        cur: List[Tuple[int, int, int]] = []
        for item in rotated:
            if item[0] >= n_real:
                if cur:
                    trails.append(cur)
                cur = []
            else:
                cur.append(item)
        if cur:
            trails.append(cur)
    return trails


def eulerian_orientation(edges: Sequence[Edge], n: Optional[int] = None, rng: Optional[np.random.Generator] = None) -> List[Arc]:
    """Orient ``edges`` so every vertex has ``|outdeg - indeg| <= 1``.

    The result is aligned with the input: entry k orients ``edges[k]``.
    """
    edges = [tuple(e) for e in edges]
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    out: List[Optional[Arc]] = [None] * len(edges)
    for trail in euler_trails(n, edges, rng):
        for eid, a, b in trail:
            out[eid] = (a, b)
    return out  # type: ignore[return-value]


def _euler_split(n: int, edges: Sequence[Edge], rng: np.random.Generator) -> Tuple[List[Edge], List[Edge]]:
    """Split edges into two halves of equal size with near-equal vertex degrees."""
    trails = euler_trails(n, edges, rng)
    odd = [k for k, t in enumerate(trails) if len(t) % 2]
    flip = set(rng.permutation(odd)[: len(odd) // 2].tolist()) if odd else set()
    a: List[Edge] = []
    b: List[Edge] = []
    for k, trail in enumerate(trails):
        for pos, (eid, _, _) in enumerate(trail):
            side = (pos % 2 == 0) != (k in flip)
            (a if side else b).append(edges[eid])
    return a, b


# --- feasible partition ---------------------------------------------------------

@dataclass
class FeasiblePartition:
    n: int
    h: int
    m: int
    classes: List[List[Edge]]
    attempts: int = 1

    def class_degrees(self, i: int) -> List[int]:
        d = [0] * self.n
        for u, v in self.classes[i]:
            d[u] += 1
            d[v] += 1
        return d

    def balance(self) -> float:
        """max over (v, i) of |d_i(v) - d(v)/h| / (d(v)/h^2); 0 for edgeless graphs."""
        per = [self.class_degrees(i) for i in range(self.h)]
        total = [sum(col) for col in zip(*per)] if per else []
        worst = 0.0
        for v, d in enumerate(total):
            if d == 0:
                continue
            for i in range(self.h):
                worst = max(worst, abs(per[i][v] - d / self.h) / (d / self.h ** 2))
        return worst


def feasible_partition(
    g: Graph,
    h: int,
    rng: np.random.Generator,
    eps: float = 0.05,
    strict: bool = False,
    rebalance: bool = True,
    max_tries: int = 64,
) -> FeasiblePartition:
    """Random h-way split of E(G) into classes of exactly m = e(G)/h edges.

    Every edge draws label 0 with probability n^{-1/2} and one of 1..h
    uniformly otherwise; label-0 edges then top up each class to exactly m.
    The assignment is redrawn whenever some class already exceeds m.
    """
    if h < 1:
        raise ValueError("h must be positive")
    if g.m % h:
        raise ValueError(f"e(G)={g.m} is not divisible by h={h}")
    m = g.m // h
    n = g.n
    beta = n ** -0.5 if n > 1 else 0.0
    probs = np.full(h + 1, (1.0 - beta) / h)
    probs[0] = beta
    edges = list(g.edges)
    for attempt in range(1, max_tries + 1):
        labels = rng.choice(h + 1, size=len(edges), p=probs)
        sizes = np.bincount(labels, minlength=h + 1)
        if (sizes[1:] > m).any():
            continue
        classes: List[List[Edge]] = [[] for _ in range(h)]
        spare: List[Edge] = []
        for e, lab in zip(edges, labels.tolist()):
            if lab:
                classes[lab - 1].append(e)
            else:
                spare.append(e)
        order = rng.permutation(len(spare)).tolist()
        pos = 0
        for c in classes:
            need = m - len(c)
            c.extend(spare[k] for k in order[pos:pos + need])
            pos += need
        part = FeasiblePartition(n, h, m, classes, attempt)
        if rebalance and h > 1:
            _rebalance(part, rng)
        if strict and part.balance() > eps:
            continue
        return part
    raise PartitionFailed(f"no admissible partition after {max_tries} draws")


def _rebalance(part: FeasiblePartition, rng: np.random.Generator, rounds: Optional[int] = None) -> None:
    h = part.h
    if rounds is None:
        rounds = 2 * int(np.ceil(np.log2(h))) + 2
    for _ in range(rounds):
        order = rng.permutation(h).tolist()
        for a, b in zip(order[0::2], order[1::2]):
            merged = part.classes[a] + part.classes[b]
            part.classes[a], part.classes[b] = _euler_split(part.n, merged, rng)


# --- feasible orientation -------------------------------------------------------

@dataclass
class FeasibleOrientation:
    n: int
    rt: RootedTree
    arcs: List[List[Arc]]  # arcs[i] = E*_i

    def outdeg(self, i: int) -> List[int]:
        d = [0] * self.n
        for a, _ in self.arcs[i]:
            d[a] += 1
        return d

    def indeg(self, i: int) -> List[int]:
        d = [0] * self.n
        for _, b in self.arcs[i]:
            d[b] += 1
        return d


def orient_with_outdegrees(
    n: int,
    edges: Sequence[Edge],
    cap: Sequence[int],
    rng: np.random.Generator,
) -> List[Arc]:
    """Orient ``edges`` so that vertex v has outdegree exactly ``cap[v]``.

    This is a perfect matching between edges and the ``cap[v]`` copies of
    each vertex v; it starts from a balanced Euler orientation and repairs it
    with augmenting paths.  Raises :class:`OrientationFailed` carrying the
    vertex set of a Hall violation.
    """
    m = len(edges)
    if sum(cap) != m:
        raise OrientationFailed(f"outdegree targets sum to {sum(cap)}, need {m}")
    tail = [-1] * m
    load = [0] * n
    owned: List[Set[int]] = [set() for _ in range(n)]
    init = eulerian_orientation(edges, n, rng)
    for eid in rng.permutation(m).tolist():
        a, b = init[eid]
        for x in (a, b):
            if load[x] < cap[x]:
                tail[eid] = x
                load[x] += 1
                owned[x].add(eid)
                break
    for e0 in range(m):
        if tail[e0] >= 0:
            continue
        u0, v0 = edges[e0]
        pred: Dict[int, Tuple[int, int]] = {u0: (e0, -1), v0: (e0, -1)}
        frontier = [u0, v0]
        hit = -1
        k = 0
        while k < len(frontier):
            x = frontier[k]
            k += 1
            if load[x] < cap[x]:
                hit = x
                break
            for e in owned[x]:
                a, b = edges[e]
                y = b if a == x else a
                if y not in pred:
                    pred[y] = (e, x)
                    frontier.append(y)
        if hit < 0:
            raise OrientationFailed("Hall condition violated", witness=sorted(pred))
        x = hit
        while True:
            e, prev = pred[x]
            tail[e] = x
            owned[x].add(e)
            load[x] += 1
            if prev < 0:
                break
            owned[prev].discard(e)
            load[prev] -= 1
            x = prev
    arcs: List[Arc] = []
    for eid, (u, v) in enumerate(edges):
        arcs.append((u, v) if tail[eid] == u else (v, u))
    return arcs


def feasible_orientation(part: FeasiblePartition, rt: RootedTree, rng: np.random.Generator) -> FeasibleOrientation:
    """E*_0 is Eulerian; slot i gets outdegree d^-_{p(i)}(v) at every v."""
    if rt.h != part.h:
        raise ValueError("rooted tree and partition disagree on h")
    n = part.n
    arcs: List[List[Arc]] = [eulerian_orientation(part.classes[0], n, rng)]
    indegs: List[List[int]] = []
    d = [0] * n
    for _, b in arcs[0]:
        d[b] += 1
    indegs.append(d)
    for i in range(1, part.h):
        target = indegs[rt.parent[i]]
        assert sum(target) == part.m
        try:
            oriented = orient_with_outdegrees(n, part.classes[i], target, rng)
        except OrientationFailed as exc:
            raise OrientationFailed(f"slot {i}: {exc}", slot=i, witness=exc.witness) from None
        out = [0] * n
        ind = [0] * n
        for a, b in oriented:
            out[a] += 1
            ind[b] += 1
        assert out == target, "outdegree identity broken"
        arcs.append(oriented)
        indegs.append(ind)
    return FeasibleOrientation(n, rt, arcs)


# --- class set ------------------------------------------------------------------

def bad_flags(slots: Sequence[Arc]) -> List[bool]:
    """Slot i is bad when its head already appears among slots 0..i-1."""
    seen = {slots[0][0], slots[0][1]}
    flags = [False]
    for a, b in slots[1:]:
        flags.append(b in seen)
        seen.add(b)
    return flags


def class_vertices(slots: Sequence[Arc]) -> Set[int]:
    out = {slots[0][0]}
    for _, b in slots:
        out.add(b)
    return out


@dataclass
class ClassSet:
    """The m homomorphic copies of H(q): ``slots[k][i]`` is class k's E*_i arc."""

    n: int
    rt: RootedTree
    slots: List[List[Arc]]

    @property
    def m(self) -> int:
        return len(self.slots)

    def bad(self, k: int) -> List[bool]:
        return bad_flags(self.slots[k])

    def bad_count(self) -> int:
        return sum(sum(bad_flags(s)) for s in self.slots)

    def is_tree(self, k: int) -> bool:
        return len(class_vertices(self.slots[k])) == self.rt.h + 1

    def homomorphic(self, k: int) -> bool:
        s = self.slots[k]
        return all(s[i][0] == s[self.rt.parent[i]][1] for i in range(1, self.rt.h))

    def matching(self, i: int, v: int) -> List[Tuple[Arc, Arc]]:
        """Pairs (parent-slot arc into v, slot-i arc out of v) realised by the classes."""
        p = self.rt.parent[i]
        return [(s[p], s[i]) for s in self.slots if s[i][0] == v]

    def copy(self) -> "ClassSet":
        return ClassSet(self.n, self.rt, [list(s) for s in self.slots])


def build_class_set(orient: FeasibleOrientation, rng: np.random.Generator) -> ClassSet:
    """Pair D^-_{p(i)}(v) with D^+_i(v) by a uniform random matching for all v, i."""
    rt = orient.rt
    n = orient.n
    slots: List[List[Arc]] = [[arc] for arc in orient.arcs[0]]
    for i in range(1, rt.h):
        p = rt.parent[i]
        waiting: List[List[int]] = [[] for _ in range(n)]
        for k, s in enumerate(slots):
            waiting[s[p][1]].append(k)
        leaving: List[List[Arc]] = [[] for _ in range(n)]
        for arc in orient.arcs[i]:
            leaving[arc[0]].append(arc)
        for v in range(n):
            ks, arcs = waiting[v], leaving[v]
            if len(ks) != len(arcs):
                raise AssertionError(f"slot {i} vertex {v}: |D^-_p|={len(ks)} != |D^+_i|={len(arcs)}")
            if len(arcs) > 1:
                perm = rng.permutation(len(arcs)).tolist()
                arcs = [arcs[j] for j in perm]
            for k, arc in zip(ks, arcs):
                slots[k].append(arc)
    return ClassSet(n, rt, slots)


# --- diagnostics ----------------------------------------------------------------

@dataclass
class Diagnostics:
    max_n: int  # max over (v, i, j) of |N(v,i,j)|
    max_l: Optional[int]  # max over pairs of |L([u,j],[v,i])|, None when skipped
    bad_edges: int


def n_counts(cs: ClassSet) -> Counter:
    """|N(v,i,j)| for every triple with a nonzero count (i <= j)."""
    cnt: Counter = Counter()
    for s in cs.slots:
        flags = bad_flags(s)
        for j, f in enumerate(flags):
            if f:
                for i in range(j + 1):
                    cnt[(s[i][0], i, j)] += 1
    return cnt


def _markers(s: Sequence[Arc]) -> List[Tuple[int, int]]:
    # (index, vertex) with index 0 standing for D^+_1 at the root and
    # index i+1 for D^-_{i} (heads of slot i)
    return [(0, s[0][0])] + [(i + 1, s[i][1]) for i in range(len(s))]


def l_count(cs: ClassSet, u: int, j: int, v: int, i: int) -> int:
    """|L([u,j],[v,i])| with 1-based slot indices and j = 0 meaning D^+_1(u)."""
    if i == j:
        return 0 if u != v else sum(1 for s in cs.slots if (i, u) in _markers(s))
    lo, hi = sorted(((j, u), (i, v)))
    total = 0
    for s in cs.slots:
        mk = _markers(s)
        if mk[lo[0]][1] == lo[1] and mk[hi[0]][1] == hi[1]:
            total += 1
    return total


def l_counts(cs: ClassSet) -> Counter:
    cnt: Counter = Counter()
    for s in cs.slots:
        mk = _markers(s)
        for a in range(len(mk)):
            for b in range(a + 1, len(mk)):
                cnt[(mk[a], mk[b])] += 1
    return cnt


def diagnostics(cs: ClassSet, max_n_for_l: int = 500) -> Diagnostics:
    nc = n_counts(cs)
    max_l = None
    if cs.n <= max_n_for_l:
        lc = l_counts(cs)
        max_l = max(lc.values(), default=0)
    return Diagnostics(max(nc.values(), default=0), max_l, cs.bad_count())


def color_coverage(cs: ClassSet, colors: Sequence[int]) -> float:
    """min over (v, i) with d^+_i(v) > 0 of c(v,i) / (d^+_i(v)/(h+1))."""
    h = cs.rt.h
    dplus: Counter = Counter()
    hits: Counter = Counter()
    for k, s in enumerate(cs.slots):
        for i, (a, _) in enumerate(s):
            dplus[(a, i)] += 1
            if colors[k] == i:
                hits[(a, i)] += 1
    return min((hits[key] * (h + 1) / d for key, d in dplus.items()), default=float("inf"))


# --- mending --------------------------------------------------------------------

@dataclass
class MendStats:
    initial_bad: int = 0
    swaps: int = 0
    fallback_swaps: int = 0
    plateau_moves: int = 0
    bad_trace: List[int] = field(default_factory=list)


def mend(
    cs: ClassSet,
    rng: np.random.Generator,
    relaxed: bool = True,
    stats: Optional[MendStats] = None,
    plateau_limit: int = 64,
) -> ClassSet:
    """Swap descendent subtrees until no class has a bad edge.

    Works on a copy.  Each step takes the largest slot i holding a bad edge
    (v, w) in some class A, finds a class B whose slot-i arc also leaves v,
    that was never touched, carries color i, and shares no vertex with A
    except v, and exchanges the slot-i descendent parts of A and B.

    ``relaxed`` widens the search when no such B exists: first to any class
    whose slot-i arc leaves v and avoids A's other vertices, then to any
    swap involving a bad class that is checked to lower the bad-edge count.  If
    none lowers it, up to ``plateau_limit`` count-preserving swaps are taken
    to leave the plateau; those are tallied apart and never enter
    ``bad_trace``.
    """
    cs = cs.copy()
    rt = cs.rt
    h = rt.h
    stats = stats if stats is not None else MendStats()
    desc = [sorted(descendents(rt, i)) for i in range(h)]
    color = rng.integers(0, h, size=cs.m).tolist()
    flags = [bad_flags(s) for s in cs.slots]
    bad_at: List[Set[int]] = [set() for _ in range(h)]
    for k, f in enumerate(flags):
        for i, x in enumerate(f):
            if x:
                bad_at[i].add(k)
    total_bad = sum(len(b) for b in bad_at)
    stats.initial_bad = total_bad
    stats.bad_trace.append(total_bad)
    untouched = [True] * cs.m
    colored: Dict[Tuple[int, int], Set[int]] = {}
    color_key = [(color[k], s[color[k]][0]) for k, s in enumerate(cs.slots)]
    for k, key in enumerate(color_key):
        colored.setdefault(key, set()).add(k)
    by_tail: Dict[Tuple[int, int], Set[int]] = {}
    if relaxed:
        for k, s in enumerate(cs.slots):
            for i, (a, _) in enumerate(s):
                by_tail.setdefault((i, a), set()).add(k)

    def retire(k: int) -> None:
        if untouched[k]:
            untouched[k] = False
            colored[color_key[k]].discard(k)

    def pick(pool, alpha: int, forbid: Set[int]) -> int:
        cands = [k for k in pool if k != alpha]
        if len(cands) > 1:
            cands = [cands[x] for x in rng.permutation(len(cands)).tolist()]
        for k in cands:
            if not (class_vertices(cs.slots[k]) & forbid):
                return k
        return -1

    def swap(alpha: int, beta: int, i: int) -> int:
        """Exchange the slot-i descendent parts; return the change in bad edges."""
        sa, sb = cs.slots[alpha], cs.slots[beta]
        if relaxed:
            for j in desc[i]:
                by_tail[(j, sa[j][0])].discard(alpha)
                by_tail[(j, sb[j][0])].discard(beta)
        for j in desc[i]:
            sa[j], sb[j] = sb[j], sa[j]
        if relaxed:
            for j in desc[i]:
                by_tail.setdefault((j, sa[j][0]), set()).add(alpha)
                by_tail.setdefault((j, sb[j][0]), set()).add(beta)
        before = sum(flags[alpha]) + sum(flags[beta])
        for k in (alpha, beta):
            flags[k] = bad_flags(cs.slots[k])
            for j in range(h):
                if flags[k][j]:
                    bad_at[j].add(k)
                else:
                    bad_at[j].discard(k)
        return sum(flags[alpha]) + sum(flags[beta]) - before

    def trial_swap() -> Tuple[int, int, int]:
        # any swap in a bad class that lowers the count; the swap is an involution
        neutral = []
        bad_classes = sorted(set().union(*bad_at))
        for i in range(h - 1, -1, -1):
            for alpha in bad_classes:
                v = cs.slots[alpha][i][0]
                pool = [k for k in by_tail.get((i, v), ()) if k != alpha]
                for x in rng.permutation(len(pool)).tolist():
                    beta = pool[x]
                    delta = swap(alpha, beta, i)
                    if delta < 0:
                        return alpha, beta, delta
                    swap(alpha, beta, i)
                    if delta == 0:
                        neutral.append((alpha, beta, i))
        if neutral and stats.plateau_moves < plateau_limit:
            # sideways step off a plateau; it does not count as a mending swap
            alpha, beta, i = neutral[int(rng.integers(len(neutral)))]
            swap(alpha, beta, i)
            stats.plateau_moves += 1
            return alpha, beta, 0
        return -1, -1, 0

    i = h - 1
    budget = total_bad
    while total_bad:
        while not bad_at[i]:
            i -= 1
        alpha = min(bad_at[i])
        sa = cs.slots[alpha]
        v, _ = sa[i]
        forbid = class_vertices(sa) - {v}
        beta = pick(colored.get((i, v), ()), alpha, forbid)
        fallback = False
        if beta < 0 and relaxed:
            beta = pick(by_tail.get((i, v), ()), alpha, forbid)
            fallback = beta >= 0
        if beta >= 0:
            retire(alpha)
            retire(beta)
            delta = swap(alpha, beta, i)
            assert delta < 0, "swap did not reduce the bad-edge count"
        elif relaxed:
            alpha, beta, delta = trial_swap()
            if alpha < 0:
                raise MendStuck(f"no improving swap left ({total_bad} bad edges)")
            retire(alpha)
            retire(beta)
            i = h - 1
            if delta == 0:
                continue
            fallback = True
        else:
            raise MendStuck(f"no partner for slot {i} at vertex {v} ({total_bad} bad edges left)")
        assert cs.homomorphic(alpha) and cs.homomorphic(beta)
        total_bad += delta
        stats.swaps += 1
        stats.fallback_swaps += fallback
        stats.bad_trace.append(total_bad)
        budget -= 1
        if budget < 0:
            raise AssertionError("mending exceeded its iteration budget")
    return cs


# --- driver ---------------------------------------------------------------------

@dataclass
class HStats:
    attempts: int = 0
    histogram: Counter = field(default_factory=Counter)
    balance: List[float] = field(default_factory=list)
    mend: List[MendStats] = field(default_factory=list)
    diagnostics: List[Diagnostics] = field(default_factory=list)


Trace = Optional[Callable[[str], None]]


def _emit(trace: Trace, stage: str, attempt: int, ok: bool, detail: str) -> None:
    line = f"stage={stage} attempt={attempt} status={'ok' if ok else 'fail'} detail={detail}"
    log.debug(line)
    if trace is not None:
        trace(line)


def decompose_H(
    g: Graph,
    tree: Tree,
    params: Optional[EngineParams] = None,
    rng=None,
    trace: Trace = None,
    stats: Optional[HStats] = None,
) -> List[List[Edge]]:
    """Split E(G) into e(G)/e(tree) copies of ``tree``.

    Each returned class lists the G-edges aligned with ``tree.edges``: entry
    j is the image of tree edge j.
    """
    params = params or EngineParams()
    rng = np.random.default_rng(rng)
    stats = stats if stats is not None else HStats()
    h = tree.h
    if g.m % h:
        raise ValueError(f"e(G)={g.m} is not divisible by e(H)={h}")
    if g.m == 0:
        return []
    if h == 1:
        return [[e] for e in g.edges]
    rt = root_at_leaf(tree)
    for attempt in range(1, params.retries + 1):
        stats.attempts = attempt
        try:
            part = feasible_partition(g, h, rng, params.eps, params.strict, params.rebalance, params.partition_tries)
            stats.balance.append(part.balance())
            _emit(trace, "partition", attempt, True, f"m={part.m} draws={part.attempts} balance={stats.balance[-1]:.3f}")
            orient = feasible_orientation(part, rt, rng)
            _emit(trace, "orientation", attempt, True, f"h={h}")
            mended = None
            for mround in range(params.matching_retries):
                cs = build_class_set(orient, rng)
                for cround in range(params.color_retries):
                    ms = MendStats()
                    try:
                        mended = mend(cs, rng, params.relaxed_mend, ms)
                    except MendStuck as exc:
                        stats.histogram["mend"] += 1
                        _emit(trace, "mend", attempt, False, f"matchings={mround} colors={cround} {exc}")
                        continue
                    stats.mend.append(ms)
                    _emit(trace, "mend", attempt, True, f"bad={ms.initial_bad} swaps={ms.swaps} fallback={ms.fallback_swaps}")
                    break
                if mended is not None:
                    break
            if mended is None:
                continue
        except PartitionFailed as exc:
            stats.histogram["partition"] += 1
            _emit(trace, "partition", attempt, False, str(exc))
            continue
        except OrientationFailed as exc:
            stats.histogram["orientation"] += 1
            _emit(trace, "orientation", attempt, False, f"{exc} witness_size={len(exc.witness)}")
            continue
        out: List[List[Edge]] = []
        for s in mended.slots:
            cls: List[Optional[Edge]] = [None] * h
            for i, (a, b) in enumerate(s):
                cls[rt.base_index[i]] = canon(a, b)
            out.append(cls)  # type: ignore[arg-type]
        return out
    raise DecompositionFailed(
        f"H-decomposition failed after {params.retries} attempts: {dict(stats.histogram)}",
        stats.histogram,
    )
