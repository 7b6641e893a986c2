"""Undirected simple graphs, G(n, p) generators and structural queries."""

from __future__ import annotations

import enum
import math
from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

Edge = Tuple[int, int]


class Color(enum.Enum):
    RED = "r"
    BLUE = "b"


class GraphFormatError(ValueError):
    pass


def canon(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    Edges are stored as canonical ``(min, max)`` pairs in insertion order,
    plus adjacency lists and a set for O(1) membership.  ``colors`` is either
    ``None`` or a dict mapping every canonical edge to a :class:`Color`.
    """

    __slots__ = ("n", "edges", "colors", "_adj", "_edge_set")

    def __init__(
        self,
        n: int,
        edges: Iterable[Sequence[int]] = (),
        colors: Optional[Dict[Edge, Color]] = None,
    ):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        canon_edges: List[Edge] = []
        seen: Set[Edge] = set()
        adj: List[List[int]] = [[] for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            e = canon(u, v)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            canon_edges.append(e)
            adj[u].append(v)
            adj[v].append(u)
        if colors is not None:
            colors = {canon(*e): Color(c) for e, c in colors.items()}
            if set(colors) != seen:
                raise ValueError("colors must cover exactly the edge set")
        self.n = n
        self.edges: Tuple[Edge, ...] = tuple(canon_edges)
        self.colors = colors
        self._adj = tuple(tuple(a) for a in adj)
        self._edge_set: FrozenSet[Edge] = frozenset(seen)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_colored(self) -> bool:
        return self.colors is not None

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> List[int]:
        return [len(a) for a in self._adj]

    def has_edge(self, u: int, v: int) -> bool:
        return canon(u, v) in self._edge_set

    def edge_set(self) -> FrozenSet[Edge]:
        return self._edge_set

    def color(self, u: int, v: int) -> Optional[Color]:
        if self.colors is None:
            return None
        return self.colors[canon(u, v)]

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def min_degree(self) -> int:
        return min((len(a) for a in self._adj), default=0)

    def isolated_vertices(self) -> List[int]:
        return [v for v in range(self.n) if not self._adj[v]]

    def spanning(self, edges: Iterable[Sequence[int]], keep_colors: bool = True) -> "Graph":
        """Spanning subgraph on the same vertex set with the given edges."""
        edges = [canon(*e) for e in edges]
        colors = None
        if keep_colors and self.colors is not None:
            colors = {e: self.colors[e] for e in edges}
        return Graph(self.n, edges, colors)

    def color_class(self, color: Color) -> "Graph":
        if self.colors is None:
            raise ValueError("graph is not colored")
        return self.spanning([e for e in self.edges if self.colors[e] is color])

    def red(self) -> "Graph":
        return self.color_class(Color.RED)

    def blue(self) -> "Graph":
        return self.color_class(Color.BLUE)

    def uncolored(self) -> "Graph":
        return Graph(self.n, self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self._edge_set == other._edge_set
            and self.colors == other.colors
        )

    def __hash__(self) -> int:
        return hash((self.n, self._edge_set))

    def __repr__(self) -> str:
        tag = ", colored" if self.colors is not None else ""
        return f"Graph(n={self.n}, m={self.m}{tag})"


def _sample_pairs(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli(p) trial on every unordered pair; returns kept pairs."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    iu, iv = np.triu_indices(n, k=1)
    keep = rng.random(iu.shape[0]) < p
    return np.stack([iu[keep], iv[keep]], axis=1)


def gen_gnp(n: int, p: float, seed=None) -> Graph:
    """Erdos-Renyi G(n, p). ``seed`` may be an int or a numpy Generator."""
    rng = np.random.default_rng(seed)
    pairs = _sample_pairs(n, p, rng)
    return Graph(n, pairs.tolist())


def gen_colored_gnp(n: int, p: float, seed=None) -> Graph:
    """Two-colored G(n, p): each pair is red w.p. p/15, blue w.p. 14p/15."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    if n < 2:
        return Graph(n, [], {})
    iu, iv = np.triu_indices(n, k=1)
    x = rng.random(iu.shape[0])
    red = x < p / 15.0
    present = x < p
    edges = np.stack([iu[present], iv[present]], axis=1).tolist()
    red_flags = red[present].tolist()
    colors = {(u, v): Color.RED if r else Color.BLUE for (u, v), r in zip(edges, red_flags)}
    return Graph(n, edges, colors)


def color_randomly(g: Graph, seed=None, red_fraction: float = 1.0 / 15.0) -> Graph:
    """Color an uncolored graph, each edge red independently w.p. ``red_fraction``."""
    rng = np.random.default_rng(seed)
    flags = rng.random(g.m) < red_fraction
    colors = {e: Color.RED if f else Color.BLUE for e, f in zip(g.edges, flags.tolist())}
    return Graph(g.n, g.edges, colors)


def _check_subset(g: Graph, x: Iterable[int]) -> Set[int]:
    xs = set(x)
    for v in xs:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} not in graph")
    return xs


def _color_ok(g: Graph, e: Edge, color_filter: Optional[Color]) -> bool:
    if color_filter is None:
        return True
    if g.colors is None:
        raise ValueError("color filter given for an uncolored graph")
    return g.colors[e] is color_filter


def out_count(g: Graph, x: Iterable[int], color_filter: Optional[Color] = None) -> int:
    """Number of edges with exactly one endpoint in ``x``."""
    xs = _check_subset(g, x)
    if not xs:
        raise ValueError("out_count is undefined for an empty vertex set")
    total = 0
    for u in xs:
        for v in g.neighbors(u):
            if v not in xs and _color_ok(g, canon(u, v), color_filter):
                total += 1
    return total


def in_count(g: Graph, x: Iterable[int], color_filter: Optional[Color] = None) -> int:
    """Number of edges with both endpoints in ``x``."""
    xs = _check_subset(g, x)
    total = 0
    for u in xs:
        for v in g.neighbors(u):
            if u < v and v in xs and _color_ok(g, (u, v), color_filter):
                total += 1
    return total


def core_adjacency(adj: Dict[int, Set[int]], d: int) -> Dict[int, Set[int]]:
    """Peel a mutable adjacency map down to its d-core (returns a new map)."""
    adj = {v: set(nb) for v, nb in adj.items()}
    queue = deque(v for v, nb in adj.items() if len(nb) < d)
    dead: Set[int] = set(queue)
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            nb = adj[u]
            nb.discard(v)
            if u not in dead and len(nb) < d:
                dead.add(u)
                queue.append(u)
        adj[v] = set()
    return {v: nb for v, nb in adj.items() if v not in dead}


def peel_to_min_degree(g: Graph, d: int, forbidden: Iterable[Sequence[int]] = ()) -> Graph:
    """The d-core of ``g`` minus ``forbidden``, as a spanning subgraph (possibly empty)."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    banned = {canon(*e) for e in forbidden}
    adj: Dict[int, Set[int]] = {v: set() for v in range(g.n)}
    for u, v in g.edges:
        if (u, v) not in banned:
            adj[u].add(v)
            adj[v].add(u)
    core = core_adjacency(adj, d)
    kept = [e for e in g.edges if e[0] in core and e[1] in core[e[0]]]
    return g.spanning(kept)


def connected_components(n: int, edges: Iterable[Edge]) -> List[List[int]]:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups: Dict[int, List[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


def log_n(n: int) -> float:
    """Natural log used for every ``C log n`` scale (ln 1 = 0 is clamped to 1)."""
    return math.log(n) if n > 2 else 1.0


# --- edge-list text format -------------------------------------------------

def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    for u, v in g.edges:
        if g.colors is None:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{u} {v} {g.colors[(u, v)].value}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise GraphFormatError("empty graph file")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
    except (ValueError, IndexError) as exc:
        raise GraphFormatError(f"bad header line: {' '.join(rows[0])!r}") from exc
    if len(rows[0]) != 2:
        raise GraphFormatError("header must be 'n m'")
    body = rows[1:]
    if len(body) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(body)}")
    edges: List[Edge] = []
    colors: Dict[Edge, Color] = {}
    n_colored = 0
    for row in body:
        if len(row) not in (2, 3):
            raise GraphFormatError(f"bad edge line: {' '.join(row)!r}")
        try:
            u, v = int(row[0]), int(row[1])
        except ValueError as exc:
            raise GraphFormatError(f"bad edge line: {' '.join(row)!r}") from exc
        edges.append((u, v))
        if len(row) == 3:
            if row[2] not in ("r", "b"):
                raise GraphFormatError(f"bad color {row[2]!r}")
            colors[canon(u, v)] = Color(row[2])
            n_colored += 1
    if n_colored not in (0, m):
        raise GraphFormatError("either all edges or none must carry a color")
    try:
        return Graph(n, edges, colors if n_colored else None)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))
