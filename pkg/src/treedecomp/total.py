"""Total decomposition of a red/blue colored graph into a prescribed tree multiset.

Rare family members are placed greedily on red edges; the rest are bundled
into one concatenated tree H.  A low-degree leftover graph G'' absorbs the
copies that do not fit a whole number of H's, and the remainder G* is split
into copies of H by the engine in :mod:`treedecomp.htree`.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .conditions import ConditionParams, ConditionReport, check_pipeline_conditions
from .graph import Color, Edge, Graph, canon, log_n
from .htree import DecompositionFailed, EngineParams, HStats, Trace, decompose_H
from .trees import Concatenation, Tree, concatenate, embed_in_adjacency

log = logging.getLogger(__name__)

PROVENANCE = ("greedy-red", "gpp", "htree")


class InfeasibleAlpha(ValueError):
    pass


class PhaseError(RuntimeError):
    phase = "pipeline"


class GreedyPhaseFailed(PhaseError):
    phase = "greedy-red"


class PlanFailed(PhaseError):
    phase = "plan"


class GppFailed(PhaseError):
    phase = "gpp"


class EngineFailed(PhaseError):
    phase = "htree"


class TotalDecompositionFailed(PhaseError):
    def __init__(self, msg: str, histogram: Dict[str, int]):
        super().__init__(msg)
        self.histogram = dict(histogram)
        self.phase = max(histogram, key=histogram.get) if histogram else "pipeline"


# --- decomposition container -------------------------------------------------------

@dataclass(frozen=True)
class DecompClass:
    family_index: int
    edges: Tuple[Edge, ...]
    provenance: str = "htree"

    def key(self):
        prov = PROVENANCE.index(self.provenance) if self.provenance in PROVENANCE else len(PROVENANCE)
        return (prov, self.family_index, min(self.edges) if self.edges else (-1, -1))


@dataclass
class Decomposition:
    k: int
    classes: List[DecompClass] = field(default_factory=list)

    def pairs(self) -> List[Tuple[int, Tuple[Edge, ...]]]:
        return [(c.family_index, c.edges) for c in self.classes]

    def counts(self) -> List[int]:
        cnt = Counter(c.family_index for c in self.classes)
        return [cnt[i] for i in range(self.k)]

    def sort(self) -> "Decomposition":
        self.classes.sort(key=DecompClass.key)
        return self

    def format(self) -> str:
        lines = [str(self.k)]
        for c in sorted(self.classes, key=DecompClass.key):
            flat = " ".join(f"{u} {v}" for u, v in c.edges)
            lines.append(f"{c.family_index} {len(c.edges)} {flat}".rstrip())
        return "\n".join(lines) + "\n"


class DecompositionFormatError(ValueError):
    pass


def parse_decomposition(text: str) -> Decomposition:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 1:
        raise DecompositionFormatError("first line must hold the family size")
    try:
        k = int(rows[0][0])
        classes = []
        for row in rows[1:]:
            nums = [int(x) for x in row]
            if len(nums) < 2 or len(nums) != 2 + 2 * nums[1]:
                raise DecompositionFormatError(f"bad class line {' '.join(row)!r}")
            edges = tuple(canon(nums[2 + 2 * j], nums[3 + 2 * j]) for j in range(nums[1]))
            classes.append(DecompClass(nums[0], edges, "file"))
    except ValueError as exc:
        if isinstance(exc, DecompositionFormatError):
            raise
        raise DecompositionFormatError(str(exc)) from exc
    return Decomposition(k, classes)


# --- parameters ----------------------------------------------------------------------

@dataclass
class TotalParams:
    """Pipeline settings.

    ``C`` is the scale in ``p = C log n / n``; it sets the G'' degree cap.
    Strict mode uses the published constants throughout (t-scale 2000c^2,
    cap 0.04 C log n) and fails where they cannot hold.  Relaxed mode picks
    the t-scale so that e(H) stays within ``h_max`` (default: average degree
    of G' over ``degree_per_slot``), clamps q so every b_i >= 0, and sizes
    the G'' cap from the leftover volume.
    """

    C: float = 8.0
    mode: str = "relaxed"
    t_scale: Optional[int] = None
    h_max: Optional[int] = None
    degree_per_slot: float = 6.0
    gpp_cap: Optional[int] = None
    retries: int = 8
    engine: EngineParams = field(default_factory=EngineParams)
    check_conditions: bool = False

    def __post_init__(self):
        if self.mode not in ("strict", "relaxed"):
            raise ValueError("mode must be 'strict' or 'relaxed'")
        if self.mode == "strict":
            self.engine.strict = True
            self.engine.relaxed_mend = False
            self.engine.rebalance = False

    @property
    def strict(self) -> bool:
        return self.mode == "strict"


@dataclass
class Plan:
    f1: List[int]
    f2: List[int]
    t: Dict[int, int] = field(default_factory=dict)
    h: int = 0
    q: int = 0
    b: Dict[int, int] = field(default_factory=dict)
    clamped: bool = False
    t_scale: int = 0
    e_prime: int = 0
    gpp_edges: int = 0
    gpp_cap: int = 0
    gpp_max_degree: int = 0


@dataclass
class TotalStats:
    attempts: int = 0
    histogram: Counter = field(default_factory=Counter)
    plans: List[Plan] = field(default_factory=list)
    conditions: Optional[ConditionReport] = None
    engine: HStats = field(default_factory=HStats)


# --- pipeline steps ------------------------------------------------------------------

def check_alpha(family: Sequence[Tree], alpha: Sequence[int], m: int) -> None:
    if len(alpha) != len(family):
        raise InfeasibleAlpha(f"alpha has {len(alpha)} entries for {len(family)} trees")
    if any(a < 0 for a in alpha):
        raise InfeasibleAlpha("alpha entries must be nonnegative")
    total = sum(a * t.h for a, t in zip(alpha, family))
    if total != m:
        raise InfeasibleAlpha(f"sum alpha_i h_i = {total} != e(G) = {m}")


def split_family(sizes: Sequence[int], alpha: Sequence[int], m: int) -> Tuple[List[int], List[int]]:
    """Members with alpha_i < m / (20 c^2) go to F1, the rest to F2."""
    c = sum(sizes)
    # alpha_i < m / (20 c^2)  <=>  20 c^2 alpha_i < m, kept in integers
    f1 = [i for i, a in enumerate(alpha) if 20 * c * c * a < m]
    f2 = [i for i in range(len(alpha)) if i not in f1]
    assert f2, "F2 cannot be empty for a feasible alpha"
    return f1, f2


def greedy_red_phase(
    red: Graph,
    tasks: Sequence[Tuple[int, Tree, int]],
    rng: np.random.Generator,
    attempts: int = 32,
) -> List[DecompClass]:
    """Place ``count`` edge-disjoint copies of each task tree on unused red edges."""
    need = sum(t.h * cnt for _, t, cnt in tasks)
    if need > red.m:
        raise GreedyPhaseFailed(f"{need} red edges needed, only {red.m} exist")
    adj: Dict[int, Set[int]] = {v: set(red.neighbors(v)) for v in range(red.n)}
    out: List[DecompClass] = []
    for fi, tree, cnt in sorted(tasks, key=lambda x: (-x[1].h, x[0])):
        for copy in range(cnt):
            got = embed_in_adjacency(adj, tree, rng, attempts)
            if got is None:
                raise GreedyPhaseFailed(f"no red copy of member {fi} (copy {copy + 1} of {cnt})")
            for u, v in got:
                adj[u].discard(v)
                adj[v].discard(u)
            out.append(DecompClass(fi, tuple(sorted(got)), "greedy-red"))
    return out


def compute_ti(alpha: Sequence[int], c: int, scale: Optional[int] = None, strict: bool = False) -> List[int]:
    """t_i = floor(scale * alpha_i / sum(alpha)), scale defaulting to 2000 c^2."""
    total = sum(alpha)
    if total == 0:
        raise ValueError("t_i undefined: alpha sums to zero")
    if scale is None:
        scale = 2000 * c * c
    t = [(scale * a) // total for a in alpha]
    if strict:
        for ti in t:
            if not 100 <= ti <= 2000 * c * c:
                raise PlanFailed(f"t_i={ti} outside [100, 2000c^2]")
    return t


def plan_q_b(e_prime: int, h: int, t: Sequence[int], alpha: Sequence[int], strict: bool = False) -> Tuple[int, List[int], bool]:
    """q = floor(0.99 |E'| / h) and b_i = alpha_i - t_i q.

    Strict mode insists on b_i >= 0; relaxed mode lowers q to
    min floor(alpha_i / t_i) when needed and reports the clamp.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    q = (99 * e_prime) // (100 * h)
    b = [a - ti * q for a, ti in zip(alpha, t)]
    clamped = False
    if any(x < 0 for x in b):
        if strict:
            raise PlanFailed(f"t_i q <= alpha_i violated: q={q}, t={list(t)}, alpha={list(alpha)}")
        q = min(a // ti for a, ti in zip(alpha, t) if ti > 0)
        b = [a - ti * q for a, ti in zip(alpha, t)]
        clamped = True
    return q, b, clamped


def _choose_relaxed_t(alpha: Sequence[int], sizes: Sequence[int], c: int, e_prime: int, h_max: int) -> Tuple[int, List[int], int, int, List[int], bool]:
    """Scan t-scales keeping e(H) <= h_max; keep the one leaving the smallest G''.

    Scales giving every member t_i >= 1 are preferred, so that H contains
    each tree of F2 as in the unrelaxed construction.
    """
    best = None
    total = sum(alpha)
    scale = 1
    while True:
        t = compute_ti(alpha, c, scale)
        h = sum(ti * hi for ti, hi in zip(t, sizes))
        if h > h_max and best is not None:
            break
        if h > 0:
            q, b, clamped = plan_q_b(e_prime, h, t, alpha)
            left = e_prime - q * h
            cand = (0 if min(t) > 0 else 1, left, h, scale, t, q, b, clamped)
            if best is None or cand[:3] < best[:3]:
                best = cand
        if scale > total * (max(h_max, 1) + 1):
            break
        scale += 1
    _, _, h, scale, t, q, b, clamped = best
    return scale, t, h, q, b, clamped


def build_gpp(
    gprime: Graph,
    b: Dict[int, int],
    trees: Dict[int, Tree],
    cap: int,
    rng: np.random.Generator,
    attempts: int = 32,
) -> Tuple[Graph, List[DecompClass]]:
    """Embed b_i copies of each tree, each inside the lower-degree half of G''.

    Trees are placed smallest first so the largest member is completed
    last; every vertex stays at G''-degree <= ``cap``.
    """
    need = sum(trees[i].h * b[i] for i in b)
    if need > gprime.m:
        raise GppFailed(f"G'' needs {need} edges, G' has {gprime.m}")
    n = gprime.n
    avail: Dict[int, Set[int]] = {v: set(gprime.neighbors(v)) for v in range(n)}
    gdeg = np.zeros(n, dtype=np.int64)
    half = math.ceil(n / 2)
    used: List[Edge] = []
    out: List[DecompClass] = []
    for fi in sorted(b, key=lambda i: (trees[i].h, i)):
        tree = trees[fi]
        for copy in range(b[fi]):
            order = np.lexsort((rng.random(n), gdeg))
            xs = order[:half].tolist()
            allowed = set(xs)
            sub = {v: avail[v] & allowed for v in xs}
            capacity = (cap - gdeg).tolist()
            got = embed_in_adjacency(sub, tree, rng, attempts, capacity=capacity)
            if got is None:
                raise GppFailed(f"no copy of member {fi} in the low-degree half (copy {copy + 1} of {b[fi]})")
            for u, v in got:
                avail[u].discard(v)
                avail[v].discard(u)
                gdeg[u] += 1
                gdeg[v] += 1
            used.extend(got)
            out.append(DecompClass(fi, tuple(sorted(got)), "gpp"))
    if len(gdeg) and gdeg.max() > cap:
        raise GppFailed(f"max degree {gdeg.max()} exceeds cap {cap}")
    return gprime.spanning(used), out


def _one_pass(
    g: Graph,
    family: Sequence[Tree],
    alpha: Sequence[int],
    params: TotalParams,
    rng: np.random.Generator,
    stats: TotalStats,
    trace: Trace,
) -> Decomposition:
    sizes = [t.h for t in family]
    c = sum(sizes)
    m = g.m
    f1, f2 = split_family(sizes, alpha, m)
    plan = Plan(f1=f1, f2=f2)
    stats.plans.append(plan)

    red = g.red()
    tasks = [(i, family[i], alpha[i]) for i in f1 if alpha[i] > 0]
    red_classes = greedy_red_phase(red, tasks, rng)
    used_red = {e for cl in red_classes for e in cl.edges}
    _emit(trace, "greedy-red", stats.attempts, True, f"F1={f1} copies={len(red_classes)}")

    gprime = g.spanning([e for e in g.edges if e not in used_red], keep_colors=False)
    e_prime = gprime.m
    plan.e_prime = e_prime
    assert e_prime == sum(alpha[i] * sizes[i] for i in f2)
    a2 = [alpha[i] for i in f2]
    s2 = [sizes[i] for i in f2]
    if sum(a2) == 0:
        return Decomposition(len(family), red_classes)

    if params.strict or params.t_scale is not None:
        t = compute_ti(a2, c, params.t_scale, strict=params.strict)
        h = sum(ti * hi for ti, hi in zip(t, s2))
        q, b, clamped = plan_q_b(e_prime, h, t, a2, strict=params.strict)
        plan.t_scale = params.t_scale or 2000 * c * c
    else:
        h_max = params.h_max
        if h_max is None:
            avg = 2 * e_prime / max(g.n, 1)
            h_max = max(max(s2), int(avg / params.degree_per_slot))
        plan.t_scale, t, h, q, b, clamped = _choose_relaxed_t(a2, s2, c, e_prime, h_max)
    plan.t = dict(zip(f2, t))
    plan.h, plan.q, plan.b, plan.clamped = h, q, dict(zip(f2, b)), clamped
    _emit(trace, "plan", stats.attempts, True, f"F2={f2} t={t} h={h} q={q} b={b} clamped={clamped}")

    parts: List[Tuple[Tree, Optional[int]]] = []
    part_member: List[int] = []
    for i, ti in zip(f2, t):
        for _ in range(ti):
            parts.append((family[i], None))
            part_member.append(i)
    concat: Optional[Concatenation] = concatenate(parts) if parts else None

    e_gpp = sum(bi * hi for bi, hi in zip(b, s2))
    plan.gpp_edges = e_gpp
    strict_cap = int(0.04 * params.C * log_n(g.n))
    if params.gpp_cap is not None:
        cap = params.gpp_cap
    elif params.strict:
        cap = strict_cap
    else:
        dmax = max(family[i].max_degree() for i in f2)
        cap = max(strict_cap, math.ceil(2 * e_gpp / max(g.n, 1)) + 2 * dmax + 2)
    plan.gpp_cap = cap
    gpp, gpp_classes = build_gpp(gprime, dict(zip(f2, b)), {i: family[i] for i in f2}, cap, rng)
    plan.gpp_max_degree = gpp.max_degree()
    _emit(trace, "gpp", stats.attempts, True, f"edges={gpp.m} max_degree={plan.gpp_max_degree} cap={cap}")

    gpp_edges = gpp.edge_set()
    gstar = gprime.spanning([e for e in gprime.edges if e not in gpp_edges], keep_colors=False)
    assert gstar.m == e_prime - gpp.m == q * h, "e(G*) must equal q*h"

    engine_classes: List[DecompClass] = []
    if q > 0:
        assert concat is not None
        try:
            copies = decompose_H(gstar, concat.tree, params.engine, rng, trace, stats.engine)
        except DecompositionFailed as exc:
            raise EngineFailed(str(exc)) from None
        if len(copies) != q:
            raise EngineFailed(f"engine returned {len(copies)} copies, expected {q}")
        for copy in copies:
            for pi, edges in enumerate(concat.split(copy)):
                engine_classes.append(DecompClass(part_member[pi], tuple(sorted(edges)), "htree"))
    _emit(trace, "htree", stats.attempts, True, f"copies={q}")
    return Decomposition(len(family), red_classes + gpp_classes + engine_classes)


def _emit(trace: Trace, stage: str, attempt: int, ok: bool, detail: str) -> None:
    line = f"stage={stage} attempt={attempt} status={'ok' if ok else 'fail'} detail={detail}"
    log.debug(line)
    if trace is not None:
        trace(line)


def decompose_total(
    g: Graph,
    family: Sequence[Tree],
    alpha: Sequence[int],
    params: Optional[TotalParams] = None,
    rng=None,
    trace: Trace = None,
    stats: Optional[TotalStats] = None,
) -> Decomposition:
    """Decompose ``g`` into alpha_i copies of ``family[i]`` for every i.

    Phase failures are retried with fresh randomness up to
    ``params.retries`` times before :class:`TotalDecompositionFailed`.
    """
    params = params or TotalParams()
    rng = np.random.default_rng(rng)
    stats = stats if stats is not None else TotalStats()
    if not g.is_colored:
        raise ValueError("decompose_total needs a red/blue colored graph")
    if not family:
        raise ValueError("empty family")
    check_alpha(family, alpha, g.m)
    if g.m == 0:
        return Decomposition(len(family))
    if params.check_conditions and g.n >= 2:
        stats.conditions = check_pipeline_conditions(
            g, ConditionParams(C=params.C, mode=params.mode, family_total=sum(t.h for t in family)), rng
        )
    for attempt in range(1, params.retries + 1):
        stats.attempts = attempt
        try:
            return _one_pass(g, family, alpha, params, rng, stats, trace).sort()
        except PhaseError as exc:
            stats.histogram[exc.phase] += 1
            _emit(trace, exc.phase, attempt, False, str(exc))
    raise TotalDecompositionFailed(
        f"total decomposition failed after {params.retries} attempts: {dict(stats.histogram)}",
        stats.histogram,
    )
