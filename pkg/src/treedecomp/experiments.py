"""Monte Carlo drivers: total-decomposability threshold sweeps and edge-count divisibility."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .graph import gen_colored_gnp, log_n
from .total import PhaseError, TotalParams, decompose_total
from .trees import Tree
from .verify import verify_decomposition

CSV_HEADER = ("Cprime", "trials", "successes", "trivial_obstructions")


def sample_alpha(sizes: Sequence[int], m: int, rng: np.random.Generator, max_tries: int = 1000) -> List[int]:
    """Random nonnegative alpha with sum alpha_i * sizes[i] == m.

    For a pair (H, K2) alpha_H is uniform on [0, m // h] and K2 takes the
    rest.  Otherwise members are visited in random order, each taking a
    random share of what is left, and the draw is rejected unless the last
    member divides the remainder.
    """
    if not sizes:
        raise ValueError("empty family")
    if len(sizes) == 2 and sizes[1] == 1:
        a = int(rng.integers(0, m // sizes[0] + 1))
        return [a, m - a * sizes[0]]
    for _ in range(max_tries):
        order = rng.permutation(len(sizes)).tolist()
        alpha = [0] * len(sizes)
        left = m
        for j in order[:-1]:
            alpha[j] = int(rng.integers(0, left // sizes[j] + 1))
            left -= alpha[j] * sizes[j]
        last = order[-1]
        if left % sizes[last] == 0:
            alpha[last] = left // sizes[last]
            return alpha
    raise ValueError(f"no feasible alpha found for m={m}, sizes={list(sizes)}")


def sample_alpha_tight(sizes: Sequence[int], m: int, rng: np.random.Generator) -> List[int]:
    """Near-maximal H-packing for a pair (H, K2): alpha_H = m // h minus a slack.

    The slack is uniform on [0, isqrt(m)], so K2 receives only O(sqrt m)
    edges and the draw probes the regime where a perfect H-packing is
    almost required.  Other families fall back to :func:`sample_alpha`.
    """
    if len(sizes) != 2 or sizes[1] != 1:
        return sample_alpha(sizes, m, rng)
    top = m // sizes[0]
    slack = int(rng.integers(0, min(top, math.isqrt(m)) + 1))
    a = top - slack
    return [a, m - a * sizes[0]]


@dataclass
class SweepConfig:
    n: int
    family: List[Tree]
    grid: List[float]
    trials: int = 30
    seed: int = 0
    out: Optional[str] = None
    mode: str = "relaxed"
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.grid:
            raise ValueError("grid must be nonempty")
        if not self.family:
            raise ValueError("family must be nonempty")


@dataclass
class TrialResult:
    success: bool
    isolated: bool
    m: int
    phase: str = ""


@dataclass
class SweepRow:
    cprime: float
    trials: int
    successes: int = 0
    trivial_obstructions: int = 0
    results: List[TrialResult] = field(default_factory=list)

    @property
    def fraction(self) -> float:
        return self.successes / self.trials


def run_trial(n: int, cprime: float, family: Sequence[Tree], seed_words: Tuple[int, ...], mode: str = "relaxed") -> TrialResult:
    """One graph, one random alpha; success means the verifier accepts the output."""
    rng = np.random.default_rng(np.random.SeedSequence(list(seed_words)))
    p = min(1.0, cprime * log_n(n) / n)
    g = gen_colored_gnp(n, p, rng)
    isolated = bool(g.isolated_vertices())
    if g.m == 0:
        # nothing to decompose: counted as a failure, the graph is degenerate
        return TrialResult(False, isolated, 0, "empty")
    alpha = sample_alpha_tight([t.h for t in family], g.m, rng)
    try:
        d = decompose_total(g, family, alpha, TotalParams(C=max(cprime, 1e-9), mode=mode), rng)
    except PhaseError as exc:
        return TrialResult(False, isolated, g.m, exc.phase)
    ok = not verify_decomposition(g, family, alpha, d.pairs())
    return TrialResult(ok, isolated, g.m, "" if ok else "verify")


def _run_packed(args):
    return run_trial(*args)


def threshold_sweep(cfg: SweepConfig) -> List[SweepRow]:
    """Run ``cfg.trials`` trials per grid value; trial (cell, t) uses seed words (seed, cell, t)."""
    jobs = [
        (cfg.n, c, cfg.family, (cfg.seed, ci, t), cfg.mode)
        for ci, c in enumerate(cfg.grid)
        for t in range(cfg.trials)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_run_packed, jobs))
    else:
        results = [_run_packed(j) for j in jobs]
    rows = []
    for ci, c in enumerate(cfg.grid):
        chunk = results[ci * cfg.trials:(ci + 1) * cfg.trials]
        row = SweepRow(c, cfg.trials, results=chunk)
        row.successes = sum(r.success for r in chunk)
        # an isolated vertex only counts as an obstruction on a failed trial
        row.trivial_obstructions = sum(r.isolated and not r.success for r in chunk)
        rows.append(row)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(sweep_csv(rows))
    return rows


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([f"{r.cprime:g}", r.trials, r.successes, r.trivial_obstructions])
    return buf.getvalue()


def divisibility_experiment(n: int, p: float, h: int, trials: int, seed=None) -> float:
    """Fraction of G(n, p) samples whose edge count is divisible by ``h``."""
    if h < 1:
        raise ValueError("h must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    pairs = n * (n - 1) // 2
    hits = 0
    for _ in range(trials):
        m = int(np.count_nonzero(rng.random(pairs) < p))
        hits += m % h == 0
    return hits / trials


def default_p(n: int, scale: float = 8.0) -> float:
    return min(1.0, scale * math.log(n) / n)
