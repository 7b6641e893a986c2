"""Command-line interface: gen, decompose, verify, sweep, divisibility."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .experiments import SweepConfig, divisibility_experiment, sweep_csv, threshold_sweep
from .graph import GraphFormatError, color_randomly, format_graph, gen_colored_gnp, gen_gnp, parse_graph
from .htree import HTreeError
from .total import (
    DecompositionFormatError,
    InfeasibleAlpha,
    PhaseError,
    TotalParams,
    TotalStats,
    decompose_total,
    parse_decomposition,
)
from .trees import Tree, TreeFormatError, parse_family, tree_by_name
from .verify import verify_decomposition

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_FAILED = 2
EXIT_MALFORMED = 3


class InputError(Exception):
    pass


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(path: str):
    try:
        return parse_graph(_read_text(path))
    except GraphFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_family(spec: str) -> List[Tree]:
    """A family file, or a comma list of names such as ``K13,P3,K2``."""
    if not Path(spec).exists() and all(part.strip() for part in spec.split(",")):
        try:
            return [tree_by_name(part.strip()) for part in spec.split(",")]
        except (TreeFormatError, ValueError):
            pass
    try:
        fam = parse_family(_read_text(spec))
    except (TreeFormatError, ValueError) as exc:
        raise InputError(f"{spec}: {exc}") from None
    if not fam:
        raise InputError(f"{spec}: family is empty")
    return fam


def _parse_alpha(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"alpha must be comma-separated integers, got {text!r}") from None


def _parse_grid(text: str) -> List[float]:
    try:
        grid = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"grid must be comma-separated numbers, got {text!r}") from None
    if not grid:
        raise InputError("grid is empty")
    return grid


def _write(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_gen(args) -> int:
    g = gen_colored_gnp(args.n, args.p, args.seed) if args.colored else gen_gnp(args.n, args.p, args.seed)
    _write(args.out, format_graph(g))
    return EXIT_OK


def cmd_decompose(args) -> int:
    g = _load_graph(args.graph)
    family = _load_family(args.family)
    alpha = _parse_alpha(args.alpha)
    rng = np.random.default_rng(args.seed)
    if not g.is_colored:
        g = color_randomly(g, rng)
    params = TotalParams(C=args.cprime, mode=args.mode)
    stats = TotalStats()
    trace = (lambda line: print(line, file=sys.stderr)) if args.trace else None
    try:
        d = decompose_total(g, family, alpha, params, rng, trace, stats)
    except InfeasibleAlpha as exc:
        print(f"error: infeasible alpha: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (PhaseError, HTreeError) as exc:
        phase = getattr(exc, "phase", "htree")
        print(f"failure phase={phase} attempts={stats.attempts} histogram={dict(stats.histogram)}", file=sys.stderr)
        print(f"detail: {exc}", file=sys.stderr)
        return EXIT_FAILED
    _write(args.out, d.format())
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    family = _load_family(args.family)
    alpha = _parse_alpha(args.alpha)
    try:
        d = parse_decomposition(_read_text(args.decomposition))
    except DecompositionFormatError as exc:
        raise InputError(f"{args.decomposition}: {exc}") from None
    if d.k != len(family):
        print(f"count-mismatch: class=- edges= (decomposition declares {d.k} trees, family has {len(family)})")
        return EXIT_REJECTED
    violations = verify_decomposition(g, family, alpha, d.pairs())
    for v in violations:
        print(v.render())
    if violations:
        return EXIT_REJECTED
    print("ok")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        n=args.n,
        family=_load_family(args.family),
        grid=_parse_grid(args.grid),
        trials=args.trials,
        seed=args.seed,
        mode=args.mode,
        workers=args.workers,
    )
    _write(args.out, sweep_csv(threshold_sweep(cfg)))
    return EXIT_OK


def cmd_divisibility(args) -> int:
    frac = divisibility_experiment(args.n, args.p, args.h, args.trials, args.seed)
    print(f"{frac:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treedecomp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample G(n, p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--colored", action="store_true", help="color edges red (p/15) or blue")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("decompose", help="split a graph into alpha_i copies of each family tree")
    p.add_argument("--graph", required=True)
    p.add_argument("--family", required=True, help="family file or names like K13,P3,K2")
    p.add_argument("--alpha", required=True, help="comma-separated counts")
    p.add_argument("--cprime", type=float, default=8.0)
    p.add_argument("--mode", choices=("strict", "relaxed"), default="relaxed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--trace", action="store_true", help="stage lines on stderr")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="check a decomposition file")
    p.add_argument("--graph", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--decomposition", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="success rate across a grid of C' values")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--grid", default="0.2,0.5,1,2,4,8")
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("strict", "relaxed"), default="relaxed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("divisibility", help="fraction of G(n, p) with e(G) divisible by h")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_divisibility)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
