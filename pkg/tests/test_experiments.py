from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from treedecomp.experiments import (
    CSV_HEADER,
    SweepConfig,
    divisibility_experiment,
    run_trial,
    sample_alpha,
    sample_alpha_tight,
    sweep_csv,
    threshold_sweep,
)
from treedecomp.trees import path_tree, tree_by_name

PAIR = [path_tree(2), tree_by_name("K2")]


@given(st.lists(st.integers(1, 5), min_size=1, max_size=4), st.integers(0, 400), st.integers(0, 2**32 - 1))
def test_sample_alpha_is_feasible(sizes, m, seed):
    if 1 not in sizes and m % math.gcd(*sizes):
        with pytest.raises(ValueError):
            sample_alpha(sizes, m, np.random.default_rng(seed), max_tries=50)
        return
    try:
        alpha = sample_alpha(sizes, m, np.random.default_rng(seed))
    except ValueError:
        # rejection sampling may miss rare representable totals
        assert 1 not in sizes
        return
    assert all(a >= 0 for a in alpha)
    assert sum(a * h for a, h in zip(alpha, sizes)) == m


@given(st.integers(1, 6), st.integers(0, 5000), st.integers(0, 2**32 - 1))
def test_tight_alpha_near_full_packing(h, m, seed):
    alpha = sample_alpha_tight([h, 1], m, np.random.default_rng(seed))
    assert alpha[0] * h + alpha[1] == m and min(alpha) >= 0
    assert alpha[0] >= m // h - math.isqrt(m)


def test_pair_alpha_covers_range():
    rng = np.random.default_rng(0)
    seen = {sample_alpha([2, 1], 10, rng)[0] for _ in range(300)}
    assert seen == set(range(6))


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(50, PAIR, [1.0], trials=0)
    with pytest.raises(ValueError):
        SweepConfig(50, PAIR, [], trials=1)


def test_zero_density_cell():
    rows = threshold_sweep(SweepConfig(40, PAIR, [0.0], trials=4, seed=1))
    assert rows[0].successes == 0 and rows[0].trivial_obstructions == 4


def test_sweep_csv_shape(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = SweepConfig(80, PAIR, [0.5, 6.0], trials=3, seed=2, out=str(out))
    rows = threshold_sweep(cfg)
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + len(cfg.grid)
    for r in rows:
        assert 0 <= r.successes <= r.trials
        assert r.trivial_obstructions <= r.trials - r.successes
    assert out.read_text() == sweep_csv(rows)
    assert threshold_sweep(cfg)[1].successes == rows[1].successes


def test_trial_success_is_verified():
    res = run_trial(120, 8.0, PAIR, (3, 0, 0))
    assert res.success and res.phase == ""


def test_divisibility_examples():
    assert divisibility_experiment(50, 0.2, 1, 20, 0) == 1.0
    n = 1000
    frac = divisibility_experiment(n, 8 * math.log(n) / n, 2, 2000, 1)
    assert abs(frac - 0.5) <= 0.045
    with pytest.raises(ValueError):
        divisibility_experiment(10, 0.5, 0, 5, 0)
