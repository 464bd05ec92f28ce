import math

import numpy as np
import pytest

from conftest import free_polyominoes, random_subgraph
from discrete_fk import shapes
from discrete_fk.grid import Subgraph, boundary
from discrete_fk.spectral import assemble_pd, lambda_d
from discrete_fk.walk import (
    central_cell,
    decay_ratio,
    mc_band,
    survival_exact,
    survival_mc,
)


def test_exact_examples():
    assert survival_exact(shapes.domino(), (0, 0), 1).probabilities[1] == 0.25
    assert survival_exact(shapes.domino(), (1, 0), 1).probabilities[1] == 0.25
    assert survival_exact(shapes.plus(), (0, 0), 1).probabilities[1] == 1.0
    assert survival_exact(shapes.plus(), (1, 0), 1).probabilities[1] == 0.25
    # plus centre, k = 2: every first step lands on an arm, which survives w.p. 1/4
    assert survival_exact(shapes.plus(), (0, 0), 2).probabilities[2] == 0.25
    assert survival_exact(Subgraph([(0, 0)]), (0, 0), 3).probabilities.tolist() == [1, 0, 0, 0]


def test_exact_errors():
    with pytest.raises(ValueError):
        survival_exact(shapes.domino(), (5, 5), 3)
    with pytest.raises(ValueError):
        survival_exact(shapes.domino(), (0, 0), -1)
    with pytest.raises(ValueError):
        survival_mc(shapes.domino(), (5, 5), 3, 10, 0)
    with pytest.raises(ValueError):
        survival_mc(shapes.domino(), (0, 0), 3, 0, 0)


def test_exact_matches_matrix_power(rng):
    for _ in range(20):
        g = random_subgraph(rng, int(rng.integers(1, 20)))
        P = assemble_pd(g).toarray()
        start = g.cells[int(rng.integers(len(g)))]
        i = g.cells.index(start)
        curve = survival_exact(g, start, 12)
        e = np.zeros(len(g))
        e[i] = 1
        for k in range(13):
            assert curve.probabilities[k] == pytest.approx(np.linalg.matrix_power(P, k) @ e @ np.ones(len(g)), abs=1e-14)


def test_curve_invariants(rng):
    for _ in range(20):
        g = random_subgraph(rng, int(rng.integers(1, 25)))
        p = survival_exact(g, g.cells[0], 40).probabilities
        assert p[0] == 1
        assert np.all(np.diff(p) <= 1e-15)
        assert np.all((p >= 0) & (p <= 1))


def test_no_underflow_on_long_horizon():
    curve = survival_exact(shapes.domino(), (0, 0), 2000)
    # domino survival is exactly 4^-k
    assert curve.log_probabilities[-1] == pytest.approx(-2000 * math.log(4), rel=1e-12)
    assert curve.probabilities[-1] == 0.0  # the linear value underflows, the log does not


@pytest.mark.parametrize("g", [shapes.square(3), shapes.plus(), shapes.p_pentomino(), shapes.l_tromino()])
def test_two_step_tail_ratio(g):
    rho = (4 - lambda_d(g).lambda_d) / 4
    curve = survival_exact(g, central_cell(g), 500)
    assert curve.decay_estimate == pytest.approx(rho, abs=1e-4)


def test_one_step_ratio_oscillates_on_bipartite_square():
    # the -rho mode survives in the l1 sum from the centre of the 3x3 square
    p = survival_exact(shapes.square(3), (1, 1), 501).probabilities
    rho = (4 - lambda_d(shapes.square(3)).lambda_d) / 4
    ratios = p[1:] / p[:-1]
    assert abs(ratios[-1] - ratios[-2]) > 0.01
    assert ratios[-1] == pytest.approx(0.75) or ratios[-2] == pytest.approx(0.75)
    assert math.sqrt(ratios[-1] * ratios[-2]) == pytest.approx(rho, abs=1e-12)


def test_monotone_domination_exhaustive():
    # p_k from every start at once: P_D is symmetric, so p_k = P_D^k 1
    for n in range(1, 9):
        for g in free_polyominoes(n):
            base = _all_starts(g, 8)
            for b in boundary(g):
                big = g.with_cells([b])
                ext = _all_starts(big, 8)
                idx = [big.cells.index(c) for c in g.cells]
                assert np.all(base <= ext[:, idx] + 1e-15)


def _all_starts(g, K):
    P = assemble_pd(g)
    v = np.ones(len(g))
    rows = [v]
    for _ in range(K):
        v = P @ v
        rows.append(v)
    return np.array(rows)


def test_all_starts_agrees_with_survival_exact():
    g = shapes.p_pentomino()
    table = _all_starts(g, 6)
    for i, c in enumerate(g.cells):
        assert np.allclose(survival_exact(g, c, 6).probabilities, table[:, i], atol=1e-15)


def test_mc_domino_band():
    mc = survival_mc(shapes.domino(), (0, 0), 1, 10**6, 0)
    assert mc.probabilities[0] == 1.0
    assert abs(mc.probabilities[1] - 0.25) <= 3 * math.sqrt(0.25 * 0.75 / 10**6)
    assert mc_band(np.array([0.25]), 10**6)[0] == pytest.approx(3 * math.sqrt(0.1875e-6), rel=1e-12)


def test_mc_deterministic_per_seed():
    g = shapes.plus()
    a = survival_mc(g, (0, 0), 6, 5000, 7).probabilities
    b = survival_mc(g, (0, 0), 6, 5000, 7).probabilities
    c = survival_mc(g, (0, 0), 6, 5000, 8).probabilities
    assert a.tolist() == b.tolist()
    assert a.tolist() != c.tolist()


def test_mc_chunks_do_not_change_small_runs(monkeypatch):
    import discrete_fk.walk as walk

    g = shapes.square(2)
    a = survival_mc(g, (0, 0), 4, 1000, 3).probabilities
    monkeypatch.setattr(walk, "CHUNK", 1000)
    assert survival_mc(g, (0, 0), 4, 1000, 3).probabilities.tolist() == a.tolist()


def test_mc_within_bands_across_triples(rng):
    triples = []
    for _ in range(20):
        g = random_subgraph(rng, int(rng.integers(2, 15)), connected=True)
        triples.append((g, g.cells[int(rng.integers(len(g)))], int(rng.integers(1, 9))))
    trials, checks, misses = 20000, 0, 0
    for seed in range(10):
        for g, start, k in triples:
            ex = survival_exact(g, start, k).probabilities[k]
            mc = survival_mc(g, start, k, trials, seed).probabilities[k]
            checks += 1
            misses += abs(mc - ex) > mc_band(np.array([ex]), trials)[0] + 1e-15
    assert misses < 0.01 * checks


def test_decay_identical_shapes():
    rep = decay_ratio(shapes.plus(), shapes.plus(), 40)
    assert rep.slope == pytest.approx(0, abs=1e-12)
    assert rep.intercept == pytest.approx(0, abs=1e-12)
    assert not rep.diverges


def test_decay_square_vs_domino():
    rep = decay_ratio(shapes.square(3), shapes.domino(), 200)
    assert rep.expected == pytest.approx(math.log(2 * math.sqrt(2)), abs=1e-12)
    assert rep.relative_error < 1e-6
    assert rep.diverges and rep.slope > 0


def test_decay_divergence_flag():
    # a bigger shape has smaller lambda_D, so its survival wins
    rep = decay_ratio(shapes.square(2).with_cells([(2, 0)]), shapes.square(2), 200)
    assert rep.diverges and rep.slope > 0
    rep = decay_ratio(shapes.domino(), shapes.plus(), 60)
    assert not rep.diverges and rep.slope < 0


def test_decay_degenerate():
    with pytest.raises(ValueError):
        decay_ratio(Subgraph([(0, 0)]), shapes.domino())
    with pytest.raises(ValueError):
        decay_ratio(shapes.plus(), shapes.domino(), 3)


def test_central_cell():
    assert central_cell(shapes.plus()) == (0, 0)
    assert central_cell(shapes.square(3)) == (1, 1)
    assert central_cell(shapes.domino()) == (0, 0)
