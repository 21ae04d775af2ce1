"""Comparison oracle: duels, regret accounting, checkpoint trail."""
import numpy as np
import pytest

from copeland_bandits.oracle import ComparisonOracle, RegretTrace, regret_of_pair
from copeland_bandits.prefmat import copeland_scores, fixture

P4 = fixture("P4")
P5 = fixture("PCOND5")


def test_regret_of_pair_examples():
    assert regret_of_pair(P4, 0, 1) == 0.0
    assert regret_of_pair(P4, 0, 2) == pytest.approx(1 / 3)
    assert regret_of_pair(P4, 2, 3) == pytest.approx(2 / 3)


def test_self_duel_regret_extremes():
    # winner self-duel is free; the weakest arm's self-duel is the worst
    # duel that involves it
    scores = copeland_scores(P5)
    worst = int(scores.argmin())
    best = int(scores.argmax())
    assert regret_of_pair(P5, best, best) == 0.0
    r_self = regret_of_pair(P5, worst, worst)
    for j in range(P5.K):
        assert r_self >= regret_of_pair(P5, worst, j) - 1e-15


def test_winner_self_duel_accrues_nothing():
    oracle = ComparisonOracle(P4, seed=1)
    for _ in range(100):
        oracle.compare(0, 0)
    assert oracle.cumulative_regret == 0.0
    assert oracle.wins[0, 0] == 100


def test_pair_regret_independent_of_outcome():
    oracle = ComparisonOracle(P4, seed=2)
    oracle.compare(2, 3)
    assert oracle.cumulative_regret == pytest.approx(2 / 3)
    oracle.compare(2, 3)
    assert oracle.cumulative_regret == pytest.approx(4 / 3)


def test_win_rate_matches_probability():
    oracle = ComparisonOracle(P4, seed=3)
    n = 100_000
    for _ in range(n):
        oracle.compare(0, 1)
    assert oracle.wins[0, 1] + oracle.wins[1, 0] == n
    assert abs(oracle.wins[0, 1] / n - 0.6) < 0.01  # 3 sigma ~ 0.005


def test_win_counts_consistent():
    oracle = ComparisonOracle(P4, seed=4)
    rng = np.random.default_rng(0)
    pairs = rng.integers(0, 4, size=(2000, 2))
    for i, j in pairs:
        oracle.compare(int(i), int(j))
    for i in range(4):
        for j in range(i + 1, 4):
            issued = sum(1 for a, b in pairs if {int(a), int(b)} == {i, j})
            assert oracle.wins[i, j] + oracle.wins[j, i] == issued


def test_replay_is_bit_identical():
    a = ComparisonOracle(P4, seed=99)
    b = ComparisonOracle(P4, seed=99)
    rng = np.random.default_rng(1)
    for i, j in rng.integers(0, 4, size=(500, 2)):
        assert a.compare(int(i), int(j)) == b.compare(int(i), int(j))
    assert np.array_equal(a.wins, b.wins)
    assert a.cumulative_regret == b.cumulative_regret


def test_index_out_of_range():
    oracle = ComparisonOracle(P4, seed=0)
    with pytest.raises(IndexError):
        oracle.compare(0, 4)


def test_checkpoint_schedule():
    oracle = ComparisonOracle(P4, seed=5, checkpoint_ratio=1.2)
    for _ in range(100):
        oracle.compare(2, 3)
    tr = oracle.trace("test")
    steps = tr.steps.tolist()
    assert steps[0] == 1
    assert steps[-1] == 100
    # geometric growth with the +1 floor at small t
    assert steps[:8] == [1, 2, 3, 4, 5, 6, 7, 8]
    for a, b in zip(steps, steps[1:]):
        assert b == max(int(a * 1.2), a + 1) or b == 100


def test_mark_steps_are_recorded():
    oracle = ComparisonOracle(P4, seed=6, mark_steps=(37, 91))
    for _ in range(200):
        oracle.compare(0, 1)
    steps = oracle.trace("test").steps.tolist()
    assert 37 in steps and 91 in steps
    assert steps == sorted(set(steps))


def test_checkpoint_deltas_telescope():
    oracle = ComparisonOracle(P4, seed=7)
    rng = np.random.default_rng(2)
    for i, j in rng.integers(0, 4, size=(3000, 2)):
        oracle.compare(int(i), int(j))
    tr = oracle.trace("test")
    deltas = np.diff(np.concatenate([[0.0], tr.cumulative_regret]))
    assert deltas.sum() == pytest.approx(tr.final_regret, abs=1e-9)
    assert np.all(deltas >= -1e-12)


def test_trace_invariants_enforced():
    with pytest.raises(ValueError):
        RegretTrace("x", 0, "m", np.array([1, 1]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        RegretTrace("x", 0, "m", np.array([1, 2]), np.array([1.0, 0.0]))
