"""Compiled kernels against the pure-Python reference: bit identity."""
import numpy as np
import pytest

from copeland_bandits import _kernels, ccb, rucb, scb
from copeland_bandits.prefmat import fixture, gen_cyclic_copeland, gen_random

compiled = pytest.mark.skipif(
    _kernels.backend_name() != "compiled",
    reason="compiled extension not built",
)

MATRICES = [
    fixture("P4"),
    fixture("PCOND5"),
    gen_random(6, 99, 0.03),
    gen_cyclic_copeland(8, 0.15),
]


@compiled
@pytest.mark.parametrize("matrix", MATRICES, ids=lambda m: m.name)
def test_ccb_runs_identical(matrix):
    a = ccb.simulate(matrix, 0.51, 4000, seed=13, mark_steps=(1500,), backend="compiled")
    b = ccb.simulate(matrix, 0.51, 4000, seed=13, mark_steps=(1500,), backend="pure")
    assert np.array_equal(a.trace.steps, b.trace.steps)
    assert np.array_equal(a.trace.cumulative_regret, b.trace.cumulative_regret)
    assert np.array_equal(a.wins, b.wins)
    assert np.array_equal(a.B, b.B)
    assert np.array_equal(a.B_per_arm, b.B_per_arm)
    assert a.L_bar == b.L_bar
    assert (a.tail_duels, a.tail_winner_duels) == (b.tail_duels, b.tail_winner_duels)


@compiled
@pytest.mark.parametrize("matrix", MATRICES, ids=lambda m: m.name)
def test_rucb_runs_identical(matrix):
    a = rucb.run(matrix, 0.6, 4000, seed=29, backend="compiled")
    b = rucb.run(matrix, 0.6, 4000, seed=29, backend="pure")
    assert np.array_equal(a.steps, b.steps)
    assert np.array_equal(a.cumulative_regret, b.cumulative_regret)


@compiled
@pytest.mark.parametrize("matrix", MATRICES, ids=lambda m: m.name)
def test_scb_runs_identical(matrix):
    a = scb.simulate(matrix, 6000, seed=31, backend="compiled")
    b = scb.simulate(matrix, 6000, seed=31, backend="pure")
    assert np.array_equal(a.trace.steps, b.trace.steps)
    assert np.array_equal(a.trace.cumulative_regret, b.trace.cumulative_regret)
    assert a.rounds == b.rounds


@compiled
def test_pac_winner_identical():
    for matrix in MATRICES[:2]:
        for seed in (0, 5):
            a = scb.pac_winner(matrix, 0.05, seed=seed, max_duels=80_000, backend="compiled")
            b = scb.pac_winner(matrix, 0.05, seed=seed, max_duels=80_000, backend="pure")
            assert a == b


@compiled
def test_backend_resolution():
    assert _kernels.resolve("auto") == "compiled"
    assert _kernels.resolve("pure") == "pure"
    with pytest.raises(ValueError):
        _kernels.resolve("gpu")
