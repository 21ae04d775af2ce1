"""Scalable Copeland Bandits.

PAC Copeland-winner identification by reduction to a K-armed Bernoulli
bandit (the reward of arm i is whether it beats a uniformly random
opponent, decided by a sequential sign test on the duel stream), wrapped
in a squaring-trick restart loop for the regret setting: round r runs the
identifier with budget 2^(2^r) duels and failure probability ln(T)/T, then
plays the returned candidate against itself for the rest of the round.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .klbandit import BudgetExhausted, KlBanditState, identify
from .oracle import (
    DEFAULT_CHECKPOINT_RATIO,
    ComparisonOracle,
    RegretTrace,
    regret_matrix,
)
from .prefmat import PreferenceMatrix
from .rng import Xoshiro256pp


def cert_threshold(n: int, K: int, delta: float) -> float:
    """Win-count margin that certifies sign(p_ij - 0.5) after n duels.

    Certify once |2*wins - n| exceeds sqrt(2 n ln(4 n (n+1) K^2 / delta)),
    i.e. once the empirical mean leaves the anytime band of half-width
    sqrt(ln(4 n (n+1) K^2 / delta) / (2n)); the union bound over n and
    the K^2 ordered pairs keeps the total error below delta / K^2.
    """
    return math.sqrt(2.0 * n * math.log(4.0 * n * (n + 1) * K * K / delta))


def copeland_reward(
    oracle: ComparisonOracle,
    i: int,
    delta: float,
    rng: Xoshiro256pp | None = None,
    stop_at: int | None = None,
) -> int:
    """One Bernoulli sample of "arm i beats a random opponent".

    Draws j uniformly from the other K-1 arms (with replacement across
    calls), then duels (i, j) until the sequential test certifies which
    arm wins in expectation.  Unbounded by design; callers cap it through
    ``stop_at`` (an oracle step count), which raises
    :class:`BudgetExhausted` when reached.
    """
    rng = rng if rng is not None else oracle.rng
    K = oracle.K
    j = rng.next_below(K - 1)
    if j >= i:
        j += 1
    n = 0
    wins = 0
    while True:
        if stop_at is not None and oracle.t >= stop_at:
            raise BudgetExhausted(f"duel budget exhausted at t={oracle.t}")
        winner = oracle.compare(i, j)
        n += 1
        if winner == i:
            wins += 1
        if abs(2 * wins - n) > cert_threshold(n, K, delta):
            return 1 if 2 * wins > n else 0


def find_copeland_winner(
    oracle: ComparisonOracle,
    delta: float,
    eps: float = 0.0,
    max_duels: int | None = None,
) -> int:
    """Identify a Copeland winner through duel-backed reward oracles.

    The identification layer runs at failure probability ``delta``; each
    inner sign test gets budget ``delta / K^2``.  With ``max_duels`` set,
    the call force-terminates once the oracle has issued that many duels
    and returns the current argmax-lower-bound survivor (without it, tied
    Copeland winners keep the eps = 0 tournament alive forever).
    """
    stop = oracle.t + max_duels if max_duels is not None else None

    def reward(arm: int) -> int:
        return copeland_reward(oracle, arm, delta, stop_at=stop)

    res = identify(reward, oracle.K, delta, eps)
    return res.arm


@dataclass(frozen=True)
class PacResult:
    arm: int
    duels: int


def pac_winner(
    matrix: PreferenceMatrix,
    delta: float,
    seed: int,
    eps: float = 0.0,
    max_duels: int | None = None,
    backend: str = "auto",
) -> PacResult:
    """One identification run against a simulated duel oracle.

    Convenience wrapper around :func:`find_copeland_winner` that owns the
    oracle, reports the duel count, and can use the compiled kernel.
    """
    which = _kernels.resolve(backend)
    cap = max_duels if max_duels is not None else 2**62
    if which == "compiled":
        k = _kernels.fastcore()
        arm, duels = k.pac_winner_run(
            matrix.p,
            regret_matrix(matrix),
            delta,
            eps,
            seed,
            cap,
            DEFAULT_CHECKPOINT_RATIO,
        )
        return PacResult(int(arm), int(duels))
    oracle = ComparisonOracle(matrix, seed)
    arm = find_copeland_winner(oracle, delta, eps, max_duels=cap)
    return PacResult(arm, oracle.t)


@dataclass(frozen=True)
class ScbRound:
    """Bookkeeping for one squaring-trick round."""

    r: int
    budget: int  # duels available to the round (nominal 2^(2^r), horizon-capped)
    identify_duels: int  # duels consumed by the identification call (T_0)
    candidate: int
    selfplay_duels: int
    selfplay_regret: float


@dataclass(frozen=True)
class ScbRunResult:
    trace: RegretTrace
    rounds: tuple[ScbRound, ...]


def simulate(
    matrix: PreferenceMatrix,
    horizon: int,
    seed: int,
    checkpoint_ratio: float = DEFAULT_CHECKPOINT_RATIO,
    mark_steps: tuple[int, ...] = (),
    backend: str = "auto",
) -> ScbRunResult:
    """Squaring-trick loop to the horizon (stops mid-round when it hits)."""
    if horizon < 4:
        raise ValueError(f"horizon must be >= 4, got {horizon}")
    which = _kernels.resolve(backend)
    if which == "compiled":
        k = _kernels.fastcore()
        marks = np.asarray(sorted(set(mark_steps)), dtype=np.int64)
        steps, values, rounds_arr, selfreg = k.scb_run(
            matrix.p,
            regret_matrix(matrix),
            horizon,
            seed,
            checkpoint_ratio,
            marks,
        )
        trace = RegretTrace(
            algorithm="scb",
            seed=seed,
            matrix_id=matrix.name,
            steps=steps,
            cumulative_regret=values,
        )
        rounds = tuple(
            ScbRound(
                r=int(row[0]),
                budget=int(row[1]),
                identify_duels=int(row[2]),
                candidate=int(row[3]),
                selfplay_duels=int(row[4]),
                selfplay_regret=float(selfreg[n]),
            )
            for n, row in enumerate(rounds_arr)
        )
        return ScbRunResult(trace=trace, rounds=rounds)

    oracle = ComparisonOracle(
        matrix, seed, checkpoint_ratio=checkpoint_ratio, mark_steps=mark_steps
    )
    K = matrix.K
    rounds: list[ScbRound] = []
    r = 0
    while oracle.t < horizon:
        r += 1
        T = 2 ** (2**r)
        delta = min(math.log(T) / T, 0.5)
        if not 0.0 < delta < 1.0:
            raise RuntimeError(f"round failure probability out of range: {delta}")
        start = oracle.t
        stop = min(start + T, horizon)

        def reward(arm: int) -> int:
            return copeland_reward(oracle, arm, delta, stop_at=stop)

        state = KlBanditState(K=K, delta=delta, eps=0.0)
        res = identify(reward, K, delta, 0.0, state=state)
        candidate = res.arm
        t0 = oracle.t - start
        before = oracle.cumulative_regret
        selfplay = stop - oracle.t
        for _ in range(selfplay):
            oracle.compare(candidate, candidate)
        rounds.append(
            ScbRound(
                r=r,
                budget=stop - start,
                identify_duels=t0,
                candidate=candidate,
                selfplay_duels=selfplay,
                selfplay_regret=oracle.cumulative_regret - before,
            )
        )
    return ScbRunResult(trace=oracle.trace("scb"), rounds=tuple(rounds))


def run(
    matrix: PreferenceMatrix,
    horizon: int,
    seed: int,
    checkpoint_ratio: float = DEFAULT_CHECKPOINT_RATIO,
    mark_steps: tuple[int, ...] = (),
    backend: str = "auto",
) -> RegretTrace:
    """Run SCB for `horizon` duels and return the regret trace."""
    return simulate(
        matrix,
        horizon,
        seed,
        checkpoint_ratio=checkpoint_ratio,
        mark_steps=mark_steps,
        backend=backend,
    ).trace
