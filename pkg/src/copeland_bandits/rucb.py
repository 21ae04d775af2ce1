"""Relative Upper Confidence Bound baseline.

A Condorcet-assuming learner, included to demonstrate what goes wrong when
no Condorcet winner exists (its regret then grows linearly).  Structure
follows the cited RUCB scheme: pick a candidate whose upper bounds lose to
nobody, then duel it against the challenger with the highest upper bound
against it; the diagonal bound of 0.5 lets the incumbent win that argmax
once every challenger is confidently beaten, which is what makes self-play
(and hence convergence) possible on Condorcet instances.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .ccb import confidence_matrices
from .oracle import (
    DEFAULT_CHECKPOINT_RATIO,
    ComparisonOracle,
    RegretTrace,
    regret_matrix,
)
from .prefmat import PreferenceMatrix


@dataclass
class RucbState:
    """Exploration parameter plus the hypothesized champion (if any)."""

    K: int
    alpha: float
    champion: int | None = None

    def __post_init__(self):
        if self.alpha <= 0.5:
            raise ValueError(f"alpha must exceed 0.5, got {self.alpha}")


def step(state: RucbState, oracle: ComparisonOracle) -> tuple[int, int]:
    """One round: candidate from U, challenger by argmax u[., c], duel."""
    K = state.K
    if K != oracle.K:
        raise ValueError("state and oracle disagree on K")
    rng = oracle.rng
    t = oracle.t + 1
    U, _ = confidence_matrices(oracle.wins, t, state.alpha)
    cand = np.flatnonzero((U >= 0.5).sum(axis=1) == K)

    if len(cand) == 0:
        c = rng.next_below(K)
    elif len(cand) == 1:
        state.champion = int(cand[0])
        c = state.champion
    else:
        if state.champion is not None and state.champion in cand:
            if rng.next_double() < 0.5:
                c = state.champion
            else:
                others = [int(i) for i in cand if i != state.champion]
                c = others[rng.next_below(len(others))]
        else:
            c = int(cand[rng.next_below(len(cand))])

    # challenger: argmax over all j of u[j, c]; u[c, c] = 0.5, so d = c only
    # when every other arm's upper bound against c fell below one half
    best, best_u = -1, -np.inf
    col = U[:, c]
    for j in range(K):
        if col[j] > best_u:
            best, best_u = j, col[j]
        elif col[j] == best_u and best == c and j != c:
            best = j
    d = best
    oracle.compare(c, d)
    return c, d


def run(
    matrix: PreferenceMatrix,
    alpha: float,
    horizon: int,
    seed: int,
    checkpoint_ratio: float = DEFAULT_CHECKPOINT_RATIO,
    mark_steps: tuple[int, ...] = (),
    backend: str = "auto",
) -> RegretTrace:
    """Run RUCB for `horizon` duels and return the regret trace."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    which = _kernels.resolve(backend)
    if which == "compiled":
        k = _kernels.fastcore()
        marks = np.asarray(sorted(set(mark_steps)), dtype=np.int64)
        steps, values = k.rucb_run(
            matrix.p,
            regret_matrix(matrix),
            alpha,
            horizon,
            seed,
            checkpoint_ratio,
            marks,
        )
        return RegretTrace(
            algorithm="rucb",
            seed=seed,
            matrix_id=matrix.name,
            steps=steps,
            cumulative_regret=values,
        )
    oracle = ComparisonOracle(
        matrix, seed, checkpoint_ratio=checkpoint_ratio, mark_steps=mark_steps
    )
    state = RucbState(K=matrix.K, alpha=alpha)
    for _ in range(horizon):
        step(state, oracle)
    return oracle.trace("rucb")
