"""Copeland Confidence Bound learner.

Optimism-then-pessimism over the pairwise win probabilities: an optimistic
Copeland winner is picked from upper confidence bounds, then the challenger
most likely to discredit it is picked from the lower bounds.  Per-arm
shortlists of "formidable opponents" concentrate the exploration budget.

The per-step routine below is the reference implementation; `run` defers
to the compiled kernel when it is available (bit-identical output, see
tests/test_backends.py).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import math

import numpy as np

from .oracle import (
    DEFAULT_CHECKPOINT_RATIO,
    ComparisonOracle,
    RegretTrace,
    regret_matrix,
)
from .prefmat import PreferenceMatrix, copeland_winners
from . import _kernels


def confidence_matrices(
    wins: np.ndarray, t: int, alpha: float
) -> tuple[np.ndarray, np.ndarray]:
    """Upper/lower confidence matrices at step t.

    u = w/n + sqrt(alpha ln t / n), l = w/n - sqrt(alpha ln t / n) with
    n the per-pair duel count; the diagonal is pinned to 0.5, values are
    clamped to [0, 1] and pairs without data get the maximal interval
    [0, 1].
    """
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    W = np.asarray(wins, dtype=np.float64)
    N = W + W.T
    alnt = alpha * math.log(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        p_hat = W / N
        rad = np.sqrt(alnt / N)
        U = np.minimum(p_hat + rad, 1.0)
        L = np.maximum(p_hat - rad, 0.0)
    nodata = N == 0
    U[nodata] = 1.0
    L[nodata] = 0.0
    np.fill_diagonal(U, 0.5)
    np.fill_diagonal(L, 0.5)
    return U, L


@dataclass
class CcbState:
    """Learner state: candidate-best set, per-arm challenger shortlists and
    the running estimate of a winner's loss count."""

    K: int
    alpha: float
    B: np.ndarray = field(init=False)
    B_per_arm: np.ndarray = field(init=False)
    L_bar: int = field(init=False)

    def __post_init__(self):
        if self.alpha <= 0.5:
            raise ValueError(f"alpha must exceed 0.5, got {self.alpha}")
        self.reset()

    def reset(self) -> None:
        self.B = np.ones(self.K, dtype=bool)
        self.B_per_arm = np.zeros((self.K, self.K), dtype=bool)
        self.L_bar = self.K

    def shortlist(self, i: int) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.B_per_arm[i]).tolist())


def select_challenger(
    u_col: np.ndarray, l_col: np.ndarray, c: int, pool: np.ndarray
) -> int:
    """Line-13 challenger: argmax of u[j, c] over eligible j.

    Eligible means j is in the pool with l[j, c] <= 0.5; the incumbent c is
    always eligible (its diagonal bounds are 0.5), so the argmax is never
    empty.  Ties go to the lowest index, except that c never wins a tie
    against another maximizer.
    """
    best = -1
    best_u = -math.inf
    for j in range(len(u_col)):
        if j != c and not (pool[j] and l_col[j] <= 0.5):
            continue
        val = u_col[j]
        if val > best_u:
            best, best_u = j, val
        elif val == best_u and best == c and j != c:
            best = j
    return best


def _partial_take(members: list[int], keep: int, rng) -> list[int]:
    """Keep `keep` random members (partial Fisher-Yates on the sorted list)."""
    arr = list(members)
    for k in range(keep):
        r = k + rng.next_below(len(arr) - k)
        arr[k], arr[r] = arr[r], arr[k]
    return sorted(arr[:keep])


def step(state: CcbState, oracle: ComparisonOracle) -> tuple[int, int]:
    """Execute one round; returns the compared pair (c, d).

    Draws from the oracle's RNG stream in a fixed order (shortlist
    trimming, exploration coin, candidate-restriction coin, candidate
    choice, pool coin, duel), which the compiled kernel reproduces exactly.
    """
    K = state.K
    if K != oracle.K:
        raise ValueError("state and oracle disagree on K")
    rng = oracle.rng
    t = oracle.t + 1
    U, L = confidence_matrices(oracle.wins, t, state.alpha)
    opt = (U >= 0.5).sum(axis=1) - 1  # diagonal is 0.5, drop it
    pes = (L >= 0.5).sum(axis=1) - 1
    C_t = opt == opt.max()

    # 9A: reset disproven hypotheses (some shortlisted j now surely loses to i)
    if np.any(state.B_per_arm & (L > 0.5)):
        state.reset()
    # 9B: drop arms whose optimistic score another arm's pessimistic score beats
    max_pes = pes.max()
    for i in np.flatnonzero(state.B):
        if opt[i] < max_pes:
            state.B[i] = False
            if int(state.B_per_arm[i].sum()) != state.L_bar + 1:
                state.B_per_arm[i] = U[i] < 0.5
    if not state.B.any():
        state.reset()
    # 9C: promote confirmed winners, pin the loss estimate, trim shortlists
    for i in np.flatnonzero(C_t & (opt == pes)):
        state.B[i] = True
        state.B_per_arm[i, :] = False
        state.L_bar = int(K - 1 - opt[i])
        for j in range(K):
            if j == i:
                continue
            size = int(state.B_per_arm[j].sum())
            if size < state.L_bar + 1:
                state.B_per_arm[j, :] = False
            elif size > state.L_bar + 1:
                keep = _partial_take(
                    np.flatnonzero(state.B_per_arm[j]).tolist(),
                    state.L_bar + 1,
                    rng,
                )
                state.B_per_arm[j, :] = False
                state.B_per_arm[j, keep] = True

    c = d = -1
    u_explore = rng.next_double()
    undecided = [
        (i, j)
        for i in range(K)
        for j in range(K)
        if state.B_per_arm[i, j] and L[i, j] <= 0.5 <= U[i, j]
    ]
    if u_explore < 0.25 and undecided:
        c, d = undecided[rng.next_below(len(undecided))]
    else:
        cand = C_t
        both = state.B & C_t
        if both.any() and rng.next_double() < 2.0 / 3.0:
            cand = both
        clist = np.flatnonzero(cand)
        c = int(clist[rng.next_below(len(clist))])
        if rng.next_double() < 0.5:
            pool = state.B_per_arm[c]
        else:
            pool = np.ones(K, dtype=bool)
        d = select_challenger(U[:, c], L[:, c], c, pool)

    if L[d, c] > 0.5:
        raise RuntimeError(
            f"challenger invariant violated: l[{d},{c}] = {L[d, c]} > 0.5"
        )
    oracle.compare(c, d)
    return c, d


@dataclass(frozen=True)
class CcbRunResult:
    """Trace plus the final learner state and end-phase duel statistics."""

    trace: RegretTrace
    wins: np.ndarray
    B: np.ndarray
    B_per_arm: np.ndarray
    L_bar: int
    tail_duels: int
    tail_winner_duels: int

    def shortlist(self, i: int) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.B_per_arm[i]).tolist())


def simulate(
    matrix: PreferenceMatrix,
    alpha: float,
    horizon: int,
    seed: int,
    checkpoint_ratio: float = DEFAULT_CHECKPOINT_RATIO,
    mark_steps: tuple[int, ...] = (),
    tail_start: int | None = None,
    backend: str = "auto",
) -> CcbRunResult:
    """Fresh oracle and state, `horizon` steps.

    ``tail_start`` (default: 90% of the horizon) splits off the end phase
    for the winners-only duel statistics.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if tail_start is None:
        tail_start = (9 * horizon) // 10
    winners = copeland_winners(matrix)
    which = _kernels.resolve(backend)
    if which == "compiled":
        k = _kernels.fastcore()
        winners_mask = np.zeros(matrix.K, dtype=np.uint8)
        winners_mask[sorted(winners)] = 1
        marks = np.asarray(sorted(set(mark_steps)), dtype=np.int64)
        out = k.ccb_run(
            matrix.p,
            regret_matrix(matrix),
            alpha,
            horizon,
            seed,
            checkpoint_ratio,
            marks,
            tail_start,
            winners_mask,
        )
        steps, values, wins, B, Bi, L_bar, tail_total, tail_win = out
        trace = RegretTrace(
            algorithm="ccb",
            seed=seed,
            matrix_id=matrix.name,
            steps=steps,
            cumulative_regret=values,
        )
        return CcbRunResult(
            trace=trace,
            wins=wins,
            B=B.astype(bool),
            B_per_arm=Bi.astype(bool),
            L_bar=int(L_bar),
            tail_duels=int(tail_total),
            tail_winner_duels=int(tail_win),
        )

    oracle = ComparisonOracle(
        matrix, seed, checkpoint_ratio=checkpoint_ratio, mark_steps=mark_steps
    )
    state = CcbState(K=matrix.K, alpha=alpha)
    tail_total = tail_win = 0
    for _ in range(horizon):
        c, d = step(state, oracle)
        if oracle.t > tail_start:
            tail_total += 1
            if c in winners and d in winners:
                tail_win += 1
    return CcbRunResult(
        trace=oracle.trace("ccb"),
        wins=oracle.wins,
        B=state.B,
        B_per_arm=state.B_per_arm,
        L_bar=state.L_bar,
        tail_duels=tail_total,
        tail_winner_duels=tail_win,
    )


def run(
    matrix: PreferenceMatrix,
    alpha: float,
    horizon: int,
    seed: int,
    checkpoint_ratio: float = DEFAULT_CHECKPOINT_RATIO,
    mark_steps: tuple[int, ...] = (),
    backend: str = "auto",
) -> RegretTrace:
    """Run CCB for `horizon` duels and return the regret trace."""
    return simulate(
        matrix,
        alpha,
        horizon,
        seed,
        checkpoint_ratio=checkpoint_ratio,
        mark_steps=mark_steps,
        backend=backend,
    ).trace


def coverage_run(
    matrix: PreferenceMatrix,
    alpha: float,
    horizon: int,
    seed: int,
    from_step: int = 2,
) -> bool:
    """Confidence-coverage probe under a uniform-random query policy.

    Duels uniform ordered pairs for `horizon` steps and reports whether
    every pair's confidence interval contained its true probability at
    every learner step in [from_step, horizon].  Exploits that an interval
    can only lose coverage right after its pair's counts change (the
    radius grows between updates), so one check per duel suffices; pairs
    without data and the pinned diagonal are always covered.
    """
    from .rng import Xoshiro256pp

    p = matrix.p
    K = matrix.K
    rng = Xoshiro256pp(seed)
    wins = np.zeros((K, K), dtype=np.int64)
    for t in range(1, horizon + 1):
        i = rng.next_below(K)
        j = rng.next_below(K)
        u = rng.next_double()
        if u < p[i, j]:
            wins[i, j] += 1
        else:
            wins[j, i] += 1
        if i == j:
            continue
        s0 = max(t + 1, from_step)
        if s0 > horizon:
            continue
        n = wins[i, j] + wins[j, i]
        p_hat = wins[i, j] / n
        if abs(p_hat - p[i, j]) > math.sqrt(alpha * math.log(s0) / n):
            return False
    return True
