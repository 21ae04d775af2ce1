"""Stochastic comparison environment.

One oracle simulates one run: it draws duel outcomes from the preference
matrix, counts wins, accumulates per-duel regret and records a geometric
checkpoint trail.  Randomness comes from the package generator
(xoshiro256++, see :mod:`.rng`); replaying the same seed and query sequence
reproduces the state bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .prefmat import PreferenceMatrix, copeland_scores, normalized_copeland
from .rng import Xoshiro256pp

DEFAULT_CHECKPOINT_RATIO = 1.2


def regret_matrix(matrix: PreferenceMatrix) -> np.ndarray:
    """K x K table of per-duel regret: 2*cpld(best) - cpld(i) - cpld(j)."""
    cpld = normalized_copeland(matrix)
    best = cpld.max()
    return (best - cpld)[:, None] + (best - cpld)[None, :]


def regret_of_pair(matrix: PreferenceMatrix, i: int, j: int) -> float:
    """Per-duel regret of comparing arms i and j; 0 iff both are winners."""
    cpld = normalized_copeland(matrix)
    best = cpld.max()
    return float(2.0 * best - cpld[i] - cpld[j])


@dataclass
class RegretTrace:
    """Checkpointed cumulative-regret series for one run."""

    algorithm: str
    seed: int
    matrix_id: str
    steps: np.ndarray
    cumulative_regret: np.ndarray

    def __post_init__(self):
        self.steps = np.asarray(self.steps, dtype=np.int64)
        self.cumulative_regret = np.asarray(self.cumulative_regret, dtype=np.float64)
        if len(self.steps) != len(self.cumulative_regret):
            raise ValueError("steps and regret series differ in length")
        if np.any(np.diff(self.steps) <= 0):
            raise ValueError("checkpoint steps must be strictly increasing")
        if np.any(np.diff(self.cumulative_regret) < -1e-9):
            raise ValueError("cumulative regret must be non-decreasing")

    def regret_at(self, step: int) -> float:
        """Cumulative regret at a recorded step (exact match required)."""
        pos = np.searchsorted(self.steps, step)
        if pos >= len(self.steps) or self.steps[pos] != step:
            raise KeyError(f"step {step} was not checkpointed")
        return float(self.cumulative_regret[pos])

    @property
    def final_regret(self) -> float:
        return float(self.cumulative_regret[-1])

    @property
    def horizon(self) -> int:
        return int(self.steps[-1])


class _Checkpoints:
    """Geometric checkpoint schedule with optional forced marks.

    Records at t = 1, then whenever t reaches ``int(prev * ratio)`` (at
    least prev + 1), at every step listed in ``marks`` and, via
    :meth:`finalize`, at the horizon.
    """

    __slots__ = ("ratio", "steps", "values", "next_cp", "marks", "mark_idx")

    def __init__(self, ratio: float, marks: tuple[int, ...] = ()):
        if ratio <= 1.0:
            raise ValueError(f"checkpoint ratio must exceed 1, got {ratio}")
        self.ratio = ratio
        self.steps: list[int] = []
        self.values: list[float] = []
        self.next_cp = 1
        self.marks = tuple(sorted(set(marks)))
        self.mark_idx = 0

    def observe(self, t: int, cum: float) -> None:
        hit = False
        if t == self.next_cp:
            hit = True
            nxt = int(t * self.ratio)
            self.next_cp = nxt if nxt > t else t + 1
        while self.mark_idx < len(self.marks) and self.marks[self.mark_idx] <= t:
            if self.marks[self.mark_idx] == t:
                hit = True
            self.mark_idx += 1
        if hit:
            self.steps.append(t)
            self.values.append(cum)

    def finalize(self, t: int, cum: float) -> None:
        if t > 0 and (not self.steps or self.steps[-1] != t):
            self.steps.append(t)
            self.values.append(cum)


class ComparisonOracle:
    """Simulates duels for one run; single-owner, not thread-safe.

    ``wins[i, j]`` counts the times i beat j (self-duels increment the
    diagonal), ``t`` counts duels issued, and ``cumulative_regret``
    accumulates the per-duel regret of the pairs queried.
    """

    def __init__(
        self,
        matrix: PreferenceMatrix,
        seed: int,
        checkpoint_ratio: float = DEFAULT_CHECKPOINT_RATIO,
        mark_steps: tuple[int, ...] = (),
    ):
        self.matrix = matrix
        self.p = matrix.p
        self.K = matrix.K
        self.seed = seed
        self.rng = Xoshiro256pp(seed)
        self.wins = np.zeros((self.K, self.K), dtype=np.int64)
        self.t = 0
        self.cumulative_regret = 0.0
        self.reg = regret_matrix(matrix)
        self._checkpoints = _Checkpoints(checkpoint_ratio, mark_steps)

    def compare(self, i: int, j: int) -> int:
        """Duel arms i and j; returns the winner index.

        Arm i wins with probability p[i, j]; for i == j this is a fair
        coin and the diagonal win count is incremented either way.
        """
        if not (0 <= i < self.K and 0 <= j < self.K):
            raise IndexError(f"arm index out of range: ({i},{j}) for K={self.K}")
        u = self.rng.next_double()
        winner, loser = (i, j) if u < self.p[i, j] else (j, i)
        self.wins[winner, loser] += 1
        self.t += 1
        self.cumulative_regret += self.reg[i, j]
        self._checkpoints.observe(self.t, self.cumulative_regret)
        return winner

    def trace(self, algorithm: str) -> RegretTrace:
        """Finalize the checkpoint trail into a RegretTrace."""
        self._checkpoints.finalize(self.t, self.cumulative_regret)
        return RegretTrace(
            algorithm=algorithm,
            seed=self.seed,
            matrix_id=self.matrix.name,
            steps=np.array(self._checkpoints.steps, dtype=np.int64),
            cumulative_regret=np.array(self._checkpoints.values),
        )
