"""Preference matrices, solution concepts and gap quantities.

A dueling-bandit instance is a K x K matrix ``p`` with ``p[i, j]`` the
probability that arm ``i`` wins a duel against arm ``j``.  Rows/columns are
0-indexed throughout the package.

Canonical fixtures (used across the test-suite and available by name from
the CLI and experiment configs):

* ``P3CYCLE`` (K=3): p01 = p12 = p20 = 0.6, complements 0.4, diagonal 0.5.
  Every arm beats exactly one other; all three arms are Copeland winners.
* ``P4`` (K=4): rows ``[.5,.6,.6,.4] [.4,.5,.6,.6] [.4,.4,.5,.6]
  [.6,.4,.4,.5]``.  No Condorcet winner; arms 0 and 1 are the Copeland
  winners.
* ``PCOND5`` (K=5): p[i, j] = 0.6 for i < j and 0.4 for i > j.  Arm 0 is a
  Condorcet winner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import Xoshiro256pp

COMPLEMENT_TOL = 1e-12


class MatrixError(ValueError):
    """Raised for structurally invalid matrices or illegal index arguments."""


class TiesError(MatrixError):
    """Raised when an operation requiring no ties meets a tied pair."""


class InconsistencyError(MatrixError):
    """Raised when derived quantities contradict each other (should not
    happen for matrices that validate under the no-ties requirement)."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver fails to converge."""


@dataclass(frozen=True)
class PreferenceMatrix:
    """K x K win-probability table; the problem instance."""

    p: np.ndarray
    name: str = "matrix"

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.p, dtype=np.float64))
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    @property
    def K(self) -> int:
        return self.p.shape[0]

    def no_ties(self) -> bool:
        """Assumption-A check: no off-diagonal entry equals 0.5 exactly."""
        off = ~np.eye(self.K, dtype=bool)
        return bool(np.all(self.p[off] != 0.5))


def validate(matrix: PreferenceMatrix, require_no_ties: bool = False) -> list[str]:
    """Return the list of violated invariants (empty list = valid).

    Validation reports, it never raises.  With ``require_no_ties`` the
    no-ties condition (off-diagonal entries strictly different from 0.5)
    is checked as well.
    """
    violations: list[str] = []
    p = matrix.p
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        return [f"matrix is not square: shape {p.shape}"]
    K = p.shape[0]
    if K < 2:
        violations.append(f"arm count must be >= 2, got {K}")
    if not np.all(np.isfinite(p)):
        violations.append("non-finite entries present")
        return violations
    bad = np.argwhere((p < 0.0) | (p > 1.0))
    for i, j in bad:
        violations.append(f"entry out of [0,1] at ({i},{j}): {p[i, j]!r}")
    for i in range(K):
        if abs(p[i, i] - 0.5) > COMPLEMENT_TOL:
            violations.append(f"diagonal not 0.5 at ({i},{i}): {p[i, i]!r}")
        for j in range(i + 1, K):
            if abs(p[i, j] + p[j, i] - 1.0) > COMPLEMENT_TOL:
                violations.append(
                    f"row/column complement violated at ({i},{j}): "
                    f"{p[i, j]!r} + {p[j, i]!r} != 1"
                )
    if require_no_ties:
        for i in range(K):
            for j in range(i + 1, K):
                if p[i, j] == 0.5:
                    violations.append(f"tie at ({i},{j}): p == 0.5")
    return violations


def _require_valid(matrix: PreferenceMatrix, no_ties: bool = False) -> None:
    problems = validate(matrix, require_no_ties=no_ties)
    if problems:
        cls = TiesError if any("tie at" in v for v in problems) else MatrixError
        raise cls("; ".join(problems))


def copeland_scores(matrix: PreferenceMatrix) -> np.ndarray:
    """Per-arm number of strictly won matchups (entries > 0.5)."""
    return np.asarray((matrix.p > 0.5).sum(axis=1), dtype=np.int64)


def copeland_winners(matrix: PreferenceMatrix) -> frozenset[int]:
    scores = copeland_scores(matrix)
    return frozenset(np.flatnonzero(scores == scores.max()).tolist())


def normalized_copeland(matrix: PreferenceMatrix) -> np.ndarray:
    return copeland_scores(matrix) / (matrix.K - 1)


def is_condorcet(matrix: PreferenceMatrix) -> int | None:
    """Index of the arm beating all others, or None."""
    p = matrix.p
    for i in range(matrix.K):
        if all(p[i, j] > 0.5 for j in range(matrix.K) if j != i):
            return i
    return None


def borda_winners(matrix: PreferenceMatrix) -> frozenset[int]:
    """Arms maximizing the off-diagonal row sum.

    Row sums use ``math.fsum`` so that permutations of identical entry
    multisets (e.g. the two top rows of P4) tie exactly.
    """
    K = matrix.K
    scores = [
        math.fsum(matrix.p[i, j] for j in range(K) if j != i) for i in range(K)
    ]
    best = max(scores)
    return frozenset(i for i, s in enumerate(scores) if s == best)


def random_walk_winners(
    matrix: PreferenceMatrix,
    residual_tol: float = 1e-10,
    max_iters: int = 10**6,
    tie_tol: float = 1e-9,
) -> frozenset[int]:
    """Arms maximizing the stationary distribution of the preference chain.

    Chain convention (the source only names the concept): from state i,
    move to j != i with probability p[j, i] / K (mass proportional to how
    often j beats i) and stay put with the remaining mass.  The stationary
    vector is found by power iteration to an L1 residual below
    ``residual_tol``; membership in the argmax set uses ``tie_tol`` to
    absorb iteration noise on symmetric instances.
    """
    K = matrix.K
    trans = matrix.p.T / K
    np.fill_diagonal(trans, 0.0)
    trans[np.diag_indices(K)] = 1.0 - trans.sum(axis=1)
    pi = np.full(K, 1.0 / K)
    for _ in range(max_iters):
        nxt = pi @ trans
        if np.abs(nxt - pi).sum() < residual_tol:
            pi = nxt
            break
        pi = nxt
    else:
        raise ConvergenceError(
            f"power iteration did not reach residual {residual_tol} "
            f"within {max_iters} steps"
        )
    return frozenset(np.flatnonzero(pi >= pi.max() - tie_tol).tolist())


@dataclass(frozen=True)
class GapSummary:
    """Every gap quantity derived from a matrix (no ties required).

    ``delta[i, j]`` is |p_ij - 0.5|; ``delta_star_i`` is the decisive-loss
    gap of each non-winner (0 for winners); ``delta_star_ij`` combines the
    two per the pair rule; ``big_delta`` is the instance-level gap entering
    the regret bounds (+inf when every arm is a winner, i.e. no suboptimal
    pair exists).
    """

    cpld_scores: np.ndarray
    winners: frozenset[int]
    C: int
    losses_sets: tuple[frozenset[int], ...]
    L_C: int
    delta: np.ndarray
    delta_min: float
    i_star: np.ndarray  # -1 for winners
    delta_star_i: np.ndarray
    delta_star_ij: np.ndarray
    big_delta: float


def gap_summary(matrix: PreferenceMatrix) -> GapSummary:
    """Compute all gap quantities; requires a valid no-ties matrix."""
    _require_valid(matrix, no_ties=True)
    p = matrix.p
    K = matrix.K
    scores = copeland_scores(matrix)
    winners = frozenset(np.flatnonzero(scores == scores.max()).tolist())
    C = len(winners)
    losses = tuple(
        frozenset(j for j in range(K) if p[i, j] < 0.5) for i in range(K)
    )
    L_C = K - 1 - int(scores.max())

    delta = np.abs(p - 0.5)
    off = ~np.eye(K, dtype=bool)
    delta_min = float(delta[off].min())

    i_star = np.full(K, -1, dtype=np.int64)
    delta_star_i = np.zeros(K)
    for i in range(K):
        if i in winners:
            continue
        if len(losses[i]) < L_C + 1:
            # ruled out for no-ties matrices; reports the inconsistency
            raise InconsistencyError(
                f"non-winner {i} has {len(losses[i])} losses < L_C+1 = {L_C + 1}"
            )
        gaps = sorted(((delta[i, j], j) for j in losses[i]), key=lambda x: -x[0])
        value = gaps[L_C][0]
        # lowest index among the arms realizing the (L_C+1)-th largest gap
        i_star[i] = min(j for g, j in gaps if g == value)
        delta_star_i[i] = value

    delta_star_ij = np.zeros((K, K))
    for i in range(K):
        for j in range(K):
            if i == j:
                continue
            if p[i, j] >= 0.5:
                delta_star_ij[i, j] = delta_star_i[i] + delta[i, j]
            else:
                delta_star_ij[i, j] = max(delta_star_i[i], delta[i, j])

    if C == K:
        big_delta = math.inf
    else:
        cross = min(
            delta[i, j] for i in winners for j in range(K) if j not in winners
        )
        dstar_min = min(delta_star_i[i] for i in range(K) if i not in winners)
        big_delta = float(min(cross, dstar_min))

    return GapSummary(
        cpld_scores=scores,
        winners=winners,
        C=C,
        losses_sets=losses,
        L_C=L_C,
        delta=delta,
        delta_min=delta_min,
        i_star=i_star,
        delta_star_i=delta_star_i,
        delta_star_ij=delta_star_ij,
        big_delta=big_delta,
    )


@dataclass(frozen=True)
class ScbQuantities:
    """Normalized-score quantities entering the scalable-algorithm bounds."""

    cpld: np.ndarray
    delta_i: np.ndarray
    h_i: np.ndarray
    h_inf: float
    eps: float
    delta_i_eps: np.ndarray


def scb_quantities(matrix: PreferenceMatrix, eps: float = 0.0) -> ScbQuantities:
    """Per-arm normalized scores, floored score gaps and hardness sums."""
    if eps < 0:
        raise MatrixError(f"eps must be >= 0, got {eps}")
    _require_valid(matrix, no_ties=True)
    K = matrix.K
    cpld = normalized_copeland(matrix)
    best = cpld.max()
    floor = 1.0 / (K - 1)
    delta_i = np.maximum(best - cpld, floor)
    # fsum: exactly-rounded row sums, independent of summation order
    h_i = np.array(
        [
            math.fsum(
                1.0 / abs(matrix.p[i, j] - 0.5) ** 2
                for j in range(K)
                if j != i
            )
            for i in range(K)
        ]
    )
    delta_i_eps = np.maximum(delta_i, eps * (1.0 - best))
    return ScbQuantities(
        cpld=cpld,
        delta_i=delta_i,
        h_i=h_i,
        h_inf=float(h_i.max()),
        eps=eps,
        delta_i_eps=delta_i_eps,
    )


# ---------------------------------------------------------------------------
# generators / restriction


def gen_cyclic_copeland(K: int, gamma: float, name: str | None = None) -> PreferenceMatrix:
    """Synthetic family: arms 0-2 in a beating cycle, each beating all of
    3..K-1, which are totally ordered among themselves.

    Every off-diagonal entry is 0.5 +/- gamma.  Copeland scores: arms 0-2
    score K-2 (the three winners, no Condorcet winner); arm m >= 3 scores
    K-1-m.
    """
    if K < 4:
        raise MatrixError(f"cyclic construction needs K >= 4, got {K}")
    if not (0.0 < gamma < 0.5):
        raise MatrixError(f"gamma must lie in (0, 0.5), got {gamma}")
    p = np.full((K, K), 0.5)
    win, lose = 0.5 + gamma, 0.5 - gamma

    def beats(i, j):
        p[i, j] = win
        p[j, i] = lose

    beats(0, 1)
    beats(1, 2)
    beats(2, 0)
    for i in range(3):
        for j in range(3, K):
            beats(i, j)
    for i in range(3, K):
        for j in range(i + 1, K):
            beats(i, j)
    return PreferenceMatrix(p, name or f"cyclic(K={K},gamma={gamma:g})")


def gen_random(
    K: int,
    rng: Xoshiro256pp | int,
    min_margin: float,
    name: str | None = None,
) -> PreferenceMatrix:
    """Random matrix: each pair uniform on [0,1], resampled until the entry
    is at least ``min_margin`` away from 0.5 (so the result has no ties)."""
    if not (0.0 < min_margin < 0.5):
        raise MatrixError(f"min_margin must lie in (0, 0.5), got {min_margin}")
    if isinstance(rng, int):
        rng = Xoshiro256pp(rng)
    p = np.full((K, K), 0.5)
    for i in range(K):
        for j in range(i + 1, K):
            while True:
                u = rng.next_double()
                if abs(u - 0.5) >= min_margin:
                    break
            p[i, j] = u
            p[j, i] = 1.0 - u
    return PreferenceMatrix(p, name or f"random(K={K})")


def submatrix(
    matrix: PreferenceMatrix, indices: list[int] | tuple[int, ...]
) -> PreferenceMatrix:
    """Restriction of the matrix to an ordered list of distinct arms."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        raise MatrixError(f"duplicate indices in {idx}")
    for i in idx:
        if not (0 <= i < matrix.K):
            raise MatrixError(f"index {i} out of range for K={matrix.K}")
    sub = matrix.p[np.ix_(idx, idx)]
    return PreferenceMatrix(sub, f"{matrix.name}[{','.join(map(str, idx))}]")


# ---------------------------------------------------------------------------
# CSV file format: K rows x K columns of decimals, no header


def save_matrix(matrix: PreferenceMatrix, path) -> None:
    """Write as CSV with 17 significant digits (lossless for doubles)."""
    np.savetxt(path, matrix.p, fmt="%.17g", delimiter=",")


def load_matrix(path, name: str | None = None) -> PreferenceMatrix:
    """Read a matrix CSV and validate it; raises MatrixError on violations."""
    arr = np.loadtxt(path, delimiter=",", ndmin=2)
    m = PreferenceMatrix(arr, name or f"file:{path}")
    problems = validate(m)
    if problems:
        raise MatrixError(f"{path}: " + "; ".join(problems))
    return m


# ---------------------------------------------------------------------------
# fixtures


def p3cycle() -> PreferenceMatrix:
    p = np.array(
        [
            [0.5, 0.6, 0.4],
            [0.4, 0.5, 0.6],
            [0.6, 0.4, 0.5],
        ]
    )
    return PreferenceMatrix(p, "P3CYCLE")


def p4() -> PreferenceMatrix:
    p = np.array(
        [
            [0.5, 0.6, 0.6, 0.4],
            [0.4, 0.5, 0.6, 0.6],
            [0.4, 0.4, 0.5, 0.6],
            [0.6, 0.4, 0.4, 0.5],
        ]
    )
    return PreferenceMatrix(p, "P4")


def pcond5() -> PreferenceMatrix:
    p = np.full((5, 5), 0.5)
    for i in range(5):
        for j in range(i + 1, 5):
            p[i, j] = 0.6
            p[j, i] = 0.4
    return PreferenceMatrix(p, "PCOND5")


FIXTURES = {"P3CYCLE": p3cycle, "P4": p4, "PCOND5": pcond5}


def fixture(name: str) -> PreferenceMatrix:
    try:
        return FIXTURES[name.upper()]()
    except KeyError:
        raise MatrixError(
            f"unknown fixture {name!r}; available: {sorted(FIXTURES)}"
        ) from None
