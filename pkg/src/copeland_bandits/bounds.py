"""Closed-form calculators for the theoretical quantities.

Everything here is diagnostic: confidence horizon C(delta), the pairwise
comparison budgets N-hat, the convergence time T_delta, the three additive
terms of the high-probability regret bound, and the scalable algorithm's
bound shape.  For alpha close to 0.5 these quantities are astronomically
large (C(delta) scales like x^(1/(2*alpha-1))); they are computed in log
space and reported as floats, so a vacuously huge bound is still finite
and comparable against observed regret.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .prefmat import GapSummary, PreferenceMatrix, gap_summary, scb_quantities

VACUOUS_ABOVE = float(2**62)


class BoundDivergence(RuntimeError):
    """Raised when a bound quantity cannot be represented as a finite float."""


def c_delta(K: int, alpha: float, delta: float) -> float:
    """Confidence horizon ((4a-1) K^2 / ((2a-1) delta))^(1/(2a-1)).

    Beyond this time, all confidence intervals cover their probabilities
    with probability at least 1 - delta.  Computed in log space; returns
    +inf past float range.
    """
    if alpha <= 0.5:
        raise ValueError(f"alpha must exceed 0.5, got {alpha}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0,1), got {delta}")
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    log_c = (
        math.log(4.0 * alpha - 1.0)
        + 2.0 * math.log(K)
        - math.log(2.0 * alpha - 1.0)
        - math.log(delta)
    ) / (2.0 * alpha - 1.0)
    if log_c > 709.0:
        return math.inf
    return math.exp(log_c)


def _delta_star_matrix(gaps: GapSummary) -> np.ndarray:
    return gaps.delta_star_ij


def n_hat(
    matrix: PreferenceMatrix, alpha: float, delta: float, t: float
) -> tuple[np.ndarray, float]:
    """Per-pair comparison budgets at time t, and their total.

    Off-diagonal entries are 4 alpha ln(t) / (Delta*_ij)^2; the diagonal is
    t for winners and 0 for non-winners.  The total sums the off-diagonal
    entries plus one.  (delta only names the confidence context; the
    formula does not use it.)
    """
    if t <= 1:
        raise ValueError(f"t must exceed 1, got {t}")
    gaps = gap_summary(matrix)
    K = matrix.K
    dstar = _delta_star_matrix(gaps)
    out = np.zeros((K, K))
    lnt = math.log(t)
    for i in range(K):
        for j in range(K):
            if i == j:
                out[i, j] = t if i in gaps.winners else 0.0
            else:
                if dstar[i, j] == 0.0:
                    raise BoundDivergence(
                        f"zero pair gap at ({i},{j}); matrix violates the "
                        "no-ties assumption"
                    )
                out[i, j] = 4.0 * alpha * lnt / dstar[i, j] ** 2
    off = ~np.eye(K, dtype=bool)
    return out, float(out[off].sum() + 1.0)


def _t_delta_coeffs(
    matrix: PreferenceMatrix, alpha: float, delta: float
) -> tuple[float, float]:
    """Constants (A, B) with T_delta the least fixed point of A + B ln t."""
    gaps = gap_summary(matrix)
    K = matrix.K
    L = gaps.L_C
    dstar = _delta_star_matrix(gaps)
    off = ~np.eye(K, dtype=bool)
    inv_sq = np.zeros((K, K))
    inv_sq[off] = 1.0 / dstar[off] ** 2
    sum_all = float(inv_sq.sum())
    non_winners = [i for i in range(K) if i not in gaps.winners]
    max_row = max((float(inv_sq[i].sum()) for i in non_winners), default=0.0)

    A = (
        c_delta(K, alpha, delta / 2.0)
        + 8.0 * K * K * (L + 1) ** 2 * math.log(6.0 * K * K / delta)
        + K * K * math.log(6.0 * K / delta)
        + 1.0
    )
    B = (
        32.0 * alpha * K * (L + 1) / gaps.delta_min**2
        + 4.0 * alpha * sum_all
        + 4.0 * K * 4.0 * alpha * max_row
    )
    return A, B


def t_delta(matrix: PreferenceMatrix, alpha: float, delta: float) -> float:
    """Smallest t satisfying t >= A + B ln t (the Definition-3 threshold).

    Found by the monotone fixed-point iteration t <- A + B ln t starting
    just above the confidence horizon; the ceiling is applied when the
    value is small enough for integer resolution to mean anything.  Above
    ``VACUOUS_ABOVE`` (2^62) the bound is vacuous at any practical horizon
    but still finite; only a float-range overflow raises.
    """
    A, B = _t_delta_coeffs(matrix, alpha, delta)
    if not math.isfinite(A) or not math.isfinite(B):
        raise BoundDivergence(
            f"fixed-point constants overflow float range (A={A}, B={B})"
        )
    t = max(c_delta(matrix.K, alpha, delta / 2.0) + 2.0, 2.0)
    for _ in range(500):
        nxt = A + B * math.log(t)
        if not math.isfinite(nxt):
            raise BoundDivergence("fixed-point iteration overflowed")
        if abs(nxt - t) < 1.0:
            t = nxt
            break
        t = nxt
    else:
        raise BoundDivergence("fixed-point iteration did not converge")
    if t < VACUOUS_ABOVE:
        out = float(math.ceil(t))
        while out < A + B * math.log(out):
            out += 1.0
        return out
    return t


def a_terms(
    matrix: PreferenceMatrix, alpha: float, delta: float
) -> tuple[float, float, float]:
    """The three additive terms of the high-probability regret bound."""
    gaps = gap_summary(matrix)
    K = matrix.K
    winners = gaps.winners
    non_winners = [i for i in range(K) if i not in winners]

    t_half = t_delta(matrix, alpha, delta / 2.0)
    _, nhat_total = n_hat(matrix, alpha, delta, t_half)
    a1 = c_delta(K, alpha, delta / 4.0) + nhat_total

    ln_2k = math.log(2.0 * K / delta)
    a2 = sum(
        math.sqrt(gaps.L_C + 1.0) / gaps.delta_star_i[i] for i in non_winners
    ) * ln_2k

    a3 = sum(
        1.0 / gaps.delta[i, j] ** 2
        for i in winners
        for j in non_winners
    ) + 2.0 * sum(
        (gaps.L_C + 1.0) / gaps.delta_star_i[i] ** 2 for i in non_winners
    )
    return a1, a2, a3


def theorem1_bound(
    matrix: PreferenceMatrix, alpha: float, delta: float, T: float
) -> float:
    """High-probability cumulative-regret bound: A1 + A2 sqrt(ln T) + A3 ln T."""
    a1, a2, a3 = a_terms(matrix, alpha, delta)
    lnT = math.log(T)
    return a1 + a2 * math.sqrt(lnT) + a3 * lnT


def theorem2_shape(matrix: PreferenceMatrix, T: float) -> float:
    """Shape of the scalable algorithm's expected-regret bound (no constant):
    (1/K) sum_i H_i (1 - cpld_i) / Delta_i^2 * ln T."""
    q = scb_quantities(matrix)
    K = matrix.K
    total = float(
        np.sum(q.h_i * (1.0 - q.cpld) / q.delta_i**2)
    )
    return total / K * math.log(T)


@dataclass(frozen=True)
class BoundReport:
    """All bound diagnostics for one (matrix, alpha, delta, horizon)."""

    alpha: float
    delta: float
    horizon: float
    c_delta: float
    n_hat_matrix: np.ndarray
    n_hat_total: float
    t_delta: float
    a1: float
    a2: float
    a3: float
    ccb_bound: float
    scb_bound_shape: float

    @property
    def vacuous(self) -> bool:
        """True when T_delta exceeds any practically simulable horizon."""
        return self.t_delta > VACUOUS_ABOVE

    def to_json(self) -> str:
        return json.dumps(
            {
                "cDelta": self.c_delta,
                "nHatTotal": self.n_hat_total,
                "tDelta": self.t_delta,
                "a1": self.a1,
                "a2": self.a2,
                "a3": self.a3,
            }
        )


def bound_report(
    matrix: PreferenceMatrix, alpha: float, delta: float, horizon: float
) -> BoundReport:
    nh_matrix, nh_total = n_hat(matrix, alpha, delta, horizon)
    a1, a2, a3 = a_terms(matrix, alpha, delta)
    lnT = math.log(horizon)
    return BoundReport(
        alpha=alpha,
        delta=delta,
        horizon=horizon,
        c_delta=c_delta(matrix.K, alpha, delta),
        n_hat_matrix=nh_matrix,
        n_hat_total=nh_total,
        t_delta=t_delta(matrix, alpha, delta),
        a1=a1,
        a2=a2,
        a3=a3,
        ccb_bound=a1 + a2 * math.sqrt(lnT) + a3 * lnT,
        scb_bound_shape=theorem2_shape(matrix, horizon),
    )
