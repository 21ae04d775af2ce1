"""Independent brute-force oracles used by the tests.

Everything here is re-derived straight from the definitions with plain
loops and deliberately shares no code with the package; several tests
assert exact equality between the package and these transcriptions.
"""
from __future__ import annotations

import math

import numpy as np


def brute_gap_summary(p) -> dict:
    """Direct transcription of the gap definitions over a raw matrix."""
    p = np.asarray(p, dtype=float)
    K = p.shape[0]
    scores = [
        sum(1 for j in range(K) if j != i and p[i][j] > 0.5) for i in range(K)
    ]
    best = max(scores)
    winners = {i for i in range(K) if scores[i] == best}
    losses = [
        {j for j in range(K) if j != i and p[i][j] < 0.5} for i in range(K)
    ]
    l_c = K - 1 - best
    delta = [[abs(p[i][j] - 0.5) for j in range(K)] for i in range(K)]
    delta_min = min(delta[i][j] for i in range(K) for j in range(K) if i != j)

    dstar_i = [0.0] * K
    istar = [-1] * K
    for i in range(K):
        if i in winners:
            continue
        ranked = sorted(((delta[i][j], j) for j in losses[i]),
                        key=lambda g: (-g[0], g[1]))
        value = ranked[l_c][0]
        dstar_i[i] = value
        istar[i] = min(j for g, j in ranked if g == value)

    dstar_ij = [[0.0] * K for _ in range(K)]
    for i in range(K):
        for j in range(K):
            if i == j:
                continue
            if p[i][j] >= 0.5:
                dstar_ij[i][j] = dstar_i[i] + delta[i][j]
            else:
                dstar_ij[i][j] = max(dstar_i[i], delta[i][j])

    if len(winners) == K:
        big = math.inf
    else:
        cross = min(
            delta[i][j] for i in winners for j in range(K) if j not in winners
        )
        big = min(cross, min(dstar_i[i] for i in range(K) if i not in winners))

    return {
        "scores": scores,
        "winners": winners,
        "C": len(winners),
        "losses": losses,
        "L_C": l_c,
        "delta": delta,
        "delta_min": delta_min,
        "i_star": istar,
        "delta_star_i": dstar_i,
        "delta_star_ij": dstar_ij,
        "big_delta": big,
    }


def brute_scb_quantities(p, eps: float) -> dict:
    """Direct transcription of the normalized-score quantities."""
    p = np.asarray(p, dtype=float)
    K = p.shape[0]
    cpld = [
        sum(1 for j in range(K) if j != i and p[i][j] > 0.5) / (K - 1)
        for i in range(K)
    ]
    best = max(cpld)
    delta_i = [max(best - cpld[i], 1.0 / (K - 1)) for i in range(K)]
    h_i = [
        math.fsum(1.0 / abs(p[i][j] - 0.5) ** 2 for j in range(K) if j != i)
        for i in range(K)
    ]
    return {
        "cpld": cpld,
        "delta_i": delta_i,
        "h_i": h_i,
        "h_inf": max(h_i),
        "delta_i_eps": [max(delta_i[i], eps * (1.0 - best)) for i in range(K)],
    }


def stationary_distribution(p) -> np.ndarray:
    """Dense linear solve for the preference chain's stationary vector."""
    p = np.asarray(p, dtype=float)
    K = p.shape[0]
    trans = p.T / K
    np.fill_diagonal(trans, 0.0)
    trans[np.diag_indices(K)] = 1.0 - trans.sum(axis=1)
    # pi (M - I) = 0 with sum(pi) = 1
    A = np.vstack([(trans.T - np.eye(K))[:-1], np.ones(K)])
    b = np.zeros(K)
    b[-1] = 1.0
    return np.linalg.solve(A, b)


def bernoulli_kl(p: float, q: float) -> float:
    terms = 0.0
    if p > 0:
        terms += p * math.log(p / q)
    if p < 1:
        terms += (1 - p) * math.log((1 - p) / (1 - q))
    return terms


def kl_interval_scan(S: int, t: int, K: int, delta: float, grid: int = 4_000_001):
    """Grid-scan interval endpoints (coarse but implementation-independent)."""
    m = S / t
    lnln = math.log(math.log(t)) if t > 2 else 0.0
    beta = (math.log(4.0 * t * K / delta) + 2.0 * max(lnln, 0.0)) / t
    qs = np.linspace(1e-9, 1 - 1e-9, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(qs > 0, m * np.log(np.maximum(m, 1e-300) / qs), 0.0)
        if m < 1:
            vals = vals + (1 - m) * np.log((1 - m) / (1 - qs))
    inside = qs[vals <= beta]
    return float(inside.min()), float(inside.max())


def first_certifying_n(K: int, delta: float, margin: float, n_max: int = 100_000) -> int:
    """First n at which the anytime radius drops below `margin`."""
    for n in range(1, n_max):
        r = math.sqrt(math.log(4.0 * n * (n + 1) * K * K / delta) / (2.0 * n))
        if r < margin:
            return n
    raise AssertionError("no certifying n found")


def brute_t_delta(p, alpha: float, delta: float) -> float:
    """Independent re-implementation of the convergence-time fixed point."""
    g = brute_gap_summary(p)
    K = len(g["scores"])
    l_c = g["L_C"]
    c_half = (
        (4 * alpha - 1) * K * K / ((2 * alpha - 1) * (delta / 2))
    ) ** (1.0 / (2 * alpha - 1))
    const = (
        c_half
        + 8 * K * K * (l_c + 1) ** 2 * math.log(6 * K * K / delta)
        + K * K * math.log(6 * K / delta)
        + 1.0
    )
    dstar = g["delta_star_ij"]
    sum_all = sum(
        1.0 / dstar[i][j] ** 2 for i in range(K) for j in range(K) if i != j
    )
    slope = 32 * alpha * K * (l_c + 1) / g["delta_min"] ** 2 + 4 * alpha * sum_all
    non_winners = [i for i in range(K) if i not in g["winners"]]
    if non_winners:
        max_row = max(
            sum(1.0 / dstar[i][j] ** 2 for j in range(K) if j != i)
            for i in non_winners
        )
        slope += 4 * K * 4 * alpha * max_row
    t = c_half + 2.0
    for _ in range(1000):
        nxt = const + slope * math.log(t)
        if abs(nxt - t) < 0.5:
            return nxt
        t = nxt
    return t
