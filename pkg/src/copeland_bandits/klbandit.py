"""KL-divergence-based elimination for approximate best-arm identification.

Arms are Bernoulli reward oracles.  Each surviving arm is sampled once per
round; per-arm confidence sets are the KL balls
``{q : t * d(S/t, q) <= ln(4tK/delta) + 2 max(ln ln t, 0)}``
and an arm is eliminated as soon as some survivor's interval sits strictly
above its own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

BISECT_TOL = 1e-10


class BudgetExhausted(RuntimeError):
    """Raised by reward oracles / identify when a sampling budget runs out.

    The in-progress state remains readable, so callers can fall back to the
    current best survivor (the force-termination rule of the regret loop).
    """


def kl_div(p: float, q: float) -> float:
    """Bernoulli KL divergence d(p, q), with 0*ln(0) = 0.

    Returns +inf when q is 0 or 1 and p differs from it.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0,1], got {p}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0,1], got {q}")
    if q <= 0.0 or q >= 1.0:
        return 0.0 if p == q else math.inf
    out = 0.0
    if p > 0.0:
        out += p * math.log(p / q)
    if p < 1.0:
        out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out


def threshold(t: int, K: int, delta: float) -> float:
    """Divergence-units confidence radius: ln(4tK/delta) + 2 max(lnln t, 0).

    The ln ln term is clamped at 0; it is negative at t = 2 and the bound
    is meant asymptotically.
    """
    lnln = math.log(math.log(t)) if t > 2 else 0.0
    return math.log(4.0 * t * K / delta) + 2.0 * max(lnln, 0.0)


@lru_cache(maxsize=1 << 18)
def _interval_cached(S: int, t: int, K: int, delta: float) -> tuple[float, float]:
    m = S / t
    beta = threshold(t, K, delta) / t

    def inside(q: float) -> bool:
        return kl_div(m, q) <= beta

    if inside(0.0):  # only possible when m == 0
        lo = 0.0
    else:
        a, b = 0.0, m  # d(m, .) decreasing here
        while b - a > BISECT_TOL:
            mid = 0.5 * (a + b)
            if inside(mid):
                b = mid
            else:
                a = mid
        lo = b
    if inside(1.0):  # only possible when m == 1
        hi = 1.0
    else:
        a, b = m, 1.0  # d(m, .) increasing here
        while b - a > BISECT_TOL:
            mid = 0.5 * (a + b)
            if inside(mid):
                a = mid
            else:
                b = mid
        hi = a
    return lo, hi


def kl_interval(S: int, t: int, K: int, delta: float) -> tuple[float, float]:
    """Confidence interval {q : t*d(S/t, q) <= threshold(t, K, delta)}.

    Endpoints are found by bisection on each side of the unimodal
    divergence, to 1e-10 absolute tolerance, clipped to [0, 1] and cached
    per (S, t, K, delta).  Always contains S/t.
    """
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if not 0 <= S <= t:
        raise ValueError(f"S must lie in [0, t], got S={S}, t={t}")
    return _interval_cached(int(S), int(t), int(K), float(delta))


@dataclass
class KlBanditState:
    """Mutable state of one elimination run.

    Arms outside ``B`` are never sampled again; their intervals freeze at
    the values they had when eliminated.
    """

    K: int
    delta: float
    eps: float
    B: list[int] = field(init=False)
    S: list[int] = field(init=False)
    t: int = field(init=False, default=0)
    lo: list[float] = field(init=False)
    hi: list[float] = field(init=False)
    samples: list[int] = field(init=False)

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0,1), got {self.delta}")
        if self.eps < 0.0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        self.B = list(range(self.K))
        self.S = [0] * self.K
        self.lo = [0.0] * self.K
        self.hi = [1.0] * self.K
        self.samples = [0] * self.K

    def current_best(self) -> int:
        """Argmax of interval lower bounds among survivors (ties: lowest)."""
        return max(self.B, key=lambda i: (self.lo[i], -i))


@dataclass(frozen=True)
class IdentifyResult:
    arm: int
    samples: tuple[int, ...]
    state: KlBanditState


def identify(
    reward: Callable[[int], int],
    K: int,
    delta: float,
    eps: float = 0.0,
    state: KlBanditState | None = None,
    max_rounds: int | None = None,
) -> IdentifyResult:
    """Run the elimination tournament; returns the surviving best arm.

    ``reward(i)`` must return 0 or 1.  Each arm is sampled once up front;
    afterwards every survivor is sampled once per round, intervals are
    recomputed and dominated survivors dropped.  The loop stops when
    ``(1 - max lo) / (1 - max hi) <= 1 + eps`` with a positive denominator
    (a zero or negative denominator means "keep going"), or when a single
    survivor remains.  At eps = 0 only the singleton exit can fire, since
    every survivor interval has positive width.

    ``max_rounds`` bounds the number of sampling rounds; on hitting it (or
    on :class:`BudgetExhausted` escaping from ``reward``) the current
    argmax-lo survivor is returned — the same fallback the regret loop
    applies when force-terminating an identification call.  Without a
    bound, instances whose top reward means are exactly tied make the
    eps = 0 loop run forever by construction.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    st = state if state is not None else KlBanditState(K=K, delta=delta, eps=eps)
    if st.K != K:
        raise ValueError("state K does not match")

    try:
        for i in range(K):
            st.S[i] += reward(i)
            st.samples[i] += 1
        st.t = 1

        while len(st.B) > 1:
            num = 1.0 - max(st.lo[i] for i in st.B)
            den = 1.0 - max(st.hi[i] for i in st.B)
            if den > 0.0 and num / den <= 1.0 + st.eps:
                break
            if max_rounds is not None and st.t >= max_rounds:
                break
            st.t += 1
            for i in st.B:
                st.S[i] += reward(i)
                st.samples[i] += 1
            for i in st.B:
                st.lo[i], st.hi[i] = kl_interval(st.S[i], st.t, K, st.delta)
            max_lo = max(st.lo[i] for i in st.B)
            st.B = [i for i in st.B if st.hi[i] >= max_lo]
    except BudgetExhausted:
        pass
    return IdentifyResult(st.current_best(), tuple(st.samples), st)
