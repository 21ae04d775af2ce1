# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: the learner step loops, the duel-backed
identification tournament and the shared oracle bookkeeping.

Everything here mirrors the pure-Python reference implementations draw for
draw and float-op for float-op (xoshiro256++ stream, checkpoint schedule,
confidence-bound arithmetic), so traces are bit-identical across backends;
tests/test_backends.py enforces that.
"""

from libc.math cimport INFINITY, log, pow, sqrt

import numpy as np

cdef double INV53 = 1.0 / 9007199254740992.0  # 2^-53

# ---------------------------------------------------------------------------
# xoshiro256++ (seeded via SplitMix64), identical to rng.py

cdef struct Rng:
    unsigned long long s0
    unsigned long long s1
    unsigned long long s2
    unsigned long long s3


cdef inline unsigned long long _splitmix(unsigned long long* state) nogil:
    state[0] = state[0] + 0x9E3779B97F4A7C15ULL
    cdef unsigned long long z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline void rng_seed(Rng* r, unsigned long long seed) nogil:
    cdef unsigned long long st = seed
    r.s0 = _splitmix(&st)
    r.s1 = _splitmix(&st)
    r.s2 = _splitmix(&st)
    r.s3 = _splitmix(&st)


cdef inline unsigned long long rng_next(Rng* r) nogil:
    cdef unsigned long long x = r.s0 + r.s3
    cdef unsigned long long result = ((x << 23) | (x >> 41)) + r.s0
    cdef unsigned long long t = r.s1 << 17
    r.s2 = r.s2 ^ r.s0
    r.s3 = r.s3 ^ r.s1
    r.s1 = r.s1 ^ r.s2
    r.s0 = r.s0 ^ r.s3
    r.s2 = r.s2 ^ t
    r.s3 = (r.s3 << 45) | (r.s3 >> 19)
    return result


cdef inline double rng_double(Rng* r) nogil:
    return <double>(rng_next(r) >> 11) * INV53


cdef inline long long rng_below(Rng* r, long long n) nogil:
    cdef long long k = <long long>(rng_double(r) * <double>n)
    return n - 1 if k >= n else k


# ---------------------------------------------------------------------------
# oracle bookkeeping (duel counter, cumulative regret, checkpoint trail)

cdef struct Sim:
    long long t
    double cum
    long long next_cp
    double ratio
    long long* marks
    long long n_marks
    long long mark_idx
    long long* out_steps
    double* out_vals
    long long n_out


cdef inline void sim_observe(Sim* s) nogil:
    cdef bint hit = 0
    cdef long long nxt
    if s.t == s.next_cp:
        hit = 1
        nxt = <long long>(s.t * s.ratio)
        s.next_cp = nxt if nxt > s.t else s.t + 1
    while s.mark_idx < s.n_marks and s.marks[s.mark_idx] <= s.t:
        if s.marks[s.mark_idx] == s.t:
            hit = 1
        s.mark_idx += 1
    if hit:
        s.out_steps[s.n_out] = s.t
        s.out_vals[s.n_out] = s.cum
        s.n_out += 1


cdef inline void sim_finalize(Sim* s) nogil:
    if s.t > 0 and (s.n_out == 0 or s.out_steps[s.n_out - 1] != s.t):
        s.out_steps[s.n_out] = s.t
        s.out_vals[s.n_out] = s.cum
        s.n_out += 1


cdef long long _count_schedule(long long horizon, double ratio) nogil:
    cdef long long cnt = 0
    cdef long long t = 1
    cdef long long nxt
    while t <= horizon:
        cnt += 1
        nxt = <long long>(t * ratio)
        t = nxt if nxt > t else t + 1
    return cnt


cdef class _Buffers:
    """Owns the checkpoint output arrays for one kernel call."""
    cdef object steps_arr
    cdef object vals_arr
    cdef long long[::1] steps
    cdef double[::1] vals

    def __init__(self, long long horizon, double ratio, long long n_marks):
        cdef long long cap = _count_schedule(horizon, ratio) + n_marks + 2
        self.steps_arr = np.zeros(cap, dtype=np.int64)
        self.vals_arr = np.zeros(cap, dtype=np.float64)
        self.steps = self.steps_arr
        self.vals = self.vals_arr


cdef void _sim_init(Sim* sim, _Buffers buf, double ratio,
                    long long[::1] marks):
    sim.t = 0
    sim.cum = 0.0
    sim.next_cp = 1
    sim.ratio = ratio
    sim.n_marks = marks.shape[0]
    sim.marks = &marks[0] if marks.shape[0] > 0 else NULL
    sim.mark_idx = 0
    sim.out_steps = &buf.steps[0]
    sim.out_vals = &buf.vals[0]
    sim.n_out = 0


# ---------------------------------------------------------------------------
# confidence matrices (diagonal 0.5, [0,1] clamp, no-data -> [0,1])

cdef void _conf_bounds(long long[:, ::1] W, long long t, double alpha,
                       double[:, ::1] U, double[:, ::1] L, long long K) nogil:
    cdef long long i, j, n
    cdef double alnt = alpha * log(<double>t)
    cdef double ph, rad, u, l
    for i in range(K):
        U[i, i] = 0.5
        L[i, i] = 0.5
        for j in range(K):
            if i == j:
                continue
            n = W[i, j] + W[j, i]
            if n == 0:
                U[i, j] = 1.0
                L[i, j] = 0.0
            else:
                ph = <double>W[i, j] / <double>n
                rad = sqrt(alnt / <double>n)
                u = ph + rad
                l = ph - rad
                U[i, j] = u if u < 1.0 else 1.0
                L[i, j] = l if l > 0.0 else 0.0


# ---------------------------------------------------------------------------
# CCB

def ccb_run(const double[:, ::1] p, const double[:, ::1] reg, double alpha,
            long long horizon, unsigned long long seed, double ratio,
            long long[::1] marks, long long tail_start,
            const unsigned char[::1] winners_mask):
    cdef long long K = p.shape[0]
    cdef Rng rng
    rng_seed(&rng, seed)

    cdef _Buffers buf = _Buffers(horizon, ratio, marks.shape[0])
    cdef Sim sim
    _sim_init(&sim, buf, ratio, marks)

    W_arr = np.zeros((K, K), dtype=np.int64)
    B_arr = np.ones(K, dtype=np.uint8)
    Bi_arr = np.zeros((K, K), dtype=np.uint8)
    cdef long long[:, ::1] W = W_arr
    cdef double[:, ::1] U = np.zeros((K, K), dtype=np.float64)
    cdef double[:, ::1] L = np.zeros((K, K), dtype=np.float64)
    cdef unsigned char[::1] B = B_arr
    cdef unsigned char[:, ::1] Bi = Bi_arr
    cdef long long[::1] opt = np.zeros(K, dtype=np.int64)
    cdef long long[::1] pes = np.zeros(K, dtype=np.int64)
    cdef unsigned char[::1] snap = np.zeros(K, dtype=np.uint8)
    cdef long long[::1] mem = np.zeros(K, dtype=np.int64)
    cdef long long[::1] sti = np.zeros(K * K, dtype=np.int64)
    cdef long long[::1] stj = np.zeros(K * K, dtype=np.int64)

    cdef long long L_bar = K
    cdef long long tail_total = 0
    cdef long long tail_win = 0
    cdef long long step, i, j, k, c, d, nsize, keep, pick, r_idx, tmp, n
    cdef long long max_opt, max_pes, cnt, winner, loser
    cdef double u_draw, best_u, val
    cdef bint reset_flag, any_b, restricted, use_short
    cdef bint bad_challenger = 0

    for step in range(1, horizon + 1):
        _conf_bounds(W, step, alpha, U, L, K)
        max_opt = -1
        max_pes = -1
        for i in range(K):
            opt[i] = 0
            pes[i] = 0
            for k in range(K):
                if k == i:
                    continue
                if U[i, k] >= 0.5:
                    opt[i] += 1
                if L[i, k] >= 0.5:
                    pes[i] += 1
            if opt[i] > max_opt:
                max_opt = opt[i]
            if pes[i] > max_pes:
                max_pes = pes[i]

        # 9A: reset disproven hypotheses
        reset_flag = 0
        for i in range(K):
            for j in range(K):
                if Bi[i, j] and L[i, j] > 0.5:
                    reset_flag = 1
                    break
            if reset_flag:
                break
        if reset_flag:
            for i in range(K):
                B[i] = 1
                for j in range(K):
                    Bi[i, j] = 0
            L_bar = K

        # 9B: remove beaten candidates (iterating a membership snapshot)
        for i in range(K):
            snap[i] = B[i]
        for i in range(K):
            if snap[i] and opt[i] < max_pes:
                B[i] = 0
                nsize = 0
                for k in range(K):
                    nsize += Bi[i, k]
                if nsize != L_bar + 1:
                    for k in range(K):
                        Bi[i, k] = 1 if U[i, k] < 0.5 else 0
        any_b = 0
        for i in range(K):
            if B[i]:
                any_b = 1
                break
        if not any_b:
            for i in range(K):
                B[i] = 1
                for j in range(K):
                    Bi[i, j] = 0
            L_bar = K

        # 9C: promote confirmed winners, trim shortlists
        for i in range(K):
            if opt[i] == max_opt and opt[i] == pes[i]:
                B[i] = 1
                for k in range(K):
                    Bi[i, k] = 0
                L_bar = K - 1 - opt[i]
                for j in range(K):
                    if j == i:
                        continue
                    nsize = 0
                    for k in range(K):
                        nsize += Bi[j, k]
                    if nsize < L_bar + 1:
                        for k in range(K):
                            Bi[j, k] = 0
                    elif nsize > L_bar + 1:
                        cnt = 0
                        for k in range(K):
                            if Bi[j, k]:
                                mem[cnt] = k
                                cnt += 1
                        keep = L_bar + 1
                        for k in range(keep):
                            r_idx = k + rng_below(&rng, cnt - k)
                            tmp = mem[k]
                            mem[k] = mem[r_idx]
                            mem[r_idx] = tmp
                        for k in range(K):
                            Bi[j, k] = 0
                        for k in range(keep):
                            Bi[j, mem[k]] = 1

        # line 10: exploration of undecided shortlist pairs
        c = -1
        d = -1
        u_draw = rng_double(&rng)
        if u_draw < 0.25:
            cnt = 0
            for i in range(K):
                for j in range(K):
                    if Bi[i, j] and L[i, j] <= 0.5 and U[i, j] >= 0.5:
                        sti[cnt] = i
                        stj[cnt] = j
                        cnt += 1
            if cnt > 0:
                pick = rng_below(&rng, cnt)
                c = sti[pick]
                d = stj[pick]
        if c < 0:
            # line 11: maybe restrict candidates to the shortlist B
            any_b = 0
            for i in range(K):
                if B[i] and opt[i] == max_opt:
                    any_b = 1
                    break
            restricted = 0
            if any_b:
                if rng_double(&rng) < 2.0 / 3.0:
                    restricted = 1
            # line 12: sample the optimistic winner
            cnt = 0
            for i in range(K):
                if opt[i] == max_opt and (not restricted or B[i]):
                    mem[cnt] = i
                    cnt += 1
            c = mem[rng_below(&rng, cnt)]
            # line 13: challenger pool and argmax
            use_short = rng_double(&rng) < 0.5
            d = -1
            best_u = -INFINITY
            for j in range(K):
                if j != c:
                    if use_short and not Bi[c, j]:
                        continue
                    if L[j, c] > 0.5:
                        continue
                val = U[j, c]
                if val > best_u:
                    d = j
                    best_u = val
                elif val == best_u and d == c and j != c:
                    d = j
        if L[d, c] > 0.5:
            bad_challenger = 1
            break

        # line 14: duel
        u_draw = rng_double(&rng)
        if u_draw < p[c, d]:
            winner = c
            loser = d
        else:
            winner = d
            loser = c
        W[winner, loser] += 1
        sim.t += 1
        sim.cum += reg[c, d]
        sim_observe(&sim)
        if sim.t > tail_start:
            tail_total += 1
            if winners_mask[c] and winners_mask[d]:
                tail_win += 1

    if bad_challenger:
        raise RuntimeError("challenger invariant violated: l[d,c] > 0.5")
    sim_finalize(&sim)
    n = sim.n_out
    return (
        buf.steps_arr[:n].copy(),
        buf.vals_arr[:n].copy(),
        W_arr,
        B_arr,
        Bi_arr,
        int(L_bar),
        int(tail_total),
        int(tail_win),
    )


# ---------------------------------------------------------------------------
# RUCB baseline

def rucb_run(const double[:, ::1] p, const double[:, ::1] reg, double alpha,
             long long horizon, unsigned long long seed, double ratio,
             long long[::1] marks):
    cdef long long K = p.shape[0]
    cdef Rng rng
    rng_seed(&rng, seed)

    cdef _Buffers buf = _Buffers(horizon, ratio, marks.shape[0])
    cdef Sim sim
    _sim_init(&sim, buf, ratio, marks)

    W_arr = np.zeros((K, K), dtype=np.int64)
    cdef long long[:, ::1] W = W_arr
    cdef double[:, ::1] U = np.zeros((K, K), dtype=np.float64)
    cdef double[:, ::1] L = np.zeros((K, K), dtype=np.float64)
    cdef long long[::1] mem = np.zeros(K, dtype=np.int64)

    cdef long long champion = -1
    cdef long long step, i, j, c, d, cnt, winner, loser, n
    cdef double best_u, val, u_draw
    cdef bint champ_in

    for step in range(1, horizon + 1):
        _conf_bounds(W, step, alpha, U, L, K)
        cnt = 0
        for i in range(K):
            n = 0
            for j in range(K):
                if U[i, j] >= 0.5:
                    n += 1
            if n == K:
                mem[cnt] = i
                cnt += 1
        if cnt == 0:
            c = rng_below(&rng, K)
        elif cnt == 1:
            champion = mem[0]
            c = champion
        else:
            champ_in = 0
            for i in range(cnt):
                if mem[i] == champion:
                    champ_in = 1
                    break
            if champion >= 0 and champ_in:
                if rng_double(&rng) < 0.5:
                    c = champion
                else:
                    n = 0
                    for i in range(cnt):
                        if mem[i] != champion:
                            mem[n] = mem[i]
                            n += 1
                    c = mem[rng_below(&rng, n)]
            else:
                c = mem[rng_below(&rng, cnt)]

        d = -1
        best_u = -INFINITY
        for j in range(K):
            val = U[j, c]
            if val > best_u:
                d = j
                best_u = val
            elif val == best_u and d == c and j != c:
                d = j

        u_draw = rng_double(&rng)
        if u_draw < p[c, d]:
            winner = c
            loser = d
        else:
            winner = d
            loser = c
        W[winner, loser] += 1
        sim.t += 1
        sim.cum += reg[c, d]
        sim_observe(&sim)

    sim_finalize(&sim)
    n = sim.n_out
    return buf.steps_arr[:n].copy(), buf.vals_arr[:n].copy()


# ---------------------------------------------------------------------------
# KL machinery (identical to klbandit.py)

cdef inline double c_kl(double m, double q) nogil:
    cdef double out = 0.0
    if q <= 0.0 or q >= 1.0:
        return 0.0 if m == q else INFINITY
    if m > 0.0:
        out += m * log(m / q)
    if m < 1.0:
        out += (1.0 - m) * log((1.0 - m) / (1.0 - q))
    return out


cdef inline double c_threshold(long long t, long long K, double delta) nogil:
    cdef double lnln = log(log(<double>t)) if t > 2 else 0.0
    if lnln < 0.0:
        lnln = 0.0
    return log(4.0 * <double>t * <double>K / delta) + 2.0 * lnln


cdef void c_kl_interval(long long S, long long t, long long K, double delta,
                        double* lo, double* hi) nogil:
    cdef double m = <double>S / <double>t
    cdef double beta = c_threshold(t, K, delta) / <double>t
    cdef double a, b, mid
    if c_kl(m, 0.0) <= beta:
        lo[0] = 0.0
    else:
        a = 0.0
        b = m
        while b - a > 1e-10:
            mid = 0.5 * (a + b)
            if c_kl(m, mid) <= beta:
                b = mid
            else:
                a = mid
        lo[0] = b
    if c_kl(m, 1.0) <= beta:
        hi[0] = 1.0
    else:
        a = m
        b = 1.0
        while b - a > 1e-10:
            mid = 0.5 * (a + b)
            if c_kl(m, mid) <= beta:
                a = mid
            else:
                b = mid
        hi[0] = a


# sequential sign-test thresholds, lazily tabulated per failure probability
cdef struct Cert:
    double delta
    long long K
    double* table
    long long cap


cdef inline double cert_thr(Cert* ct, long long n) nogil:
    cdef double v
    if n < ct.cap:
        v = ct.table[n]
        if v < 0.0:
            v = sqrt(2.0 * <double>n * log(
                4.0 * <double>n * (<double>n + 1.0)
                * <double>ct.K * <double>ct.K / ct.delta))
            ct.table[n] = v
        return v
    return sqrt(2.0 * <double>n * log(
        4.0 * <double>n * (<double>n + 1.0)
        * <double>ct.K * <double>ct.K / ct.delta))


cdef long long _reward_draw(const double[:, ::1] p, const double[:, ::1] reg,
                            long long i, long long K, Rng* rng, Sim* sim,
                            long long stop, Cert* ct, bint* force) nogil:
    """One certified "beats a random opponent" sample; -1 on budget stop."""
    cdef long long j = rng_below(rng, K - 1)
    if j >= i:
        j += 1
    cdef long long n = 0
    cdef long long wins = 0
    cdef long long m2
    cdef double u
    while True:
        if sim.t >= stop:
            force[0] = 1
            return -1
        u = rng_double(rng)
        if u < p[i, j]:
            wins += 1
        n += 1
        sim.t += 1
        sim.cum += reg[i, j]
        sim_observe(sim)
        m2 = 2 * wins - n
        if m2 < 0:
            m2 = -m2
        if <double>m2 > cert_thr(ct, n):
            return 1 if 2 * wins > n else 0


cdef long long _identify_duels(const double[:, ::1] p, const double[:, ::1] reg,
                               long long K, double delta, double eps,
                               Rng* rng, Sim* sim, long long stop, Cert* ct,
                               unsigned char* B, long long* S,
                               double* lo, double* hi) nogil:
    """Elimination tournament over duel-backed rewards; returns the arm."""
    cdef long long i, nb, ret, best, tt
    cdef double num, den, max_lo, max_hi, best_lo
    cdef bint force = 0

    for i in range(K):
        B[i] = 1
        S[i] = 0
        lo[i] = 0.0
        hi[i] = 1.0
    nb = K

    for i in range(K):
        ret = _reward_draw(p, reg, i, K, rng, sim, stop, ct, &force)
        if force:
            break
        S[i] += ret
    tt = 1

    while not force and nb > 1:
        max_lo = -INFINITY
        max_hi = -INFINITY
        for i in range(K):
            if B[i]:
                if lo[i] > max_lo:
                    max_lo = lo[i]
                if hi[i] > max_hi:
                    max_hi = hi[i]
        num = 1.0 - max_lo
        den = 1.0 - max_hi
        if den > 0.0 and num / den <= 1.0 + eps:
            break
        tt += 1
        for i in range(K):
            if B[i]:
                ret = _reward_draw(p, reg, i, K, rng, sim, stop, ct, &force)
                if force:
                    break
                S[i] += ret
        if force:
            break
        for i in range(K):
            if B[i]:
                c_kl_interval(S[i], tt, K, delta, &lo[i], &hi[i])
        max_lo = -INFINITY
        for i in range(K):
            if B[i] and lo[i] > max_lo:
                max_lo = lo[i]
        nb = 0
        for i in range(K):
            if B[i]:
                if hi[i] >= max_lo:
                    nb += 1
                else:
                    B[i] = 0

    best = -1
    best_lo = -INFINITY
    for i in range(K):
        if B[i] and lo[i] > best_lo:
            best = i
            best_lo = lo[i]
    return best


def scb_run(const double[:, ::1] p, const double[:, ::1] reg,
            long long horizon, unsigned long long seed, double ratio,
            long long[::1] marks):
    cdef long long K = p.shape[0]
    cdef Rng rng
    rng_seed(&rng, seed)

    cdef _Buffers buf = _Buffers(horizon, ratio, marks.shape[0])
    cdef Sim sim
    _sim_init(&sim, buf, ratio, marks)

    B_arr = np.zeros(K, dtype=np.uint8)
    S_arr = np.zeros(K, dtype=np.int64)
    lo_arr = np.zeros(K, dtype=np.float64)
    hi_arr = np.zeros(K, dtype=np.float64)
    cdef unsigned char[::1] B = B_arr
    cdef long long[::1] S = S_arr
    cdef double[::1] lo = lo_arr
    cdef double[::1] hi = hi_arr

    table_arr = np.full(1 << 16, -1.0, dtype=np.float64)
    cdef double[::1] table = table_arr
    cdef Cert ct
    ct.K = K
    ct.table = &table[0]
    ct.cap = table.shape[0]

    rounds_arr = np.zeros((64, 5), dtype=np.int64)
    selfreg_arr = np.zeros(64, dtype=np.float64)
    cdef long long[:, ::1] rounds = rounds_arr
    cdef double[::1] selfreg = selfreg_arr

    cdef long long r = 0
    cdef long long n_rounds = 0
    cdef long long start, stop, cand, t0, selfplay, k, n, e2
    cdef double T_d, delta, before

    while sim.t < horizon:
        r += 1
        e2 = (<long long>1) << r
        T_d = pow(2.0, <double>e2)  # 2^(2^r), exact as a power of two
        delta = log(T_d) / T_d
        if delta > 0.5:
            delta = 0.5
        start = sim.t
        if T_d > <double>(horizon - start):
            stop = horizon
        else:
            stop = start + <long long>T_d
        ct.delta = delta
        table_arr.fill(-1.0)

        cand = _identify_duels(p, reg, K, delta, 0.0, &rng, &sim, stop, &ct,
                               &B[0], &S[0], &lo[0], &hi[0])
        t0 = sim.t - start
        before = sim.cum
        selfplay = stop - sim.t
        for k in range(selfplay):
            # self-duel: one outcome draw, as in ComparisonOracle.compare
            rng_double(&rng)
            sim.t += 1
            sim.cum += reg[cand, cand]
            sim_observe(&sim)
        if n_rounds < 64:
            rounds[n_rounds, 0] = r
            rounds[n_rounds, 1] = stop - start
            rounds[n_rounds, 2] = t0
            rounds[n_rounds, 3] = cand
            rounds[n_rounds, 4] = selfplay
            selfreg[n_rounds] = sim.cum - before
            n_rounds += 1

    sim_finalize(&sim)
    n = sim.n_out
    return (
        buf.steps_arr[:n].copy(),
        buf.vals_arr[:n].copy(),
        rounds_arr[:n_rounds].copy(),
        selfreg_arr[:n_rounds].copy(),
    )


def pac_winner_run(const double[:, ::1] p, const double[:, ::1] reg,
                   double delta, double eps, unsigned long long seed,
                   long long max_duels, double ratio):
    """One identification call against a duel oracle with a duel budget."""
    cdef long long K = p.shape[0]
    cdef Rng rng
    rng_seed(&rng, seed)

    cdef _Buffers buf = _Buffers(max_duels, ratio, 0)
    cdef long long[::1] no_marks = np.zeros(0, dtype=np.int64)
    cdef Sim sim
    _sim_init(&sim, buf, ratio, no_marks)

    B_arr = np.zeros(K, dtype=np.uint8)
    S_arr = np.zeros(K, dtype=np.int64)
    lo_arr = np.zeros(K, dtype=np.float64)
    hi_arr = np.zeros(K, dtype=np.float64)
    cdef unsigned char[::1] B = B_arr
    cdef long long[::1] S = S_arr
    cdef double[::1] lo = lo_arr
    cdef double[::1] hi = hi_arr

    table_arr = np.full(1 << 16, -1.0, dtype=np.float64)
    cdef double[::1] table = table_arr
    cdef Cert ct
    ct.K = K
    ct.delta = delta
    ct.table = &table[0]
    ct.cap = table.shape[0]

    cdef long long cand = _identify_duels(
        p, reg, K, delta, eps, &rng, &sim, max_duels, &ct,
        &B[0], &S[0], &lo[0], &hi[0])
    return int(cand), int(sim.t)
