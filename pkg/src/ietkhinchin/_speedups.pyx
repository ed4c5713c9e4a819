# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the pure-Python kernels in ``_kernel``.

Each function performs the same floating-point operations in the same order
as its pure counterpart, so results are bit-identical; tests assert that.
"""

from libc.stdlib cimport malloc, free

OK = 0
PRECISION = 1
TIE = 2
BUDGET = 3

REDUCED = 5
NOT_REDUCED = 4

DEF MAXD = 16


cdef inline int _row_insert_after_winner(int *row, int d, int winner, int loser) nogil:
    # row currently ends with loser; reinsert it right after winner
    cdef int pos = 0
    cdef int i
    while row[pos] != winner:
        pos += 1
    for i in range(d - 1, pos + 1, -1):
        row[i] = row[i - 1]
    row[pos + 1] = loser
    return 0


def induction_arrows(top, bot, lengths, int max_steps, double band):
    cdef int d = len(lengths)
    cdef int ctop[MAXD]
    cdef int cbot[MAXD]
    cdef double clen[MAXD]
    cdef int i
    if d > MAXD:
        raise ValueError("alphabet too large for the compiled kernel")
    for i in range(d):
        ctop[i] = top[i]
        cbot[i] = bot[i]
        clen[i] = lengths[i]
    cdef double total = 0.0
    for i in range(d):
        total += clen[i]
    types = []
    cdef double lt, lb, diff
    cdef int winner, loser, step
    for step in range(max_steps):
        lt = clen[ctop[d - 1]]
        lb = clen[cbot[d - 1]]
        diff = lt - lb
        if diff < 0.0:
            diff = -diff
        if diff < band * total:
            return types, (TIE if lt == lb else PRECISION)
        if lt > lb:
            winner = ctop[d - 1]
            loser = cbot[d - 1]
            clen[winner] = clen[winner] - clen[loser]
            _row_insert_after_winner(cbot, d, winner, loser)
            types.append(0)
        else:
            winner = cbot[d - 1]
            loser = ctop[d - 1]
            clen[winner] = clen[winner] - clen[loser]
            _row_insert_after_winner(ctop, d, winner, loser)
            types.append(1)
        total = total - clen[loser]
    return types, OK


def scan_solutions(top, bot, lengths, long long n_max, phi_table, double band,
                   long long max_steps):
    cdef int d = len(lengths)
    cdef int ctop[MAXD]
    cdef int cbot[MAXD]
    cdef double clen[MAXD]
    cdef double u_top[MAXD]
    cdef double u_bot[MAXD]
    cdef long long l_cnt[MAXD]
    cdef long long h_cnt[MAXD]
    cdef long long q_cnt[MAXD]
    cdef bint beta_ok[MAXD]
    cdef bint alpha_ok[MAXD]
    cdef int i
    cdef long long i_n
    cdef double total = 0.0
    cdef long long steps = 0
    cdef long long min_l, min_h, n
    cdef bint have_l, have_h, kind_top
    cdef double lt, lb, diff, acc, gap, margin
    cdef int winner, loser, beta, alpha
    cdef double *phi
    if d > MAXD:
        raise ValueError("alphabet too large for the compiled kernel")
    phi = <double *> malloc((n_max + 1) * sizeof(double))
    if phi == NULL:
        raise MemoryError()
    try:
        for i_n in range(n_max + 1):
            phi[i_n] = phi_table[i_n]
        for i in range(d):
            ctop[i] = top[i]
            cbot[i] = bot[i]
            clen[i] = lengths[i]
            l_cnt[i] = 0
            h_cnt[i] = 0
            q_cnt[i] = 1
            beta_ok[i] = False
            alpha_ok[i] = False
        for i in range(1, d):
            alpha_ok[ctop[i]] = True
            beta_ok[cbot[i]] = True
        for i in range(d):
            total += clen[i]
        cands = []
        while True:
            min_l = 0
            min_h = 0
            have_l = False
            have_h = False
            for i in range(d):
                if beta_ok[i] and (not have_l or l_cnt[i] < min_l):
                    min_l = l_cnt[i]
                    have_l = True
                if alpha_ok[i] and (not have_h or h_cnt[i] < min_h):
                    min_h = h_cnt[i]
                    have_h = True
            if (not have_l) or (not have_h) or min_l + min_h > n_max:
                return OK, cands, steps
            if steps >= max_steps:
                return BUDGET, cands, steps
            lt = clen[ctop[d - 1]]
            lb = clen[cbot[d - 1]]
            diff = lt - lb
            if diff < 0.0:
                diff = -diff
            if diff < band * total:
                return (TIE if lt == lb else PRECISION), cands, steps
            if lt > lb:
                winner = ctop[d - 1]
                loser = cbot[d - 1]
                kind_top = True
            else:
                winner = cbot[d - 1]
                loser = ctop[d - 1]
                kind_top = False
            clen[winner] = clen[winner] - clen[loser]
            if kind_top:
                _row_insert_after_winner(cbot, d, winner, loser)
                l_cnt[loser] += q_cnt[winner]
            else:
                _row_insert_after_winner(ctop, d, winner, loser)
                h_cnt[loser] += q_cnt[winner]
            q_cnt[loser] += q_cnt[winner]
            total = total - clen[loser]
            steps += 1

            acc = 0.0
            for i in range(d):
                u_top[ctop[i]] = acc
                acc += clen[ctop[i]]
            acc = 0.0
            for i in range(d):
                u_bot[cbot[i]] = acc
                acc += clen[cbot[i]]
            if kind_top:
                beta = loser
                if beta_ok[beta]:
                    for alpha in range(d):
                        if not alpha_ok[alpha]:
                            continue
                        n = l_cnt[beta] + h_cnt[alpha]
                        if n < 1 or n > n_max:
                            continue
                        gap = u_bot[beta] - u_top[alpha]
                        if gap < 0.0:
                            gap = -gap
                        margin = gap - phi[n]
                        if margin < 0.0:
                            margin = -margin
                        if margin < band * total:
                            return PRECISION, cands, steps
                        if gap < phi[n]:
                            cands.append((beta, alpha, n, gap))
            else:
                alpha = loser
                if alpha_ok[alpha]:
                    for beta in range(d):
                        if not beta_ok[beta]:
                            continue
                        n = l_cnt[beta] + h_cnt[alpha]
                        if n < 1 or n > n_max:
                            continue
                        gap = u_bot[beta] - u_top[alpha]
                        if gap < 0.0:
                            gap = -gap
                        margin = gap - phi[n]
                        if margin < 0.0:
                            margin = -margin
                        if margin < band * total:
                            return PRECISION, cands, steps
                        if gap < phi[n]:
                            cands.append((beta, alpha, n, gap))
    finally:
        free(phi)


def reduced_check(top, bot, lengths, int beta, int alpha, long long n, double band):
    cdef int d = len(lengths)
    cdef int ctop[MAXD]
    cdef int cbot[MAXD]
    cdef double clen[MAXD]
    cdef double u_top[MAXD]
    cdef double u_bot[MAXD]
    cdef double tb_left[MAXD]
    cdef double tb_right[MAXD]
    cdef double tb_shift[MAXD]
    cdef double bb_left[MAXD]
    cdef double bb_right[MAXD]
    cdef double bb_shift[MAXD]
    cdef double sing[2 * MAXD]
    cdef int i, nsing
    if d > MAXD:
        raise ValueError("alphabet too large for the compiled kernel")
    for i in range(d):
        ctop[i] = top[i]
        cbot[i] = bot[i]
        clen[i] = lengths[i]
    cdef double total = 0.0
    for i in range(d):
        total += clen[i]
    cdef double guard = band * total
    cdef double acc = 0.0
    for i in range(d):
        u_top[ctop[i]] = acc
        acc += clen[ctop[i]]
    acc = 0.0
    for i in range(d):
        u_bot[cbot[i]] = acc
        acc += clen[cbot[i]]
    acc = 0.0
    for i in range(d):
        tb_left[i] = acc
        tb_right[i] = acc + clen[ctop[i]]
        tb_shift[i] = u_bot[ctop[i]] - acc
        acc += clen[ctop[i]]
    acc = 0.0
    for i in range(d):
        bb_left[i] = acc
        bb_right[i] = acc + clen[cbot[i]]
        bb_shift[i] = u_top[cbot[i]] - acc
        acc += clen[cbot[i]]
    nsing = 0
    for i in range(1, d):
        sing[nsing] = u_top[ctop[i]]
        nsing += 1
        sing[nsing] = u_bot[cbot[i]]
        nsing += 1

    # The pullback interval at step k has the orbit points T^(n-k) u_beta^b
    # and T^(-k) u_alpha^t as endpoints, so both orbits are tracked
    # independently; structural coincidences (an endpoint touching its own
    # defining singularity) then compare bit-equal and the guard band only
    # flags genuine near-misses.
    cdef double *forward = <double *> malloc((n + 1) * sizeof(double))
    if forward == NULL:
        raise MemoryError()
    cdef double point
    cdef long long j, k
    cdef bint moved
    cdef double s, gap, lo, hi, target, back, x
    try:
        forward[0] = u_bot[beta]
        for j in range(n):
            point = forward[j]
            moved = False
            for i in range(d):
                if ((point != tb_left[i] and tb_left[i] - guard < point < tb_left[i] + guard)
                        or (point != tb_right[i]
                            and tb_right[i] - guard < point < tb_right[i] + guard)):
                    return PRECISION, 0.0
                if tb_left[i] <= point < tb_right[i]:
                    forward[j + 1] = point + tb_shift[i]
                    moved = True
                    break
            if not moved:
                return PRECISION, 0.0
        target = u_top[alpha]
        gap = forward[n] - target
        if gap < 0.0:
            gap = -gap
        if gap < guard:
            return PRECISION, gap
        back = target
        for k in range(n + 1):
            x = forward[n - k]
            lo = x if x < back else back
            hi = back if x < back else x
            for i in range(nsing):
                s = sing[i]
                if ((s != lo and s - guard < lo < s + guard)
                        or (s != hi and s - guard < hi < s + guard)):
                    return PRECISION, gap
                if lo < s < hi:
                    return NOT_REDUCED, gap
            if k < n:
                moved = False
                for i in range(d):
                    if ((back != bb_left[i] and bb_left[i] - guard < back < bb_left[i] + guard)
                            or (back != bb_right[i]
                                and bb_right[i] - guard < back < bb_right[i] + guard)):
                        return PRECISION, gap
                    if bb_left[i] <= back < bb_right[i]:
                        back = back + bb_shift[i]
                        moved = True
                        break
                if not moved:
                    return PRECISION, gap
        return REDUCED, gap
    finally:
        free(forward)
