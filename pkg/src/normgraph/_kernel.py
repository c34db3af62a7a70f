"""numba kernels for the common-neighbourhood search.

All bitsets are little-endian rows of uint64 words.  Keep every integer that
meets a uint64 typed as uint64: numba promotes uint64/int64 mixes to float.
"""

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)

FOUND = 1
EXHAUSTED = 0
OUT_OF_BUDGET = -1


@njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> _S1) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    return np.int64((x * _H01) >> _S56)


@njit(cache=True)
def popcount_and(a, b):
    c = 0
    for i in range(a.shape[0]):
        c += popcount64(a[i] & b[i])
    return c


@njit(cache=True, nogil=True)
def compress(bits, cand, base):
    """Re-express rows ``cand`` of ``bits`` over the universe ``base``.

    Output row i has bit j set iff vertex cand[i] is adjacent to base[j].
    """
    m = cand.shape[0]
    k = base.shape[0]
    wc = max(1, (k + 63) // 64)
    out = np.zeros((m, wc), dtype=np.uint64)
    for i in range(m):
        row = bits[cand[i]]
        for j in range(k):
            y = base[j]
            if (row[y >> 6] >> np.uint64(y & 63)) & _ONE:
                out[i, j >> 6] |= _ONE << np.uint64(j & 63)
    return out


@njit(cache=True, nogil=True)
def extend(comp, nbase, k, thr, exact, best, budget):
    """Choose ``k`` rows of ``comp`` (increasing row order) maximising / thresholding
    the popcount of their AND, starting from the full universe of ``nbase`` bits.

    Threshold mode (exact=False): stop at the first k-subset whose AND has at
    least ``thr`` bits.  Exact mode: find the largest value above ``best``;
    ``thr`` is ignored and replaced by best + 1 as the search proceeds.

    Returns (status, value, witness rows, nodes, max_seen) where max_seen is
    the largest complete-subset value computed along the way.
    """
    m, wc = comp.shape
    witness = np.full(k, -1, dtype=np.int64)
    chosen = np.zeros(k, dtype=np.int64)
    lists = np.zeros((k, m), dtype=np.int64)
    lens = np.zeros(k, dtype=np.int64)
    pos = np.zeros(k, dtype=np.int64)
    masks = np.zeros((k + 1, wc), dtype=np.uint64)
    nodes = 0
    max_seen = -1
    value = best
    if exact:
        thr = best + 1
    if thr < 0:
        thr = 0

    full = masks[0]
    for j in range(nbase):
        full[j >> 6] |= _ONE << np.uint64(j & 63)

    # level-0 candidate list
    n0 = 0
    for r in range(m):
        pc = popcount_and(full, comp[r])
        if k == 1 and pc > max_seen:
            max_seen = pc
        if pc >= thr:
            lists[0, n0] = r
            n0 += 1
    lens[0] = n0
    depth = 0
    while depth >= 0:
        if pos[depth] >= lens[depth] or lens[depth] - pos[depth] < k - depth:
            depth -= 1
            continue
        r = lists[depth, pos[depth]]
        pos[depth] += 1
        nodes += 1
        if nodes > budget:
            return OUT_OF_BUDGET, value, witness, nodes, max_seen
        cur = masks[depth + 1]
        prev = masks[depth]
        pc = 0
        for w in range(wc):
            cur[w] = prev[w] & comp[r, w]
            pc += popcount64(cur[w])
        if pc < thr:
            continue
        chosen[depth] = r
        if depth == k - 1:
            if exact:
                if pc > value:
                    value = pc
                    witness[:] = chosen
                    thr = value + 1
            else:
                witness[:] = chosen
                return FOUND, pc, witness, nodes, max(max_seen, pc)
            continue
        # children: later rows of this list that keep the AND above threshold
        nxt = depth + 1
        cnt = 0
        last = nxt == k - 1
        for i in range(pos[depth], lens[depth]):
            s = lists[depth, i]
            v = popcount_and(cur, comp[s])
            if last and v > max_seen:
                max_seen = v
            if v >= thr:
                lists[nxt, cnt] = s
                cnt += 1
        lens[nxt] = cnt
        pos[nxt] = 0
        depth = nxt
    if exact and value > best:
        return FOUND, value, witness, nodes, max_seen
    return EXHAUSTED, value, witness, nodes, max_seen
