"""Compiled inner loops for the single-walk passage-time estimator.

The walk visits nodes at integer times; every visit of a node i yields
first-passage samples against a small set of target nodes.

To-direction (i -> t): each target owns an epoch that runs between its
consecutive visits. The first time i appears inside an epoch it is
pushed onto the target's stack together with the time; when the target
arrives the epoch closes and every stacked node contributes one sample
(arrival time minus stamped time). Repeat visits inside one epoch are
discarded: they are near-duplicates of the first visit (shifted by short
dwell excursions), and keeping them inflates the variance of the
per-pair mean instead of reducing it.

From-direction (t -> j): the mirror image. For each arrival interval of
j (between its consecutive visits), the first visit of target t inside
the interval yields one sample, closed when j arrives; later t-visits in
the same interval would share that arrival and add variance, not
information. Each target logs its visit times, and each node keeps a
per-target snapshot of the visit count at its last arrival, so the
sample is an O(1) log lookup: the first unseen visit sits right at the
snapshot index.

Performance shape. The sampler is a serial dependent-load chain
(per-node offset/degree and each slot's threshold and both outcome
columns are packed into single 8-byte words to keep it short and cache
resident); the arrival handler is bound by scattered reads of per-pair
state. The path never depends on the bookkeeping, so when that state
outgrows the private caches the chunk loop samples PREFETCH_AHEAD
steps ahead of the arrival it settles: the two miss streams overlap
instead of stalling one after the other, and each freshly sampled
state's rows are touched early so they are resident by the time its
arrival settles (small problems skip the lead and settle arrivals on
the spot). Per-pair layout keeps the reads dense: the two
from-direction words (packed counts and sample sum) sit adjacent, the
to-direction accumulators (sum, count) likewise, the visit-time logs
are read at their hot tails, and the skip tag shares a 16-byte row
with the sampler's per-node word so the test piggybacks on a line the
draw fetches anyway. Callers are expected to number nodes hot-first
(the estimator relabels by weighted in-degree), which packs the
frequently visited rows of every per-node array into a compact
cache-resident region. A recency list of targets
(move-to-front on visit, tagged with a global visit counter) lets an
arrival walk only the prefix of targets actually visited since that
node last arrived, and lets a step skip the handler entirely on a
single counter comparison. Because membership in an epoch falls out of
that same bookkeeping (a node can enter a target's stack at most once
between the target's visits), closing an epoch never writes back into
the per-pair state.

All times are int32 (walk lengths are held under 2**31 steps) and the
accumulators are integer, so estimates are exact means of the observed
samples and bit-reproducible for a fixed seed.
"""
from __future__ import annotations

import numpy as np
from numba import njit

PREFETCH_AHEAD = 16
FLUSH_AHEAD = 8


@njit(cache=True)
def build_alias(indptr, indices, data):
    """Per-row alias tables for O(1) weighted neighbor sampling.

    Returns (prob, alias) aligned with the csr layout: slot q of row i
    covers indices[indptr[i] + q], and a uniform u in [0, 1) samples via
    v = u * deg; take slot int(v) if the fractional part falls under
    prob, its alias otherwise.
    """
    nnz = indices.shape[0]
    n = indptr.shape[0] - 1
    prob = np.empty(nnz, dtype=np.float64)
    alias = np.empty(nnz, dtype=np.int64)
    small = np.empty(nnz, dtype=np.int64)
    large = np.empty(nnz, dtype=np.int64)
    scaled = np.empty(nnz, dtype=np.float64)
    for i in range(n):
        lo, hi = indptr[i], indptr[i + 1]
        deg = hi - lo
        ns = 0
        nl = 0
        for q in range(lo, hi):
            scaled[q] = data[q] * deg
            if scaled[q] < 1.0:
                small[ns] = q
                ns += 1
            else:
                large[nl] = q
                nl += 1
        while ns > 0 and nl > 0:
            ns -= 1
            nl -= 1
            qs = small[ns]
            ql = large[nl]
            prob[qs] = scaled[qs]
            alias[qs] = indices[ql]
            scaled[ql] = (scaled[ql] + scaled[qs]) - 1.0
            if scaled[ql] < 1.0:
                small[ns] = ql
                ns += 1
            else:
                large[nl] = ql
                nl += 1
        while nl > 0:
            nl -= 1
            prob[large[nl]] = 1.0
            alias[large[nl]] = indices[large[nl]]
        while ns > 0:
            ns -= 1
            prob[small[ns]] = 1.0
            alias[small[ns]] = indices[small[ns]]
    return prob, alias


def pack_tables(indptr, indices, prob, alias):
    """Pack the alias tables for short dependent-load chains.

    Returns (nodemeta, slot, bits, scale): nodemeta[i] = (row offset
    << 32 | degree), and slot[q] = (threshold << 2 * bits | kept column
    << bits | alias column) folds a whole draw into one 8-byte word.
    The threshold is quantized to the 63 - 2 * bits spare bits (scale =
    2.0 ** that), which perturbs each acceptance probability by less
    than 2 ** -11 even at the size cap; slots that always accept get
    alias = kept column so the drained threshold cannot misroute them.
    """
    n = indptr.shape[0] - 1
    nnz = indices.shape[0]
    bits = max(int(n - 1).bit_length(), 1)
    if 2 * bits > 52 or nnz >= 2 ** 31:
        raise ValueError("graph too large for the packed sampler")
    nodemeta = (indptr[:-1].astype(np.int64) << 32) | np.diff(indptr)
    scale = float(1 << (63 - 2 * bits))
    full = prob >= 1.0
    pq = np.minimum((prob * scale).astype(np.int64), int(scale) - 1)
    keep = indices.astype(np.int64)
    slot = ((pq << (2 * bits)) | (keep << bits)
            | np.where(full, keep, alias))
    return nodemeta, slot, bits, scale


@njit(cache=True, nogil=True)
def arrival(s, tau, tindex, fstate, vlog, sumcnt, stack, stack_len,
            src_cnt, gidx, rowmeta, glob, head, nxt, prv):
    """Process the walk arriving at node s at time tau.

    ``fstate[s, 2k]`` packs (visit count of target k seen by node s at
    its last arrival << 32 | from-direction sample count) and
    ``fstate[s, 2k + 1]`` accumulates the from-direction sample sum.
    Bookkeeping runs over the recency-list prefix of targets visited
    since s last arrived (all targets on s's first arrival); each such
    target contributes one from-sample read off its visit log and stamps
    s into its current epoch, which cannot have happened yet this epoch.
    The caller may skip the call outright when rowmeta[s, 1] == glob[0];
    every update below is then a no-op.
    """
    own = np.int64(tindex[s])
    sg = rowmeta[s, 1]
    entry = (np.int64(tau) << 32) | s
    warm = np.int64(0)
    if sg < 0:
        # first arrival: settle every target; samples reach back to the
        # start of the walk
        nk = src_cnt.shape[0]
        for k in range(nk):
            b = 2 * k
            w = fstate[s, b]
            c0 = w >> 32
            if src_cnt[k] > c0:
                fstate[s, b + 1] += tau - vlog[k, c0]
                fstate[s, b] = (src_cnt[k] << 32) | ((w & 0xFFFFFFFF) + 1)
            if k != own:
                stack[k, stack_len[k]] = entry
                stack_len[k] += 1
    else:
        k = np.int64(head[0])
        while k >= 0 and gidx[k] > sg:
            # prefix membership guarantees at least one unseen visit
            b = 2 * k
            w = fstate[s, b]
            fstate[s, b + 1] += tau - vlog[k, w >> 32]
            fstate[s, b] = (src_cnt[k] << 32) | ((w & 0xFFFFFFFF) + 1)
            if k != own:
                stack[k, stack_len[k]] = entry
                stack_len[k] += 1
            k = np.int64(nxt[k])
    rowmeta[s, 1] = glob[0]
    if own >= 0:
        # close the target's epoch: one sample per stacked (node, time)
        m = stack_len[own]
        b2 = 2 * own
        for q in range(m):
            if q + FLUSH_AHEAD < m:
                warm ^= sumcnt[stack[own, q + FLUSH_AHEAD] & 0xFFFFFFFF, b2]
            e = stack[own, q]
            i = e & 0xFFFFFFFF
            sumcnt[i, b2] += tau - (e >> 32)
            sumcnt[i, b2 + 1] += 1
        stack[own, 0] = entry
        stack_len[own] = 1
        vlog[own, src_cnt[own]] = np.int32(tau)
        src_cnt[own] += 1
        glob[0] += 1
        gidx[own] = glob[0]
        if head[0] != own:
            p = prv[own]
            q2 = nxt[own]
            if p >= 0:
                nxt[p] = q2
            if q2 >= 0:
                prv[q2] = p
            prv[own] = -1
            nxt[own] = head[0]
            if head[0] >= 0:
                prv[head[0]] = np.int32(own)
            head[0] = np.int32(own)
    return warm


@njit(cache=True, nogil=True)
def run_chunk(rowmeta, slot, bits, scale, u, state, t0, buf, lead,
              tindex, fstate, vlog, sumcnt, stack, stack_len, src_cnt,
              gidx, glob, head, nxt, prv):
    """Advance the walk by len(u) alias-sampled steps and settle every
    arrival.

    Steps occur at times t0 + 1 ... t0 + len(u). With ``lead`` > 0,
    sampling runs that many steps ahead of arrival processing (``buf``,
    at least len(u) entries, holds the states in between) and each
    freshly sampled state's rows are touched immediately; worthwhile
    only once the per-pair state outgrows the private caches, so small
    problems pass lead = 0 and settle each arrival on the spot. The
    caller must leave room in ``vlog`` for one entry per step. Returns
    the end state and a checksum that only pins the early touches
    against elimination.
    """
    mask = (np.int64(1) << bits) - 1
    sh = 2 * bits
    mask2 = (np.int64(1) << sh) - 1
    width = fstate.shape[1]
    m = u.shape[0]
    s = np.int64(state)
    warm = np.int64(0)
    for i in range(m + lead):
        if i < m:
            meta = rowmeta[s, 0]
            v = u[i] * (meta & 0xFFFFFFFF)
            q = (meta >> 32) + np.int64(v)
            w = slot[q]
            ka = w & mask2
            if (v - np.int64(v)) * scale < w >> sh:
                s = ka >> bits
            else:
                s = ka & mask
            buf[i] = np.int32(s)
            if lead > 0 and rowmeta[s, 1] != glob[0]:
                for off in range(0, width, 8):
                    warm ^= fstate[s, off]
        j = i - lead
        if j >= 0:
            sj = np.int64(buf[j])
            if rowmeta[sj, 1] != glob[0]:
                warm ^= arrival(sj, t0 + j + 1, tindex, fstate, vlog,
                                sumcnt, stack, stack_len, src_cnt, gidx,
                                rowmeta, glob, head, nxt, prv)
    return s, warm
