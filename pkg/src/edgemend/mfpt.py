"""Mean first passage times: exact dense solve and single-walk estimation.

m_ij is the expected number of steps the trust chain takes to first reach
node j from node i (m_ii is the mean return time, equal to 1/pi_i). Exact
tables come from the fundamental matrix Z = (I - W + 1 pi^T)^{-1} via

    m_ij = (delta_ij - z_ij + z_jj) / pi_j ,

estimated tables from one long seeded walk whose visits are turned into
first-passage samples to and from a designated target set.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingMfptError
from .graph import Graph
from .spectral import _vec, eigencentrality

DENSE_CAP = 2000


def _observed_mean(a: np.ndarray, axis: int) -> np.ndarray:
    """Mean over non-NaN entries along ``axis``; NaN where none exist."""
    mask = ~np.isnan(a)
    cnt = mask.sum(axis=axis)
    total = np.where(mask, a, 0.0).sum(axis=axis)
    return np.where(cnt > 0, total / np.maximum(cnt, 1), np.nan)


def walk_length_default(n: int) -> int:
    """Walk length that empirically saturates estimation accuracy.

    Linear in the node count, max(round((0.197 n - 2.248) * 1e4), 10 n).
    """
    return int(max(np.rint((0.197 * n - 2.248) * 1e4), 10 * n))


@dataclass
class MfptTable:
    """Mean-first-passage-time table, exact (full matrix) or estimated.

    Exact mode: ``values`` is the dense (n, n) matrix.

    Walk mode: ``values[i, k]`` estimates m(i -> targets[k]) and
    ``from_values[k, j]`` estimates m(targets[k] -> j), with per-entry
    sample counts alongside. Entries with zero samples are NaN in the
    arrays; ``get`` substitutes n times the mean observed passage time of
    the corresponding target (and counts the substitution) so downstream
    formulas never see NaN.
    """

    mode: str
    n: int
    values: np.ndarray
    targets: np.ndarray | None = None
    sample_counts: np.ndarray | None = None
    from_values: np.ndarray | None = None
    from_counts: np.ndarray | None = None
    walk_len: int | None = None
    seed: int | None = None
    warnings: list = field(default_factory=list)
    substitutions: int = 0

    def __post_init__(self):
        if self.targets is not None:
            self.targets = np.asarray(self.targets, dtype=np.int64)
            self._tpos = {int(t): k for k, t in enumerate(self.targets)}
            self._col_fill = self.n * _observed_mean(self.values, axis=0)
            self._row_fill = self.n * _observed_mean(self.from_values,
                                                     axis=1)
        else:
            self._tpos = None

    def get(self, i: int, j: int) -> float:
        """Entry m_ij, substituting for missing estimates where allowed."""
        if self.mode == "exact":
            return float(self.values[i, j])
        k = self._tpos.get(int(j))
        if k is not None:
            v = self.values[i, k]
            if not np.isnan(v):
                return float(v)
            return self._fill(self._col_fill[k])
        k = self._tpos.get(int(i))
        if k is not None:
            v = self.from_values[k, j]
            if not np.isnan(v):
                return float(v)
            return self._fill(self._row_fill[k])
        raise MissingMfptError(
            f"entry ({i}, {j}) is outside the estimated table")

    def _fill(self, fallback: float) -> float:
        self.substitutions += 1
        if np.isnan(fallback):
            raise MissingMfptError(
                "no observed passage times to build a substitute from")
        return float(fallback)

    def covers_column(self, j: int) -> bool:
        return self.mode == "exact" or int(j) in self._tpos

    def covers_row(self, i: int) -> bool:
        return self.mode == "exact" or int(i) in self._tpos


def mfpt_exact(g: Graph, pi=None, dense_cap: int = DENSE_CAP) -> MfptTable:
    """Full passage-time matrix through the fundamental matrix.

    Parameters
    ----------
    g : Graph
        Strongly connected, aperiodic.
    pi : CentralityVector or ndarray, optional
        Stationary distribution; computed if omitted.
    dense_cap : int
        Refuse graphs above this size (the solve is dense O(n^3)).
    """
    if g.n > dense_cap:
        raise ValueError(
            f"graph has {g.n} nodes, above the dense cap {dense_cap}; "
            "use the walk estimator instead")
    p = _vec(eigencentrality(g) if pi is None else pi)
    w = g.to_dense()
    z = np.linalg.inv(np.eye(g.n) - w + np.outer(np.ones(g.n), p))
    m = (np.eye(g.n) - z + np.outer(np.ones(g.n), np.diag(z))) / p[None, :]
    return MfptTable(mode="exact", n=g.n, values=m)


def mfpt_estimate(g: Graph, targets, walk_len: int | None = None,
                  seed=None, chunk: int = 1 << 16,
                  start: int | None = None) -> MfptTable:
    """Estimate passage times to and from ``targets`` with one long walk.

    The walk starts at the highest-centrality node (the hub mixes
    fastest; pass ``start`` to override and skip that computation) and
    takes ``walk_len`` steps, default ``walk_length_default(g.n)``. For each
    ordered pair (i, t) with t a target (either direction), the estimate
    is the mean of the first-passage samples observed along the walk:
    one sample per interval between consecutive visits of the
    destination that contains a visit of the source, measured from the
    first such source visit to the destination visit closing the
    interval (repeats inside one interval are near-duplicates that only
    add variance); samples that span the start of the walk are kept.
    Per-step cost is O(1) plus work proportional to the number of
    targets visited since the current node's previous arrival; memory is
    O(n * len(targets)). A fixed seed reproduces the table bit for bit.

    Returns
    -------
    MfptTable
        Walk-mode table; targets never reached by the walk are listed in
        ``warnings``.
    """
    from . import walk_kernel as wk

    targets = np.asarray(targets, dtype=np.int64)
    if targets.size == 0:
        raise ValueError("need at least one target")
    if np.unique(targets).size != targets.size:
        raise ValueError("targets must be distinct")
    if targets.min() < 0 or targets.max() >= g.n:
        raise ValueError("target id out of range")
    if walk_len is None:
        walk_len = walk_length_default(g.n)
    if walk_len < 1:
        raise ValueError("walk_len must be positive")
    if walk_len >= 2 ** 31:
        raise ValueError("walk_len must fit the kernel's 32-bit step clock")

    n, nk = g.n, targets.size
    # relabel nodes hot-first (by weighted in-degree, a proxy for visit
    # frequency) so the busy rows of the per-node state pack together
    win = np.bincount(g.indices, weights=g.data, minlength=n)
    order = np.lexsort((np.arange(n), -win))
    inv = np.empty(n, dtype=np.int64)
    inv[order] = np.arange(n)
    erow = inv[np.repeat(np.arange(n), np.diff(g.indptr))]
    eord = np.argsort(erow, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(erow, minlength=n), out=indptr[1:])
    indices = inv[g.indices[eord]]
    data = g.data[eord]

    prob, alias = wk.build_alias(indptr, indices, data)
    nodemeta, slot, bits, scale = wk.pack_tables(indptr, indices, prob,
                                                 alias)
    ptargets = inv[targets]
    tindex = np.full(n, -1, dtype=np.int64)
    tindex[ptargets] = np.arange(nk)

    # rowmeta pairs each node's sampler word with its skip tag; the
    # other per-pair rows: (seen visit count | from count), sample sum
    rowmeta = np.empty((n, 2), dtype=np.int64)
    rowmeta[:, 0] = nodemeta
    rowmeta[:, 1] = -1
    fstate = np.zeros((n, 2 * nk), dtype=np.int64)
    vlog = np.zeros((nk, 1 << 16), dtype=np.int32)
    stack = np.zeros((nk, n), dtype=np.int64)
    stack_len = np.zeros(nk, dtype=np.int64)
    sumcnt = np.zeros((n, 2 * nk), dtype=np.int64)
    src_cnt = np.zeros(nk, dtype=np.int64)
    gidx = np.zeros(nk, dtype=np.int32)
    glob = np.zeros(1, dtype=np.int32)
    head = np.full(1, -1, dtype=np.int32)
    nxt = np.full(nk, -1, dtype=np.int32)
    prv = np.full(nk, -1, dtype=np.int32)
    # the early touches only pay once the walker's state exceeds the
    # private caches; below that every row is resident and they are
    # pure overhead
    lead = (wk.PREFETCH_AHEAD
            if fstate.nbytes + sumcnt.nbytes + slot.nbytes > (32 << 20)
            else 0)

    if start is None:
        start = int(np.argmax(eigencentrality(g).values))
    if not 0 <= start < n:
        raise ValueError("start node out of range")
    state = int(inv[start])
    wk.arrival(state, 0, tindex, fstate, vlog, sumcnt, stack, stack_len,
               src_cnt, gidx, rowmeta, glob, head, nxt, prv)
    rng = np.random.default_rng(seed)
    csize = min(chunk, walk_len)
    u = np.empty(csize, dtype=np.float64)
    buf = np.empty(csize, dtype=np.int32)
    done = 0
    while done < walk_len:
        m = min(csize, walk_len - done)
        need = int(src_cnt.max()) + m + 1
        if need > vlog.shape[1]:
            cap = vlog.shape[1]
            while cap < need:
                cap *= 2
            grown = np.zeros((nk, cap), dtype=np.int32)
            grown[:, :vlog.shape[1]] = vlog
            vlog = grown
        rng.random(out=u[:m])
        state, _ = wk.run_chunk(rowmeta, slot, bits, scale, u[:m], state,
                                done, buf[:m], lead, tindex, fstate,
                                vlog, sumcnt, stack, stack_len, src_cnt,
                                gidx, glob, head, nxt, prv)
        done += m

    # rows come back in the relabeled space and are mapped home with
    # ``inv``
    sum_to = sumcnt[:, 0::2]
    cnt_to = sumcnt[:, 1::2].astype(np.int32)
    from_cnt = (fstate[:, 0::2] & 0xFFFFFFFF).astype(np.int32)
    from_sum = fstate[:, 1::2]
    with np.errstate(invalid="ignore"):
        to_vals = np.where(cnt_to > 0, sum_to / np.maximum(cnt_to, 1),
                           np.nan)
        fr_vals = np.where(from_cnt > 0, from_sum / np.maximum(from_cnt, 1),
                           np.nan)
    warnings = [
        f"target {int(targets[k])} was never reached; no samples"
        for k in range(nk) if cnt_to[:, k].sum() == 0
    ]
    return MfptTable(mode="walk", n=n, values=to_vals[inv], targets=targets,
                     sample_counts=cnt_to[inv], from_values=fr_vals[inv].T.copy(),
                     from_counts=from_cnt[inv].T.copy(), walk_len=int(walk_len),
                     seed=seed, warnings=warnings)


# ---------------------------------------------------------------------------
# csv dump

def write_mfpt_csv(table: MfptTable, path) -> None:
    """Dump a table as ``i,j,value,samples`` rows (samples empty in exact
    mode; estimated entries without samples are skipped)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("i,j,value,samples\n")
        if table.mode == "exact":
            for i in range(table.n):
                for j in range(table.n):
                    fh.write(f"{i},{j},{float(table.values[i, j])!r},\n")
            return
        for i in range(table.n):
            for k, t in enumerate(table.targets):
                c = int(table.sample_counts[i, k])
                if c > 0:
                    fh.write(f"{i},{int(t)},{float(table.values[i, k])!r},{c}\n")
        tset = set(int(t) for t in table.targets)
        for k, t in enumerate(table.targets):
            for j in range(table.n):
                if j in tset:
                    continue
                c = int(table.from_counts[k, j])
                if c > 0:
                    fh.write(f"{int(t)},{j},"
                             f"{float(table.from_values[k, j])!r},{c}\n")
