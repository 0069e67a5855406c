"""Row-stochastic trust graphs: construction, validation, perturbation, io.

A graph is stored in compressed sparse row form. Row i lists the nodes that
node i listens to, and the weights of row i sum to one, so the weight matrix
drives the averaging dynamics x(t+1) = W x(t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import GraphFormatError

ROW_SUM_TOL = 1e-12
FILE_ROW_SUM_TOL = 1e-9


@dataclass(eq=False)
class Graph:
    """Weighted directed graph with row-stochastic weights, CSR layout.

    Attributes
    ----------
    n : int
        Number of nodes; ids are dense 0..n-1.
    indptr, indices, data : ndarray
        CSR arrays. Column indices are strictly increasing within each row
        and weights are positive, so single-edge lookup is a binary search.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        self.indptr = np.asarray(self.indptr, dtype=np.int64)
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.data = np.asarray(self.data, dtype=np.float64)

    @property
    def n_edges(self) -> int:
        return int(self.indices.shape[0])

    def out_degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Out-neighbors and weights of node i (views, do not mutate)."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def neighbors(self, i: int) -> np.ndarray:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi]

    def weight(self, i: int, j: int) -> float:
        """Weight of edge (i, j), or 0.0 if absent. O(log out-degree)."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        pos = lo + np.searchsorted(self.indices[lo:hi], j)
        if pos < hi and self.indices[pos] == j:
            return float(self.data[pos])
        return 0.0

    def has_edge(self, i: int, j: int) -> bool:
        return self.weight(i, j) != 0.0

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.data, self.indices, self.indptr),
                             shape=(self.n, self.n))

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()

    def copy(self) -> "Graph":
        return Graph(self.n, self.indptr.copy(), self.indices.copy(),
                     self.data.copy())


def from_dense(w) -> Graph:
    """Build a Graph from a dense row-stochastic matrix (zeros = no edge)."""
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("weight matrix must be square")
    csr = sp.csr_matrix(w)
    csr.sort_indices()
    g = Graph(w.shape[0], csr.indptr.astype(np.int64),
              csr.indices.astype(np.int64), csr.data.astype(np.float64))
    _check_rows(g, ROW_SUM_TOL)
    return g


def from_edges(n: int, edges, row_sum_tol: float = ROW_SUM_TOL) -> Graph:
    """Build a Graph from (src, dst, weight) triples.

    Duplicate (src, dst) pairs, non-positive weights, out-of-range ids and
    row sums off one by more than ``row_sum_tol`` are rejected.
    """
    edges = list(edges)
    if not edges:
        raise GraphFormatError("graph has no edges")
    m = len(edges)
    src = np.fromiter((e[0] for e in edges), dtype=np.int64, count=m)
    dst = np.fromiter((e[1] for e in edges), dtype=np.int64, count=m)
    wgt = np.fromiter((e[2] for e in edges), dtype=np.float64, count=m)
    if src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n:
        raise GraphFormatError("node id out of range 0..n-1")
    order = np.lexsort((dst, src))
    src, dst, wgt = src[order], dst[order], wgt[order]
    dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
    if dup.any():
        k = int(np.flatnonzero(dup)[0])
        raise GraphFormatError(f"duplicate edge ({src[k]}, {dst[k]})")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    indptr = np.cumsum(indptr)
    g = Graph(n, indptr, dst, wgt)
    _check_rows(g, row_sum_tol)
    return g


def _check_rows(g: Graph, tol: float) -> None:
    if g.data.size and g.data.min() <= 0.0:
        raise GraphFormatError("edge weights must be positive")
    sums = row_sums(g)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if bad.size:
        i = int(bad[0])
        raise GraphFormatError(
            f"row {i} sums to {sums[i]!r}, expected 1 within {tol:g}")


def row_sums(g: Graph) -> np.ndarray:
    out = np.zeros(g.n)
    np.add.at(out, np.repeat(np.arange(g.n), np.diff(g.indptr)), g.data)
    return out


# ---------------------------------------------------------------------------
# validation

@dataclass
class ValidationReport:
    """Outcome of the structural checks a graph must pass before the
    averaging dynamics and the passage-time formulas apply."""

    row_stochastic: bool
    strongly_connected: bool
    aperiodic: bool
    rationally_selfish: bool
    max_row_sum_deviation: float
    selfish_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.row_stochastic and self.strongly_connected
                and self.aperiodic)


def _self_weights(g: Graph) -> np.ndarray:
    """Diagonal weights w_ii (0 where the self-loop is absent)."""
    out = np.zeros(g.n)
    for i in range(g.n):
        out[i] = g.weight(i, i)
    return out


def selfish_violations(g: Graph) -> np.ndarray:
    """Rows where the self-weight does not strictly dominate the row.

    Row i is rationally selfish when w_ii > w_ij for every j != i.
    """
    bad = []
    for i in range(g.n):
        lo, hi = g.indptr[i], g.indptr[i + 1]
        idx, w = g.indices[lo:hi], g.data[lo:hi]
        own = 0.0
        other = 0.0
        for j, wj in zip(idx, w):
            if j == i:
                own = wj
            elif wj > other:
                other = wj
        if not own > other:
            bad.append(i)
    return np.asarray(bad, dtype=np.int64)


def is_row_selfish(g: Graph, r: int) -> bool:
    lo, hi = g.indptr[r], g.indptr[r + 1]
    idx, w = g.indices[lo:hi], g.data[lo:hi]
    own = g.weight(r, r)
    mask = idx != r
    other = w[mask].max() if mask.any() else 0.0
    return bool(own > other)


def _period(g: Graph) -> int:
    """Period of a strongly connected graph via BFS level differences."""
    level = np.full(g.n, -1, dtype=np.int64)
    level[0] = 0
    frontier = [0]
    order = []
    while frontier:
        nxt = []
        for u in frontier:
            order.append(u)
            for v in g.neighbors(u):
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(int(v))
        frontier = nxt
    gcd = 0
    for u in order:
        lu = level[u]
        for v in g.neighbors(u):
            gcd = math.gcd(gcd, int(lu + 1 - level[v]))
            if gcd == 1:
                return 1
    return gcd if gcd else 0


def is_strongly_connected(g: Graph) -> bool:
    ncomp, _ = connected_components(g.to_csr(), directed=True,
                                    connection="strong")
    return ncomp == 1


def validate(g: Graph) -> ValidationReport:
    """Check the four structural properties the pipeline relies on.

    Returns a report with per-check flags; ``aperiodic`` is only meaningful
    (and only claimed true) for strongly connected graphs.
    """
    dev = float(np.abs(row_sums(g) - 1.0).max()) if g.n else 0.0
    stochastic = dev <= FILE_ROW_SUM_TOL and (g.data.size == 0
                                              or g.data.min() > 0.0)
    strong = is_strongly_connected(g)
    if strong:
        if np.any(_self_weights(g) > 0.0):
            aperiodic = True
        else:
            aperiodic = _period(g) == 1
    else:
        aperiodic = False
    bad = selfish_violations(g)
    return ValidationReport(
        row_stochastic=bool(stochastic),
        strongly_connected=bool(strong),
        aperiodic=bool(aperiodic),
        rationally_selfish=bad.size == 0,
        max_row_sum_deviation=dev,
        selfish_violations=[int(i) for i in bad],
    )


# ---------------------------------------------------------------------------
# single-edge perturbation

@dataclass(frozen=True)
class EdgePerturbation:
    """Insertion of the absent edge (r, c) with trust share theta.

    Row r is rescaled by (1 - theta) and weight theta is placed on the new
    edge, which keeps the row stochastic:

        w'_rj = (1 - theta) * w_rj   for j != c,   w'_rc = theta.
    """

    r: int
    c: int
    theta: float

    def __post_init__(self):
        if self.r == self.c:
            raise ValueError("cannot add a self-loop")
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta!r}")


def add_edge_perturbed(g: Graph, p: EdgePerturbation) -> Graph:
    """Return a new graph with perturbation ``p`` applied to row ``p.r``.

    Raises
    ------
    ValueError
        If the edge already exists, r == c, or theta is out of range.
    """
    r, c, theta = p.r, p.c, p.theta
    if not (0 <= r < g.n and 0 <= c < g.n):
        raise ValueError("edge endpoint out of range")
    if g.has_edge(r, c):
        raise ValueError(f"edge ({r}, {c}) already present")
    lo, hi = int(g.indptr[r]), int(g.indptr[r + 1])
    old_idx = g.indices[lo:hi]
    old_w = g.data[lo:hi] * (1.0 - theta)
    keep = old_w > 0.0
    old_idx, old_w = old_idx[keep], old_w[keep]
    pos = np.searchsorted(old_idx, c)
    new_idx = np.insert(old_idx, pos, c)
    new_w = np.insert(old_w, pos, theta)

    indptr = g.indptr.copy()
    indptr[r + 1:] += new_idx.size - (hi - lo)
    indices = np.concatenate([g.indices[:lo], new_idx, g.indices[hi:]])
    data = np.concatenate([g.data[:lo], new_w, g.data[hi:]])
    return Graph(g.n, indptr, indices, data)


# ---------------------------------------------------------------------------
# generation

def generate_scale_free(n: int, gamma: float = -2.5, seed=None,
                        self_loop_floor: float = 0.51,
                        self_loop_high: float = 0.9) -> Graph:
    """Random trust network with power-law out-degrees.

    Out-degrees are drawn from P(d) proportional to d**gamma on
    d in [2, n-1], destinations are matched configuration-model style
    (duplicate and self pairs discarded), every node gets a self-loop with
    weight uniform on [self_loop_floor, self_loop_high], and the remaining
    mass of each row is split evenly among its out-neighbors. Because the
    self-weight exceeds 1/2, every row is rationally selfish. If the result
    is not strongly connected, a random Hamiltonian cycle is overlaid with
    weight 1e-3 per missing edge and the affected rows renormalized.

    Parameters
    ----------
    n : int
        Number of nodes, n >= 2.
    gamma : float
        Power-law exponent, must be < -1.
    seed : int or None
        Seed for the generator; equal seeds give identical graphs.

    Returns
    -------
    Graph
        Passes all of validate(): row-stochastic, strongly connected,
        aperiodic, rationally selfish.
    """
    if n < 2:
        raise ValueError("need at least 2 nodes")
    if gamma >= -1.0:
        raise ValueError("gamma must be < -1")
    rng = np.random.default_rng(seed)

    d_max = n - 1
    d_min = min(2, d_max)
    support = np.arange(d_min, d_max + 1, dtype=np.int64)
    pmf = support.astype(np.float64) ** gamma
    pmf /= pmf.sum()
    degs = rng.choice(support, size=n, p=pmf)

    src = np.repeat(np.arange(n, dtype=np.int64), degs)
    dst = src.copy()
    rng.shuffle(dst)
    keep = src != dst
    src, dst = src[keep], dst[keep]
    pairs = np.unique(np.stack([src, dst], axis=1), axis=0)
    src, dst = pairs[:, 0], pairs[:, 1]

    # rows: self-loop plus an even split of the remainder
    self_w = rng.uniform(self_loop_floor, self_loop_high, size=n)
    out_deg = np.bincount(src, minlength=n)
    share = np.zeros(n)
    nz = out_deg > 0
    share[nz] = (1.0 - self_w[nz]) / out_deg[nz]
    self_w[~nz] = 1.0

    all_src = np.concatenate([src, np.arange(n, dtype=np.int64)])
    all_dst = np.concatenate([dst, np.arange(n, dtype=np.int64)])
    all_w = np.concatenate([share[src], self_w])
    g = from_edges(n, zip(all_src.tolist(), all_dst.tolist(),
                          all_w.tolist()))

    if not is_strongly_connected(g):
        g = _overlay_cycle(g, rng.permutation(n))
    return g


def _overlay_cycle(g: Graph, order: np.ndarray, w0: float = 1e-3) -> Graph:
    """Add the cycle order[0] -> order[1] -> ... -> order[0] with nominal
    weight w0 per missing edge, renormalizing each touched row."""
    rows = {}
    for k in range(len(order)):
        u = int(order[k])
        v = int(order[(k + 1) % len(order)])
        if u != v and not g.has_edge(u, v):
            rows.setdefault(u, []).append(v)
    if not rows:
        return g
    triples = []
    for i in range(g.n):
        lo, hi = g.indptr[i], g.indptr[i + 1]
        idx = g.indices[lo:hi].tolist()
        wgt = g.data[lo:hi].tolist()
        extra = rows.get(i, [])
        total = 1.0 + w0 * len(extra)
        for j, w in zip(idx, wgt):
            triples.append((i, j, w / total))
        for j in extra:
            triples.append((i, j, w0 / total))
    return from_edges(g.n, triples)


# ---------------------------------------------------------------------------
# edge-list files

def write_graph(g: Graph, path) -> None:
    """Write tab-separated ``src dst weight`` lines, row-major order.

    Weights are written with repr so a read round-trips bit-exactly.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(g.n):
            lo, hi = g.indptr[i], g.indptr[i + 1]
            for j, w in zip(g.indices[lo:hi], g.data[lo:hi]):
                fh.write(f"{i}\t{j}\t{float(w)!r}\n")


def read_graph(path) -> Graph:
    """Parse an edge-list file into a validated Graph.

    Lines are ``src<TAB>dst<TAB>weight``; blank lines and lines starting
    with ``#`` are ignored. Node count is max id + 1. Duplicate edges,
    malformed fields, non-positive weights and rows whose weights do not
    sum to one within 1e-9 raise GraphFormatError with the line number.
    """
    triples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise GraphFormatError(
                    f"expected 'src<TAB>dst<TAB>weight', got {line!r}",
                    line=lineno)
            try:
                s, d = int(parts[0]), int(parts[1])
                w = float(parts[2])
            except ValueError as exc:
                raise GraphFormatError(str(exc), line=lineno) from None
            if s < 0 or d < 0:
                raise GraphFormatError("negative node id", line=lineno)
            if not w > 0.0:
                raise GraphFormatError(
                    f"weight must be positive, got {w!r}", line=lineno)
            triples.append((s, d, w))
    if not triples:
        raise GraphFormatError("file contains no edges")
    n = max(max(s for s, _, _ in triples),
            max(d for _, d, _ in triples)) + 1
    sums = np.zeros(n)
    seen_row = np.zeros(n, dtype=bool)
    for s, _, w in triples:
        sums[s] += w
        seen_row[s] = True
    missing = np.flatnonzero(~seen_row)
    if missing.size:
        raise GraphFormatError(f"node {missing[0]} has no out-edges")
    bad = np.flatnonzero(np.abs(sums - 1.0) > FILE_ROW_SUM_TOL)
    if bad.size:
        raise GraphFormatError(
            f"row {bad[0]} sums to {sums[bad[0]]!r}, "
            f"expected 1 within {FILE_ROW_SUM_TOL:g}")
    return from_edges(n, triples, row_sum_tol=FILE_ROW_SUM_TOL)
