"""Greedy edge recommendation that walks an attacked consensus back down.

Pipeline per batch: compute centralities, take the n_src most central
nodes as edge sources, estimate (or solve exactly for) the passage times
the closed-form score needs, score every admissible candidate (r, c), and
return the top-k scores filtered so the batch does not overshoot the
remaining consensus gap. The driver applies batches until the signed gap
falls under the stop tolerance.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import MissingMfptError, StallError
from .graph import (EdgePerturbation, Graph, add_edge_perturbed,
                    is_row_selfish, validate)
from .mfpt import MfptTable, mfpt_estimate, mfpt_exact
from .perturbation import ScoredEdge
from .spectral import consensus_value, eigencentrality, validate_opinions


@dataclass(frozen=True)
class RecommenderConfig:
    """Knobs of one recommendation round.

    ``theta`` is either a constant share for every candidate or a dict
    mapping (r, c) to a share, in which case only those edges are
    candidates. ``score_subset_size`` defaults to summing over every node
    with exact tables and over the n_src hubs with estimated ones.
    """

    k: int = 5
    n_src: int = 25
    theta: float | dict = 0.1
    destination_scope: str = "all"  # or "two_hop"
    mfpt_mode: str = "exact"  # or "walk"
    walk_len: int | None = None
    walk_seed: int | None = None
    score_subset_size: int | None = None
    overshoot_policy: str = "skip"  # or "closest_fit"
    overshoot_slack: float = 1e-8
    dense_cap: int = 2000


@dataclass
class BatchRecord:
    batch: int
    edges: list
    edges_added_total: int
    objective_signed: float
    objective_exact: float
    seconds: float


@dataclass
class Trajectory:
    """Per-batch log of a repair run plus how and why it stopped."""

    records: list = field(default_factory=list)
    initial_objective: float = 0.0
    target_value: float = 0.0
    stop_reason: str = ""

    @property
    def final_objective(self) -> float:
        if not self.records:
            return self.initial_objective
        return self.records[-1].objective_exact

    @property
    def edges_added(self) -> int:
        if not self.records:
            return 0
        return self.records[-1].edges_added_total


def select_sources(pi, n_src: int) -> np.ndarray:
    """Ids of the n_src most central nodes, ties broken by smaller id."""
    from .spectral import _vec
    p = _vec(pi)
    if n_src < 1:
        raise ValueError("n_src must be at least 1")
    order = np.lexsort((np.arange(p.size), -p))
    return order[:min(n_src, p.size)].astype(np.int64)


def recommend_edges(g: Graph, x, x_tilde, cfg: RecommenderConfig,
                    target_value: float | None = None) -> list[ScoredEdge]:
    """Top-k admissible edges predicted to close the consensus gap.

    Parameters
    ----------
    g : Graph
        Must validate (row-stochastic, strongly connected, aperiodic).
        Sources whose rows are not rationally selfish are dropped rather
        than aborting the round.
    x, x_tilde : ndarray
        Pre-attack and attacked opinions; the gap
        <pi, x_tilde> - target_value must be non-negative.
    target_value : float, optional
        Consensus value to steer back to. Defaults to <pi, x> on ``g``
        itself; the iterative driver passes the original network's value.

    Returns
    -------
    list of ScoredEdge
        Ranked, overshoot-filtered, at most cfg.k entries. Empty when the
        gap is already closed or no candidate helps.
    """
    report = validate(g)
    if not report.ok:
        raise ValueError(f"graph failed validation: {report}")
    x = validate_opinions(x, g.n)
    y = validate_opinions(x_tilde, g.n)

    pi = eigencentrality(g)
    if target_value is None:
        target_value = consensus_value(pi, x)
    gap = consensus_value(pi, y) - target_value
    if gap <= 0.0:
        if gap < -1e-9:
            raise ValueError(
                "attacked consensus sits below the target; flip the sign "
                "of the objective to repair downward attacks")
        return []

    sources = [int(r) for r in select_sources(pi, cfg.n_src)
               if is_row_selfish(g, r)]
    if not sources:
        return []

    table = _passage_table(g, pi, sources, cfg)
    r_a, c_a, th_a, sc_a, used_a, mode = _score_all(g, pi.values, table,
                                                    sources, y, cfg)
    if r_a.size == 0:
        return []
    order = np.lexsort((c_a, r_a, -sc_a))
    r_a, c_a, th_a = r_a[order], c_a[order], th_a[order]
    sc_a, used_a = sc_a[order], used_a[order]
    picked = _filter_overshoot(sc_a, gap, cfg)
    return [ScoredEdge(r=int(r_a[i]), c=int(c_a[i]), theta=float(th_a[i]),
                       score=float(sc_a[i]), mode=mode,
                       nodes_used=int(used_a[i]), mfpt_source=table.mode)
            for i in picked]


def _passage_table(g: Graph, pi, sources, cfg: RecommenderConfig
                   ) -> MfptTable:
    if cfg.mfpt_mode == "exact":
        return mfpt_exact(g, pi=pi, dense_cap=cfg.dense_cap)
    if cfg.mfpt_mode == "walk":
        return mfpt_estimate(g, np.asarray(sources, dtype=np.int64),
                             walk_len=cfg.walk_len, seed=cfg.walk_seed,
                             start=int(np.argmax(pi)))
    raise ValueError(f"unknown mfpt_mode {cfg.mfpt_mode!r}")


def _candidates_for(g: Graph, r: int, scope: str, theta) -> np.ndarray:
    """Admissible destinations for source r under the configured scope."""
    if isinstance(theta, dict):
        cand = np.array(sorted(c for (rr, c) in theta if rr == r),
                        dtype=np.int64)
    elif scope == "all":
        cand = np.arange(g.n, dtype=np.int64)
    elif scope == "two_hop":
        first = g.neighbors(r)
        second = np.concatenate([g.neighbors(int(v)) for v in first]) \
            if first.size else np.array([], dtype=np.int64)
        cand = np.unique(np.concatenate([first, second]))
    else:
        raise ValueError(f"unknown destination_scope {scope!r}")
    # drop r itself and every existing edge of row r
    drop = np.zeros(g.n, dtype=bool)
    drop[g.neighbors(r)] = True
    drop[r] = True
    return cand[~drop[cand]]


def _theta_of(theta, r, cand: np.ndarray) -> np.ndarray:
    if isinstance(theta, dict):
        return np.array([float(theta[(r, int(c))]) for c in cand])
    return np.full(cand.size, float(theta))


def _score_all(g: Graph, pi: np.ndarray, table: MfptTable, sources,
               y: np.ndarray, cfg: RecommenderConfig):
    """Vectorized closed-form scores for every (source, candidate) pair.

    Matches perturbation.edge_score entry for entry; implemented in bulk
    (flat arrays, no per-pair objects) because the pipeline scores
    n_src * n candidates per batch.

    Returns
    -------
    (r, c, theta, score, nodes_used, mode)
        Parallel arrays over all admissible pairs, plus the common score
        mode string.
    """
    n = g.n
    u = pi * y

    if table.mode == "exact":
        subset_nodes = None  # full sum
        m = table.values
        diag = np.diag(m)
        a = m @ u
        u_total = float(u.sum())
    else:
        size = cfg.score_subset_size
        if size is None:
            size = cfg.n_src
        if size > len(sources):
            size = len(sources)
        subset_nodes = np.asarray(sources[:size], dtype=np.int64)
        sub_set = set(int(t) for t in subset_nodes)
        kpos = {int(t): k for k, t in enumerate(table.targets)}
        sub_k = np.array([kpos[int(t)] for t in subset_nodes])
        to_filled, from_filled = _filled_views(table)
        u_sub = u[subset_nodes]
        u_total_sub = float(u_sub.sum())
        a_sub = to_filled[:, sub_k] @ u_sub  # sum_{j in subset} u_j m_ij

    mode = "exact" if table.mode == "exact" else "truncated"
    parts: list[tuple] = []
    for r in sources:
        cand = _candidates_for(g, r, cfg.destination_scope, cfg.theta)
        if cand.size == 0:
            continue
        thetas = _theta_of(cfg.theta, r, cand)
        if table.mode == "exact":
            num = (a[cand] - u[cand] * diag[cand]) - a[r] + u_total
            m_cr = m[cand, r]
            m_rr = float(m[r, r])
            used = np.full(cand.size, n, dtype=np.int64)
        else:
            k_r = kpos[int(r)]
            m_cr = to_filled[cand, k_r]
            m_rr = float(to_filled[r, k_r])
            in_sub = np.isin(cand, subset_nodes)
            r_in_sub = int(r) in sub_set
            # return-time estimates m_cc for candidates inside the subset
            c_kpos = np.array([kpos[int(c)] for c in cand[in_sub]],
                              dtype=np.int64)
            # sum_{j in S, j != c} u_j m_cj with S = subset + {r, c}
            num = a_sub[cand].copy()
            num[in_sub] -= u[cand[in_sub]] * to_filled[cand[in_sub], c_kpos]
            if not r_in_sub:
                num += u[r] * m_cr
            # minus sum_{j in S} u_j m_rj
            base_r = float(a_sub[r])
            if not r_in_sub:
                base_r += u[r] * m_rr
            num -= base_r + np.where(in_sub, 0.0,
                                     u[cand] * from_filled[k_r, cand])
            # plus sum_{j in S} u_j
            num += (u_total_sub + (0.0 if r_in_sub else u[r])
                    + np.where(in_sub, 0.0, u[cand]))
            used = (subset_nodes.size + (0 if r_in_sub else 1)
                    + np.where(in_sub, 0, 1)).astype(np.int64)
        denom = m_rr + thetas * (m_cr - m_rr + 1.0)
        scores = thetas * num / denom
        parts.append((np.full(cand.size, r, dtype=np.int64), cand,
                      thetas, scores, used))
    if not parts:
        empty_i = np.array([], dtype=np.int64)
        empty_f = np.array([], dtype=np.float64)
        return empty_i, empty_i, empty_f, empty_f, empty_i, mode
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]),
            np.concatenate([p[2] for p in parts]),
            np.concatenate([p[3] for p in parts]),
            np.concatenate([p[4] for p in parts]), mode)


def _filled_views(table: MfptTable) -> tuple[np.ndarray, np.ndarray]:
    """NaN-free copies of the estimate arrays using the table's
    substitution rule; substituted entries are tallied on the table."""
    to_v = table.values.copy()
    fr_v = table.from_values.copy()
    nan_to = np.isnan(to_v)
    nan_fr = np.isnan(fr_v)
    col = table._col_fill.copy()
    row = table._row_fill.copy()
    observed = col[~np.isnan(col)]
    if (np.isnan(col).any() or np.isnan(row).any()):
        if observed.size == 0:
            raise MissingMfptError(
                "walk produced no passage-time samples at all")
        col[np.isnan(col)] = observed.mean()
        row[np.isnan(row)] = observed.mean()
    table.substitutions += int(nan_to.sum()) + int(nan_fr.sum())
    to_v[nan_to] = np.broadcast_to(col, to_v.shape)[nan_to]
    fr_v[nan_fr] = np.broadcast_to(row[:, None], fr_v.shape)[nan_fr]
    return to_v, fr_v


def _filter_overshoot(scores: np.ndarray, gap: float,
                      cfg: RecommenderConfig) -> list[int]:
    """Indices of at most k positive scores that jointly stay in the gap.

    ``scores`` must be sorted descending (ties already in canonical
    order); the returned indices are in acceptance order.
    """
    n_pos = int(np.searchsorted(-scores, 0.0, side="left"))
    if n_pos == 0:
        return []
    pos = scores[:n_pos]
    slack = cfg.overshoot_slack
    picked: list[int] = []
    remaining = gap
    if cfg.overshoot_policy == "skip":
        # descending order: everything fitting under the remaining gap is
        # a suffix, so each acceptance is one binary search
        i = 0
        while len(picked) < cfg.k and remaining > slack:
            i = max(i, int(np.searchsorted(-pos, -(remaining + slack),
                                           side="left")))
            if i >= n_pos:
                break
            picked.append(i)
            remaining -= float(pos[i])
            i += 1
        if not picked:
            picked = [int(np.argmin(np.abs(gap - pos)))]
    elif cfg.overshoot_policy == "closest_fit":
        taken = np.zeros(n_pos, dtype=bool)
        while len(picked) < cfg.k and remaining > slack and not taken.all():
            dist = np.abs(remaining - pos)
            dist[taken] = np.inf
            best = int(np.argmin(dist))
            taken[best] = True
            picked.append(best)
            remaining -= float(pos[best])
    else:
        raise ValueError(
            f"unknown overshoot_policy {cfg.overshoot_policy!r}")
    return picked


# ---------------------------------------------------------------------------
# iterative driver

def run_restore(g: Graph, x, x_tilde, cfg: RecommenderConfig,
                batch: int = 5, max_edges: int = 180,
                stop_tol: float = 1e-8) -> tuple[Graph, Trajectory]:
    """Apply recommendation batches until the signed gap closes.

    The target is the consensus value of the ORIGINAL graph on the
    pre-attack opinions; every batch recomputes centralities, passage
    times and sources on the current graph, applies the recommended
    edges, and logs the exact (freshly recomputed) signed objective.

    Stops when the signed objective falls below ``stop_tol``, when
    ``max_edges`` edges have been added, or when a batch yields no
    candidates. Raises StallError (with the partial trajectory attached)
    if the exact objective fails to decrease over three consecutive
    batches.

    Returns
    -------
    (graph, trajectory)
        The repaired graph and the per-batch log.
    """
    from .config import derive_seed

    x = validate_opinions(x)
    y = validate_opinions(x_tilde)
    pi0 = eigencentrality(g)
    target = consensus_value(pi0, x)
    obj = consensus_value(pi0, y) - target
    traj = Trajectory(initial_objective=obj, target_value=target)
    if obj < stop_tol:
        traj.stop_reason = "converged"
        return g, traj

    base_seed = cfg.walk_seed if cfg.walk_seed is not None else 0
    cur = g
    total = 0
    stall = 0
    batch_no = 0
    while True:
        batch_no += 1
        t0 = time.perf_counter()
        cfg_b = replace(cfg, k=min(batch, max_edges - total),
                        walk_seed=derive_seed(base_seed,
                                              f"batch:{batch_no}"))
        edges = recommend_edges(cur, x, y, cfg_b, target_value=target)
        if not edges:
            traj.stop_reason = "no_candidates"
            break
        for e in edges:
            cur = add_edge_perturbed(cur,
                                     EdgePerturbation(e.r, e.c, e.theta))
        total += len(edges)
        predicted = obj - sum(e.score for e in edges)
        obj_new = consensus_value(eigencentrality(cur), y) - target
        traj.records.append(BatchRecord(
            batch=batch_no, edges=edges, edges_added_total=total,
            objective_signed=predicted, objective_exact=obj_new,
            seconds=time.perf_counter() - t0))
        stall = stall + 1 if obj_new >= obj else 0
        obj = obj_new
        if stall >= 3:
            raise StallError(
                f"objective non-decreasing for {stall} consecutive "
                f"batches (now {obj:.3e})", trajectory=traj, graph=cur)
        if obj < stop_tol:
            traj.stop_reason = "converged"
            break
        if total >= max_edges:
            traj.stop_reason = "max_edges"
            break
    return cur, traj


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write per-batch rows
    ``batch,edges_added_total,objective_signed,objective_exact,seconds``."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("batch,edges_added_total,objective_signed,"
                 "objective_exact,seconds\n")
        for r in traj.records:
            fh.write(f"{r.batch},{r.edges_added_total},"
                     f"{float(r.objective_signed)!r},{float(r.objective_exact)!r},"
                     f"{r.seconds:.6f}\n")
