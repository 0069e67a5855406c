"""Figure-data emitters: CSV tables behind the qualitative plots.

Each function returns plain row tuples and has a matching CSV writer so
the command line harness can dump everything a plotting notebook needs
without this package rendering anything itself.
"""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from .graph import Graph
from .mfpt import MfptTable, mfpt_estimate, mfpt_exact, walk_length_default
from .perturbation import edge_score
from .recommend import RecommenderConfig, _score_all, select_sources
from .spectral import eigencentrality


def _admissible_pairs(g: Graph, sources, cfg: RecommenderConfig):
    from .recommend import _candidates_for

    pairs = []
    for r in sources:
        for c in _candidates_for(g, int(r), cfg.destination_scope, cfg.theta):
            pairs.append((int(r), int(c)))
    return pairs


def score_vs_centrality(g: Graph, x_tilde, cfg: RecommenderConfig):
    """Best single-edge score per source node against its centrality.

    Returns rows ``(r, pi_r, best_score)`` for every scored source, the
    data behind the source-centrality scatter.
    """
    pi = eigencentrality(g)
    p = pi.values
    table = mfpt_exact(g, pi, dense_cap=cfg.dense_cap)
    sources = select_sources(p, cfg.n_src)
    from .graph import is_row_selfish

    sources = np.array([r for r in sources if is_row_selfish(g, int(r))],
                       dtype=np.int64)
    r_a, _, _, sc_a, _, _ = _score_all(g, p, table, sources,
                                       np.asarray(x_tilde, float), cfg)
    best: dict[int, float] = {}
    for r, s in zip(r_a.tolist(), sc_a.tolist()):
        if r not in best or s > best[r]:
            best[r] = s
    return [(r, float(p[r]), s) for r, s in sorted(best.items())]


def write_score_vs_centrality_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("r,pi_r,best_score\n")
        for r, pr, s in rows:
            fh.write(f"{r},{float(pr)!r},{float(s)!r}\n")


def truncation_curve(g: Graph, x_tilde, cfg: RecommenderConfig,
                     subset_sizes) -> list:
    """Truncated-sum scores versus the exact ones, per subset size.

    The truncated score keeps only the ``size`` highest-centrality nodes
    (plus the endpoints) in the summation. Rows are
    ``(size, mean_abs_err, max_abs_err, top1_match)``.
    """
    pi = eigencentrality(g)
    p = pi.values
    table = mfpt_exact(g, pi, dense_cap=cfg.dense_cap)
    sources = select_sources(p, cfg.n_src)
    from .graph import is_row_selfish

    sources = np.array([r for r in sources if is_row_selfish(g, int(r))],
                       dtype=np.int64)
    pairs = _admissible_pairs(g, sources, cfg)
    y = np.asarray(x_tilde, float)
    exact = {}
    for r, c in pairs:
        theta = cfg.theta[(r, c)] if isinstance(cfg.theta, dict) else cfg.theta
        exact[(r, c)] = edge_score(g, pi, table, r, c, theta, y).score
    if not exact:
        return []
    best_pair = max(exact, key=lambda rc: (exact[rc], -rc[0], -rc[1]))
    by_rank = np.argsort(-p, kind="stable")
    rows = []
    for size in subset_sizes:
        size = int(size)
        top = by_rank[:size]
        errs = []
        trunc = {}
        for r, c in pairs:
            theta = (cfg.theta[(r, c)]
                     if isinstance(cfg.theta, dict) else cfg.theta)
            subset = np.unique(np.concatenate([top, [r, c]]))
            s = edge_score(g, pi, table, r, c, theta, y,
                           node_subset=subset).score
            trunc[(r, c)] = s
            errs.append(abs(s - exact[(r, c)]))
        top_trunc = max(trunc, key=lambda rc: (trunc[rc], -rc[0], -rc[1]))
        rows.append((size, float(np.mean(errs)), float(np.max(errs)),
                     int(top_trunc == best_pair)))
    return rows


def write_truncation_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("subset_size,mean_abs_err,max_abs_err,top1_match\n")
        for size, mean_e, max_e, hit in rows:
            fh.write(f"{size},{float(mean_e)!r},{float(max_e)!r},{hit}\n")


def walk_convergence(g: Graph, targets=None, lengths=None, seed=0,
                     rel_tol=0.05) -> list:
    """Estimator error against walk length, vs the exact table.

    Rows are ``(walk_len, mean_rel_err, max_rel_err, frac_within_tol)``
    over all observed to-target entries.
    """
    n = g.n
    pi = eigencentrality(g)
    if targets is None:
        k = max(1, n // 20)
        targets = select_sources(pi.values, k)
    targets = np.asarray(targets, dtype=np.int64)
    if lengths is None:
        base = walk_length_default(n)
        lengths = [max(base // 10, 10 * n), max(base // 4, 10 * n),
                   max(base // 2, 10 * n), base]
    exact = mfpt_exact(g, pi)
    ref = exact.values[:, targets]
    rows = []
    for wl in lengths:
        wl = int(wl)
        est = mfpt_estimate(g, targets, walk_len=wl, seed=seed)
        vals = est.values
        mask = ~np.isnan(vals)
        if not mask.any():
            rows.append((wl, float("nan"), float("nan"), 0.0))
            continue
        rel = np.abs(vals[mask] - ref[mask]) / ref[mask]
        rows.append((wl, float(rel.mean()), float(rel.max()),
                     float((rel <= rel_tol).mean())))
    return rows


def write_walk_convergence_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("walk_len,mean_rel_err,max_rel_err,frac_within_tol\n")
        for wl, mean_e, max_e, frac in rows:
            fh.write(f"{wl},{float(mean_e)!r},{float(max_e)!r},{float(frac)!r}\n")


def emit_figure_data(g: Graph, x_tilde, cfg: RecommenderConfig, out_dir,
                     seed=0) -> list:
    """Write the three standalone figure CSVs; returns the paths."""
    import os

    paths = []
    fig_cfg = replace(cfg, mfpt_mode="exact")

    p = os.path.join(out_dir, "fig_score_vs_centrality.csv")
    write_score_vs_centrality_csv(p, score_vs_centrality(g, x_tilde, fig_cfg))
    paths.append(p)

    sizes = sorted({max(1, g.n // d) for d in (20, 10, 4, 2, 1)})
    p = os.path.join(out_dir, "fig_truncation.csv")
    write_truncation_csv(p, truncation_curve(g, x_tilde, fig_cfg, sizes))
    paths.append(p)

    p = os.path.join(out_dir, "fig_walk_convergence.csv")
    write_walk_convergence_csv(p, walk_convergence(g, seed=seed))
    paths.append(p)
    return paths
