"""Closed-form effect of inserting one trust edge.

Adding the absent edge (r, c) with share theta changes the stationary
distribution pi without re-solving the eigenproblem: with D denoting
m_rr + theta * (m_cr - m_rr + 1),

    pi'_r = 1 / D
    pi'_j = pi_j * (1 - theta * (m_cj * [j != c] - m_rj + 1) / D)

and the induced drop of the consensus value on opinions y is

    f(r, c) = <pi, y> - <pi', y>
            = theta * sum_j pi_j (m_cj * [j != c] - m_rj + 1) y_j / D .

The formulas hold when row r is rationally selfish (its self-weight
strictly dominates the row), which pins the location of the dominant
negative perturbation the derivation relies on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingMfptError
from .graph import EdgePerturbation, Graph, is_row_selfish
from .mfpt import MfptTable
from .spectral import CentralityVector, _vec


@dataclass(frozen=True)
class ScoredEdge:
    """A candidate edge with its predicted consensus-value reduction.

    ``mode`` records whether the score summed over every node (exact) or
    over a truncated subset; ``mfpt_source`` records whether the table
    behind it was exact or walk-estimated, so approximate scores are never
    mistaken for exact ones.
    """

    r: int
    c: int
    theta: float
    score: float
    mode: str
    nodes_used: int
    mfpt_source: str = "exact"


def _check_admissible(g: Graph, r: int, c: int, theta: float,
                      force: bool) -> None:
    EdgePerturbation(r, c, theta)  # range checks
    if g.has_edge(r, c):
        raise ValueError(f"edge ({r}, {c}) already present")
    if not force and not is_row_selfish(g, r):
        raise ValueError(
            f"row {r} is not rationally selfish; the closed form does not "
            "apply (pass force=True to override)")


def _denominator(m: MfptTable, r: int, c: int, theta: float) -> float:
    m_rr = m.get(r, r)
    m_cr = m.get(c, r)
    return m_rr + theta * (m_cr - m_rr + 1.0)


def perturbed_centrality(g: Graph, pi, m: MfptTable, r: int, c: int,
                         theta: float, force: bool = False
                         ) -> CentralityVector:
    """Stationary distribution after inserting (r, c) with share theta.

    Needs passage times into every node, so ``m`` must be an exact table
    (or one covering all columns). The result is L1-normalized up to the
    accuracy of ``m``; with an exact table it matches a fresh power-method
    solve of the perturbed graph to solver precision.

    Parameters
    ----------
    g : Graph
        Base graph; the edge (r, c) must be absent and row r rationally
        selfish unless ``force`` is set.
    pi : CentralityVector or ndarray
        Stationary distribution of ``g``.
    m : MfptTable
        Passage times of ``g``.
    """
    _check_admissible(g, r, c, theta, force)
    p = _vec(pi)
    if m.mode != "exact":
        missing = [j for j in range(g.n) if not m.covers_column(j)]
        if missing:
            raise MissingMfptError(
                f"perturbed centrality needs every column; first missing "
                f"node {missing[0]}")
    if m.mode == "exact":
        m_cj = m.values[c, :].copy()
        m_rj = m.values[r, :]
    else:
        m_cj = np.array([m.get(c, j) for j in range(g.n)])
        m_rj = np.array([m.get(r, j) for j in range(g.n)])
    d = _denominator(m, r, c, theta)
    adj = m_cj.copy()
    adj[c] = 0.0
    out = p * (1.0 - theta * (adj - m_rj + 1.0) / d)
    out[r] = 1.0 / d
    return CentralityVector(values=out, residual=float("nan"), iterations=0)


def edge_score(g: Graph, pi, m: MfptTable, r: int, c: int, theta: float,
               x_tilde, node_subset=None, force: bool = False) -> ScoredEdge:
    """Predicted consensus-value reduction from inserting (r, c).

    Parameters
    ----------
    x_tilde : ndarray
        Opinion vector the consensus of which the score is taken against.
    node_subset : iterable of int, optional
        Nodes to truncate the sum to; must contain both r and c. None
        sums over every node (exact mode, full table required).

    Returns
    -------
    ScoredEdge
        score > 0 means the edge lowers the consensus value.
    """
    _check_admissible(g, r, c, theta, force)
    p = _vec(pi)
    y = np.asarray(x_tilde, dtype=np.float64)
    if node_subset is None:
        subset = np.arange(g.n)
        mode = "exact"
    else:
        subset = np.unique(np.asarray(list(node_subset), dtype=np.int64))
        if r not in subset or c not in subset:
            raise ValueError("node_subset must contain both r and c")
        mode = "truncated"
    num = 0.0
    for j in subset:
        m_cj = 0.0 if j == c else m.get(c, int(j))
        m_rj = m.get(r, int(j))
        num += p[j] * (m_cj - m_rj + 1.0) * y[j]
    d = _denominator(m, r, c, theta)
    return ScoredEdge(r=int(r), c=int(c), theta=float(theta),
                      score=float(theta * num / d), mode=mode,
                      nodes_used=int(subset.size), mfpt_source=m.mode)


# ---------------------------------------------------------------------------
# csv dump

def write_scores_csv(edges, path) -> None:
    """Write ScoredEdges as ``r,c,theta,score,mode`` rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("r,c,theta,score,mode\n")
        for e in edges:
            fh.write(f"{e.r},{e.c},{float(e.theta)!r},{float(e.score)!r},{e.mode}\n")
