"""Ground-truth references: exhaustive edge search and the reduction gadget.

The exhaustive search recomputes the stationary distribution from scratch
for every candidate subset, so it is the independent check the closed-form
scores and the greedy pipeline are measured against.

The gadget maps a size-k subset-sum instance onto the edge-addition
problem: take the uniformly weighted clique on 2n nodes minus the perfect
matching of consecutive pairs, encode the subset-sum values on the node
pairs, and offer exactly the matching edges as candidates. Re-uniformizing
degrees makes the objective of choosing matching edges S equal to
|sum_{l in S} z_l - s| / (m + k), so driving the consensus gap to zero is
exactly hitting the subset sum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .graph import EdgePerturbation, Graph, add_edge_perturbed, from_edges
from .spectral import consensus_value, eigencentrality

SUBSET_CAP = 1_000_000


def brute_force_edges(g: Graph, k: int, x, x_tilde, candidates,
                      theta=0.1, undirected_uniform: bool = False,
                      tol: float = 1e-12):
    """Exhaustive minimizer of |<pi', x_tilde> - <pi, x>| over k-subsets.

    Every subset of ``candidates`` of size k is applied (sequentially, in
    lexicographic order) and the stationary distribution recomputed by
    power iteration, so no closed form is trusted.

    Parameters
    ----------
    theta : float or callable
        Trust share per inserted edge; a callable receives (r, c, graph)
        at application time.
    undirected_uniform : bool
        Treat candidates as undirected pairs on a uniformly weighted
        graph: each pair (u, v) inserts both directions with theta
        1/(out_degree+1), which re-uniformizes the touched rows.

    Returns
    -------
    (best_subset, best_objective)
        The first subset (in enumeration order) reaching the minimum.
    """
    candidates = sorted(tuple(e) for e in candidates)
    total = math.comb(len(candidates), k)
    if total > SUBSET_CAP:
        raise ValueError(
            f"{total} subsets exceed the enumeration cap {SUBSET_CAP}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(x_tilde, dtype=np.float64)
    base = consensus_value(eigencentrality(g, tol=tol), x)

    best_subset, best_obj = None, np.inf
    for subset in itertools.combinations(candidates, k):
        cur = g
        for (u, v) in subset:
            cur = _apply(cur, u, v, theta, undirected_uniform)
        obj = abs(consensus_value(eigencentrality(cur, tol=tol), y) - base)
        if obj < best_obj:
            best_subset, best_obj = subset, obj
    return list(best_subset), float(best_obj)


def _apply(g: Graph, u: int, v: int, theta, undirected: bool) -> Graph:
    if undirected:
        g = add_edge_perturbed(
            g, EdgePerturbation(u, v, 1.0 / (g.out_degree(u) + 1)))
        g = add_edge_perturbed(
            g, EdgePerturbation(v, u, 1.0 / (g.out_degree(v) + 1)))
        return g
    th = theta(u, v, g) if callable(theta) else float(theta)
    return add_edge_perturbed(g, EdgePerturbation(u, v, th))


# ---------------------------------------------------------------------------
# subset-sum gadget

@dataclass
class GadgetInstance:
    """Subset-sum instance (z, k, s) embedded in an edge-addition problem.

    ``graph`` is the uniformly weighted clique-minus-matching on 2n nodes
    (None for n = 1, where that graph has no edges), ``candidates`` the n
    matching pairs (2l, 2l+1), and (x, x_tilde) the opinion vectors whose
    consensus gap encodes the subset sum.
    """

    z: np.ndarray
    k: int
    s: float
    n: int
    m: int
    graph: Graph | None
    x: np.ndarray
    x_tilde: np.ndarray
    candidates: list


def build_gadget(z, k: int, s: float) -> GadgetInstance:
    """Embed the subset-sum instance (z, k, s) per the reduction.

    Parameters
    ----------
    z : array of float in [0, 1]
        Subset-sum values, one per node pair.
    k : int
        Required subset size, 1 <= k <= len(z).
    s : float in [0, 1]
        Subset-sum target.
    """
    z = np.asarray(z, dtype=np.float64)
    n = z.size
    if n == 0:
        raise ValueError("z must be non-empty")
    if z.min() < 0.0 or z.max() > 1.0:
        raise ValueError("entries of z must lie in [0, 1]")
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    m = 2 * n * n - 2 * n
    x_tilde = np.repeat(z, 2)
    x = (s + m * x_tilde) / (m + k)
    candidates = [(2 * ell, 2 * ell + 1) for ell in range(n)]
    graph = _clique_minus_matching(n) if n >= 2 else None
    return GadgetInstance(z=z, k=k, s=float(s), n=n, m=m, graph=graph,
                          x=x, x_tilde=x_tilde, candidates=candidates)


def _clique_minus_matching(n: int) -> Graph:
    """Uniform weights on the 2n-clique minus the pairs (2l, 2l+1)."""
    size = 2 * n
    deg = size - 2
    triples = []
    for i in range(size):
        partner = i ^ 1
        for j in range(size):
            if j != i and j != partner:
                triples.append((i, j, 1.0 / deg))
    return from_edges(size, triples)


def _chosen_indices(inst: GadgetInstance, chosen) -> list[int]:
    out = []
    for item in chosen:
        if isinstance(item, (tuple, list)):
            out.append(inst.candidates.index(tuple(item)))
        else:
            out.append(int(item))
    if len(set(out)) != len(out):
        raise ValueError("chosen edges must be distinct")
    if any(not 0 <= i < inst.n for i in out):
        raise ValueError("chosen edge outside the candidate set")
    return out


def verify_gadget(inst: GadgetInstance, chosen) -> tuple[float, float]:
    """Evaluate both sides of the reduction identity for a chosen subset.

    lhs is the true objective |<pi', x_tilde> - <pi, x>| computed from the
    degree formula pi = d / (2m) on the perturbed undirected graph; rhs is
    the reduced form |sum_{l chosen} z_l - s| / (m + k). They agree to
    floating-point accuracy whenever |chosen| = k.
    """
    idx = _chosen_indices(inst, chosen)
    if len(idx) != inst.k:
        raise ValueError(
            f"the reduction fixes the subset size: need {inst.k} edges, "
            f"got {len(idx)}")
    size = 2 * inst.n
    deg = np.full(size, size - 2, dtype=np.float64)
    for ell in idx:
        deg[2 * ell] += 1.0
        deg[2 * ell + 1] += 1.0
    m_new = inst.m + len(idx)
    pi_new = deg / (2.0 * m_new)
    # <pi, x> on the base graph; for m = 0 the opinions x are constant so
    # the value is independent of pi and the uniform vector is safe
    pi_base = np.full(size, 1.0 / size)
    lhs = abs(float(pi_new @ inst.x_tilde) - float(pi_base @ inst.x))
    rhs = abs(float(inst.z[idx].sum()) - inst.s) / (inst.m + inst.k)
    return lhs, rhs


def subset_sum_exists(z, k: int, s: float, tol: float = 1e-12) -> bool:
    """Exhaustive check: does some size-k subset of z sum to s within tol?"""
    z = np.asarray(z, dtype=np.float64)
    for subset in itertools.combinations(range(z.size), k):
        if abs(z[list(subset)].sum() - s) <= tol:
            return True
    return False
