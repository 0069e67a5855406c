"""Dominant left eigenvector of the trust matrix and the consensus value.

For a strongly connected, aperiodic row-stochastic W the iterates W^t
converge to the rank-one matrix 1 pi^T, so every initial opinion vector x
is driven to the single value <pi, x>. pi is the stationary distribution
of the chain, computed here by power iteration on W^T.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphFormatError, NotConvergedError
from .graph import Graph

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000


@dataclass
class CentralityVector:
    """L1-normalized dominant left eigenvector plus convergence metadata.

    ``residual`` is the L1 norm of pi W - pi at exit and ``iterations`` the
    number of multiplications performed (0 for closed-form results).
    """

    values: np.ndarray
    residual: float
    iterations: int

    def __len__(self):
        return self.values.shape[0]


def _vec(pi) -> np.ndarray:
    """Accept a CentralityVector or a plain array."""
    if isinstance(pi, CentralityVector):
        return pi.values
    return np.asarray(pi, dtype=np.float64)


def eigencentrality(g: Graph, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> CentralityVector:
    """Stationary distribution of the trust chain by power iteration.

    Starts from the uniform vector, multiplies by W^T and renormalizes in
    L1 each step, and stops when the L1 residual ||pi W - pi||_1 drops to
    ``tol``.

    Parameters
    ----------
    g : Graph
        Must be strongly connected and aperiodic; entries of the result
        are then strictly positive.
    tol : float
        Residual target, default 1e-12.
    max_iter : int
        Iteration cap, default 10000.

    Raises
    ------
    NotConvergedError
        If the residual is still above ``tol`` after ``max_iter`` steps.
        The exception carries the last residual and the iteration count.
    """
    wt = g.to_csr().T.tocsr()
    pi = np.full(g.n, 1.0 / g.n)
    residual = np.inf
    for it in range(1, max_iter + 1):
        nxt = wt @ pi
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - pi).sum())
        pi = nxt
        if residual <= tol:
            return CentralityVector(values=pi, residual=residual,
                                    iterations=it)
    raise NotConvergedError(
        f"power iteration residual {residual:.3e} above {tol:g} "
        f"after {max_iter} iterations",
        residual=residual, iterations=max_iter)


def consensus_value(pi, x) -> float:
    """Asymptotic opinion <pi, x> that every node converges to."""
    p = _vec(pi)
    x = np.asarray(x, dtype=np.float64)
    if p.shape != x.shape:
        raise ValueError("centrality and opinion vectors differ in length")
    return float(p @ x)


def validate_opinions(x, n: int | None = None) -> np.ndarray:
    """Check an opinion vector: finite entries inside [0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    if n is not None and x.shape != (n,):
        raise ValueError(f"expected {n} opinions, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("opinions must be finite")
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise ValueError("opinions must lie in [0, 1]")
    return x


# ---------------------------------------------------------------------------
# vector files (opinions, centralities)

def write_vector(values, path) -> None:
    """Write ``node<TAB>value`` lines for a per-node vector."""
    values = np.asarray(values, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for i, v in enumerate(values):
            fh.write(f"{i}\t{float(v)!r}\n")


def read_vector(path, n: int | None = None) -> np.ndarray:
    """Read a ``node<TAB>value`` file into a dense array.

    Every node 0..n-1 must appear exactly once; ``#`` comments and blank
    lines are ignored.
    """
    entries = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise GraphFormatError(
                    f"expected 'node<TAB>value', got {line!r}", line=lineno)
            try:
                i, v = int(parts[0]), float(parts[1])
            except ValueError as exc:
                raise GraphFormatError(str(exc), line=lineno) from None
            if i in entries:
                raise GraphFormatError(f"duplicate node {i}", line=lineno)
            entries[i] = v
    if not entries:
        raise GraphFormatError("vector file is empty")
    size = n if n is not None else max(entries) + 1
    out = np.full(size, np.nan)
    for i, v in entries.items():
        if not 0 <= i < size:
            raise GraphFormatError(f"node id {i} out of range 0..{size - 1}")
        out[i] = v
    if np.isnan(out).any():
        miss = int(np.flatnonzero(np.isnan(out))[0])
        raise GraphFormatError(f"missing value for node {miss}")
    return out
