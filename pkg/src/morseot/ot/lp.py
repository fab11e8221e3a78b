"""Exact transport LPs: balanced network simplex and the virtual-node
reduction of partial transport to a balanced problem."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

# POT probes every installed array backend on import; we only use numpy
for _name in ("PYTORCH", "JAX", "TENSORFLOW", "CUPY"):
    os.environ.setdefault(f"POT_BACKEND_DISABLE_{_name}", "1")

import ot  # noqa: E402

__all__ = ["OTError", "emd", "partial_emd", "AugmentedProblem", "augment_with_virtual_node", "virtual_penalty"]

MAX_ITER = 10_000_000


class OTError(ValueError):
    pass


def emd(a: np.ndarray, b: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Optimal vertex of the transport polytope U(a, b) for linear cost M."""
    if abs(a.sum() - b.sum()) > 1e-9:
        raise OTError(f"infeasible marginals: masses {a.sum():.12g} vs {b.sum():.12g}")
    G, log = ot.emd(a, b, np.ascontiguousarray(M, dtype=np.float64), numItermax=MAX_ITER, log=True)
    if log.get("warning"):
        raise OTError(f"network simplex failed: {log['warning']}")
    return G


def virtual_penalty(max_attr: float, max_w: float, q: float) -> float:
    """Virtual-to-virtual cost, an upper bound on any transport cost."""
    return 2.0 * (max_attr + max_w) ** q + 1.0


def partial_emd(a, b, M, m: float, penalty: float | None = None) -> np.ndarray:
    """Optimal coupling of total mass ``m`` with marginals bounded by a, b.

    Each side gets a virtual node carrying the mass to be discarded; real to
    virtual transport is free and virtual to virtual costs ``penalty``.
    """
    if not 0 < m <= 1 + 1e-12:
        raise OTError("transported mass m must lie in (0, 1]")
    n1, n2 = M.shape
    floor = 2.0 * float(np.max(M, initial=0.0)) + 1.0
    penalty = floor if penalty is None else max(penalty, floor)
    a_ext = np.append(a, max(b.sum() - m, 0.0))
    b_ext = np.append(b, max(a.sum() - m, 0.0))
    M_ext = np.zeros((n1 + 1, n2 + 1))
    M_ext[:n1, :n2] = M
    M_ext[n1, n2] = penalty
    G = emd(a_ext, b_ext, M_ext)
    return G[:n1, :n2]


@dataclass(frozen=True, eq=False)
class AugmentedProblem:
    """Balanced problem equivalent to a partial one.

    ``a``/``b`` are renormalized augmented marginals; ``cost`` is the
    augmented attribute cost (zero to virtual nodes, ``penalty`` between
    them); ``W1``/``W2`` carry zero rows and columns for the virtual nodes.
    """

    a: np.ndarray
    b: np.ndarray
    cost: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    penalty: float
    m: float
    scale: float  # total augmented mass before renormalization

    @property
    def n1(self) -> int:
        return self.a.size - 1

    @property
    def n2(self) -> int:
        return self.b.size - 1

    def strip(self, C: np.ndarray) -> np.ndarray:
        """Real-node block of an augmented coupling, back in original mass units."""
        return C[: self.n1, : self.n2] * self.scale


def augment_with_virtual_node(g1, g2, m: float, q: float = 2.0) -> AugmentedProblem:
    """Append one virtual node to each network for partial transport of mass m."""
    if not 0 < m <= 1:
        raise OTError("transported mass m must lie in (0, 1]")
    from scipy.spatial.distance import cdist

    D = cdist(g1.F, g2.F)
    max_w = max(g1.W.max() - g2.W.min(), g2.W.max() - g1.W.min(), 0.0)
    penalty = virtual_penalty(float(D.max()), float(max_w), q)
    scale = 2.0 - m
    a = np.append(g1.p, 1.0 - m) / scale
    b = np.append(g2.p, 1.0 - m) / scale
    cost = np.zeros((g1.n + 1, g2.n + 1))
    cost[: g1.n, : g2.n] = D**q
    cost[g1.n, g2.n] = penalty
    W1 = np.zeros((g1.n + 1, g1.n + 1))
    W1[: g1.n, : g1.n] = g1.W
    W2 = np.zeros((g2.n + 1, g2.n + 1))
    W2[: g2.n, : g2.n] = g2.W
    return AugmentedProblem(a, b, cost, W1, W2, penalty, m, scale)
