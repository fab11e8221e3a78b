"""Wasserstein, Gromov-Wasserstein and fused GW distances, full and partial.

Wasserstein-type problems are linear and solved exactly. The GW-type
objectives are quadratic in the coupling and minimized by Frank-Wolfe
(conditional gradient) with an exact LP per step and closed-form line
search; since the objective is non-convex, the result is the best local
optimum over several starts and is an upper bound on the true distance.

The quadratic part is evaluated on real nodes only, with the identity

    sum_ijkl L(W1[i,k], W2[j,l]) C[i,j] C[k,l]

which for the square loss expands to ``r' W1^2 r + c' W2^2 c - 2 <W1 C W2', C>``
with ``r``, ``c`` the row and column sums of ``C``. This form stays exact
for partial couplings whose marginals are not fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from ..network import MeasureNetwork
from .lp import OTError, emd, partial_emd, virtual_penalty

__all__ = [
    "SolverConfig",
    "Coupling",
    "DistanceResult",
    "KINDS",
    "wasserstein",
    "gromov_wasserstein",
    "fused_gw",
    "partial_distance",
    "distance",
]

KINDS = ("w", "gw", "fgw", "pw", "pgw", "pfgw")
TOL_MARGINAL = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    q: float = 2.0
    alpha: float = 0.5
    m: float = 1.0
    max_iterations: int = 1000
    tolerance: float = 1e-9
    restarts: int = 5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0.0 < self.m <= 1.0:
            raise ValueError("m must lie in (0, 1]")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.restarts < 1 or self.max_iterations < 1:
            raise ValueError("restarts and max_iterations must be positive")


@dataclass(frozen=True, eq=False)
class Coupling:
    matrix: np.ndarray
    mass: float
    kind: str  # "full" or "partial"

    def violation(self, p1: np.ndarray, p2: np.ndarray) -> float:
        """Largest constraint violation of the coupling's class."""
        C = self.matrix
        neg = max(0.0, -float(C.min(initial=0.0)))
        r, c = C.sum(axis=1), C.sum(axis=0)
        if self.kind == "full":
            return max(neg, float(np.abs(r - p1).max()), float(np.abs(c - p2).max()))
        over = max(float((r - p1).max()), float((c - p2).max()), 0.0)
        return max(neg, over, abs(float(C.sum()) - self.mass))


@dataclass(eq=False)
class DistanceResult:
    distance: float
    objective: float
    coupling: Coupling
    iterations: int = 0
    converged: bool = True
    restart_best: int = 0
    trace: list = field(default_factory=list)
    kind: str = ""


def _check_marginals(g1: MeasureNetwork, g2: MeasureNetwork):
    s1, s2 = g1.p.sum(), g2.p.sum()
    if abs(s1 - s2) > 1e-9 or abs(s1 - 1.0) > 1e-9:
        raise OTError(f"infeasible marginals: masses {s1:.12g} vs {s2:.12g}")


def _root(objective: float, q: float) -> float:
    return max(objective, 0.0) ** (1.0 / q)


def attribute_cost(g1: MeasureNetwork, g2: MeasureNetwork, q: float) -> np.ndarray:
    D = cdist(g1.F, g2.F)
    return D * D if q == 2 else D**q


# ---------------------------------------------------------------------------
# linear problems


def wasserstein(g1: MeasureNetwork, g2: MeasureNetwork, cfg: SolverConfig = SolverConfig()) -> DistanceResult:
    """Exact q-Wasserstein distance between the attribute distributions."""
    _check_marginals(g1, g2)
    M = attribute_cost(g1, g2, cfg.q)
    C = emd(g1.p, g2.p, M)
    obj = float((M * C).sum())
    return DistanceResult(_root(obj, cfg.q), obj, Coupling(C, 1.0, "full"), 1, True, 0, [obj], "w")


def _partial_wasserstein(g1, g2, cfg) -> DistanceResult:
    _check_marginals(g1, g2)
    M = attribute_cost(g1, g2, cfg.q)
    penalty = virtual_penalty(float(cdist(g1.F, g2.F).max()), 0.0, cfg.q)
    C = partial_emd(g1.p, g2.p, M, cfg.m, penalty)
    obj = float((M * C).sum())
    return DistanceResult(_root(obj, cfg.q), obj, Coupling(C, cfg.m, "partial"), 1, True, 0, [obj], "pw")


# ---------------------------------------------------------------------------
# quadratic problems


class _Quadratic:
    """Fused objective ``lin <M, C> + alpha * sum L C C`` on real nodes."""

    def __init__(self, W1, W2, M, alpha, q, lin_weight):
        self.W1, self.W2, self.alpha, self.q = W1, W2, alpha, q
        self.lin = (1.0 - alpha) * lin_weight * M if alpha < 1 else np.zeros_like(M)
        if q == 2:
            self.W1sq = W1 * W1
            self.W2sq = W2 * W2
        else:
            # (n1, n1, n2, n2) loss tensor, indexed [i, k, j, l]
            self.L = np.abs(W1[:, :, None, None] - W2[None, None, :, :]) ** q

    def contract(self, C):
        """T(C)_ij = sum_kl L_ijkl C_kl."""
        if self.q == 2:
            r, c = C.sum(axis=1), C.sum(axis=0)
            WCW = self.W1 @ (C @ self.W2.T)
            return (self.W1sq @ r)[:, None] + (self.W2sq @ c)[None, :] - 2.0 * WCW
        return np.einsum("ikjl,kl->ij", self.L, C)

    def contract_vertex(self, S):
        """``contract`` for an LP vertex, which has at most n1 + n2 - 1 nonzeros."""
        if self.q != 2:
            return self.contract(S)
        n1, n2 = S.shape
        I, J = np.nonzero(S)
        s = S[I, J]
        r = np.bincount(I, s, n1)
        c = np.bincount(J, s, n2)
        WCW = (self.W1[:, I] * s) @ self.W2[:, J].T
        return (self.W1sq @ r)[:, None] + (self.W2sq @ c)[None, :] - 2.0 * WCW

    def value(self, C, T=None):
        if T is None:
            T = self.contract(C)
        return float((self.lin * C).sum() + self.alpha * (T * C).sum())

    def gradient(self, T):
        return self.lin + 2.0 * self.alpha * T


def _line_search(a: float, b: float) -> float:
    """argmin over [0, 1] of a t^2 + b t, preferring the smaller step."""
    if a > 0:
        return min(max(-b / (2.0 * a), 0.0), 1.0)
    return 1.0 if a + b < 0 else 0.0


def _frank_wolfe(prob: _Quadratic, C0, lp, cfg: SolverConfig):
    C = np.array(C0, dtype=np.float64)
    T = prob.contract(C)
    f = prob.value(C, T)
    trace = [f]
    small = 0
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        G = prob.gradient(T)
        S = lp(G)
        D = S - C
        b = float((G * D).sum())
        if b >= 0:
            converged = True
            break
        TS = prob.contract_vertex(S)
        TD = TS - T
        a = prob.alpha * float((TD * D).sum())
        t = _line_search(a, b)
        if t == 0.0:
            converged = True
            break
        C_new = C + t * D
        T_new = T + t * TD
        f_new = prob.value(C_new, T_new)
        if f_new > f + 1e-12 * max(1.0, abs(f)):
            # rounding pushed us uphill; the previous iterate is stationary
            converged = True
            break
        C, T, f_prev, f = C_new, T_new, f, f_new
        trace.append(f)
        if abs(f_prev - f) <= cfg.tolerance * max(abs(f_prev), 1e-300):
            small += 1
            if small >= 2:
                converged = True
                break
        else:
            small = 0
        if f == 0.0:
            converged = True
            break
    np.maximum(C, 0.0, out=C)
    # refresh T so the reported objective is consistent with C
    return C, prob.value(C), it, converged, trace


def _starts(lp, p1, p2, mass, cfg: SolverConfig, inits=()):
    """Product coupling, caller couplings, then random vertices."""
    yield mass * np.outer(p1, p2)
    for C in inits:
        yield np.array(C, dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    for _ in range(cfg.restarts - 1):
        yield lp(rng.random((p1.size, p2.size)))


def _solve_quadratic(g1, g2, cfg: SolverConfig, alpha: float, partial: bool, kind: str, init=None) -> DistanceResult:
    _check_marginals(g1, g2)
    M = attribute_cost(g1, g2, cfg.q)
    mass = cfg.m if partial else 1.0
    # the partial fused objective weights its linear term by the transported mass
    prob = _Quadratic(g1.W, g2.W, M, alpha, cfg.q, lin_weight=mass)
    if partial:
        max_w = max(g1.W.max() - g2.W.min(), g2.W.max() - g1.W.min(), 0.0)
        penalty = virtual_penalty(float(cdist(g1.F, g2.F).max()), float(max_w), cfg.q)

        def lp(G):
            return partial_emd(g1.p, g2.p, G - G.min() if G.min() < 0 else G, cfg.m, penalty)

    else:

        def lp(G):
            return emd(g1.p, g2.p, G)

    inits = [] if init is None else [init]
    if partial and cfg.m < 1.0:
        # a scaled full optimum is feasible for the partial problem
        full = _solve_quadratic(g1, g2, cfg, alpha, False, kind)
        inits.append(cfg.m * full.coupling.matrix)
    best = None
    for k, C0 in enumerate(_starts(lp, g1.p, g2.p, mass, cfg, inits)):
        C, f, it, conv, trace = _frank_wolfe(prob, C0, lp, cfg)
        if best is None or f < best[1]:
            best = (C, f, it, conv, trace, k)
    C, f, it, conv, trace, k = best
    coupling = Coupling(C, mass, "partial" if partial else "full")
    return DistanceResult(_root(f, cfg.q), f, coupling, it, conv, k, trace, kind)


def gromov_wasserstein(g1, g2, cfg: SolverConfig = SolverConfig(), init=None) -> DistanceResult:
    """GW distance between the network functions (attributes ignored)."""
    return _solve_quadratic(g1, g2, cfg, 1.0, False, "gw", init)


def fused_gw(g1, g2, cfg: SolverConfig = SolverConfig(), init=None) -> DistanceResult:
    """Fused GW with trade-off ``cfg.alpha`` (0: Wasserstein, 1: GW).

    At alpha = 0 the objective is linear and Frank-Wolfe stops after one
    exact LP step, so the value coincides with :func:`wasserstein`.
    """
    return _solve_quadratic(g1, g2, cfg, cfg.alpha, False, "fgw", init)


def partial_distance(kind: str, g1, g2, cfg: SolverConfig = SolverConfig(), init=None) -> DistanceResult:
    """Partial variant (``pw``, ``pgw``, ``pfgw``) transporting mass ``cfg.m``."""
    kind = kind.lower()
    if kind == "pw":
        return _partial_wasserstein(g1, g2, cfg)
    if kind == "pgw":
        return _solve_quadratic(g1, g2, cfg, 1.0, True, "pgw", init)
    if kind == "pfgw":
        return _solve_quadratic(g1, g2, cfg, cfg.alpha, True, "pfgw", init)
    raise ValueError(f"unknown partial kind {kind!r}")


def distance(kind: str, g1, g2, cfg: SolverConfig = SolverConfig(), init=None) -> DistanceResult:
    """Dispatch on one of ``KINDS``."""
    kind = kind.lower()
    if kind == "w":
        return wasserstein(g1, g2, cfg)
    if kind == "gw":
        return gromov_wasserstein(g1, g2, cfg, init)
    if kind == "fgw":
        return fused_gw(g1, g2, cfg, init)
    if kind in ("pw", "pgw", "pfgw"):
        return partial_distance(kind, g1, g2, cfg, init)
    raise ValueError(f"unknown distance kind {kind!r}; expected one of {KINDS}")
