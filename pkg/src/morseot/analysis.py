"""Downstream analysis: color transfer, distance matrices, tuning of the
partial mass, classical MDS and kNN classification."""

from __future__ import annotations

import colorsys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .field import euclidean_scalar_distance
from .morse.graph import euclidean_complex_distance
from .network import MeasureNetwork, normalize_pair
from .ot.solvers import KINDS, Coupling, SolverConfig, distance

__all__ = [
    "MASS_THRESHOLD",
    "COLORMAPS",
    "EUCLIDEAN_KINDS",
    "ColorAssignment",
    "DistanceMatrix",
    "DistanceMatrixError",
    "ElbowResult",
    "ClassificationReport",
    "position_colors",
    "color_transfer",
    "pair_distance",
    "distance_matrix",
    "max_matched_distance",
    "m_sweep",
    "elbow_select",
    "classical_mds",
    "stratified_split",
    "knn_predict",
    "select_k",
    "knn_classify",
]

MASS_THRESHOLD = 1e-12
COLORMAPS = ("hue-lightness", "corners")
EUCLIDEAN_KINDS = ("euclidean_scalar", "euclidean_complex")
FW_KINDS = ("gw", "fgw", "pgw", "pfgw")

# corner palette, (x, y) = (0,0) (1,0) (0,1) (1,1)
_CORNERS = np.array([[0.12, 0.47, 0.71], [0.84, 0.15, 0.16], [0.17, 0.63, 0.17], [1.0, 0.73, 0.05]])


# ---------------------------------------------------------------------------
# color transfer


@dataclass(frozen=True, eq=False)
class ColorAssignment:
    """Source node colors and the colors they induce on the target.

    ``match[j]`` is the source node target node ``j`` takes its color from,
    or -1 when ``hollow[j]`` (the node receives no mass).
    """

    source_colors: np.ndarray
    target_colors: np.ndarray
    match: np.ndarray
    hollow: np.ndarray
    colormap: str


def position_colors(F: np.ndarray, colormap: str = "hue-lightness") -> np.ndarray:
    """RGB colors in [0, 1] from 2D positions rescaled to their bounding box."""
    if colormap not in COLORMAPS:
        raise ValueError(f"unknown colormap {colormap!r}; expected one of {COLORMAPS}")
    F = np.asarray(F, dtype=np.float64)
    lo, hi = F.min(axis=0), F.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    uv = (F - lo) / span
    if colormap == "corners":
        u, v = uv[:, :1], uv[:, 1:]
        return (1 - u) * (1 - v) * _CORNERS[0] + u * (1 - v) * _CORNERS[1] + (1 - u) * v * _CORNERS[2] + u * v * _CORNERS[3]
    # hue runs along x, lightness along y
    return np.array([colorsys.hls_to_rgb(0.8 * u, 0.3 + 0.45 * v, 0.85) for u, v in uv])


def color_transfer(source: MeasureNetwork, target: MeasureNetwork, coupling: Coupling, colormap: str = "hue-lightness") -> ColorAssignment:
    """Give each target node the color of the source node sending it the most mass."""
    C = np.asarray(coupling.matrix)
    if C.shape != (source.n, target.n):
        raise ValueError(f"coupling shape {C.shape} does not match networks ({source.n}, {target.n})")
    src = position_colors(source.F, colormap)
    hollow = C.sum(axis=0) < MASS_THRESHOLD * coupling.mass
    match = np.argmax(C, axis=0)  # first maximum, i.e. smallest source index
    match[hollow] = -1
    tgt = np.where(hollow[:, None], 1.0, src[np.maximum(match, 0)])
    return ColorAssignment(src, tgt, match, hollow, colormap)


# ---------------------------------------------------------------------------
# distance matrices


class DistanceMatrixError(RuntimeError):
    def __init__(self, failures):
        self.failures = failures
        lines = [f"  ({i}, {j}): {msg}" for (i, j), msg in sorted(failures.items())]
        super().__init__(f"{len(failures)} pair(s) failed:\n" + "\n".join(lines))


@dataclass(eq=False)
class DistanceMatrix:
    """Symmetric matrix of pairwise distances.

    Entries that were not requested are NaN; entries whose computation
    failed are NaN and flagged in ``missing`` with the error in ``errors``.
    ``runtimes`` holds wall-clock seconds per computed pair ``(i, j), i < j``.
    """

    labels: list
    values: np.ndarray
    kind: str = ""
    missing: np.ndarray | None = None
    errors: dict = field(default_factory=dict)
    runtimes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        n = len(self.labels)
        if self.values.shape != (n, n):
            raise ValueError(f"matrix shape {self.values.shape} does not match {n} labels")
        if self.missing is None:
            self.missing = np.zeros((n, n), dtype=bool)

    @property
    def n(self) -> int:
        return len(self.labels)


def pair_distance(a, b, kind: str, cfg: SolverConfig = SolverConfig(), shape=None) -> float:
    """Distance between two instances; FW-based kinds average both directions."""
    if kind == "euclidean_scalar":
        return euclidean_scalar_distance(a, b)
    if kind == "euclidean_complex":
        if shape is None:
            raise ValueError("euclidean_complex needs the grid shape")
        return euclidean_complex_distance(a, b, *shape)
    if kind not in KINDS:
        raise ValueError(f"unknown distance kind {kind!r}")
    x, y = normalize_pair(a, b)
    d = distance(kind, x, y, cfg).distance
    if kind in FW_KINDS:
        y2, x2 = normalize_pair(b, a)
        d = 0.5 * (d + distance(kind, y2, x2, cfg).distance)
    return d


def _pair_job(args):
    i, j, a, b, kind, cfg, shape = args
    t0 = time.perf_counter()
    try:
        d, err = pair_distance(a, b, kind, cfg, shape), None
    except Exception as exc:  # reported per pair
        d, err = float("nan"), f"{type(exc).__name__}: {exc}"
    return i, j, d, err, time.perf_counter() - t0


def distance_matrix(
    instances,
    kind: str,
    cfg: SolverConfig = SolverConfig(),
    labels=None,
    pairs=None,
    shape=None,
    jobs: int = 1,
    allow_missing: bool = False,
) -> DistanceMatrix:
    """Pairwise distances between instances.

    ``instances`` are MeasureNetworks for the OT kinds, ScalarFields for
    ``euclidean_scalar`` and MorseGraphs for ``euclidean_complex`` (which
    also needs the grid ``shape``). ``pairs`` restricts the computation to
    the given index pairs. Every pair is solved with the same ``cfg`` so
    entries do not depend on order or on ``jobs``.
    """
    n = len(instances)
    if n < 2:
        raise ValueError("need at least two instances")
    if kind not in KINDS and kind not in EUCLIDEAN_KINDS:
        raise ValueError(f"unknown distance kind {kind!r}")
    if kind == "euclidean_complex" and shape is None:
        raise ValueError("euclidean_complex needs the grid shape")
    labels = list(range(n)) if labels is None else list(labels)
    if pairs is None:
        todo = [(i, j) for i in range(n) for j in range(i + 1, n)]
    else:
        todo = sorted({(min(i, j), max(i, j)) for i, j in pairs if i != j})
    tasks = [(i, j, instances[i], instances[j], kind, cfg, shape) for i, j in todo]

    D = np.full((n, n), np.nan)
    np.fill_diagonal(D, 0.0)
    missing = np.zeros((n, n), dtype=bool)
    errors, runtimes = {}, {}
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_pair_job, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))
    else:
        results = map(_pair_job, tasks)
    for i, j, d, err, rt in results:
        D[i, j] = D[j, i] = d
        runtimes[(i, j)] = rt
        if err is not None:
            missing[i, j] = missing[j, i] = True
            errors[(i, j)] = err
    if errors and not allow_missing:
        raise DistanceMatrixError(errors)
    return DistanceMatrix(labels, D, kind, missing, errors, runtimes)


# ---------------------------------------------------------------------------
# partial mass tuning


def max_matched_distance(g1: MeasureNetwork, g2: MeasureNetwork, coupling: Coupling) -> float:
    """Largest attribute distance between node pairs exchanging mass."""
    C = np.asarray(coupling.matrix)
    if C.shape != (g1.n, g2.n):
        raise ValueError(f"coupling shape {C.shape} does not match networks ({g1.n}, {g2.n})")
    I, J = np.nonzero(C > MASS_THRESHOLD)
    if I.size == 0:
        raise ValueError("coupling has empty support")
    return float(np.linalg.norm(g1.F[I] - g2.F[J], axis=1).max())


def m_sweep(g1: MeasureNetwork, g2: MeasureNetwork, ms, kind: str = "pfgw", cfg: SolverConfig = SolverConfig()):
    """Maximum matched distance of the partial coupling for each mass in ``ms``.

    Masses are solved from largest to smallest, each warm-started from the
    previous coupling scaled down to the new mass. That start is feasible
    and never worse, so the optimal objective is non-increasing as m
    decreases. Returns ``(curve, results)`` sorted by ascending m, with
    ``curve = [(m, mmd), ...]``.
    """
    if kind not in ("pw", "pgw", "pfgw"):
        raise ValueError("m sweep needs a partial kind")
    ms = sorted({float(m) for m in ms}, reverse=True)
    a, b = normalize_pair(g1, g2)
    curve, results = [], []
    prev = None
    for m in ms:
        init = None if prev is None else (m / prev.coupling.mass) * prev.coupling.matrix
        res = distance(kind, a, b, replace(cfg, m=m), init)
        curve.append((m, max_matched_distance(a, b, res.coupling)))
        results.append(res)
        prev = res
    return curve[::-1], results[::-1]


@dataclass(frozen=True)
class ElbowResult:
    m_star: float
    index: int
    second_difference: tuple
    clear: bool  # False when the curve has no positive curvature


def elbow_select(curve) -> ElbowResult:
    """Point of maximum discrete second derivative of an ascending curve.

    Ties go to the smallest m. Uniform spacing reduces this to the plain
    second difference.
    """
    pts = np.asarray(curve, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 4:
        raise ValueError("elbow selection needs at least 4 points")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(np.diff(x) <= 0):
        raise ValueError("curve must be sorted by strictly increasing m")
    slope = np.diff(y) / np.diff(x)
    d2 = np.diff(slope) / (0.5 * (x[2:] - x[:-2]))
    k = int(np.argmax(d2))
    scale = 1.0 + float(np.abs(slope).max())
    clear = bool(d2[k] > 1e-9 * scale / (x[-1] - x[0]))
    return ElbowResult(float(x[k + 1]), k + 1, tuple(float(v) for v in d2), clear)


# ---------------------------------------------------------------------------
# embedding


def classical_mds(d, dim: int = 2) -> np.ndarray:
    """Classical (Torgerson) scaling into ``dim`` dimensions.

    Eigenvectors are sign-normalized so that their largest-magnitude
    entry is positive, which makes the embedding deterministic.
    """
    D = np.asarray(d.values if isinstance(d, DistanceMatrix) else d, dtype=np.float64)
    n = D.shape[0]
    if not 1 <= dim < n:
        raise ValueError(f"dim must lie in [1, {n - 1}]")
    if not np.all(np.isfinite(D)):
        raise ValueError("distance matrix has missing entries")
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ (D * D) @ J
    B = 0.5 * (B + B.T)
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(-evals, kind="stable")[:dim]
    lam, V = evals[order], evecs[:, order]
    tol = 1e-9 * max(1.0, float(np.abs(evals).max()))
    if np.any(lam < -tol):
        warnings.warn("negative eigenvalues clamped to zero; the distances are not Euclidean", RuntimeWarning, stacklevel=2)
    lam = np.maximum(lam, 0.0)
    idx = np.argmax(np.abs(V), axis=0)
    V = V * np.where(V[idx, np.arange(dim)] < 0, -1.0, 1.0)
    return V * np.sqrt(lam)


# ---------------------------------------------------------------------------
# classification


@dataclass
class ClassificationReport:
    accuracy: float
    f1: dict  # class -> score, None when the class has no test instances
    confusion: list  # rows: true class, columns: predicted class
    classes: list
    k: int
    train: list
    test: list
    predictions: list


def stratified_split(labels, train_fraction: float = 0.8, seed: int = 0):
    """Per-class seeded shuffle; ``round(train_fraction * size)`` of each class trains."""
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    labels = list(labels)
    rng = np.random.Generator(np.random.PCG64(seed))
    train, test = [], []
    for c in sorted(set(labels)):
        idx = np.array([i for i, lab in enumerate(labels) if lab == c])
        rng.shuffle(idx)
        k = int(round(train_fraction * idx.size))
        train.extend(idx[:k].tolist())
        test.extend(idx[k:].tolist())
    return sorted(train), sorted(test)


def knn_predict(D: np.ndarray, labels, train, queries, k: int, classes=None):
    """Majority vote among the k nearest training instances.

    Neighbors are ranked by distance, then index. Vote ties go to the
    class with the smaller summed distance, then the smaller class index.
    """
    labels = list(labels)
    classes = sorted(set(labels)) if classes is None else classes
    pos = {c: i for i, c in enumerate(classes)}
    train = np.asarray(train)
    out = []
    for q in queries:
        cand = train[train != q]
        if k > cand.size:
            raise ValueError(f"k={k} exceeds the {cand.size} available training instances")
        dq = D[q, cand]
        if not np.all(np.isfinite(dq)):
            raise ValueError(f"missing distances for instance {q}")
        nearest = cand[np.lexsort((cand, dq))[:k]]
        votes, dist_sum = {}, {}
        for t in nearest:
            c = labels[t]
            votes[c] = votes.get(c, 0) + 1
            dist_sum[c] = dist_sum.get(c, 0.0) + D[q, t]
        out.append(min(votes, key=lambda c: (-votes[c], dist_sum[c], pos[c])))
    return out


def select_k(D, labels, train, ks=(1, 3, 5, 7)) -> int:
    """Leave-one-out accuracy on the training split; ties go to smaller k."""
    labels = list(labels)
    best_k, best_acc = None, -1.0
    for k in sorted(ks):
        if k > len(train) - 1:
            break
        pred = knn_predict(D, labels, train, train, k)
        acc = float(np.mean([p == labels[i] for p, i in zip(pred, train)]))
        if acc > best_acc:
            best_k, best_acc = k, acc
    if best_k is None:
        raise ValueError("training split too small for cross-validation")
    return best_k


def knn_classify(d, labels, k: int | None = 3, train_fraction: float = 0.8, seed: int = 0, split=None) -> ClassificationReport:
    """kNN on a precomputed distance matrix with a stratified seeded split.

    ``k=None`` picks k by leave-one-out cross-validation on the training set.
    Only test-by-train entries of ``d`` are read.
    """
    D = np.asarray(d.values if isinstance(d, DistanceMatrix) else d, dtype=np.float64)
    labels = list(labels)
    if D.shape != (len(labels), len(labels)):
        raise ValueError("distance matrix and labels disagree in size")
    train, test = split if split is not None else stratified_split(labels, train_fraction, seed)
    if k is None:
        k = select_k(D, labels, train)
    if k < 1:
        raise ValueError("k must be positive")
    if len(train) < k:
        raise ValueError(f"k={k} exceeds the training set size {len(train)}")
    classes = sorted(set(labels))
    pred = knn_predict(D, labels, train, test, k, classes)
    pos = {c: i for i, c in enumerate(classes)}
    conf = np.zeros((len(classes), len(classes)), dtype=int)
    for i, p in zip(test, pred):
        conf[pos[labels[i]], pos[p]] += 1
    f1 = {}
    for c, i in pos.items():
        support = conf[i].sum()
        if support == 0:
            f1[c] = None
            continue
        tp, predicted = conf[i, i], conf[:, i].sum()
        f1[c] = float(2 * tp / (support + predicted))
    acc = float(np.trace(conf) / max(len(test), 1))
    return ClassificationReport(acc, f1, conf.tolist(), classes, k, list(train), list(test), pred)
