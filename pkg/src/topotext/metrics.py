"""Distances on points, point clouds, and persistence diagrams.

`gh_upper_bound` searches a family of rigid motions (rotations x translations
x optional reflection) for the one minimizing the Hausdorff distance; the
minimum over any such family is an upper bound on the Gromov-Hausdorff
distance, which is what the rest of the package needs for testing isometry
invariance. `bottleneck` is an exact small-scale matcher used as the test
oracle for signature stability; neither is a pipeline stage.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.distance import cdist, pdist, squareform

from ._validation import as_point_array, as_vector, check_same_dim
from .errors import UnsupportedDimensionError

if TYPE_CHECKING:  # pragma: no cover
    from .persistence import PersistenceDiagram

POINT_METRICS = ("euclidean", "angular")


def euclidean(x, y) -> float:
    """L2 distance between two equal-dimension vectors."""
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    check_same_dim(xv, yv, "x and y")
    return float(np.linalg.norm(xv - yv))


def angular(x, y) -> float:
    """Angle between two nonzero vectors, arccos of clamped cosine, in [0, pi]."""
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    check_same_dim(xv, yv, "x and y")
    nx = np.linalg.norm(xv)
    ny = np.linalg.norm(yv)
    if nx == 0.0 or ny == 0.0:
        raise ValueError("angular distance is undefined for zero vectors")
    cos = float(np.dot(xv, yv) / (nx * ny))
    return float(math.acos(min(1.0, max(-1.0, cos))))


@dataclass
class DistanceMatrix:
    """Symmetric nonnegative pairwise-distance matrix with zero diagonal."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("distance matrix must be square")
        if not np.all(np.isfinite(v)):
            raise ValueError("distance matrix contains non-finite entries")
        if np.any(v < 0):
            raise ValueError("distance matrix contains negative entries")
        if not np.array_equal(v, v.T):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diag(v) != 0):
            raise ValueError("distance matrix diagonal must be zero")
        self.values = v

    @property
    def size(self) -> int:
        return self.values.shape[0]


def distance_matrix(cloud, metric: str = "euclidean") -> DistanceMatrix:
    """Pairwise distances of a point cloud under `euclidean` or `angular`."""
    points = as_point_array(getattr(cloud, "points", cloud))
    if len(points) == 0:
        raise ValueError("cannot build a distance matrix for an empty cloud")
    if metric == "euclidean":
        d = squareform(pdist(points)) if len(points) > 1 else np.zeros((1, 1))
    elif metric == "angular":
        norms = np.linalg.norm(points, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("angular metric is undefined for zero vectors")
        unit = points / norms[:, None]
        cos = np.clip(unit @ unit.T, -1.0, 1.0)
        ang = np.arccos(cos)
        # mirror the strict upper triangle for exact symmetry, zero diagonal
        d = np.triu(ang, k=1)
        d = d + d.T
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return DistanceMatrix(d)


def _cloud_points(c) -> np.ndarray:
    return as_point_array(getattr(c, "points", c))


def hausdorff(a, b) -> float:
    """max(sup_a d(a, B), sup_b d(b, A)) under Euclidean point distance."""
    pa = _cloud_points(a)
    pb = _cloud_points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("hausdorff distance requires nonempty clouds")
    check_same_dim(pa, pb, "the two clouds")
    d = cdist(pa, pb)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


# ---------------------------------------------------------------------------
# Gromov-Hausdorff upper bound (desk scale)
# ---------------------------------------------------------------------------

def _rotation_from_angles(angles: np.ndarray, dim: int) -> np.ndarray:
    if dim == 1:
        return np.eye(1)
    if dim == 2:
        c, s = math.cos(angles[0]), math.sin(angles[0])
        return np.array([[c, -s], [s, c]])
    a, b, g = angles
    ca, sa = math.cos(a), math.sin(a)
    cb, sb = math.cos(b), math.sin(b)
    cg, sg = math.cos(g), math.sin(g)
    rz1 = np.array([[ca, -sa, 0], [sa, ca, 0], [0, 0, 1]])
    ry = np.array([[cb, 0, sb], [0, 1, 0], [-sb, 0, cb]])
    rz2 = np.array([[cg, -sg, 0], [sg, cg, 0], [0, 0, 1]])
    return rz1 @ ry @ rz2


def _angles_from_rotation(r: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of `_rotation_from_angles` for det-+1 matrices (ZYZ for 3-D)."""
    if dim == 1:
        return np.zeros(0)
    if dim == 2:
        return np.array([math.atan2(r[1, 0], r[0, 0])])
    b = math.acos(min(1.0, max(-1.0, r[2, 2])))
    if abs(math.sin(b)) < 1e-12:
        # gimbal lock: only a+g is determined
        a = math.atan2(r[1, 0], r[0, 0])
        return np.array([a, b, 0.0])
    a = math.atan2(r[1, 2], r[0, 2])
    g = math.atan2(r[2, 1], -r[2, 0])
    return np.array([a, b, g])


def _n_angles(dim: int) -> int:
    return {1: 0, 2: 1, 3: 3}[dim]


def gh_upper_bound(a, b, budget: int = 200, allow_reflection: bool = True,
                   seed: int = 0) -> float:
    """Upper bound on the Gromov-Hausdorff distance of two small clouds.

    Minimizes hausdorff(A, f(B)) over sampled isometries f: a deterministic
    multi-start search (identity, centroid alignment, principal-axis
    alignments, an angle grid, seeded random rotations) refined with
    Nelder-Mead. Larger budgets enlarge nested grids and allow more
    refinement steps, so the result is nonincreasing in `budget`.

    Supports ambient dimension <= 3 and at most 64 points per cloud.
    """
    pa = _cloud_points(a)
    pb = _cloud_points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("gh_upper_bound requires nonempty clouds")
    check_same_dim(pa, pb, "the two clouds")
    dim = pa.shape[1]
    if dim > 3:
        raise UnsupportedDimensionError(
            f"gh_upper_bound supports dimension <= 3, got {dim}"
        )
    if len(pa) > 64 or len(pb) > 64:
        raise ValueError("gh_upper_bound supports at most 64 points per cloud")
    if budget < 1:
        raise ValueError("budget must be >= 1")

    ca = pa.mean(axis=0)
    cb = pb.mean(axis=0)
    bc = pb - cb
    na = _n_angles(dim)
    flips = (False, True) if allow_reflection else (False,)
    flip_mat = np.diag([1.0] * (dim - 1) + [-1.0])

    def apply(angles: np.ndarray, t: np.ndarray, flip: bool) -> float:
        m = _rotation_from_angles(angles, dim)
        if flip:
            m = m @ flip_mat
        moved = bc @ m.T + ca + t
        d = cdist(pa, moved)
        return float(max(d.min(axis=1).max(), d.min(axis=0).max()))

    best = hausdorff(pa, pb)  # raw identity is in the search set

    # start list: (angles, translation offset, flip)
    starts: list[tuple[np.ndarray, np.ndarray, bool]] = []
    zero_t = np.zeros(dim)
    for flip in flips:
        starts.append((np.zeros(na), zero_t, flip))

    # principal-axis alignments (exact for clouds that are rigid motions of
    # each other, up to eigenvalue ties)
    if len(pa) >= 2 and len(pb) >= 2:
        _, va = np.linalg.eigh(np.cov((pa - ca).T).reshape(dim, dim))
        _, vb = np.linalg.eigh(np.cov(bc.T).reshape(dim, dim))
        for signs in itertools.product((1.0, -1.0), repeat=dim):
            r = va @ np.diag(signs) @ vb.T
            det = np.linalg.det(r)
            if det > 0:
                starts.append((_angles_from_rotation(r, dim), zero_t, False))
            elif allow_reflection:
                starts.append((_angles_from_rotation(r @ flip_mat, dim), zero_t, True))

    # nested angle grid (powers of two so larger budgets contain smaller)
    if na > 0:
        g = 4
        while g * 2 <= max(4, budget // 8) and g < 64:
            g *= 2
        axis = np.arange(g) * (2.0 * math.pi / g)
        per_axis = axis if na == 1 else np.arange(max(2, g // 8)) * (2.0 * math.pi / max(2, g // 8))
        grid_iter = ([np.array([t]) for t in axis] if na == 1
                     else [np.array(t) for t in itertools.product(per_axis, repeat=3)])
        for ang in grid_iter:
            for flip in flips:
                starts.append((ang, zero_t, flip))

    rng = np.random.default_rng(seed)
    for _ in range(budget // 50):
        ang = rng.uniform(0.0, 2.0 * math.pi, size=na)
        starts.append((ang, zero_t, rng.random() < 0.5 if allow_reflection else False))

    evaluated = []
    for ang, t, flip in starts:
        evaluated.append((apply(ang, t, flip), ang, t, flip))
        best = min(best, evaluated[-1][0])

    evaluated.sort(key=lambda e: e[0])
    n_refine = min(len(evaluated), 1 + budget // 64)
    scale = max(1.0, float(np.abs(pa - ca).max()))
    for val, ang, t, flip in evaluated[:n_refine]:
        x0 = np.concatenate([ang, t])

        def objective(x, flip=flip):
            return apply(x[:na], x[na:], flip)

        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": budget, "xatol": 1e-10 * scale,
                                "fatol": 1e-12, "disp": False})
        best = min(best, float(res.fun))
    return best


# ---------------------------------------------------------------------------
# Bottleneck distance (exact, small diagrams)
# ---------------------------------------------------------------------------

def _match_feasible(pq_cost: np.ndarray, p_diag: np.ndarray, q_diag: np.ndarray,
                    c: float) -> bool:
    """Perfect matching existence for bottleneck cost c.

    Left nodes: points of P plus one diagonal slot per point of Q.
    Right nodes: points of Q plus one diagonal slot per point of P.
    P_i-Q_j allowed iff their Linf cost <= c; a point may retire to its own
    diagonal slot iff its half-persistence <= c; slots match slots freely.
    """
    np_, nq = len(p_diag), len(q_diag)
    size = np_ + nq

    def neighbors(left: int):
        if left < np_:
            for j in range(nq):
                if pq_cost[left, j] <= c:
                    yield j
            if p_diag[left] <= c:
                yield nq + left
        else:
            j = left - np_
            if q_diag[j] <= c:
                yield j
            for i in range(np_):
                yield nq + i

    match_right = [-1] * size

    def augment(left: int, seen: list[bool]) -> bool:
        for right in neighbors(left):
            if seen[right]:
                continue
            seen[right] = True
            if match_right[right] == -1 or augment(match_right[right], seen):
                match_right[right] = left
                return True
        return False

    for left in range(size):
        if not augment(left, [False] * size):
            return False
    return True


def _bottleneck_finite(p: np.ndarray, q: np.ndarray) -> float:
    """Exact bottleneck between two finite (birth, death) arrays."""
    if len(p) == 0 and len(q) == 0:
        return 0.0
    p_diag = (p[:, 1] - p[:, 0]) / 2.0 if len(p) else np.zeros(0)
    q_diag = (q[:, 1] - q[:, 0]) / 2.0 if len(q) else np.zeros(0)
    if len(p) and len(q):
        pq = np.maximum(
            np.abs(p[:, 0, None] - q[None, :, 0]),
            np.abs(p[:, 1, None] - q[None, :, 1]),
        )
    else:
        pq = np.zeros((len(p), len(q)))
    candidates = np.unique(np.concatenate([[0.0], p_diag, q_diag, pq.ravel()]))
    lo, hi = 0, len(candidates) - 1
    # smallest candidate cost admitting a perfect matching
    while lo < hi:
        mid = (lo + hi) // 2
        if _match_feasible(pq, p_diag, q_diag, float(candidates[mid])):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def bottleneck(d1: "PersistenceDiagram", d2: "PersistenceDiagram") -> float:
    """Exact bottleneck distance, max over homology dimensions.

    Diagrams with infinite points must have them in matching multiplicity
    per dimension (otherwise no finite matching exists and a ValueError is
    raised); infinite points match among themselves by sorted birth.
    """
    dims = sorted(set(np.unique(d1.dims).tolist()) | set(np.unique(d2.dims).tolist()))
    worst = 0.0
    for q in dims:
        f1, i1 = _split_finite(d1, q)
        f2, i2 = _split_finite(d2, q)
        if len(i1) != len(i2):
            raise ValueError(
                f"diagrams are incomparable in dimension {q}: "
                f"{len(i1)} vs {len(i2)} infinite points"
            )
        if len(f1) > 32 or len(f2) > 32:
            raise ValueError("bottleneck supports at most 32 finite points per dimension")
        inf_cost = float(np.abs(np.sort(i1) - np.sort(i2)).max()) if len(i1) else 0.0
        worst = max(worst, inf_cost, _bottleneck_finite(f1, f2))
    return worst


def _split_finite(d: "PersistenceDiagram", q: int) -> tuple[np.ndarray, np.ndarray]:
    sel = d.dims == q
    births = d.births[sel]
    deaths = d.deaths[sel]
    finite = np.isfinite(deaths)
    return np.stack([births[finite], deaths[finite]], axis=1), births[~finite]
