"""Vietoris-Rips filtrations, persistence diagrams, and downsampling.

The filtration of a distance matrix contains every simplex up to dimension
max_dim + 1 whose diameter (max pairwise distance) is at most the threshold,
ordered by (value, dimension, lexicographic vertices). Diagrams come from
Z/2 persistence pairing: connected components via union-find, higher
dimensions via the coboundary reduction in `_reduction`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import _reduction as _red
from .embeddings import PointCloud
from .errors import BudgetExceededError, FiltrationError
from .metrics import DistanceMatrix, distance_matrix

DEFAULT_SIMPLEX_BUDGET = 5_000_000


# ---------------------------------------------------------------------------
# Downsampling
# ---------------------------------------------------------------------------

@dataclass
class SamplingPlan:
    """Farthest-point subsampling cap: keep at most `max_points` points."""

    max_points: int = 256
    seed: int = 0
    method: str = "farthest-point"

    def __post_init__(self):
        if self.max_points < 1:
            raise ValueError("max_points must be >= 1")
        if self.method != "farthest-point":
            raise ValueError(f"unknown sampling method {self.method!r}")


def downsample(cloud: PointCloud, plan: SamplingPlan) -> tuple[PointCloud, float]:
    """Greedy maxmin subsample of a cloud.

    Starts from a seed-chosen point, then repeatedly adds the point farthest
    from the chosen set (ties to the lowest index). Returns the subsampled
    cloud and its covering radius, which equals the Hausdorff distance
    between the original and the subsample.
    """
    m = len(cloud)
    if m == 0:
        raise ValueError("cannot downsample an empty cloud")
    if plan.max_points >= m:
        return cloud, 0.0
    rng = np.random.default_rng(plan.seed)
    start = int(rng.integers(m))
    chosen = [start]
    dist = np.linalg.norm(cloud.points - cloud.points[start], axis=1)
    while len(chosen) < plan.max_points:
        nxt = int(np.argmax(dist))
        chosen.append(nxt)
        dist = np.minimum(dist, np.linalg.norm(cloud.points - cloud.points[nxt], axis=1))
    radius = float(dist.max())
    tokens = tuple(cloud.tokens[i] for i in chosen) if cloud.tokens else ()
    sub = PointCloud(doc_id=cloud.doc_id, points=cloud.points[chosen],
                     tokens=tokens, n_skipped=cloud.n_skipped)
    return sub, radius


# ---------------------------------------------------------------------------
# Filtration
# ---------------------------------------------------------------------------

def enclosing_radius(dm: DistanceMatrix) -> float:
    """Smallest r such that some point is within r of every other.

    Beyond this radius the Rips complex is a cone, so homology in dimensions
    >= 1 gains nothing from larger thresholds.
    """
    if dm.size == 1:
        return 0.0
    return float(np.min(np.max(dm.values, axis=1)))


class Filtration:
    """Rips filtration: per-dimension simplex arrays in filtration order.

    Vertices are implicit (indices 0..n-1 at value 0). For each dimension
    p >= 1, `simplex_arrays[p]` is an (m_p, p+1) int32 array of ascending
    vertex tuples and `value_arrays[p]` the matching diameters, both sorted
    by (value, lexicographic vertices). The global filtration order is
    (value, dimension, lexicographic vertices).
    """

    def __init__(self, n_vertices: int, simplex_arrays: dict[int, np.ndarray],
                 value_arrays: dict[int, np.ndarray], max_dim: int, threshold: float):
        self.n_vertices = int(n_vertices)
        self.simplex_arrays = simplex_arrays
        self.value_arrays = value_arrays
        self.max_dim = int(max_dim)
        self.threshold = float(threshold)

    @property
    def simplex_count(self) -> int:
        return self.n_vertices + sum(len(v) for v in self.value_arrays.values())

    @property
    def simplices(self) -> list[tuple[tuple[int, ...], float, int]]:
        """All simplices as (vertices, value, dim) in global filtration order.

        Materializes the whole list; intended for small filtrations (tests
        and oracles), not for the 10^6-simplex production path.
        """
        out = [((i,), 0.0, 0) for i in range(self.n_vertices)]
        for p, arr in self.simplex_arrays.items():
            vals = self.value_arrays[p]
            for row, val in zip(arr, vals):
                out.append((tuple(int(v) for v in row), float(val), p))
        out.sort(key=lambda s: (s[1], s[2], s[0]))
        return out


def build_rips(dm: DistanceMatrix, max_dim: int = 1,
               threshold: float | str = "enclosing",
               budget: int = DEFAULT_SIMPLEX_BUDGET) -> Filtration:
    """Enumerate the Rips filtration of a distance matrix.

    threshold is a positive number or "enclosing" (the enclosing radius).
    Raises BudgetExceededError if the total simplex count would exceed
    `budget`; the caller should downsample the cloud instead.
    """
    if max_dim not in (0, 1, 2):
        raise ValueError("max_dim must be 0, 1 or 2")
    if threshold == "enclosing":
        thr = enclosing_radius(dm)
    else:
        thr = float(threshold)
        if thr <= 0:
            raise ValueError("threshold must be positive")
    n = dm.size
    values = dm.values

    total = n
    iu, jv = np.triu_indices(n, k=1)
    evals = values[iu, jv]
    keep = evals <= thr
    eu, ev, evals = iu[keep], jv[keep], evals[keep]
    total += len(evals)
    _check_budget(total, budget, n)

    simplex_arrays: dict[int, np.ndarray] = {}
    value_arrays: dict[int, np.ndarray] = {}

    order = np.lexsort((ev, eu, evals))
    simplex_arrays[1] = np.stack([eu[order], ev[order]], axis=1).astype(np.int32)
    value_arrays[1] = evals[order]

    if max_dim >= 1:
        cap = budget - total
        t_cnt = int(_red.count_triangles(values, thr, cap))
        total += t_cnt
        _check_budget(total, budget, n)
        tri = np.empty((t_cnt, 3), dtype=np.int32)
        tvals = np.empty(t_cnt, dtype=np.float64)
        _red.fill_triangles(values, thr, tri, tvals)
        torder = np.lexsort((tri[:, 2], tri[:, 1], tri[:, 0], tvals))
        simplex_arrays[2] = tri[torder]
        value_arrays[2] = tvals[torder]

    if max_dim >= 2:
        cap = budget - total
        q_cnt = int(_red.count_tetrahedra(values, thr, cap))
        total += q_cnt
        _check_budget(total, budget, n)
        tet = np.empty((q_cnt, 4), dtype=np.int32)
        qvals = np.empty(q_cnt, dtype=np.float64)
        _red.fill_tetrahedra(values, thr, tet, qvals)
        qorder = np.lexsort((tet[:, 3], tet[:, 2], tet[:, 1], tet[:, 0], qvals))
        simplex_arrays[3] = tet[qorder]
        value_arrays[3] = qvals[qorder]

    return Filtration(n, simplex_arrays, value_arrays, max_dim, thr)


def _check_budget(total: int, budget: int, n: int) -> None:
    if total > budget:
        raise BudgetExceededError(
            f"Rips complex on {n} points needs more than {budget} simplices; "
            f"downsample the cloud (SamplingPlan) or lower the threshold"
        )


# ---------------------------------------------------------------------------
# Persistence diagrams
# ---------------------------------------------------------------------------

@dataclass
class PersistenceDiagram:
    """Multiset of (hom_dim, birth, death) points; death may be +inf."""

    dims: np.ndarray
    births: np.ndarray
    deaths: np.ndarray

    def __post_init__(self):
        self.dims = np.asarray(self.dims, dtype=np.int32)
        self.births = np.asarray(self.births, dtype=np.float64)
        self.deaths = np.asarray(self.deaths, dtype=np.float64)
        if not (len(self.dims) == len(self.births) == len(self.deaths)):
            raise ValueError("dims, births, deaths must have equal length")
        if np.any(self.births < 0) or not np.all(np.isfinite(self.births)):
            raise ValueError("births must be finite and nonnegative")
        if np.any(self.deaths < self.births):
            raise ValueError("death must be >= birth")
        order = np.lexsort((self.deaths, self.births, self.dims))
        self.dims = self.dims[order]
        self.births = self.births[order]
        self.deaths = self.deaths[order]

    @classmethod
    def from_points(cls, points) -> "PersistenceDiagram":
        pts = list(points)
        if not pts:
            return cls(np.zeros(0, dtype=np.int32), np.zeros(0), np.zeros(0))
        d, b, dd = zip(*pts)
        return cls(np.array(d), np.array(b), np.array(dd))

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def points(self) -> list[tuple[int, float, float]]:
        return [(int(d), float(b), float(x))
                for d, b, x in zip(self.dims, self.births, self.deaths)]

    def in_dim(self, q: int) -> "PersistenceDiagram":
        sel = self.dims == q
        return PersistenceDiagram(self.dims[sel], self.births[sel], self.deaths[sel])

    def finite(self, q: int) -> np.ndarray:
        """Finite (birth, death) pairs of dimension q as an (m, 2) array."""
        sel = (self.dims == q) & np.isfinite(self.deaths)
        return np.stack([self.births[sel], self.deaths[sel]], axis=1)

    def n_infinite(self, q: int) -> int:
        return int(np.sum((self.dims == q) & ~np.isfinite(self.deaths)))


def _facet_ranks(simplices: np.ndarray, facet_keys_sorted: np.ndarray,
                 facet_rank_of_sorted: np.ndarray, n: int) -> np.ndarray:
    """Filtration rank of every facet of every (p+1)-simplex."""
    m, w = simplices.shape
    cols = []
    for drop in range(w):
        idx = [c for c in range(w) if c != drop]
        key = np.zeros(m, dtype=np.int64)
        for c in idx:
            key = key * n + simplices[:, c]
        cols.append(key)
    ranks = np.empty((m, w), dtype=np.int64)
    for c, key in enumerate(cols):
        pos = np.searchsorted(facet_keys_sorted, key)
        bad = (pos >= len(facet_keys_sorted)) | (facet_keys_sorted[np.minimum(pos, len(facet_keys_sorted) - 1)] != key)
        if np.any(bad):
            raise FiltrationError("filtration is missing a face of a stored simplex")
        ranks[:, c] = facet_rank_of_sorted[pos]
    return ranks


def _simplex_keys(simplices: np.ndarray, n: int) -> np.ndarray:
    key = np.zeros(len(simplices), dtype=np.int64)
    for c in range(simplices.shape[1]):
        key = key * n + simplices[:, c]
    return key


def compute_persistence(filtration: Filtration) -> PersistenceDiagram:
    """Persistence diagram of a filtration by Z/2 pairing.

    H0 comes from union-find over edges in filtration order (one finite
    point per merge, one infinite point per remaining component); higher
    dimensions from the coboundary reduction. Zero-persistence pairs are
    dropped.
    """
    n = filtration.n_vertices
    out_dims: list[int] = []
    out_births: list[float] = []
    out_deaths: list[float] = []

    edges = filtration.simplex_arrays.get(1)
    evals = filtration.value_arrays.get(1)
    if edges is None or len(edges) == 0:
        merges = np.zeros(0, dtype=bool)
        edges = np.zeros((0, 2), dtype=np.int32)
        evals = np.zeros(0)
    else:
        merges = _red.union_find_merges(edges[:, 0].astype(np.int64),
                                        edges[:, 1].astype(np.int64), n)
    for v in evals[merges]:
        if v > 0.0:
            out_dims.append(0)
            out_births.append(0.0)
            out_deaths.append(float(v))
    for _ in range(n - int(merges.sum())):
        out_dims.append(0)
        out_births.append(0.0)
        out_deaths.append(math.inf)

    skip = merges.copy()
    for p in range(1, filtration.max_dim + 1):
        p_simp = filtration.simplex_arrays.get(p)
        p_vals = filtration.value_arrays.get(p)
        cof = filtration.simplex_arrays.get(p + 1)
        cof_vals = filtration.value_arrays.get(p + 1)
        if cof is None:
            cof = np.zeros((0, p + 2), dtype=np.int32)
            cof_vals = np.zeros(0)
        if p_simp is None or len(p_simp) == 0:
            if len(cof):
                raise FiltrationError(
                    f"filtration stores {p + 1}-simplices but no {p}-simplices"
                )
            break

        keys = _simplex_keys(p_simp, n)
        key_order = np.argsort(keys)
        if len(cof):
            ranks = _facet_ranks(cof, keys[key_order], key_order, n)
            col_ids = ranks.ravel()
            row_ids = np.repeat(np.arange(len(cof), dtype=np.int64), p + 2)
            csr_order = np.argsort(col_ids, kind="stable")
            col_sorted = col_ids[csr_order]
            rows_sorted = row_ids[csr_order]
            col_ptr = np.zeros(len(p_simp) + 1, dtype=np.int64)
            np.cumsum(np.bincount(col_sorted, minlength=len(p_simp)), out=col_ptr[1:])
        else:
            rows_sorted = np.zeros(0, dtype=np.int64)
            col_ptr = np.zeros(len(p_simp) + 1, dtype=np.int64)

        piv_rows, piv_cols, zero_cols, _ = _red.reduce_coboundary(
            col_ptr, rows_sorted, skip, len(p_simp), len(cof)
        )
        for r, c in zip(piv_rows, piv_cols):
            birth = float(p_vals[c])
            death = float(cof_vals[r])
            if death > birth:
                out_dims.append(p)
                out_births.append(birth)
                out_deaths.append(death)
        for c in zero_cols:
            out_dims.append(p)
            out_births.append(float(p_vals[c]))
            out_deaths.append(math.inf)

        # cofacets claimed as killers here are cleared one dimension up
        skip = np.zeros(len(cof), dtype=bool)
        skip[piv_rows] = True

    return PersistenceDiagram(np.array(out_dims, dtype=np.int32),
                              np.array(out_births), np.array(out_deaths))


def diagram_for_document(cloud: PointCloud, plan: SamplingPlan | None = None,
                         max_dim: int = 1, metric: str = "euclidean",
                         threshold: float | str = "enclosing",
                         budget: int = DEFAULT_SIMPLEX_BUDGET) -> PersistenceDiagram:
    """downsample -> distance matrix -> Rips filtration -> diagram."""
    if plan is not None:
        cloud, _ = downsample(cloud, plan)
    dm = distance_matrix(cloud, metric=metric)
    filtration = build_rips(dm, max_dim=max_dim, threshold=threshold, budget=budget)
    return compute_persistence(filtration)


class RipsPersistence(BaseEstimator, TransformerMixin):
    """Transform a list of point clouds into persistence diagrams.

    Stateless; `fit` exists so the stage drops into sklearn pipelines.
    """

    def __init__(self, max_points: int = 256, seed: int = 0, max_dim: int = 1,
                 metric: str = "euclidean", threshold: float | str = "enclosing",
                 budget: int = DEFAULT_SIMPLEX_BUDGET):
        self.max_points = max_points
        self.seed = seed
        self.max_dim = max_dim
        self.metric = metric
        self.threshold = threshold
        self.budget = budget

    def fit(self, clouds, y=None):
        return self

    def transform(self, clouds) -> list[PersistenceDiagram]:
        plan = SamplingPlan(max_points=self.max_points, seed=self.seed)
        return [diagram_for_document(c, plan=plan, max_dim=self.max_dim,
                                     metric=self.metric, threshold=self.threshold,
                                     budget=self.budget)
                for c in clouds]


# ---------------------------------------------------------------------------
# Diagram CSV (doc_id, hom_dim, birth, death; "inf" for infinite deaths)
# ---------------------------------------------------------------------------

def format_value(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.9g}"


def write_diagram_csv(path, doc_id: str, diagram: PersistenceDiagram) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("doc_id,hom_dim,birth,death\n")
        for d, b, x in zip(diagram.dims, diagram.births, diagram.deaths):
            fh.write(f"{doc_id},{int(d)},{format_value(b)},{format_value(x)}\n")


def read_diagram_csv(path) -> tuple[str, PersistenceDiagram]:
    dims, births, deaths = [], [], []
    doc_id = ""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != "doc_id,hom_dim,birth,death":
            raise ValueError(f"{path}: not a diagram CSV")
        for line in fh:
            if not line.strip():
                continue
            doc_id, d, b, x = line.rstrip("\n").split(",")
            dims.append(int(d))
            births.append(float(b))
            deaths.append(float(x))
    return doc_id, PersistenceDiagram(np.array(dims, dtype=np.int32),
                                      np.array(births), np.array(deaths))
