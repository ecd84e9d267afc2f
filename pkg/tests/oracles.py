"""Independent reference implementations used only to check the library.

Everything here is deliberately naive: a textbook boundary-matrix reduction
over the global filtration order, Kruskal's MST, factorial bottleneck
matching, a direct pair-score evaluation, and central finite differences.
None of it shares code with the production paths it checks.
"""
from __future__ import annotations

import math

import numpy as np


def naive_diagram(filtration) -> list[tuple[int, float, float]]:
    """Textbook Z/2 column reduction of the full boundary matrix."""
    simplices = filtration.simplices  # (verts, value, dim), global order
    index_of = {verts: i for i, (verts, _, _) in enumerate(simplices)}
    cols: list[set[int]] = []
    for verts, _value, dim in simplices:
        if dim == 0:
            cols.append(set())
            continue
        faces = set()
        for drop in range(len(verts)):
            face = verts[:drop] + verts[drop + 1:]
            if face not in index_of:
                raise ValueError(f"missing face {face}")
            faces.add(index_of[face])
        cols.append(faces)

    low_owner: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    for j, col in enumerate(cols):
        while col:
            low = max(col)
            owner = low_owner.get(low)
            if owner is None:
                low_owner[low] = j
                pairs.append((low, j))
                break
            col ^= cols[owner]

    paired = {i for pair in pairs for i in pair}
    points = []
    for i, j in pairs:
        birth, dim = simplices[i][1], simplices[i][2]
        death = simplices[j][1]
        if death > birth:
            points.append((dim, birth, death))
    for idx, (_verts, value, dim) in enumerate(simplices):
        if idx not in paired and dim <= filtration.max_dim:
            points.append((dim, value, math.inf))
    return sorted(points)


def kruskal_mst_weights(dm: np.ndarray) -> list[float]:
    """Sorted MST edge weights of the complete graph on a distance matrix."""
    n = len(dm)
    edges = sorted((float(dm[i][j]), i, j)
                   for i in range(n) for j in range(i + 1, n))
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    weights = []
    for w, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            weights.append(w)
    return sorted(weights)


def brute_bottleneck(p: np.ndarray, q: np.ndarray) -> float:
    """Minimum over all matchings (diagonal allowed) of the max Linf cost."""
    p = np.asarray(p, dtype=float).reshape(-1, 2)
    q = np.asarray(q, dtype=float).reshape(-1, 2)
    best = math.inf

    def rec(i: int, used: frozenset, cur: float) -> None:
        nonlocal best
        if cur > best:
            return
        if i == len(p):
            cost = cur
            for j in range(len(q)):
                if j not in used:
                    cost = max(cost, (q[j][1] - q[j][0]) / 2.0)
            best = min(best, cost)
            return
        rec(i + 1, used, max(cur, (p[i][1] - p[i][0]) / 2.0))
        for j in range(len(q)):
            if j not in used:
                c = max(abs(p[i][0] - q[j][0]), abs(p[i][1] - q[j][1]))
                rec(i + 1, used | {j}, max(cur, c))

    rec(0, frozenset(), 0.0)
    return best


def brute_pair_scores(points) -> list[float]:
    """Direct evaluation of the signature pair scores, descending."""
    pts = [tuple(map(float, p)) for p in points]
    out = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            (b1, d1), (b2, d2) = pts[i], pts[j]
            linf = max(abs(b1 - b2), abs(d1 - d2))
            cap = max((d1 - b1) / 2.0, (d2 - b2) / 2.0)
            out.append(min(linf, cap))
    return sorted(out, reverse=True)


def central_difference_grad(fun, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    g = np.zeros_like(x)
    for i in range(len(x)):
        hi = x.copy()
        lo = x.copy()
        hi[i] += eps
        lo[i] -= eps
        g[i] = (fun(hi) - fun(lo)) / (2.0 * eps)
    return g
