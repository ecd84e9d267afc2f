"""Fixed-length stable signature vectors from persistence diagrams.

For the finite points of one homology dimension, every unordered pair
{p, q} contributes

    m(p, q) = min( ||p - q||_inf , max(half_persistence(p), half_persistence(q)) )

with half_persistence((b, d)) = (d - b) / 2. Sorting all m values in
nonincreasing order and truncating or zero-padding to a fixed length gives a
vector whose L2 distance between two diagrams is bounded by
sqrt(2 N (N-1)) times their bottleneck distance (N = larger point count),
so equal-geometry documents get identical vectors and nearby geometries get
nearby vectors. Truncation keeps a prefix of the sorted values, hence
preserves that stability.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .persistence import PersistenceDiagram


@dataclass
class Signature:
    """Sorted, zero-padded pairwise summary of one homology dimension."""

    values: np.ndarray
    source_dim: int
    n_effective: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)


def pair_scores(points: np.ndarray) -> np.ndarray:
    """All m(p, q) values for an (n, 2) array of finite diagram points."""
    n = len(points)
    if n < 2:
        return np.zeros(0)
    linf = np.maximum(
        np.abs(points[:, 0, None] - points[None, :, 0]),
        np.abs(points[:, 1, None] - points[None, :, 1]),
    )
    half = (points[:, 1] - points[:, 0]) / 2.0
    cap = np.maximum(half[:, None], half[None, :])
    m = np.minimum(linf, cap)
    iu = np.triu_indices(n, k=1)
    return m[iu]


def vectorize(diagram: PersistenceDiagram, hom_dim: int, length: int) -> Signature:
    """Signature of one homology dimension, truncated/padded to `length`.

    Infinite-death points are excluded: every connected document carries
    exactly one infinite H0 point, so it holds no discriminative value and
    would make the pair score undefined.
    """
    if length < 1:
        raise ValueError("signature length must be >= 1")
    pts = diagram.finite(hom_dim)
    scores = pair_scores(pts)
    scores = np.sort(scores)[::-1]
    out = np.zeros(length)
    k = min(length, len(scores))
    out[:k] = scores[:k]
    return Signature(values=out, source_dim=hom_dim, n_effective=len(pts))


def ph_embedding(diagram: PersistenceDiagram, length_h0: int = 512,
                 length_h1: int = 512) -> np.ndarray:
    """Concatenated H0 and H1 signatures: the document's topology features."""
    s0 = vectorize(diagram, 0, length_h0)
    s1 = vectorize(diagram, 1, length_h1)
    return np.concatenate([s0.values, s1.values])


class SignatureVectorizer(BaseEstimator, TransformerMixin):
    """Transform a list of persistence diagrams into a feature matrix."""

    def __init__(self, length_h0: int = 512, length_h1: int = 512):
        self.length_h0 = length_h0
        self.length_h1 = length_h1

    def fit(self, diagrams, y=None):
        return self

    def transform(self, diagrams):
        return np.array([ph_embedding(d, self.length_h0, self.length_h1)
                         for d in diagrams])


def write_signature_csv(path, doc_ids, matrix: np.ndarray) -> None:
    """One row per document: doc_id followed by the signature values."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if len(doc_ids) != len(matrix):
        raise ValueError("doc_ids and matrix row count differ")
    with open(path, "w", encoding="utf-8") as fh:
        for doc_id, row in zip(doc_ids, matrix):
            fh.write(doc_id + "," + ",".join(f"{v:.9g}" for v in row) + "\n")
