"""Baseline document representations and feature-matrix assembly.

Aw2v averages word vectors over token occurrences (the multiset, so repeats
count — unlike point clouds, which keep only the support); tf-idf uses raw
counts, smooth idf and per-document L2 normalization. Blocks of per-document
vectors are concatenated into a FeatureMatrix, z-scored per column by default
so that blocks on wildly different scales can share a learner.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin

from .embeddings import Document, EmbeddingTable, PointCloud, dedup_points, tokenize
from .errors import EmptyCloudError

_SENTENCE_SPLIT = re.compile(r"[.!?]+(?:\s+|$)")


def aw2v(doc: Document, table: EmbeddingTable) -> np.ndarray:
    """Mean of the word vectors of in-vocabulary token occurrences.

    All-OOV (or empty) documents get the zero vector.
    """
    total = np.zeros(table.dim)
    hits = 0
    for tok in doc.tokens:
        vec = table.get(tok)
        if vec is not None:
            total += vec
            hits += 1
    return total / hits if hits else total


def split_sentences(text: str) -> list[str]:
    parts = _SENTENCE_SPLIT.split(text)
    return [p.strip() for p in parts if p.strip()]


def sentence_aw2v_cloud(doc: Document, table: EmbeddingTable,
                        lowercase: bool = True) -> PointCloud:
    """One point per sentence: the Aw2v of that sentence's tokens.

    Sentences with no in-vocabulary tokens are dropped (their mean is
    undefined); duplicates are removed like any point cloud. Raises
    EmptyCloudError when no sentence survives.
    """
    rows = []
    kept = []
    skipped = 0
    for sent in split_sentences(doc.text):
        toks = tokenize(sent, lowercase=lowercase)
        vecs = [table.get(t) for t in toks]
        skipped += sum(1 for v in vecs if v is None)
        vecs = [v for v in vecs if v is not None]
        if not vecs:
            continue
        rows.append(np.mean(vecs, axis=0))
        kept.append(sent)
    if not rows:
        raise EmptyCloudError(f"document {doc.id!r}: no sentence has in-vocabulary tokens")
    points, tokens = dedup_points(np.asarray(rows), kept)
    return PointCloud(doc_id=doc.id, points=points, tokens=tokens, n_skipped=skipped)


class TfidfFeaturizer(BaseEstimator, TransformerMixin):
    """Raw-count tf times smooth idf, L2-normalized per document.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1; the vocabulary keeps tokens
    appearing in at least `min_df` documents.
    """

    def __init__(self, min_df: int = 2):
        self.min_df = min_df

    def fit(self, docs: list[Document], y=None):
        if not docs:
            raise ValueError("cannot fit tf-idf on an empty corpus")
        df: dict[str, int] = {}
        for doc in docs:
            for tok in set(doc.tokens):
                df[tok] = df.get(tok, 0) + 1
        vocab = sorted(t for t, c in df.items() if c >= self.min_df)
        self.vocabulary_ = {t: i for i, t in enumerate(vocab)}
        n = len(docs)
        self.idf_ = np.array(
            [np.log((1.0 + n) / (1.0 + df[t])) + 1.0 for t in vocab]
        )
        return self

    def transform(self, docs: list[Document]) -> sp.csr_matrix:
        if not hasattr(self, "vocabulary_"):
            raise ValueError("TfidfFeaturizer is not fitted")
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for doc in docs:
            counts: dict[int, int] = {}
            for tok in doc.tokens:
                j = self.vocabulary_.get(tok)
                if j is not None:
                    counts[j] = counts.get(j, 0) + 1
            row_idx = sorted(counts)
            row = np.array([counts[j] * self.idf_[j] for j in row_idx])
            norm = np.linalg.norm(row)
            if norm > 0:
                row = row / norm
            indices.extend(row_idx)
            data.extend(row.tolist())
            indptr.append(len(indices))
        return sp.csr_matrix((data, indices, indptr),
                             shape=(len(docs), len(self.vocabulary_)))


@dataclass
class FeatureMatrix:
    """Rows = documents, columns = named features, optional labels."""

    doc_ids: list[str]
    columns: list[str]
    values: np.ndarray
    labels: list[str | None] | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("values must be 2-D")
        if self.values.shape != (len(self.doc_ids), len(self.columns)):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"{len(self.doc_ids)} docs x {len(self.columns)} columns"
            )
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("column names must be unique")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")
        if self.labels is not None and len(self.labels) != len(self.doc_ids):
            raise ValueError("labels must align with doc_ids")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def select(self, doc_ids: list[str]) -> "FeatureMatrix":
        pos = {d: i for i, d in enumerate(self.doc_ids)}
        missing = [d for d in doc_ids if d not in pos]
        if missing:
            raise KeyError(f"doc_ids not in matrix: {missing[:5]}")
        idx = [pos[d] for d in doc_ids]
        return FeatureMatrix(
            doc_ids=list(doc_ids),
            columns=list(self.columns),
            values=self.values[idx],
            labels=None if self.labels is None else [self.labels[i] for i in idx],
        )


def standardize_columns(values: np.ndarray) -> np.ndarray:
    """Column z-score; constant columns map to zero."""
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    return (values - mean) / std


def assemble(blocks: list[tuple[str, "FeatureMatrix | np.ndarray"]],
             doc_ids: list[str] | None = None,
             labels: list[str | None] | None = None,
             standardize: bool = True) -> FeatureMatrix:
    """Concatenate named feature blocks column-wise, in the given order.

    Blocks must cover identical documents in identical order (FeatureMatrix
    blocks are checked against each other; raw arrays are trusted to align
    with `doc_ids`). Column names are prefixed with the block name.
    """
    if not blocks:
        raise ValueError("no blocks to assemble")
    ids = doc_ids
    lbls = labels
    mats = []
    names = []
    for name, block in blocks:
        if isinstance(block, FeatureMatrix):
            if ids is None:
                ids = block.doc_ids
                lbls = block.labels if lbls is None else lbls
            elif block.doc_ids != list(ids):
                offenders = sorted(set(block.doc_ids) ^ set(ids))
                raise ValueError(
                    f"block {name!r} covers different documents; offenders: {offenders[:10]}"
                )
            mat = block.values
        else:
            if sp.issparse(block):
                mat = np.asarray(block.todense(), dtype=np.float64)
            else:
                mat = np.asarray(block, dtype=np.float64)
            if ids is None:
                raise ValueError("doc_ids required when assembling raw arrays")
            if mat.shape[0] != len(ids):
                raise ValueError(f"block {name!r} has {mat.shape[0]} rows, expected {len(ids)}")
        if standardize:
            mat = standardize_columns(mat)
        mats.append(mat)
        names.extend(f"{name}_{j}" for j in range(mat.shape[1]))
    return FeatureMatrix(doc_ids=list(ids), columns=names,
                         values=np.hstack(mats), labels=lbls)


# ---------------------------------------------------------------------------
# CSV (header: doc_id,label,<feature columns>)
# ---------------------------------------------------------------------------

def write_feature_csv(path, matrix: FeatureMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("doc_id,label," + ",".join(matrix.columns) + "\n")
        labels = matrix.labels or [None] * len(matrix.doc_ids)
        for doc_id, label, row in zip(matrix.doc_ids, labels, matrix.values):
            lab = "" if label is None else str(label)
            fh.write(f"{doc_id},{lab}," + ",".join(f"{v:.9g}" for v in row) + "\n")


def read_feature_csv(path) -> FeatureMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        if header[:2] != ["doc_id", "label"]:
            raise ValueError(f"{path}: not a feature CSV")
        columns = header[2:]
        ids, labels, rows = [], [], []
        for line in fh:
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(",")
            ids.append(parts[0])
            labels.append(parts[1] if parts[1] else None)
            rows.append([float(v) for v in parts[2:]])
    values = np.array(rows) if rows else np.zeros((0, len(columns)))
    has_labels = any(l is not None for l in labels)
    return FeatureMatrix(doc_ids=ids, columns=columns, values=values,
                         labels=labels if has_labels else None)
