"""Word-embedding tables, tokenization, and document point clouds.

A document is represented geometrically as the set of word vectors of its
in-vocabulary tokens: exact duplicate vectors are removed, since a Rips
filtration (and hence the persistence diagram) only depends on the support
of the point multiset.
"""
from __future__ import annotations

import json
import string
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_point_array
from .errors import DataError, EmptyCloudError

_PUNCT = string.punctuation + "‘’“”–—"

EMBEDDING_FORMATS = ("word2vec-text", "glove-text")


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Whitespace tokenizer: lowercase, strip punctuation at token edges.

    Internal apostrophes and hyphens are kept ("don't", "state-of-the-art").
    Tokens that are pure punctuation disappear. Deterministic by construction.
    """
    if lowercase:
        text = text.lower()
    out = []
    for raw in text.split():
        tok = raw.strip(_PUNCT)
        if tok:
            out.append(tok)
    return out


@dataclass
class Document:
    """A corpus item. `tokens` is derived from `text` by `tokenize`."""

    id: str
    text: str
    label: str | None = None
    tokens: list[str] = field(default_factory=list)

    @classmethod
    def make(cls, id: str, text: str, label: str | None = None,
             lowercase: bool = True) -> "Document":
        return cls(id=id, text=text, label=label,
                   tokens=tokenize(text, lowercase=lowercase))


class EmbeddingTable:
    """Immutable token -> vector map with a fixed dimensionality.

    Treat as read-only after construction: it is shared freely across
    threads by the pipeline.
    """

    def __init__(self, vectors: dict[str, np.ndarray], dim: int):
        if dim <= 0:
            raise ValueError("embedding dimension must be positive")
        self.dim = int(dim)
        self.vectors = vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __getitem__(self, token: str) -> np.ndarray:
        return self.vectors[token]

    def get(self, token: str):
        return self.vectors.get(token)

    def items(self):
        return self.vectors.items()


def load_embeddings(path, format: str = "word2vec-text",
                    normalize: bool = False) -> EmbeddingTable:
    """Read a text-format vector file.

    word2vec-text starts with a "vocab_count dim" header line; glove-text has
    no header and the dimension is inferred from the first line. Every vector
    line is "token v1 ... vdim". A malformed line raises DataError naming the
    line number.

    `normalize=True` rescales every vector to unit L2 norm (for angular-
    distance experiments); the default keeps the raw vectors.
    """
    if format not in EMBEDDING_FORMATS:
        raise ValueError(f"unknown embedding format {format!r}")
    vectors: dict[str, np.ndarray] = {}
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        lineno = 0
        if format == "word2vec-text":
            header = fh.readline()
            lineno += 1
            parts = header.split()
            if len(parts) != 2:
                raise DataError(f"{path}: line 1: expected 'vocab_count dim' header")
            try:
                dim = int(parts[1])
            except ValueError:
                raise DataError(f"{path}: line 1: non-integer dimension in header")
            if dim <= 0:
                raise DataError(f"{path}: line 1: dimension must be positive")
        for line in fh:
            lineno += 1
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(" ")
            parts = [p for p in parts if p]
            token = parts[0]
            if dim is None:
                dim = len(parts) - 1
                if dim <= 0:
                    raise DataError(f"{path}: line {lineno}: no vector components")
            if len(parts) - 1 != dim:
                raise DataError(
                    f"{path}: line {lineno}: expected {dim} components, "
                    f"got {len(parts) - 1}"
                )
            try:
                vec = np.array([float(p) for p in parts[1:]], dtype=np.float64)
            except ValueError:
                raise DataError(f"{path}: line {lineno}: non-numeric component")
            if not np.all(np.isfinite(vec)):
                raise DataError(f"{path}: line {lineno}: non-finite component")
            if normalize:
                norm = float(np.linalg.norm(vec))
                if norm > 0:
                    vec = vec / norm
            vectors[token] = vec
    if not vectors:
        raise DataError(f"{path}: no embedding entries found")
    return EmbeddingTable(vectors, dim)


def save_embeddings(table: EmbeddingTable, path, format: str = "word2vec-text") -> None:
    """Write a table back out; round-trips through `load_embeddings`."""
    if format not in EMBEDDING_FORMATS:
        raise ValueError(f"unknown embedding format {format!r}")
    with open(path, "w", encoding="utf-8") as fh:
        if format == "word2vec-text":
            fh.write(f"{len(table)} {table.dim}\n")
        for token, vec in table.items():
            comps = " ".join(repr(float(v)) for v in vec)
            fh.write(f"{token} {comps}\n")


@dataclass
class PointCloud:
    """A document as a finite subset of R^dim.

    `points` is (n, dim) with one row per distinct vector; `tokens` traces
    each row back to the token (or sentence) that produced it first.
    """

    doc_id: str
    points: np.ndarray
    tokens: tuple[str, ...] = ()
    n_skipped: int = 0

    def __post_init__(self):
        self.points = as_point_array(self.points, name=f"points[{self.doc_id}]")
        if self.tokens and len(self.tokens) != len(self.points):
            raise ValueError("tokens must align with points")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)


def dedup_points(points: np.ndarray, labels: list[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    """Drop exact duplicate rows, keeping first occurrences in order."""
    seen = {}
    keep = []
    for i in range(len(points)):
        key = points[i].tobytes()
        if key not in seen:
            seen[key] = i
            keep.append(i)
    return points[keep], tuple(labels[i] for i in keep)


def to_point_cloud(doc: Document, table: EmbeddingTable) -> PointCloud:
    """Map a tokenized document to its cloud of word vectors.

    Out-of-vocabulary tokens are skipped (counted in `n_skipped`); exact
    duplicate vectors are removed. Raises EmptyCloudError when nothing is
    in vocabulary — the caller decides whether to drop or fail.
    """
    rows = []
    kept_tokens = []
    skipped = 0
    for tok in doc.tokens:
        vec = table.get(tok)
        if vec is None:
            skipped += 1
        else:
            rows.append(vec)
            kept_tokens.append(tok)
    if not rows:
        raise EmptyCloudError(
            f"document {doc.id!r}: no in-vocabulary tokens ({skipped} skipped)"
        )
    points, tokens = dedup_points(np.asarray(rows, dtype=np.float64), kept_tokens)
    return PointCloud(doc_id=doc.id, points=points, tokens=tokens, n_skipped=skipped)


def load_corpus(path, lowercase: bool = True, strip_headers: bool = False) -> list[Document]:
    """Read a JSONL corpus: one {"id", "text", "label"} object per line.

    `strip_headers` removes an email-style header block (leading lines of
    "Key: value" form up to the first blank line), which otherwise leaks
    newsgroup labels into the text.
    """
    docs = []
    ids = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {lineno}: invalid JSON ({exc})")
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise DataError(f"{path}: line {lineno}: expected an object with 'id' and 'text'")
            doc_id = str(obj["id"])
            if doc_id in ids:
                raise DataError(f"{path}: line {lineno}: duplicate document id {doc_id!r}")
            ids.add(doc_id)
            text = str(obj["text"])
            if strip_headers:
                text = _strip_header_block(text)
            label = obj.get("label")
            docs.append(Document.make(doc_id, text,
                                      label=None if label is None else str(label),
                                      lowercase=lowercase))
    if not docs:
        raise DataError(f"{path}: empty corpus")
    return docs


def save_corpus(docs: list[Document], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in docs:
            fh.write(json.dumps({"id": d.id, "text": d.text, "label": d.label}) + "\n")


def _strip_header_block(text: str) -> str:
    head, sep, rest = text.partition("\n\n")
    if not sep:
        return text
    lines = [ln for ln in head.splitlines() if ln.strip()]
    if lines and all(":" in ln for ln in lines):
        return rest
    return text
