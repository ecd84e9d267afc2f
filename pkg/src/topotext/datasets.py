"""Synthetic desk-scale corpora with controllable geometry.

Real newsgroup/review corpora and pretrained vectors are inputs the user
supplies; these generators produce small stand-ins whose *statistical
structure* mirrors them, which is what the demo configs and the acceptance
suite run on:

- topics: three classes with disjoint content vocabularies whose word
  vectors live on distinct geometric templates (a noisy ring, two tight
  lumps, a diffuse ball), so topology carries class signal and tf-idf
  separates classes almost perfectly.
- sentiment: two classes whose lexicons differ by a small mean shift along
  one axis (strong signal for averaged vectors) while the shape of a
  sentence's cloud is nearly class-independent (weak signal for topology),
  plus a mild length asymmetry so topology stays slightly above chance.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .embeddings import Document, EmbeddingTable, save_corpus, save_embeddings


def _embed(base: np.ndarray, dim: int, rng, noise: float) -> np.ndarray:
    """Place a low-dimensional template into `dim` coords plus isotropic noise."""
    vec = np.zeros(dim)
    vec[: len(base)] = base
    return vec + rng.normal(scale=noise, size=dim)


def make_topic_embeddings(dim: int = 50, words_per_topic: int = 200,
                          n_filler: int = 120, seed: int = 0) -> EmbeddingTable:
    if dim < 4:
        raise ValueError("dim must be >= 4")
    rng = np.random.default_rng(seed)
    vectors: dict[str, np.ndarray] = {}
    # ring: strong 1-dimensional hole
    for i in range(words_per_topic):
        phi = 2.0 * math.pi * i / words_per_topic
        base = np.array([math.cos(phi), math.sin(phi), 0.0]) + np.array([3.0, 0.0, 0.0])
        vectors[f"ring{i:03d}"] = _embed(base, dim, rng, noise=0.05)
    # lumps: two tight clusters, a large persistent H0 gap
    for i in range(words_per_topic):
        side = 1.0 if i % 2 == 0 else -1.0
        base = np.array([0.0, 3.0, 1.1 * side])
        vectors[f"lump{i:03d}"] = _embed(base, dim, rng, noise=0.12)
    # ball: diffuse, featureless
    for i in range(words_per_topic):
        base = np.array([-3.0, -3.0, 0.0])
        vectors[f"ball{i:03d}"] = _embed(base, dim, rng, noise=0.55)
    for i in range(n_filler):
        vectors[f"common{i:03d}"] = rng.normal(scale=0.5, size=dim)
    return EmbeddingTable(vectors, dim)


def make_topic_corpus(n_docs: int = 600, dim: int = 50, seed: int = 0,
                      words_per_topic: int = 200, n_filler: int = 120,
                      ) -> tuple[list[Document], EmbeddingTable]:
    """Balanced 3-class corpus over the topic embeddings."""
    table = make_topic_embeddings(dim=dim, words_per_topic=words_per_topic,
                                  n_filler=n_filler, seed=seed)
    rng = np.random.default_rng(seed + 1)
    prefixes = ("ring", "lump", "ball")
    docs = []
    for i in range(n_docs):
        topic = i % 3
        prefix = prefixes[topic]
        length = int(rng.integers(60, 120))
        n_topic = int(round(0.7 * length))
        words = [f"{prefix}{int(rng.integers(words_per_topic)):03d}"
                 for _ in range(n_topic)]
        words += [f"common{int(rng.integers(n_filler)):03d}"
                  for _ in range(length - n_topic)]
        perm = rng.permutation(len(words))
        text = " ".join(words[j] for j in perm)
        docs.append(Document.make(f"doc{i:04d}", text, label=f"topic_{prefix}"))
    return docs, table


def make_sentiment_embeddings(dim: int = 50, n_lexicon: int = 80,
                              n_filler: int = 300, shift: float = 0.9,
                              seed: int = 0) -> EmbeddingTable:
    rng = np.random.default_rng(seed)
    vectors: dict[str, np.ndarray] = {}
    for i in range(n_filler):
        vectors[f"word{i:03d}"] = rng.normal(scale=0.5, size=dim)
    direction = np.zeros(dim)
    direction[0] = 1.0
    for i in range(n_lexicon):
        base = rng.normal(scale=0.5, size=dim)
        vectors[f"good{i:03d}"] = base + shift * direction
    for i in range(n_lexicon):
        base = rng.normal(scale=0.5, size=dim)
        vectors[f"bad{i:03d}"] = base - shift * direction
    return EmbeddingTable(vectors, dim)


def make_sentiment_corpus(n_sentences: int = 2000, dim: int = 50, seed: int = 0,
                          n_lexicon: int = 80, n_filler: int = 300,
                          shift: float = 0.9,
                          ) -> tuple[list[Document], EmbeddingTable]:
    """Balanced binary sentiment corpus of single sentences."""
    table = make_sentiment_embeddings(dim=dim, n_lexicon=n_lexicon,
                                      n_filler=n_filler, shift=shift, seed=seed)
    rng = np.random.default_rng(seed + 1)
    docs = []
    for i in range(n_sentences):
        positive = i % 2 == 0
        # negative reviews run one token longer on average: a weak, purely
        # geometric cue that keeps topology slightly above chance
        length = int(rng.integers(9, 21)) if positive else int(rng.integers(10, 22))
        n_sentiment = max(2, int(round(0.3 * length)))
        lex = "good" if positive else "bad"
        words = [f"{lex}{int(rng.integers(n_lexicon)):03d}" for _ in range(n_sentiment)]
        words += [f"word{int(rng.integers(n_filler)):03d}"
                  for _ in range(length - n_sentiment)]
        perm = rng.permutation(len(words))
        text = " ".join(words[j] for j in perm) + "."
        docs.append(Document.make(f"sent{i:04d}", text,
                                  label="pos" if positive else "neg"))
    return docs, table


def write_demo_dataset(out_dir, kind: str = "topics", seed: int = 0,
                       n_docs: int | None = None) -> tuple[str, str]:
    """Write corpus.jsonl + vectors.txt for a demo run; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if kind == "topics":
        docs, table = make_topic_corpus(n_docs=n_docs or 600, seed=seed)
    elif kind == "sentiment":
        docs, table = make_sentiment_corpus(n_sentences=n_docs or 2000, seed=seed)
    else:
        raise ValueError(f"unknown dataset kind {kind!r}")
    corpus_path = out / "corpus.jsonl"
    vectors_path = out / "vectors.txt"
    save_corpus(docs, corpus_path)
    save_embeddings(table, vectors_path, format="word2vec-text")
    return str(corpus_path), str(vectors_path)


def _main(argv=None) -> int:  # pragma: no cover - thin convenience wrapper
    import argparse

    parser = argparse.ArgumentParser(
        description="Generate a synthetic demo corpus and embedding file.")
    parser.add_argument("out_dir")
    parser.add_argument("--kind", choices=("topics", "sentiment"), default="topics")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n-docs", type=int, default=None)
    args = parser.parse_args(argv)
    corpus, vectors = write_demo_dataset(args.out_dir, kind=args.kind,
                                         seed=args.seed, n_docs=args.n_docs)
    print(corpus)
    print(vectors)
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(_main())
