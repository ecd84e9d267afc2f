"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s`. The two corpus-level
criteria run on bundled synthetic corpora by default; point the environment
variables TOPOTEXT_CLUSTER_CORPUS / TOPOTEXT_CSP_CORPUS / TOPOTEXT_EMBEDDINGS
at real JSONL corpora and a pretrained vector file to run them on real data
instead.
"""
import math
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest

from topotext import (PointCloud, SamplingPlan, bottleneck, build_rips,
                      compute_persistence, diagram_for_document,
                      distance_matrix, gh_upper_bound, logistic_loss_grad,
                      ph_embedding, vectorize)
from topotext.config import PipelineConfig
from topotext.datasets import write_demo_dataset
from topotext.learn_eval import DiagonalGaussianMixture, bcubed
from topotext.pipeline import cmd_classify, cmd_cluster, cmd_diagrams, cmd_features

from .conftest import random_rigid_motion
from .oracles import (brute_bottleneck, central_difference_grad,
                      kruskal_mst_weights, naive_diagram)


@contextmanager
def criterion(num: int, name: str):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {num:>2} ({name}): FAIL "
              f"({time.perf_counter() - t0:.1f}s)")
        raise
    print(f"[acceptance] criterion {num:>2} ({name}): PASS "
          f"({time.perf_counter() - t0:.1f}s)")


def _warm_kernels():
    diagram_for_document(PointCloud("warm", np.random.default_rng(0).normal(size=(6, 2))),
                         max_dim=2)


def diagram_multiset(d):
    return sorted(d.points)


# ---------------------------------------------------------------------------
# Property-based criteria
# ---------------------------------------------------------------------------

def test_criterion_1_reduction_oracle():
    with criterion(1, "naive reduction equivalence, 200 clouds"):
        _warm_kernels()
        rng = np.random.default_rng(101)
        t0 = time.perf_counter()
        for _ in range(200):
            n = int(rng.integers(2, 9))
            dim = int(rng.integers(1, 4))
            max_dim = int(rng.integers(0, 3))
            pts = rng.normal(size=(n, dim))
            thr = "enclosing" if rng.random() < 0.5 else float(rng.uniform(0.5, 3.0))
            filtration = build_rips(distance_matrix(pts), max_dim=max_dim,
                                    threshold=thr)
            got = diagram_multiset(compute_persistence(filtration))
            assert got == naive_diagram(filtration)
        assert time.perf_counter() - t0 < 60.0


def test_criterion_2_mst_h0_equivalence():
    with criterion(2, "H0 deaths = MST weights, 100 clouds"):
        _warm_kernels()
        rng = np.random.default_rng(202)
        t0 = time.perf_counter()
        for _ in range(100):
            n = int(rng.integers(2, 65))
            pts = rng.normal(size=(n, int(rng.integers(1, 6))))
            dm = distance_matrix(pts)
            d = compute_persistence(build_rips(dm, max_dim=0, threshold="enclosing"))
            got = np.sort(d.finite(0)[:, 1])
            expect = np.array(kruskal_mst_weights(dm.values))
            assert got.shape == expect.shape
            assert np.allclose(got, expect, atol=1e-9)
        assert time.perf_counter() - t0 < 30.0


def test_criterion_3_isometry_invariance():
    with criterion(3, "isometry invariance + GH bound, 50 clouds"):
        _warm_kernels()
        rng = np.random.default_rng(303)
        t0 = time.perf_counter()
        for _ in range(50):
            dim = int(rng.integers(1, 4))
            n = int(rng.integers(5, 25))
            pts = rng.normal(size=(n, dim))
            q, t = random_rigid_motion(rng, dim)
            moved = pts @ q.T + t
            d1 = diagram_for_document(PointCloud("a", pts))
            d2 = diagram_for_document(PointCloud("b", moved))
            p1, p2 = diagram_multiset(d1), diagram_multiset(d2)
            assert len(p1) == len(p2)
            for (q1, b1, x1), (q2, b2, x2) in zip(p1, p2):
                assert q1 == q2 and abs(b1 - b2) <= 1e-9
                assert (math.isinf(x1) and math.isinf(x2)) or abs(x1 - x2) <= 1e-9
            assert gh_upper_bound(pts, moved) <= 1e-6

            # sign flips and point reorderings preserve float distances
            # bit-for-bit, so the embedding must be *exactly* equal
            signs = np.where(rng.random(dim) < 0.5, -1.0, 1.0)
            perm = rng.permutation(n)
            exact = (pts * signs)[perm]
            d3 = diagram_for_document(PointCloud("c", exact))
            assert np.array_equal(ph_embedding(d1), ph_embedding(d3))
        assert time.perf_counter() - t0 < 60.0


def test_criterion_4_stability_inequality():
    with criterion(4, "signature stability vs bottleneck, 50 pairs"):
        _warm_kernels()
        rng = np.random.default_rng(404)
        t0 = time.perf_counter()
        checked = 0
        for _ in range(50):
            a = PointCloud("a", rng.normal(size=(int(rng.integers(5, 17)), 2)))
            b = PointCloud("b", rng.normal(size=(int(rng.integers(5, 17)), 2)))
            da, db = diagram_for_document(a), diagram_for_document(b)
            for q in (0, 1):
                na, nb = len(da.finite(q)), len(db.finite(q))
                assert na <= 32 and nb <= 32
                n = max(na, nb)
                if n < 2:
                    continue
                length = n * (n - 1) // 2
                va = vectorize(da, q, length).values
                vb = vectorize(db, q, length).values
                dist = bottleneck(da.in_dim(q), db.in_dim(q))
                bound = math.sqrt(2.0 * n * (n - 1)) * dist
                assert float(np.linalg.norm(va - vb)) <= bound  # no tolerance
                checked += 1
        assert checked >= 50
        assert time.perf_counter() - t0 < 120.0


def test_criterion_5_bottleneck_oracle():
    with criterion(5, "bottleneck = factorial brute force, 100 pairs"):
        rng = np.random.default_rng(505)
        from topotext import PersistenceDiagram

        def random_diagram(k):
            births = rng.uniform(0, 2, size=k)
            deaths = births + rng.uniform(0, 2, size=k)
            return PersistenceDiagram.from_points(
                [(0, b, d) for b, d in zip(births, deaths)])

        for _ in range(100):
            d1 = random_diagram(int(rng.integers(0, 7)))
            d2 = random_diagram(int(rng.integers(0, 7)))
            expect = brute_bottleneck(d1.finite(0), d2.finite(0))
            assert bottleneck(d1, d2) == pytest.approx(expect, abs=1e-12)


def test_criterion_6_learner_checks():
    with criterion(6, "logreg FD gradient, GMM monotone, B-Cubed hand cases"):
        rng = np.random.default_rng(606)
        for _ in range(20):
            n, d = int(rng.integers(4, 15)), int(rng.integers(1, 7))
            x = rng.normal(size=(n, d))
            y = (rng.random(n) > 0.5).astype(float)
            if y.min() == y.max():
                y[0] = 1.0 - y[0]
            lam = float(rng.uniform(0, 0.3))
            wb = rng.normal(size=d + 1)
            _, grad = logistic_loss_grad(wb, x, y, lam)
            num = central_difference_grad(
                lambda w: logistic_loss_grad(w, x, y, lam)[0], wb)
            rel = np.linalg.norm(grad - num) / max(1.0, float(np.linalg.norm(grad)))
            assert rel < 1e-5

        for seed in range(5):
            x = rng.normal(size=(70, 3)) + 4.0 * (rng.random(size=(70, 3)) > 0.5)
            gm = DiagonalGaussianMixture(n_components=3, random_state=seed).fit(x)
            trace = gm.log_likelihood_trace_
            assert all(b >= a - 1e-9 * (1 + abs(a))
                       for a, b in zip(trace, trace[1:]))

        one_cluster = bcubed({i: 0 for i in "abcd"}, dict(zip("abcd", "AABB")))
        assert (one_cluster.precision, one_cluster.recall) == (0.5, 1.0)
        assert one_cluster.f1 == pytest.approx(2.0 / 3.0)
        singletons = bcubed(dict(zip("abcd", range(4))), dict(zip("abcd", "AABB")))
        assert (singletons.precision, singletons.recall) == (1.0, 0.5)
        assert singletons.f1 == pytest.approx(2.0 / 3.0)


def test_criterion_7_unit_square():
    with criterion(7, "unit square end-to-end H1 = {(1, sqrt 2)}"):
        square = PointCloud("sq", np.array([[0.0, 0.0], [1.0, 0.0],
                                            [1.0, 1.0], [0.0, 1.0]]))
        d = diagram_for_document(square, threshold=2.0)
        h1 = d.finite(1)
        assert h1.shape == (1, 2)
        assert h1[0][0] == 1.0
        assert h1[0][1] == math.sqrt(2.0)
        assert d.n_infinite(1) == 0


# ---------------------------------------------------------------------------
# Pattern-level reproduction at desk scale
# ---------------------------------------------------------------------------

def _desk_config(tmp_path, corpus_env, kind, n_docs, blocks):
    corpus = os.environ.get(corpus_env)
    embeddings = os.environ.get("TOPOTEXT_EMBEDDINGS")
    if corpus and embeddings:
        fmt = os.environ.get("TOPOTEXT_EMBEDDING_FORMAT", "word2vec-text")
    else:
        corpus, embeddings = write_demo_dataset(tmp_path / "data", kind=kind,
                                                seed=0, n_docs=n_docs)
        fmt = "word2vec-text"
    return PipelineConfig(
        corpus=corpus, embeddings=embeddings, embedding_format=fmt,
        cache_dir=str(tmp_path / "cache"), output_dir=str(tmp_path / "out"),
        blocks=blocks,
    )


def test_criterion_8_clustering_pattern(tmp_path):
    with criterion(8, "clustering: Ph > random + 0.03, tfidf >= Ph"):
        t0 = time.perf_counter()
        cfg = _desk_config(tmp_path, "TOPOTEXT_CLUSTER_CORPUS", "topics", 600,
                           ["ph", "aw2v", "tfidf", "aw2v+ph"])
        cmd_diagrams(cfg)
        cmd_features(cfg)
        report = cmd_cluster(cfg)
        f1 = {(r["block"], r["algorithm"]): r["f1"] for r in report["results"]}
        random_f1 = report["random_baseline"]["f1"]
        for algo in ("kmeans", "gmm"):
            assert f1[("ph", algo)] >= random_f1 + 0.03
            assert f1[("tfidf", algo)] >= f1[("ph", algo)]
        assert time.perf_counter() - t0 < 30 * 60


def test_criterion_9_sentence_sentiment_pattern(tmp_path):
    with criterion(9, "sentiment: Ph in [0.48,0.62], Aw2v >= 0.70, |comb-Aw2v| <= 0.02"):
        t0 = time.perf_counter()
        cfg = _desk_config(tmp_path, "TOPOTEXT_CSP_CORPUS", "sentiment", 2000,
                           ["ph", "aw2v", "aw2v+ph"])
        cmd_diagrams(cfg)
        cmd_features(cfg)
        report = cmd_classify(cfg)
        acc = {r["block"]: r["test_accuracy"] for r in report["results"]}
        assert 0.48 <= acc["ph"] <= 0.62
        assert acc["aw2v"] >= 0.70
        assert abs(acc["aw2v+ph"] - acc["aw2v"]) <= 0.02
        assert time.perf_counter() - t0 < 20 * 60


def test_criterion_10_throughput():
    with criterion(10, "256-point diagram under 10 s"):
        _warm_kernels()
        rng = np.random.default_rng(1010)
        cloud = PointCloud("big", rng.normal(size=(256, 50)))
        plan = SamplingPlan(max_points=256, seed=0)
        t0 = time.perf_counter()
        d = diagram_for_document(cloud, plan=plan, max_dim=1,
                                 threshold="enclosing")
        elapsed = time.perf_counter() - t0
        assert elapsed < 10.0
        assert d.n_infinite(0) == 1
        assert len(d.finite(0)) == 255
