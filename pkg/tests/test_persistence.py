import math

import numpy as np
import pytest

from topotext import (BudgetExceededError, FiltrationError, PointCloud,
                      SamplingPlan, build_rips, compute_persistence,
                      diagram_for_document, distance_matrix, downsample,
                      enclosing_radius, hausdorff, read_diagram_csv,
                      write_diagram_csv)
from topotext.persistence import Filtration, PersistenceDiagram, RipsPersistence

from .conftest import make_cloud, random_rigid_motion
from .oracles import kruskal_mst_weights, naive_diagram

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def diagram_points(d):
    return sorted(d.points)


def assert_diagrams_close(a, b, atol=0.0):
    pa, pb = diagram_points(a), diagram_points(b)
    assert len(pa) == len(pb)
    for (qa, ba, da), (qb, bb, db) in zip(pa, pb):
        assert qa == qb
        assert ba == pytest.approx(bb, abs=atol)
        if math.isinf(da) or math.isinf(db):
            assert math.isinf(da) and math.isinf(db)
        else:
            assert da == pytest.approx(db, abs=atol)


class TestDownsample:
    def test_noop_when_cap_exceeds_size(self, rng):
        cloud = make_cloud(rng, 10, 3)
        sub, radius = downsample(cloud, SamplingPlan(max_points=10, seed=0))
        assert len(sub) == 10 and radius == 0.0

    @pytest.mark.parametrize("seed", [0, 1, 2, 7])
    def test_square_two_points_are_diagonal(self, seed):
        cloud = PointCloud("sq", SQUARE)
        sub, radius = downsample(cloud, SamplingPlan(max_points=2, seed=seed))
        diff = np.abs(sub.points[0] - sub.points[1])
        assert np.allclose(diff, [1.0, 1.0])  # opposite corners
        assert radius == pytest.approx(1.0)

    def test_radius_equals_hausdorff(self, rng):
        for _ in range(10):
            cloud = make_cloud(rng, 30, 3)
            sub, radius = downsample(cloud, SamplingPlan(max_points=7, seed=3))
            assert radius == pytest.approx(hausdorff(cloud, sub), abs=1e-12)

    def test_deterministic(self, rng):
        cloud = make_cloud(rng, 40, 2)
        s1, r1 = downsample(cloud, SamplingPlan(max_points=9, seed=5))
        s2, r2 = downsample(cloud, SamplingPlan(max_points=9, seed=5))
        assert np.array_equal(s1.points, s2.points) and r1 == r2


class TestBuildRips:
    def test_two_points_max_dim_zero(self):
        dm = distance_matrix(np.array([[0.0], [3.0]]))
        f = build_rips(dm, max_dim=0, threshold=5.0)
        assert f.simplices == [((0,), 0.0, 0), ((1,), 0.0, 0), ((0, 1), 3.0, 1)]

    def test_equilateral_triangle(self):
        s = 2.0
        pts = np.array([[0, 0], [s, 0], [s / 2, s * math.sqrt(3) / 2]])
        f = build_rips(distance_matrix(pts), max_dim=1, threshold=3.0)
        sims = f.simplices
        assert sum(1 for _, _, d in sims if d == 0) == 3
        edges = [(v, val) for v, val, d in sims if d == 1]
        tris = [(v, val) for v, val, d in sims if d == 2]
        assert len(edges) == 3 and all(val == pytest.approx(s) for _, val in edges)
        assert len(tris) == 1 and tris[0][1] == pytest.approx(s)

    def test_square_counts_by_value(self):
        # max_dim=2 so the filtration carries simplices up to dimension 3
        f = build_rips(distance_matrix(SQUARE), max_dim=2, threshold=2.0)
        sims = f.simplices
        r2 = math.sqrt(2.0)
        assert sum(1 for _, v, d in sims if d == 0) == 4
        assert sum(1 for _, v, d in sims if d == 1 and v == 1.0) == 4
        assert sum(1 for _, v, d in sims if d == 1 and abs(v - r2) < 1e-12) == 2
        assert sum(1 for _, v, d in sims if d == 2) == 4
        assert all(abs(v - r2) < 1e-12 for _, v, d in sims if d == 2)
        assert sum(1 for _, v, d in sims if d == 3) == 1

    def test_filtration_order_and_face_property(self, rng):
        pts = rng.normal(size=(9, 3))
        f = build_rips(distance_matrix(pts), max_dim=2, threshold="enclosing")
        sims = f.simplices
        keys = [(val, d, v) for v, val, d in sims]
        assert keys == sorted(keys)
        seen = set()
        for verts, val, d in sims:
            for drop in range(len(verts)):
                face = verts[:drop] + verts[drop + 1:]
                if face:
                    assert face in seen or d == 0
            seen.add(verts)

    def test_rips_value_is_max_pairwise(self, rng):
        pts = rng.normal(size=(8, 2))
        dm = distance_matrix(pts)
        f = build_rips(dm, max_dim=2, threshold="enclosing")
        for verts, val, d in f.simplices:
            if d >= 1:
                expect = max(dm.values[a][b] for i, a in enumerate(verts)
                             for b in verts[i + 1:])
                assert val == expect

    def test_threshold_filters(self):
        f = build_rips(distance_matrix(SQUARE), max_dim=1, threshold=1.0)
        dims = [d for _, _, d in f.simplices]
        assert dims.count(1) == 4  # the two diagonals are out
        assert dims.count(2) == 0

    def test_budget_exceeded(self, rng):
        pts = rng.normal(size=(40, 3))
        with pytest.raises(BudgetExceededError, match="downsample"):
            build_rips(distance_matrix(pts), max_dim=2, threshold="enclosing",
                       budget=1000)

    def test_bad_threshold(self):
        dm = distance_matrix(SQUARE)
        with pytest.raises(ValueError):
            build_rips(dm, threshold=-1.0)
        with pytest.raises(ValueError):
            build_rips(dm, max_dim=3)

    def test_enclosing_radius(self):
        assert enclosing_radius(distance_matrix(SQUARE)) == pytest.approx(math.sqrt(2))
        assert enclosing_radius(distance_matrix(np.zeros((1, 2)))) == 0.0


class TestComputePersistence:
    def test_two_points(self):
        dm = distance_matrix(np.array([[0.0], [3.0]]))
        d = compute_persistence(build_rips(dm, max_dim=0, threshold=5.0))
        assert diagram_points(d) == [(0, 0.0, 3.0), (0, 0.0, math.inf)]

    def test_square_h1(self):
        d = compute_persistence(build_rips(distance_matrix(SQUARE), max_dim=1,
                                           threshold=2.0))
        h1 = d.finite(1)
        assert h1.shape == (1, 2)
        assert h1[0][0] == pytest.approx(1.0)
        assert h1[0][1] == pytest.approx(math.sqrt(2.0))
        h0_deaths = sorted(d.finite(0)[:, 1])
        assert h0_deaths == [1.0, 1.0, 1.0]
        assert d.n_infinite(0) == 1 and d.n_infinite(1) == 0

    def test_square_capped_threshold_leaves_essential_h1(self):
        d = compute_persistence(build_rips(distance_matrix(SQUARE), max_dim=1,
                                           threshold=1.0))
        assert d.n_infinite(1) == 1  # the loop is never filled below sqrt(2)

    def test_disconnected_components(self):
        pts = np.array([[0.0], [1.0], [100.0], [101.0]])
        d = compute_persistence(build_rips(distance_matrix(pts), max_dim=0,
                                           threshold=5.0))
        assert d.n_infinite(0) == 2
        assert sorted(d.finite(0)[:, 1]) == [1.0, 1.0]

    def test_matches_naive_oracle(self, rng):
        for _ in range(60):
            n = int(rng.integers(2, 9))
            dim = int(rng.integers(1, 4))
            max_dim = int(rng.integers(0, 3))
            pts = rng.normal(size=(n, dim))
            thr = "enclosing" if rng.random() < 0.5 else float(rng.uniform(0.5, 3.0))
            f = build_rips(distance_matrix(pts), max_dim=max_dim, threshold=thr)
            got = diagram_points(compute_persistence(f))
            expected = naive_diagram(f)
            assert got == expected

    def test_h0_deaths_are_mst_weights(self, rng):
        for _ in range(15):
            n = int(rng.integers(2, 40))
            pts = rng.normal(size=(n, int(rng.integers(1, 5))))
            dm = distance_matrix(pts)
            d = compute_persistence(build_rips(dm, max_dim=0, threshold="enclosing"))
            got = sorted(d.finite(0)[:, 1])
            expected = kruskal_mst_weights(dm.values)
            assert np.allclose(got, expected, atol=1e-9)

    def test_isometry_invariance(self, rng):
        pts = rng.normal(size=(20, 3))
        q, t = random_rigid_motion(rng, 3)
        d1 = compute_persistence(build_rips(distance_matrix(pts), max_dim=1,
                                            threshold="enclosing"))
        d2 = compute_persistence(build_rips(distance_matrix(pts @ q.T + t),
                                            max_dim=1, threshold="enclosing"))
        assert_diagrams_close(d1, d2, atol=1e-9)

    def test_permutation_invariance(self, rng):
        pts = rng.normal(size=(15, 2))
        perm = rng.permutation(15)
        d1 = compute_persistence(build_rips(distance_matrix(pts), max_dim=1,
                                            threshold="enclosing"))
        d2 = compute_persistence(build_rips(distance_matrix(pts[perm]), max_dim=1,
                                            threshold="enclosing"))
        assert_diagrams_close(d1, d2, atol=1e-9)

    def test_duplicate_insertion_invariance(self, rng):
        from topotext.embeddings import dedup_points
        pts = rng.normal(size=(10, 2))
        dup = np.vstack([pts, pts[3], pts[7]])
        deduped, _ = dedup_points(dup, ["x"] * len(dup))
        d1 = compute_persistence(build_rips(distance_matrix(pts), max_dim=1,
                                            threshold="enclosing"))
        d2 = compute_persistence(build_rips(distance_matrix(deduped), max_dim=1,
                                            threshold="enclosing"))
        assert diagram_points(d1) == diagram_points(d2)

    def test_threshold_monotonicity(self, rng):
        pts = rng.normal(size=(12, 2))
        dm = distance_matrix(pts)
        lo = compute_persistence(build_rips(dm, max_dim=1, threshold=1.0))
        hi = compute_persistence(build_rips(dm, max_dim=1, threshold=2.5))
        finite_lo = [p for p in lo.points if math.isfinite(p[2]) and p[2] <= 1.0]
        finite_hi = [p for p in hi.points if math.isfinite(p[2]) and p[2] <= 1.0]
        for p in finite_lo:
            assert any(all(abs(x - y) < 1e-12 for x, y in zip(p[1:], q[1:]))
                       and p[0] == q[0] for q in finite_hi)

    def test_death_ge_birth_and_h0_births_zero(self, rng):
        pts = rng.normal(size=(25, 3))
        d = compute_persistence(build_rips(distance_matrix(pts), max_dim=2,
                                           threshold="enclosing"))
        assert np.all(d.deaths >= d.births)
        assert np.all(d.births[d.dims == 0] == 0.0)

    def test_malformed_filtration(self):
        # a triangle whose edges are missing
        f = Filtration(3, {2: np.array([[0, 1, 2]], dtype=np.int32)},
                       {2: np.array([1.0])}, max_dim=1, threshold=2.0)
        with pytest.raises(FiltrationError):
            compute_persistence(f)


class TestDiagramForDocument:
    def test_singleton(self):
        cloud = PointCloud("one", np.array([[0.5, 0.5]]))
        d = diagram_for_document(cloud)
        assert diagram_points(d) == [(0, 0.0, math.inf)]

    def test_deterministic(self, rng):
        cloud = make_cloud(rng, 50, 5)
        plan = SamplingPlan(max_points=30, seed=4)
        d1 = diagram_for_document(cloud, plan=plan)
        d2 = diagram_for_document(cloud, plan=plan)
        assert diagram_points(d1) == diagram_points(d2)

    def test_isometry_invariance_end_to_end(self, rng):
        pts = rng.normal(size=(30, 3))
        q, t = random_rigid_motion(rng, 3)
        d1 = diagram_for_document(PointCloud("a", pts))
        d2 = diagram_for_document(PointCloud("b", pts @ q.T + t))
        assert_diagrams_close(d1, d2, atol=1e-9)

    def test_transformer_api(self, rng):
        clouds = [make_cloud(rng, 12, 2) for _ in range(3)]
        est = RipsPersistence(max_points=10, seed=0)
        assert est.get_params()["max_points"] == 10
        diagrams = est.fit(clouds).transform(clouds)
        assert len(diagrams) == 3
        assert all(d.n_infinite(0) == 1 for d in diagrams)


class TestDiagramCSV:
    def test_round_trip(self, tmp_path, rng):
        cloud = make_cloud(rng, 15, 3)
        d = diagram_for_document(cloud)
        path = tmp_path / "d.csv"
        write_diagram_csv(path, "doc-1", d)
        doc_id, back = read_diagram_csv(path)
        assert doc_id == "doc-1"
        assert_diagrams_close(d, back, atol=1e-7)

    def test_format(self, tmp_path):
        d = PersistenceDiagram.from_points([(0, 0.0, math.inf), (1, 1.0, math.sqrt(2))])
        path = tmp_path / "d.csv"
        write_diagram_csv(path, "x", d)
        lines = path.read_text().splitlines()
        assert lines[0] == "doc_id,hom_dim,birth,death"
        assert lines[1] == "x,0,0,inf"
        assert lines[2] == "x,1,1,1.41421356"
