import numpy as np
import pytest

from topotext import Document, EmbeddingTable, PointCloud


@pytest.fixture
def tiny_table():
    return EmbeddingTable(
        {"cat": np.array([1.0, 0.0]), "dog": np.array([0.0, 1.0]),
         "fish": np.array([1.0, 1.0])},
        dim=2,
    )


def make_cloud(rng, n, dim, doc_id="doc", scale=1.0):
    return PointCloud(doc_id, rng.normal(scale=scale, size=(n, dim)))


def make_doc(doc_id, text, label=None):
    return Document.make(doc_id, text, label=label)


def random_rigid_motion(rng, dim):
    """Random rotation (det +1) and translation."""
    a = rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    t = rng.normal(scale=2.0, size=dim)
    return q, t


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
