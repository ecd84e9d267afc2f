"""Clustering, classification, and extrinsic evaluation.

The learners are deliberately self-contained (Lloyd's k-means with k-means++
seeding, diagonal-covariance EM, logistic regression by gradient descent
with backtracking) so that their convergence traces are observable: k-means
records its inertia per iteration, EM asserts a nondecreasing log-likelihood,
and the logistic gradient is checked against finite differences in the test
suite. All randomness flows through integer seeds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logsumexp
from sklearn.base import BaseEstimator, ClassifierMixin, ClusterMixin

from ._validation import as_feature_matrix, check_binary_labels
from .errors import DegenerateComponentError
from .features import FeatureMatrix

_LL_SLACK = 1e-9  # numerical slack for "nondecreasing" assertions


# ---------------------------------------------------------------------------
# K-means
# ---------------------------------------------------------------------------

class KMeans(BaseEstimator, ClusterMixin):
    """Lloyd's algorithm, k-means++ seeding, best of `n_init` restarts."""

    def __init__(self, n_clusters: int = 3, n_init: int = 10,
                 max_iter: int = 300, random_state: int = 0):
        self.n_clusters = n_clusters
        self.n_init = n_init
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None):
        X = as_feature_matrix(X)
        k = self.n_clusters
        if k < 1:
            raise ValueError("n_clusters must be >= 1")
        if k > X.shape[0]:
            raise ValueError(f"n_clusters={k} exceeds {X.shape[0]} rows")
        best = None
        for child in np.random.SeedSequence(self.random_state).spawn(self.n_init):
            rng = np.random.default_rng(child)
            centers, labels, inertia, trace = _lloyd(X, k, rng, self.max_iter)
            if best is None or inertia < best[2]:
                best = (centers, labels, inertia, trace)
        self.cluster_centers_, self.labels_, self.inertia_, self.inertia_trace_ = best
        return self

    def predict(self, X):
        X = as_feature_matrix(X)
        d = _sq_dists(X, self.cluster_centers_)
        return np.argmin(d, axis=1)


def _sq_dists(X, centers):
    d = ((X * X).sum(axis=1)[:, None] + (centers * centers).sum(axis=1)[None, :]
         - 2.0 * (X @ centers.T))
    return np.maximum(d, 0.0)


def _kmeanspp(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    first = int(rng.integers(n))
    centers[0] = X[first]
    closest = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total <= 0:
            # all remaining points coincide with a center; pick any new index
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centers[j] = X[idx]
        closest = np.minimum(closest, ((X - centers[j]) ** 2).sum(axis=1))
    return centers


def _lloyd(X, k, rng, max_iter):
    centers = _kmeanspp(X, k, rng)
    labels = np.full(X.shape[0], -1)
    trace = []
    for _ in range(max_iter):
        d = _sq_dists(X, centers)
        new_labels = np.argmin(d, axis=1)
        assigned = d[np.arange(len(X)), new_labels]
        trace.append(float(assigned.sum()))
        # repair empty clusters before computing any means so every center
        # remains the mean of its final members (keeps the trace monotone)
        for j in range(k):
            if not np.any(new_labels == j):
                far = int(np.argmax(assigned))
                new_labels[far] = j
                assigned[far] = 0.0
        for j in range(k):
            sel = new_labels == j
            if sel.any():  # duplicate-heavy data can leave a cluster empty
                centers[j] = X[sel].mean(axis=0)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    d = _sq_dists(X, centers)
    labels = np.argmin(d, axis=1)
    inertia = float(d[np.arange(len(X)), labels].sum())
    trace.append(inertia)
    return centers, labels, inertia, trace


# ---------------------------------------------------------------------------
# Diagonal-covariance Gaussian mixture
# ---------------------------------------------------------------------------

class DiagonalGaussianMixture(BaseEstimator):
    """EM for a mixture of axis-aligned Gaussians.

    Initialized from k-means; variances floored at `var_floor`. The
    per-iteration log-likelihood trace is stored and must be nondecreasing
    (up to numerical slack); a component collapsing onto a single point
    triggers a reseeded retry, then DegenerateComponentError.
    """

    def __init__(self, n_components: int = 3, max_iter: int = 200,
                 tol: float = 1e-7, var_floor: float = 1e-6,
                 max_reseeds: int = 5, random_state: int = 0):
        self.n_components = n_components
        self.max_iter = max_iter
        self.tol = tol
        self.var_floor = var_floor
        self.max_reseeds = max_reseeds
        self.random_state = random_state

    def fit(self, X, y=None):
        X = as_feature_matrix(X)
        if self.n_components < 1:
            raise ValueError("n_components must be >= 1")
        if X.shape[0] <= self.n_components:
            raise ValueError("need more rows than components")
        last_err = None
        for attempt in range(self.max_reseeds + 1):
            seed = self.random_state + 7919 * attempt
            try:
                self._fit_once(X, seed)
                return self
            except DegenerateComponentError as err:
                last_err = err
        raise DegenerateComponentError(
            f"EM degenerated in all {self.max_reseeds + 1} attempts: {last_err}"
        )

    def _fit_once(self, X, seed):
        n, d = X.shape
        k = self.n_components
        km = KMeans(n_clusters=k, n_init=2, random_state=seed).fit(X)
        means = km.cluster_centers_.copy()
        weights = np.bincount(km.labels_, minlength=k).astype(float)
        weights = np.maximum(weights, 1.0)
        weights /= weights.sum()
        variances = np.empty((k, d))
        for j in range(k):
            sel = km.labels_ == j
            variances[j] = X[sel].var(axis=0) if sel.any() else X.var(axis=0)
        variances = np.maximum(variances, self.var_floor)

        trace: list[float] = []
        resp = None
        for _ in range(self.max_iter):
            log_prob = self._log_prob(X, means, variances, weights)
            ll = float(logsumexp(log_prob, axis=1).sum())
            if trace and ll < trace[-1] - _LL_SLACK * (1.0 + abs(trace[-1])):
                raise DegenerateComponentError(
                    f"log-likelihood decreased ({trace[-1]} -> {ll})"
                )
            converged = trace and abs(ll - trace[-1]) <= self.tol * (1.0 + abs(ll))
            trace.append(ll)
            resp = np.exp(log_prob - logsumexp(log_prob, axis=1, keepdims=True))
            nk = resp.sum(axis=0)
            if self.n_components > 1 and np.any(nk <= 1.0 + 1e-9):
                raise DegenerateComponentError(
                    "a component's effective count collapsed to a single point"
                )
            if converged:
                break
            weights = nk / n
            means = (resp.T @ X) / nk[:, None]
            for j in range(k):
                diff = X - means[j]
                variances[j] = (resp[:, j] @ (diff * diff)) / nk[j]
            variances = np.maximum(variances, self.var_floor)

        self.means_ = means
        self.variances_ = variances
        self.weights_ = weights
        self.log_likelihood_trace_ = trace
        self.log_likelihood_ = trace[-1]
        self.labels_ = np.argmax(resp, axis=1)
        return self

    @staticmethod
    def _log_prob(X, means, variances, weights):
        n, d = X.shape
        k = means.shape[0]
        out = np.empty((n, k))
        for j in range(k):
            diff = X - means[j]
            out[:, j] = (
                np.log(weights[j])
                - 0.5 * (d * np.log(2 * np.pi) + np.log(variances[j]).sum())
                - 0.5 * ((diff * diff) / variances[j]).sum(axis=1)
            )
        return out

    def predict(self, X):
        X = as_feature_matrix(X)
        log_prob = self._log_prob(X, self.means_, self.variances_, self.weights_)
        return np.argmax(log_prob, axis=1)


# ---------------------------------------------------------------------------
# Logistic regression
# ---------------------------------------------------------------------------

def logistic_loss_grad(wb: np.ndarray, X: np.ndarray, y: np.ndarray,
                       l2: float) -> tuple[float, np.ndarray]:
    """Mean logistic loss + (l2/2)||w||^2 (bias unregularized) and gradient.

    wb packs [w, b]. Exposed at module level so the gradient can be checked
    against finite differences.
    """
    w, b = wb[:-1], wb[-1]
    z = X @ w + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))
    p = expit(z)
    gw = X.T @ (p - y) / len(y) + l2 * w
    gb = float(np.mean(p - y))
    return loss, np.concatenate([gw, [gb]])


class LogisticRegression(BaseEstimator, ClassifierMixin):
    """L2-regularized logistic regression by gradient descent.

    Backtracking (Armijo) line search on the full objective; stops when the
    gradient's infinity norm drops below `grad_tol` or after `max_iter`
    accepted steps. The loss trace is nonincreasing by construction.
    """

    def __init__(self, l2: float = 1e-3, max_iter: int = 5000,
                 grad_tol: float = 1e-6, random_state: int = 0):
        self.l2 = l2
        self.max_iter = max_iter
        self.grad_tol = grad_tol
        self.random_state = random_state

    def fit(self, X, y):
        X = as_feature_matrix(X)
        y = check_binary_labels(y)
        if len(y) != X.shape[0]:
            raise ValueError("X and y row counts differ")
        rng = np.random.default_rng(self.random_state)
        wb = rng.normal(scale=0.01, size=X.shape[1] + 1)
        prior = min(max(float(y.mean()), 1e-6), 1.0 - 1e-6)
        wb[-1] = np.log(prior / (1.0 - prior))  # start the bias at the log-odds
        loss, grad = logistic_loss_grad(wb, X, y, self.l2)
        trace = [loss]
        step = 1.0
        for _ in range(self.max_iter):
            if np.max(np.abs(grad)) < self.grad_tol:
                break
            step = min(step * 2.0, 1e4)  # allow growth after cautious steps
            g2 = float(grad @ grad)
            accepted = False
            while step >= 1e-18:
                cand = wb - step * grad
                cand_loss, cand_grad = logistic_loss_grad(cand, X, y, self.l2)
                if cand_loss <= loss - 1e-4 * step * g2:
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break  # no float step decreases the loss; we are at the optimum
            wb, loss, grad = cand, cand_loss, cand_grad
            trace.append(loss)
        self.coef_ = wb[:-1]
        self.intercept_ = float(wb[-1])
        self.loss_trace_ = trace
        self.n_iter_ = len(trace) - 1
        return self

    def decision_function(self, X):
        X = as_feature_matrix(X)
        if X.shape[1] != len(self.coef_):
            raise ValueError(
                f"X has {X.shape[1]} features, model expects {len(self.coef_)}"
            )
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        p = expit(self.decision_function(X))
        return np.stack([1.0 - p, p], axis=1)

    def predict(self, X):
        return (self.decision_function(X) >= 0.0).astype(int)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

@dataclass
class BCubedScores:
    precision: float
    recall: float
    f1: float


@dataclass
class ClusteringResult:
    assignments: dict[str, int]
    k: int
    objective: float  # inertia (k-means) or log-likelihood (GMM)
    seed: int
    trace: list[float] = field(default_factory=list)


def _harmonic(p: float, r: float) -> float:
    return 0.0 if p <= 0 or r <= 0 else 2.0 * p * r / (p + r)


def bcubed(assignments: dict[str, int], labels: dict[str, str]) -> BCubedScores:
    """Item-averaged B-Cubed precision/recall (each item counts itself)."""
    if set(assignments) != set(labels):
        raise ValueError("assignments and labels cover different documents")
    items = list(assignments)
    n = len(items)
    cluster_sizes: dict[int, int] = {}
    label_sizes: dict[str, int] = {}
    joint: dict[tuple[int, str], int] = {}
    for it in items:
        c, l = assignments[it], labels[it]
        cluster_sizes[c] = cluster_sizes.get(c, 0) + 1
        label_sizes[l] = label_sizes.get(l, 0) + 1
        joint[(c, l)] = joint.get((c, l), 0) + 1
    precision = sum(cnt * cnt / cluster_sizes[c] for (c, _), cnt in joint.items()) / n
    recall = sum(cnt * cnt / label_sizes[l] for (_, l), cnt in joint.items()) / n
    return BCubedScores(precision=precision, recall=recall,
                        f1=_harmonic(precision, recall))


def random_baseline_bcubed(labels: dict[str, str], k: int, seed: int = 0,
                           trials: int = 100) -> BCubedScores:
    """Mean B-Cubed of uniformly random assignments into k clusters.

    Precision and recall are averaged over trials; f1 is their harmonic mean
    so the BCubedScores invariant holds.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    items = list(labels)
    ps, rs = [], []
    for _ in range(trials):
        assign = {it: int(c) for it, c in zip(items, rng.integers(0, k, size=len(items)))}
        s = bcubed(assign, labels)
        ps.append(s.precision)
        rs.append(s.recall)
    p, r = float(np.mean(ps)), float(np.mean(rs))
    return BCubedScores(precision=p, recall=r, f1=_harmonic(p, r))


def cluster_kmeans(matrix: FeatureMatrix, k: int, seed: int = 0) -> ClusteringResult:
    km = KMeans(n_clusters=k, random_state=seed).fit(matrix.values)
    return ClusteringResult(
        assignments={d: int(c) for d, c in zip(matrix.doc_ids, km.labels_)},
        k=k, objective=km.inertia_, seed=seed, trace=km.inertia_trace_,
    )


def cluster_gmm(matrix: FeatureMatrix, k: int, seed: int = 0) -> ClusteringResult:
    gm = DiagonalGaussianMixture(n_components=k, random_state=seed).fit(matrix.values)
    return ClusteringResult(
        assignments={d: int(c) for d, c in zip(matrix.doc_ids, gm.labels_)},
        k=k, objective=gm.log_likelihood_, seed=seed,
        trace=gm.log_likelihood_trace_,
    )


def train_test_split(ids: list[str], labels: list[str], test_fraction: float,
                     seed: int = 0) -> tuple[list[str], list[str]]:
    """Seeded stratified split; disjoint and exhaustive by construction."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    if len(ids) != len(labels):
        raise ValueError("ids and labels must align")
    by_label: dict[str, list[str]] = {}
    for i, l in zip(ids, labels):
        by_label.setdefault(l, []).append(i)
    for l, members in by_label.items():
        if len(members) < 2:
            raise ValueError(f"class {l!r} has fewer than 2 members")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for l in sorted(by_label):
        members = list(by_label[l])
        perm = rng.permutation(len(members))
        n_test = int(round(test_fraction * len(members)))
        test_idx = set(perm[:n_test].tolist())
        for j, m in enumerate(members):
            (test if j in test_idx else train).append(m)
    return train, test


def accuracy(predicted, gold) -> float:
    p = np.asarray(predicted)
    g = np.asarray(gold)
    if p.shape != g.shape:
        raise ValueError("predicted and gold lengths differ")
    return float(np.mean(p == g))
