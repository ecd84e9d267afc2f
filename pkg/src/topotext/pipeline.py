"""End-to-end pipeline: corpus in, diagrams/features/reports out.

Each stage reads the previous stage's artifacts from disk, so stages can be
rerun independently; diagram CSVs are cached under a hash of the fields that
determine them and are never recomputed on a rerun with the same config.
Documents that yield no point cloud (or blow the simplex budget) are
excluded from every feature block, keeping method comparisons paired.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import PipelineConfig, config_hash, diagram_hash, features_hash
from .embeddings import (Document, EmbeddingTable, load_corpus,
                         load_embeddings, to_point_cloud)
from .errors import BudgetExceededError, DataError, EmptyCloudError
from .features import (FeatureMatrix, TfidfFeaturizer, assemble, aw2v,
                       read_feature_csv, sentence_aw2v_cloud,
                       standardize_columns, write_feature_csv)
from .learn_eval import (LogisticRegression, accuracy, bcubed, cluster_gmm,
                         cluster_kmeans, random_baseline_bcubed,
                         train_test_split)
from .persistence import (SamplingPlan, diagram_for_document,
                          read_diagram_csv, write_diagram_csv)
from .signature import ph_embedding

_BLOCK_FILES = {"ph": "ph.csv", "aw2v": "aw2v.csv",
                "tfidf": "tfidf.csv", "aw2v+ph": "aw2v_ph.csv"}


def safe_name(doc_id: str) -> str:
    stem = re.sub(r"[^A-Za-z0-9._-]", "_", doc_id)[:60]
    suffix = hashlib.sha1(doc_id.encode("utf-8")).hexdigest()[:8]
    return f"{stem}-{suffix}"


def _atomic_write(path: Path, writer) -> None:
    tmp = path.with_name(path.name + ".tmp")
    writer(tmp)
    os.replace(tmp, path)


def _write_json(path: Path, obj: dict) -> None:
    _atomic_write(path, lambda p: p.write_text(
        json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8"))


def diagrams_dir(cfg: PipelineConfig) -> Path:
    return Path(cfg.cache_dir) / "diagrams" / diagram_hash(cfg)


def features_dir(cfg: PipelineConfig) -> Path:
    return Path(cfg.output_dir) / "features" / features_hash(cfg)


def reports_dir(cfg: PipelineConfig) -> Path:
    return Path(cfg.output_dir) / "reports"


def _build_cloud(doc: Document, table: EmbeddingTable, cfg: PipelineConfig):
    if cfg.cloud_mode == "sentence":
        return sentence_aw2v_cloud(doc, table, lowercase=cfg.lowercase)
    return to_point_cloud(doc, table)


def _load_inputs(cfg: PipelineConfig) -> tuple[list[Document], EmbeddingTable]:
    corpus = load_corpus(cfg.corpus, lowercase=cfg.lowercase,
                         strip_headers=cfg.strip_headers)
    table = load_embeddings(cfg.embeddings, format=cfg.embedding_format,
                            normalize=cfg.normalize_vectors)
    return corpus, table


def cmd_diagrams(cfg: PipelineConfig) -> dict:
    """Compute (or reuse) one persistence-diagram CSV per document."""
    cfg.validate()
    t_start = time.perf_counter()
    corpus, table = _load_inputs(cfg)
    out_dir = diagrams_dir(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    plan = SamplingPlan(max_points=cfg.max_points, seed=cfg.sample_seed)

    computed: list[str] = []
    cached: list[str] = []
    excluded: list[dict] = []
    per_doc: dict[str, dict] = {}
    per_doc_time: dict[str, float] = {}

    def process(doc: Document):
        path = out_dir / f"{safe_name(doc.id)}.csv"
        if path.exists():
            return doc.id, "cached", None, 0.0
        t0 = time.perf_counter()
        try:
            cloud = _build_cloud(doc, table, cfg)
        except EmptyCloudError:
            return doc.id, "empty-cloud", None, time.perf_counter() - t0
        try:
            diagram = diagram_for_document(
                cloud, plan=plan, max_dim=cfg.max_dim, metric=cfg.metric,
                threshold=cfg.threshold, budget=cfg.simplex_budget)
        except BudgetExceededError:
            return doc.id, "budget-exceeded", None, time.perf_counter() - t0
        _atomic_write(path, lambda p: write_diagram_csv(p, doc.id, diagram))
        info = {"points": min(len(cloud), cfg.max_points),
                "cloud_points": len(cloud),
                "skipped_tokens": cloud.n_skipped}
        return doc.id, "computed", info, time.perf_counter() - t0

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(process, corpus))
    else:
        results = [process(doc) for doc in corpus]

    for doc_id, status, info, dt in results:
        per_doc_time[doc_id] = round(dt, 6)
        if status == "cached":
            cached.append(doc_id)
        elif status == "computed":
            computed.append(doc_id)
            per_doc[doc_id] = info
        else:
            excluded.append({"id": doc_id, "reason": status})

    summary = {
        "config_hash": config_hash(cfg),
        "diagram_hash": diagram_hash(cfg),
        "version": __version__,
        "n_documents": len(corpus),
        "computed": sorted(computed),
        "cached": sorted(cached),
        "excluded": sorted(excluded, key=lambda e: e["id"]),
        "per_doc": {k: per_doc[k] for k in sorted(per_doc)},
        "timing": {"total_s": round(time.perf_counter() - t_start, 6),
                   "per_doc_s": per_doc_time},
    }
    _write_json(out_dir / "summary.json", summary)
    return summary


def _read_exclusions(cfg: PipelineConfig) -> set[str]:
    summary_path = diagrams_dir(cfg) / "summary.json"
    if not summary_path.exists():
        raise DataError(
            f"no diagram cache for this config at {summary_path.parent}; "
            f"run the 'diagrams' command first"
        )
    summary = json.loads(summary_path.read_text(encoding="utf-8"))
    return {e["id"] for e in summary["excluded"]}


def cmd_features(cfg: PipelineConfig) -> dict:
    """Write one aligned feature CSV per requested block."""
    cfg.validate()
    t_start = time.perf_counter()
    corpus, table = _load_inputs(cfg)
    out_dir = features_dir(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)

    needs_ph = any(b in ("ph", "aw2v+ph") for b in cfg.blocks)
    excluded: set[str] = set()
    if needs_ph:
        excluded = _read_exclusions(cfg)
    docs = [d for d in corpus if d.id not in excluded]
    if not docs:
        raise DataError("all documents were excluded; nothing to featurize")
    ids = [d.id for d in docs]
    labels = [d.label for d in docs]

    blocks: dict[str, np.ndarray] = {}
    if needs_ph:
        dg_dir = diagrams_dir(cfg)
        rows = []
        for doc in docs:
            path = dg_dir / f"{safe_name(doc.id)}.csv"
            if not path.exists():
                raise DataError(
                    f"diagram for document {doc.id!r} missing from cache; "
                    f"run the 'diagrams' command first"
                )
            _, diagram = read_diagram_csv(path)
            rows.append(ph_embedding(diagram, cfg.length_h0, cfg.length_h1))
        blocks["ph"] = np.array(rows)
    if any(b in ("aw2v", "aw2v+ph") for b in cfg.blocks):
        blocks["aw2v"] = np.array([aw2v(d, table) for d in docs])
    if "tfidf" in cfg.blocks:
        tf = TfidfFeaturizer(min_df=cfg.min_df).fit(docs)
        blocks["tfidf"] = np.asarray(tf.transform(docs).todense())

    written = {}
    for block in cfg.blocks:
        if block == "aw2v+ph":
            matrix = assemble([("aw2v", blocks["aw2v"]), ("ph", blocks["ph"])],
                              doc_ids=ids, labels=labels, standardize=False)
        else:
            matrix = assemble([(block, blocks[block])], doc_ids=ids,
                              labels=labels, standardize=False)
        path = out_dir / _BLOCK_FILES[block]
        _atomic_write(path, lambda p, m=matrix: write_feature_csv(p, m))
        written[block] = str(path)

    summary = {
        "config_hash": config_hash(cfg),
        "version": __version__,
        "n_documents": len(ids),
        "excluded": sorted(excluded),
        "blocks": written,
        "timing": {"total_s": round(time.perf_counter() - t_start, 6)},
    }
    _write_json(out_dir / "summary.json", summary)
    return summary


def _load_block(cfg: PipelineConfig, block: str) -> FeatureMatrix:
    path = features_dir(cfg) / _BLOCK_FILES[block]
    if not path.exists():
        raise DataError(f"feature CSV {path} missing; run the 'features' command first")
    matrix = read_feature_csv(path)
    if cfg.standardize:
        matrix = FeatureMatrix(doc_ids=matrix.doc_ids, columns=matrix.columns,
                               values=standardize_columns(matrix.values),
                               labels=matrix.labels)
    return matrix


def _require_labels(matrix: FeatureMatrix, what: str) -> dict[str, str]:
    if matrix.labels is None or any(l is None for l in matrix.labels):
        raise DataError(f"{what} requires labels on every document")
    return dict(zip(matrix.doc_ids, matrix.labels))


def cmd_cluster(cfg: PipelineConfig, sanity_gold: bool = False) -> dict:
    """K-means and GMM B-Cubed scores per feature block, plus a random baseline."""
    cfg.validate()
    t_start = time.perf_counter()
    matrices = {b: _load_block(cfg, b) for b in cfg.blocks}
    first = next(iter(matrices.values()))
    for b, m in matrices.items():
        if m.doc_ids != first.doc_ids:
            raise DataError(f"feature block {b!r} is not aligned with the others")
    labels = _require_labels(first, "clustering evaluation")
    classes = sorted(set(labels.values()))
    k = cfg.n_clusters or len(classes)

    if sanity_gold:
        onehot = np.array([[1.0 if labels[d] == c else 0.0 for c in classes]
                           for d in first.doc_ids])
        matrices["gold"] = FeatureMatrix(
            doc_ids=list(first.doc_ids),
            columns=[f"gold_{c}" for c in classes],
            values=onehot, labels=list(first.labels))

    results = []
    for block, matrix in matrices.items():
        for algo, runner in (("kmeans", cluster_kmeans), ("gmm", cluster_gmm)):
            res = runner(matrix, k, seed=cfg.seed)
            scores = bcubed(res.assignments, labels)
            results.append({
                "block": block, "algorithm": algo,
                "precision": round(scores.precision, 9),
                "recall": round(scores.recall, 9),
                "f1": round(scores.f1, 9),
                "objective": round(res.objective, 6),
            })
    baseline = random_baseline_bcubed(labels, k, seed=cfg.seed,
                                      trials=cfg.baseline_trials)
    report = {
        "task": "cluster",
        "method": "bcubed",
        "config_hash": config_hash(cfg),
        "version": __version__,
        "seed": cfg.seed,
        "k": k,
        "n_documents": len(first.doc_ids),
        "results": results,
        "random_baseline": {
            "precision": round(baseline.precision, 9),
            "recall": round(baseline.recall, 9),
            "f1": round(baseline.f1, 9),
            "trials": cfg.baseline_trials,
        },
        "timing": {"total_s": round(time.perf_counter() - t_start, 6)},
    }
    rep_dir = reports_dir(cfg)
    rep_dir.mkdir(parents=True, exist_ok=True)
    _write_json(rep_dir / f"cluster_{config_hash(cfg)}.json", report)
    _atomic_write(rep_dir / f"cluster_{config_hash(cfg)}.txt",
                  lambda p: p.write_text(_cluster_table(report), encoding="utf-8"))
    return report


def _cluster_table(report: dict) -> str:
    lines = [f"{'block':<10} {'algorithm':<9} {'precision':>9} {'recall':>9} {'f1':>9}"]
    for row in report["results"]:
        lines.append(f"{row['block']:<10} {row['algorithm']:<9} "
                     f"{row['precision']:>9.4f} {row['recall']:>9.4f} {row['f1']:>9.4f}")
    rb = report["random_baseline"]
    lines.append(f"{'random':<10} {'baseline':<9} "
                 f"{rb['precision']:>9.4f} {rb['recall']:>9.4f} {rb['f1']:>9.4f}")
    return "\n".join(lines) + "\n"


def cmd_classify(cfg: PipelineConfig) -> dict:
    """Logistic-regression test accuracy per block on a stratified split."""
    cfg.validate()
    t_start = time.perf_counter()
    matrices = {b: _load_block(cfg, b) for b in cfg.blocks}
    first = next(iter(matrices.values()))
    labels = _require_labels(first, "classification")
    classes = sorted(set(labels.values()))
    if len(classes) != 2:
        raise DataError(f"binary classification needs exactly 2 classes, got {classes}")
    y_of = {d: classes.index(l) for d, l in labels.items()}

    train_ids, test_ids = train_test_split(
        first.doc_ids, [labels[d] for d in first.doc_ids],
        cfg.test_fraction, seed=cfg.seed)
    sub_train, val_ids = train_test_split(
        train_ids, [labels[d] for d in train_ids],
        cfg.test_fraction, seed=cfg.seed + 1)

    results = []
    for block, matrix in matrices.items():
        def xy(ids, matrix=matrix):
            return matrix.select(ids).values, np.array([y_of[d] for d in ids])

        x_sub, y_sub = xy(sub_train)
        x_val, y_val = xy(val_ids)
        x_train, y_train_blk = xy(train_ids)
        x_test, y_test_blk = xy(test_ids)
        best = None
        for lam in sorted(cfg.lambda_grid):
            model = LogisticRegression(l2=lam, random_state=cfg.seed)
            model.fit(x_sub, y_sub)
            val_acc = accuracy(model.predict(x_val), y_val)
            if best is None or val_acc > best[0]:
                best = (val_acc, lam)
        _, lam = best
        model = LogisticRegression(l2=lam, random_state=cfg.seed)
        model.fit(x_train, y_train_blk)
        test_acc = accuracy(model.predict(x_test), y_test_blk)
        results.append({
            "block": block, "model": "logreg", "lambda": lam,
            "val_accuracy": round(best[0], 9),
            "test_accuracy": round(test_acc, 9),
        })

    y_train = np.array([y_of[d] for d in train_ids])
    majority = int(np.bincount(y_train).argmax())
    y_test = np.array([y_of[d] for d in test_ids])
    majority_acc = accuracy(np.full(len(y_test), majority), y_test)

    report = {
        "task": "classify",
        "method": "logreg",
        "config_hash": config_hash(cfg),
        "version": __version__,
        "seed": cfg.seed,
        "classes": classes,
        "n_train": len(train_ids),
        "n_test": len(test_ids),
        "results": results,
        "majority_baseline": {"class": classes[majority],
                              "test_accuracy": round(majority_acc, 9)},
        "timing": {"total_s": round(time.perf_counter() - t_start, 6)},
    }
    rep_dir = reports_dir(cfg)
    rep_dir.mkdir(parents=True, exist_ok=True)
    _write_json(rep_dir / f"classify_{config_hash(cfg)}.json", report)
    _atomic_write(rep_dir / f"classify_{config_hash(cfg)}.txt",
                  lambda p: p.write_text(_classify_table(report), encoding="utf-8"))
    return report


def _classify_table(report: dict) -> str:
    lines = [f"{'block':<10} {'model':<8} {'lambda':>8} {'accuracy':>9}"]
    for row in report["results"]:
        lines.append(f"{row['block']:<10} {row['model']:<8} "
                     f"{row['lambda']:>8.4g} {row['test_accuracy']:>9.4f}")
    mb = report["majority_baseline"]
    lines.append(f"{'majority':<10} {'baseline':<8} {'':>8} {mb['test_accuracy']:>9.4f}")
    return "\n".join(lines) + "\n"
