"""Topological signatures of text documents in word-embedding space.

Documents become point clouds of word vectors; Vietoris-Rips persistence
diagrams summarize each cloud's geometry; stable fixed-length signature
vectors make the diagrams usable as features next to tf-idf and averaged
word vectors, with clustering and sentiment-classification evaluation on
top.
"""

__version__ = "0.1.0"

from .embeddings import (Document, EmbeddingTable, PointCloud, load_corpus,
                         load_embeddings, save_corpus, save_embeddings,
                         to_point_cloud, tokenize)
from .errors import (BudgetExceededError, ConfigError, DataError,
                     DegenerateComponentError, EmptyCloudError,
                     FiltrationError, TopotextError,
                     UnsupportedDimensionError)
from .features import (FeatureMatrix, TfidfFeaturizer, assemble, aw2v,
                       read_feature_csv, sentence_aw2v_cloud,
                       standardize_columns, write_feature_csv)
from .learn_eval import (BCubedScores, ClusteringResult,
                         DiagonalGaussianMixture, KMeans, LogisticRegression,
                         accuracy, bcubed, cluster_gmm, cluster_kmeans,
                         logistic_loss_grad, random_baseline_bcubed,
                         train_test_split)
from .metrics import (DistanceMatrix, angular, bottleneck, distance_matrix,
                      euclidean, gh_upper_bound, hausdorff)
from .persistence import (Filtration, PersistenceDiagram, RipsPersistence,
                          SamplingPlan, build_rips, compute_persistence,
                          diagram_for_document, downsample, enclosing_radius,
                          read_diagram_csv, write_diagram_csv)
from .signature import (Signature, SignatureVectorizer, ph_embedding,
                        vectorize, write_signature_csv)

__all__ = [
    "__version__",
    "Document", "EmbeddingTable", "PointCloud", "load_corpus",
    "load_embeddings", "save_corpus", "save_embeddings", "to_point_cloud",
    "tokenize",
    "TopotextError", "EmptyCloudError", "BudgetExceededError",
    "UnsupportedDimensionError", "FiltrationError", "DegenerateComponentError",
    "ConfigError", "DataError",
    "DistanceMatrix", "euclidean", "angular", "distance_matrix", "hausdorff",
    "gh_upper_bound", "bottleneck",
    "Filtration", "PersistenceDiagram", "RipsPersistence", "SamplingPlan",
    "build_rips", "compute_persistence", "diagram_for_document", "downsample",
    "enclosing_radius", "read_diagram_csv", "write_diagram_csv",
    "Signature", "SignatureVectorizer", "vectorize", "ph_embedding",
    "write_signature_csv",
    "FeatureMatrix", "TfidfFeaturizer", "assemble", "aw2v",
    "sentence_aw2v_cloud", "standardize_columns", "read_feature_csv",
    "write_feature_csv",
    "KMeans", "DiagonalGaussianMixture", "LogisticRegression",
    "BCubedScores", "ClusteringResult", "bcubed", "random_baseline_bcubed",
    "cluster_kmeans", "cluster_gmm", "train_test_split", "accuracy",
    "logistic_loss_grad",
]
