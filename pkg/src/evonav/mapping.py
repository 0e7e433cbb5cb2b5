"""Knowledge map: the corpus projected into a compact coordinate space.

tf.idf vectors are mean-centered and projected onto the top principal
axes; Euclidean distance between projected documents is the relevance
metric used everywhere else. The map also carries a k-way cluster
partition of the documents (one cluster per link-panel slot) and is
persisted as a deterministic JSON file, loadable without the corpus text.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from evonav import text as text_pipeline
from evonav.errors import (
    DegenerateInput,
    DimensionMismatch,
    EmptyCluster,
    NoCandidates,
    TooFewDocuments,
    UnknownDocument,
)
from evonav.text import RawDocument, TermVector, Vocabulary

MAP_FORMAT_VERSION = 1
KMEANS_MAX_ITERATIONS = 100


@dataclass
class Projection:
    """Mean vector plus orthonormal principal axes over the vocabulary space."""

    mean: np.ndarray                # (n_features,)
    basis: np.ndarray               # (target_dim, n_features), orthonormal rows
    explained_variance: np.ndarray  # (target_dim,), non-increasing
    target_dim: int


def _as_matrix(vectors, n_features: int | None = None) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        return np.asarray(vectors, dtype=float)
    if n_features is None:
        n_features = 1 + max(
            (idx for vec in vectors for idx in vec.weights), default=-1
        )
    return text_pipeline.vectors_to_matrix(list(vectors), n_features)


def fit_pca(vectors, target_dim: int, n_features: int | None = None) -> Projection:
    """Top principal axes of the sample covariance, by descending variance.

    Accepts a dense (n_samples, n_features) array or a list of sparse
    TermVectors. Solved through SVD of the centered data; tests hold the
    result against a direct eigendecomposition of the covariance matrix.
    """
    matrix = _as_matrix(vectors, n_features)
    n_samples, width = matrix.shape
    if n_samples < 2 or len(np.unique(matrix, axis=0)) < 2:
        raise DegenerateInput("need at least 2 distinct vectors to fit a projection")
    if not 1 <= target_dim <= min(n_samples - 1, width):
        raise ValueError(
            f"target_dim {target_dim} outside [1, {min(n_samples - 1, width)}]"
        )
    mean = matrix.mean(axis=0)
    centered = matrix - mean
    _, singular, axes = np.linalg.svd(centered, full_matrices=False)
    variances = (singular**2) / (n_samples - 1)
    basis = axes[:target_dim].copy()
    # fix a reproducible sign: largest-magnitude entry of each axis positive
    for row in basis:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1.0
    return Projection(
        mean=mean,
        basis=basis,
        explained_variance=variances[:target_dim].copy(),
        target_dim=target_dim,
    )


def explained_variance_spectrum(vectors, n_features: int | None = None) -> np.ndarray:
    """All covariance eigenvalues, descending (the full PCA spectrum)."""
    matrix = _as_matrix(vectors, n_features)
    if len(matrix) < 2 or len(np.unique(matrix, axis=0)) < 2:
        raise DegenerateInput("need at least 2 distinct vectors")
    centered = matrix - matrix.mean(axis=0)
    singular = np.linalg.svd(centered, compute_uv=False)
    return (singular**2) / (len(matrix) - 1)


def estimate_intrinsic_dimensionality(
    vectors, threshold: float = 0.90, n_features: int | None = None
) -> int:
    """Smallest d whose cumulative explained-variance ratio reaches threshold."""
    spectrum = explained_variance_spectrum(vectors, n_features)
    ratios = np.cumsum(spectrum) / spectrum.sum()
    d = int(np.searchsorted(ratios, threshold - 1e-12) + 1)
    return min(d, len(spectrum))


def project(vector, projection: Projection) -> np.ndarray:
    """Map one vocabulary-space vector to its map coordinate."""
    n_features = projection.mean.shape[0]
    if isinstance(vector, TermVector):
        if any(idx >= n_features for idx in vector.weights):
            raise DimensionMismatch("vector indexes terms outside the projection")
        dense = vector.to_dense(n_features)
    else:
        dense = np.asarray(vector, dtype=float)
        if dense.shape != (n_features,):
            raise DimensionMismatch(
                f"expected length {n_features}, got {dense.shape}"
            )
    return projection.basis @ (dense - projection.mean)


def kmeans(
    points: np.ndarray, k: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded k-means. Returns (labels in 0..k-1, centroids).

    Seeding is k-means++ style (squared-distance weighted); a cluster that
    empties is re-seeded with the point farthest from its centroid, so all
    k clusters come back non-empty. Stops on stable assignment or after
    100 rounds. Fully deterministic for a given generator state.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n < k:
        raise TooFewDocuments(f"{n} documents cannot form {k} clusters")
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[rng.integers(n)]
    closest_sq = np.sum((points - centroids[0]) ** 2, axis=1)
    for j in range(1, k):
        total = closest_sq.sum()
        if total > 0:
            idx = rng.choice(n, p=closest_sq / total)
        else:
            idx = rng.integers(n)
        centroids[j] = points[idx]
        closest_sq = np.minimum(closest_sq, np.sum((points - centroids[j]) ** 2, axis=1))

    labels = np.full(n, -1)
    for _ in range(KMEANS_MAX_ITERATIONS):
        distances = np.linalg.norm(points[:, None, :] - centroids[None, :, :], axis=2)
        new_labels = np.argmin(distances, axis=1)
        for j in range(k):
            members = new_labels == j
            if members.any():
                centroids[j] = points[members].mean(axis=0)
            else:
                # steal the point currently worst-served by its centroid
                errors = distances[np.arange(n), new_labels]
                farthest = int(np.argmax(errors))
                centroids[j] = points[farthest]
                new_labels[farthest] = j
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels, centroids


@dataclass
class KnowledgeMap:
    """Projected corpus: per-document coordinates plus the cluster partition."""

    doc_ids: list[str]
    titles: list[str]
    coords: np.ndarray      # (size, dimensionality)
    clusters: np.ndarray    # (size,), ids in 1..cluster_count
    centroids: np.ndarray   # (cluster_count, dimensionality)
    projection: Projection
    vocabulary: Vocabulary
    config_hash: str = ""
    row: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.row = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}

    @property
    def size(self) -> int:
        return len(self.doc_ids)

    @property
    def dimensionality(self) -> int:
        return self.coords.shape[1]

    @property
    def cluster_count(self) -> int:
        return len(self.centroids)

    def coord_of(self, doc_id: str) -> np.ndarray:
        try:
            return self.coords[self.row[doc_id]]
        except KeyError:
            raise UnknownDocument(doc_id) from None

    def cluster_of(self, doc_id: str) -> int:
        try:
            return int(self.clusters[self.row[doc_id]])
        except KeyError:
            raise UnknownDocument(doc_id) from None

    def title_of(self, doc_id: str) -> str:
        try:
            return self.titles[self.row[doc_id]]
        except KeyError:
            raise UnknownDocument(doc_id) from None

    def cluster_members(self, cluster_id: int) -> list[str]:
        return [d for d, c in zip(self.doc_ids, self.clusters) if c == cluster_id]

    def locate(self, vector) -> tuple[np.ndarray, int]:
        """Out-of-sample placement: coordinate + nearest centroid's cluster."""
        if isinstance(vector, TermVector) and vector.is_zero:
            coord = np.zeros(self.dimensionality)
        else:
            coord = project(vector, self.projection)
        nearest = int(np.argmin(np.linalg.norm(self.centroids - coord, axis=1)))
        return coord, nearest + 1


def relevance(doc_a: str, doc_b: str, kmap: KnowledgeMap) -> float:
    """Euclidean distance between two documents' coordinates (smaller = closer)."""
    return float(np.linalg.norm(kmap.coord_of(doc_a) - kmap.coord_of(doc_b)))


def most_relevant(point: np.ndarray, kmap: KnowledgeMap, excluded: set[str] = frozenset()) -> str:
    """Nearest non-excluded document to a coordinate; ties -> smallest doc id."""
    point = np.asarray(point, dtype=float)
    distances = np.linalg.norm(kmap.coords - point, axis=1)
    best_doc = None
    best_dist = np.inf
    for i, doc_id in enumerate(kmap.doc_ids):
        if doc_id in excluded:
            continue
        d = distances[i]
        if d < best_dist or (d == best_dist and (best_doc is None or doc_id < best_doc)):
            best_dist = d
            best_doc = doc_id
    if best_doc is None:
        raise NoCandidates("every document is excluded")
    return best_doc


def random_from_cluster(
    cluster_id: int,
    kmap: KnowledgeMap,
    rng: np.random.Generator,
    excluded: set[str] = frozenset(),
) -> str:
    """Uniform draw over a cluster's non-excluded members."""
    candidates = [d for d in kmap.cluster_members(cluster_id) if d not in excluded]
    if not candidates:
        raise EmptyCluster(f"cluster {cluster_id} has no eligible documents")
    return candidates[rng.integers(len(candidates))]


def build_knowledge_map(
    corpus: list[RawDocument],
    stop_words: set[str],
    cluster_count: int,
    seed: int,
    target_dim: int | None = None,
    variance_threshold: float = 0.90,
) -> KnowledgeMap:
    """Full build: vocabulary, tf.idf, projection, coordinates, clusters.

    Zero-weight documents stay in the map at the projected corpus mean
    (the origin) but are left out of the projection fit. When target_dim
    is not given, the dimensionality is the smallest one retaining
    variance_threshold of the corpus variance.
    """
    vocabulary = text_pipeline.build_vocabulary(corpus, stop_words)
    vectors = text_pipeline.vectorize_corpus(corpus, vocabulary, stop_words)
    nonzero = [v for v in vectors if not v.is_zero]
    matrix = text_pipeline.vectors_to_matrix(nonzero, len(vocabulary))
    if target_dim is None:
        target_dim = estimate_intrinsic_dimensionality(matrix, variance_threshold)
    projection = fit_pca(matrix, target_dim)

    coords = np.zeros((len(corpus), target_dim))
    for i, vec in enumerate(vectors):
        if not vec.is_zero:
            coords[i] = project(vec, projection)

    rng = np.random.default_rng(seed)
    labels, centroids = kmeans(coords, cluster_count, rng)
    config_hash = _build_config_hash(stop_words, cluster_count, seed, target_dim, variance_threshold)
    return KnowledgeMap(
        doc_ids=[d.doc_id for d in corpus],
        titles=[d.title for d in corpus],
        coords=coords,
        clusters=labels + 1,
        centroids=centroids,
        projection=projection,
        vocabulary=vocabulary,
        config_hash=config_hash,
    )


def _build_config_hash(stop_words, cluster_count, seed, target_dim, variance_threshold) -> str:
    payload = json.dumps(
        {
            "cluster_count": cluster_count,
            "seed": seed,
            "stop_words": sorted(stop_words),
            "target_dim": target_dim,
            "variance_threshold": variance_threshold,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _floats(array) -> list:
    return [float(x) for x in np.asarray(array).ravel()]


def map_to_payload(kmap: KnowledgeMap) -> dict:
    return {
        "format_version": MAP_FORMAT_VERSION,
        "config_hash": kmap.config_hash,
        "dimensionality": kmap.dimensionality,
        "documents": [
            {
                "id": doc_id,
                "title": kmap.titles[i],
                "coord": _floats(kmap.coords[i]),
                "cluster": int(kmap.clusters[i]),
            }
            for i, doc_id in enumerate(kmap.doc_ids)
        ],
        "centroids": [_floats(c) for c in kmap.centroids],
        "projection": {
            "mean": _floats(kmap.projection.mean),
            "basis": [_floats(b) for b in kmap.projection.basis],
            "explained_variance": _floats(kmap.projection.explained_variance),
            "target_dim": kmap.projection.target_dim,
        },
        "vocabulary": {
            "terms": kmap.vocabulary.terms,
            "df": [int(x) for x in kmap.vocabulary.df],
            "n_docs": kmap.vocabulary.n_docs,
        },
    }


def save_map(kmap: KnowledgeMap, path: str | Path) -> None:
    """Serialize to canonical JSON (sorted keys, repr floats): repeat builds are byte-identical."""
    payload = json.dumps(map_to_payload(kmap), sort_keys=True, separators=(",", ":"))
    Path(path).write_text(payload, encoding="utf-8")


def load_map(path: str | Path) -> KnowledgeMap:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if obj.get("format_version") != MAP_FORMAT_VERSION:
        raise ValueError(f"unsupported map format: {obj.get('format_version')}")
    proj = obj["projection"]
    projection = Projection(
        mean=np.array(proj["mean"], dtype=float),
        basis=np.array(proj["basis"], dtype=float),
        explained_variance=np.array(proj["explained_variance"], dtype=float),
        target_dim=proj["target_dim"],
    )
    vocab = Vocabulary(
        terms=list(obj["vocabulary"]["terms"]),
        df=np.array(obj["vocabulary"]["df"], dtype=float),
        n_docs=obj["vocabulary"]["n_docs"],
    )
    docs = obj["documents"]
    return KnowledgeMap(
        doc_ids=[d["id"] for d in docs],
        titles=[d["title"] for d in docs],
        coords=np.array([d["coord"] for d in docs], dtype=float),
        clusters=np.array([d["cluster"] for d in docs], dtype=int),
        centroids=np.array(obj["centroids"], dtype=float),
        projection=projection,
        vocabulary=vocab,
        config_hash=obj["config_hash"],
    )
