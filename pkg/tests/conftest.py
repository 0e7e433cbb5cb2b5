import numpy as np
import pytest

from evonav.datasets import SyntheticCorpusConfig, synthetic_topic_corpus
from evonav.mapping import KnowledgeMap, Projection, build_knowledge_map
from evonav.text import Vocabulary, default_stop_words

FIXTURE_SEED = 20240 + 1


@pytest.fixture(scope="session")
def stop_words():
    return default_stop_words()


@pytest.fixture(scope="session")
def synthetic_corpus():
    """The standard 200-doc / 10-topic corpus used across the suite."""
    return synthetic_topic_corpus(SyntheticCorpusConfig(seed=FIXTURE_SEED))


@pytest.fixture(scope="session")
def knowledge_map(synthetic_corpus, stop_words):
    docs, _ = synthetic_corpus
    return build_knowledge_map(docs, stop_words, cluster_count=10, seed=FIXTURE_SEED)


def toy_map(coords, clusters=None, doc_ids=None) -> KnowledgeMap:
    """Hand-built map for geometry tests: no real projection behind it."""
    coords = np.asarray(coords, dtype=float)
    n, dim = coords.shape
    if doc_ids is None:
        doc_ids = [f"doc{i}" for i in range(n)]
    if clusters is None:
        clusters = np.ones(n, dtype=int)
    else:
        clusters = np.asarray(clusters, dtype=int)
    k = int(clusters.max())
    centroids = np.vstack(
        [coords[clusters == c].mean(axis=0) if (clusters == c).any() else np.zeros(dim) for c in range(1, k + 1)]
    )
    projection = Projection(
        mean=np.zeros(dim), basis=np.eye(dim), explained_variance=np.ones(dim), target_dim=dim
    )
    vocabulary = Vocabulary(terms=[f"t{i}" for i in range(dim)], df=np.ones(dim), n_docs=n)
    return KnowledgeMap(
        doc_ids=list(doc_ids),
        titles=[f"title {d}" for d in doc_ids],
        coords=coords,
        clusters=clusters,
        centroids=centroids,
        projection=projection,
        vocabulary=vocabulary,
        config_hash="toy",
    )
