"""evonav: adaptive navigation over a document corpus.

Text goes in one end (tokenize, stop-filter, stem, tf.idf), comes out as
coordinates on a compressed knowledge map, and a per-user evolutionary
link panel plus cross-user suggestions adapt to clicks and favorites on
top of it.
"""

from evonav.datasets import SyntheticCorpusConfig, synthetic_topic_corpus
from evonav.engine import EngineConfig, NavSet, SetEntry
from evonav.mapping import (
    KnowledgeMap,
    Projection,
    build_knowledge_map,
    estimate_intrinsic_dimensionality,
    fit_pca,
    load_map,
    most_relevant,
    project,
    relevance,
    save_map,
)
from evonav.text import RawDocument, TermVector, Vocabulary, build_vocabulary, tokenize, vectorize

__version__ = "0.1.0"

__all__ = [
    "EngineConfig",
    "KnowledgeMap",
    "NavSet",
    "Projection",
    "RawDocument",
    "SetEntry",
    "SyntheticCorpusConfig",
    "TermVector",
    "Vocabulary",
    "build_knowledge_map",
    "build_vocabulary",
    "estimate_intrinsic_dimensionality",
    "fit_pca",
    "load_map",
    "most_relevant",
    "project",
    "relevance",
    "save_map",
    "synthetic_topic_corpus",
    "tokenize",
    "vectorize",
]
