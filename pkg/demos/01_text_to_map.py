"""From raw text to a knowledge map.

Walks the whole data path: tokenize -> stop words -> stems -> tf.idf
vectors -> principal axes -> per-document coordinates -> clusters.
Run from the repo root: python demos/01_text_to_map.py
"""

import numpy as np

from evonav.datasets import SyntheticCorpusConfig, synthetic_topic_corpus
from evonav.mapping import build_knowledge_map, estimate_intrinsic_dimensionality, relevance
from evonav.porter import stem
from evonav.text import (
    build_vocabulary,
    default_stop_words,
    tokenize,
    vectorize,
    vectorize_corpus,
    vectors_to_matrix,
)

# -- the text pipeline on a sentence ------------------------------------------

sentence = "Navigational interfaces adapt: the system learns what operators need!"
tokens = tokenize(sentence)
print("tokens:       ", tokens)

stop_words = default_stop_words()
kept = [t for t in tokens if t not in stop_words]
print("after stops:  ", kept)
print("stems:        ", [stem(t) for t in kept])

# -- tf.idf over a 200-document corpus -----------------------------------------

docs, topic_of = synthetic_topic_corpus(SyntheticCorpusConfig(seed=20241))
vocabulary = build_vocabulary(docs, stop_words)
print(f"\ncorpus: {len(docs)} documents, vocabulary of {len(vocabulary)} stems")

vec = vectorize(docs[0], vocabulary, stop_words)
top = sorted(vec.weights.items(), key=lambda kv: -kv[1])[:5]
print("heaviest terms of", docs[0].doc_id + ":")
for idx, weight in top:
    print(f"   {vocabulary.terms[idx]:<12} {weight:.3f}")

# -- how many dimensions does the corpus really have? ---------------------------

matrix = vectors_to_matrix(vectorize_corpus(docs, vocabulary, stop_words), len(vocabulary))
for threshold in (0.5, 0.75, 0.90):
    d = estimate_intrinsic_dimensionality(matrix, threshold)
    print(f"dimensions holding {threshold:.0%} of variance: {d}")

# -- build the map and poke at it ------------------------------------------------

kmap = build_knowledge_map(docs, stop_words, cluster_count=10, seed=20241)
print(f"\nmap: {kmap.size} documents in {kmap.dimensionality} dimensions, "
      f"{kmap.cluster_count} clusters")
sizes = {c: len(kmap.cluster_members(c)) for c in range(1, 11)}
print("cluster sizes:", sizes)

# Euclidean distance on the map is the relevance metric: documents of one
# topic should sit far closer together than documents of different topics.
same = relevance("d000", "d001", kmap)     # both topic 0
different = relevance("d000", "d199", kmap)  # topics 0 and 9
print(f"\ndistance within a topic:  {same:.3f}")
print(f"distance across topics:   {different:.3f}")
assert same < different
