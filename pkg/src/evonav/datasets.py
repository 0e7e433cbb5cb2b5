"""Deterministic synthetic corpora for tests, demos and benchmarks.

Documents are bags of pseudo-words. Each topic samples from its own
60-term vocabulary (plus a corpus-wide background pool): a private block,
and the 40 words of a shared topical pool lying nearest to the topic's
position in a low-dimensional latent space. Nearby topics therefore share
vocabulary in proportion to their latent proximity, which gives
inter-document distances a smooth low-rank structure that a compressed
projection can keep, while the private blocks keep topics separable for
clustering. Generated words are fixed points of the stemmer, so the
pipeline's vocabulary equals the generator's.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from evonav.porter import stem
from evonav.text import RawDocument, default_stop_words

_CONSONANTS = "bcdfgklmnprstvz"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class SyntheticCorpusConfig:
    n_topics: int = 10
    docs_per_topic: int = 20
    topic_unique_terms: int = 20   # per-topic private words
    topic_shared_terms: int = 40   # nearest topical-pool words per topic
    topical_pool_size: int = 120   # latent-positioned shared pool
    latent_dim: int = 3            # dimensionality of the topic geometry
    shared_vocab_size: int = 60    # corpus-wide background pool
    shared_fraction: float = 0.2   # background tokens per document
    min_doc_tokens: int = 80
    max_doc_tokens: int = 150
    seed: int = 0

    @property
    def topic_vocab_size(self) -> int:
        return self.topic_unique_terms + self.topic_shared_terms


def _make_words(count: int, rng: np.random.Generator, taken: set[str], stop_words: set[str]) -> list[str]:
    words: list[str] = []
    while len(words) < count:
        syllables = rng.integers(2, 4)
        candidate = "".join(
            _CONSONANTS[rng.integers(len(_CONSONANTS))] + _VOWELS[rng.integers(len(_VOWELS))]
            for _ in range(syllables)
        )
        word = stem(candidate)
        if stem(word) != word:  # keep only stemmer fixed points
            continue
        if len(word) < 3 or word in taken or word in stop_words:
            continue
        taken.add(word)
        words.append(word)
    return words


def synthetic_topic_corpus(
    config: SyntheticCorpusConfig = SyntheticCorpusConfig(),
) -> tuple[list[RawDocument], dict[str, int]]:
    """Generate the corpus; returns (documents, doc_id -> topic index)."""
    rng = np.random.default_rng(config.seed)
    stop_words = default_stop_words()
    taken: set[str] = set()
    shared = _make_words(config.shared_vocab_size, rng, taken, stop_words)
    pool = _make_words(config.topical_pool_size, rng, taken, stop_words)
    word_positions = rng.normal(size=(config.topical_pool_size, config.latent_dim))
    topic_positions = rng.normal(size=(config.n_topics, config.latent_dim))
    topic_vocabs = []
    for t in range(config.n_topics):
        unique = _make_words(config.topic_unique_terms, rng, taken, stop_words)
        distances = np.linalg.norm(word_positions - topic_positions[t], axis=1)
        nearest = np.argsort(distances)[: config.topic_shared_terms]
        topic_vocabs.append(unique + [pool[i] for i in nearest])

    docs: list[RawDocument] = []
    labels: dict[str, int] = {}
    counter = 0
    for topic_index, topic_words in enumerate(topic_vocabs):
        for _ in range(config.docs_per_topic):
            length = int(rng.integers(config.min_doc_tokens, config.max_doc_tokens + 1))
            tokens = []
            for _ in range(length):
                if rng.random() < config.shared_fraction:
                    tokens.append(shared[rng.integers(len(shared))])
                else:
                    tokens.append(topic_words[rng.integers(len(topic_words))])
            doc_id = f"d{counter:03d}"
            docs.append(
                RawDocument(
                    doc_id=doc_id,
                    title=f"doc {counter:03d} {topic_words[0]}",
                    body=" ".join(tokens),
                    source_uri=f"synthetic://topic{topic_index}/{counter}",
                )
            )
            labels[doc_id] = topic_index
            counter += 1
    return docs, labels


def write_corpus_jsonl(docs: list[RawDocument], path) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(
                json.dumps(
                    {"id": doc.doc_id, "title": doc.title, "body": doc.body, "uri": doc.source_uri},
                    sort_keys=True,
                )
                + "\n"
            )
