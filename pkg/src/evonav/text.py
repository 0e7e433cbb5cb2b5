"""Text pipeline: raw documents -> normalized tf.idf term vectors.

The pipeline is deliberately plain: lowercase alphabetic tokens, a
configurable stop word list, Porter stemming, raw term counts weighted by
ln(N/df) and L2-normalized. Every stage is a pure function so per-document
work can run in any order and repeat runs are bit-identical.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from evonav.errors import EmptyCorpus
from evonav.porter import stem

_TOKEN_RE = re.compile(r"[a-z]+")


@dataclass(frozen=True)
class RawDocument:
    """One ingested document (plain text; markup stripped at ingestion)."""

    doc_id: str
    title: str
    body: str
    source_uri: str = ""


@dataclass
class Vocabulary:
    """Corpus-wide term index: sorted unique stems with document frequencies."""

    terms: list[str]
    df: np.ndarray  # per-term document frequency, aligned with terms
    n_docs: int
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def idf(self) -> np.ndarray:
        return np.log(self.n_docs / self.df)


@dataclass
class TermVector:
    """Sparse L2-normalized tf.idf vector (term index -> weight > 0)."""

    doc_id: str
    weights: dict[int, float]

    @property
    def is_zero(self) -> bool:
        return not self.weights

    def to_dense(self, size: int) -> np.ndarray:
        dense = np.zeros(size)
        for idx, w in self.weights.items():
            dense[idx] = w
        return dense


def tokenize(body: str) -> list[str]:
    """Split text into lowercase alphabetic runs; digits and punctuation separate."""
    return _TOKEN_RE.findall(body.lower())


def filter_stop_words(tokens: list[str], stop_words: set[str]) -> list[str]:
    return [t for t in tokens if t not in stop_words]


def preprocess(text: str, stop_words: set[str]) -> list[str]:
    """tokenize -> drop stop words -> stem."""
    return [stem(t) for t in filter_stop_words(tokenize(text), stop_words)]


def default_stop_words() -> set[str]:
    """The stop list shipped with the package (versioned artifact)."""
    raw = resources.files("evonav.data").joinpath("stopwords_en.txt").read_text("utf-8")
    return _parse_stop_words(raw)


def load_stop_words(path: str | Path) -> set[str]:
    """Load a stop list file: one lowercase word per line, # comments allowed."""
    return _parse_stop_words(Path(path).read_text("utf-8"))


def _parse_stop_words(raw: str) -> set[str]:
    words = set()
    for line in raw.splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.add(word)
    return words


def document_stems(doc: RawDocument, stop_words: set[str]) -> list[str]:
    # Title and body are concatenated unweighted.
    return preprocess(doc.title + " " + doc.body, stop_words)


def build_vocabulary(corpus: list[RawDocument], stop_words: set[str]) -> Vocabulary:
    """Collect all distinct stems and count the documents containing each."""
    if not corpus:
        raise EmptyCorpus("corpus has zero documents")
    df: dict[str, int] = {}
    for doc in corpus:
        for term in set(document_stems(doc, stop_words)):
            df[term] = df.get(term, 0) + 1
    terms = sorted(df)
    return Vocabulary(terms=terms, df=np.array([df[t] for t in terms], dtype=float), n_docs=len(corpus))


def vectorize(doc: RawDocument, vocabulary: Vocabulary, stop_words: set[str]) -> TermVector:
    """tf.idf weights: raw in-document stem count x ln(N/df), L2-normalized.

    Terms present in every document get weight 0 (ln 1), and zero weights
    are dropped from the sparse map. A document whose weights are all zero
    comes back with an empty map (is_zero), which callers keep in the
    corpus but exclude from projection fitting.
    """
    counts: dict[int, int] = {}
    for term in document_stems(doc, stop_words):
        idx = vocabulary.index.get(term)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    weights = {}
    for idx, tf in counts.items():
        w = tf * math.log(vocabulary.n_docs / vocabulary.df[idx])
        if w > 0.0:
            weights[idx] = w
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm > 0.0:
        weights = {idx: w / norm for idx, w in weights.items()}
    return TermVector(doc_id=doc.doc_id, weights=weights)


def vectorize_corpus(
    corpus: list[RawDocument], vocabulary: Vocabulary, stop_words: set[str]
) -> list[TermVector]:
    return [vectorize(doc, vocabulary, stop_words) for doc in corpus]


def vectors_to_matrix(vectors: list[TermVector], size: int) -> np.ndarray:
    """Stack sparse vectors into a dense (n_docs, vocab) matrix."""
    matrix = np.zeros((len(vectors), size))
    for row, vec in enumerate(vectors):
        for idx, w in vec.weights.items():
            matrix[row, idx] = w
    return matrix


def load_corpus(path: str | Path) -> list[RawDocument]:
    """Read a corpus from a JSON-lines file or a directory of UTF-8 text files.

    JSONL objects carry {id, title, body, uri}; for a directory, each file
    becomes one document with the file name as id and title.
    """
    path = Path(path)
    if path.is_dir():
        docs = []
        for file in sorted(p for p in path.iterdir() if p.is_file()):
            docs.append(
                RawDocument(
                    doc_id=file.stem,
                    title=file.stem,
                    body=file.read_text("utf-8"),
                    source_uri=file.as_uri(),
                )
            )
    else:
        docs = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                docs.append(
                    RawDocument(
                        doc_id=str(obj["id"]),
                        title=obj.get("title", ""),
                        body=obj["body"],
                        source_uri=obj.get("uri", ""),
                    )
                )
    if not docs:
        raise EmptyCorpus(f"no documents found at {path}")
    seen = set()
    for doc in docs:
        if doc.doc_id in seen:
            raise ValueError(f"duplicate document id: {doc.doc_id}")
        seen.add(doc.doc_id)
        if not doc.body.strip():
            raise ValueError(f"document {doc.doc_id} has an empty body")
    return docs
