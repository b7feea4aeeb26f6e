"""Word, word n-gram and character n-gram vectorization of text cells.

Feature weights start as raw occurrence counts. The optional transforms are
``ln(1 + f)`` (TF) and ``f * ln(N / df)`` (IDF), natural log.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .arff import AttributeSpec, Dataset, Instance

DEFAULT_DELIMITERS = " \t\n.,;:'\"()?!"

WORD = "word"
WORD_NGRAM = "word_ngram"
CHAR_NGRAM = "char_ngram"


@dataclass(frozen=True)
class TokenizerSpec:
    kind: str = WORD
    min_n: int = 1
    max_n: int = 1
    delimiters: str = DEFAULT_DELIMITERS

    def __post_init__(self):
        if self.kind not in (WORD, WORD_NGRAM, CHAR_NGRAM):
            raise ValueError(f"unknown tokenizer {self.kind!r}")
        if not 1 <= self.min_n <= self.max_n:
            raise ValueError(f"need 1 <= min <= max, got min={self.min_n} max={self.max_n}")

    @classmethod
    def word(cls, delimiters: str = DEFAULT_DELIMITERS) -> "TokenizerSpec":
        return cls(WORD, 1, 1, delimiters)

    @classmethod
    def word_ngram(cls, min_n: int, max_n: int, delimiters: str = DEFAULT_DELIMITERS) -> "TokenizerSpec":
        return cls(WORD_NGRAM, min_n, max_n, delimiters)

    @classmethod
    def char_ngram(cls, min_n: int, max_n: int) -> "TokenizerSpec":
        return cls(CHAR_NGRAM, min_n, max_n)

    def tokenize(self, text: str) -> list[str]:
        if self.kind == WORD:
            return word_tokenize(text, self.delimiters)
        if self.kind == WORD_NGRAM:
            return word_ngrams(text, self.min_n, self.max_n, self.delimiters)
        return char_ngrams(text, self.min_n, self.max_n)

    def describe(self) -> str:
        if self.kind == WORD:
            return "word"
        name = "word-ngram" if self.kind == WORD_NGRAM else "char"
        return f"{name}({self.min_n},{self.max_n})"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "min_n": self.min_n, "max_n": self.max_n, "delimiters": self.delimiters}

    @classmethod
    def from_dict(cls, d: dict) -> "TokenizerSpec":
        return cls(d["kind"], d["min_n"], d["max_n"], d["delimiters"])


@dataclass(frozen=True)
class VectorizerOptions:
    tf_transform: bool = False
    idf_transform: bool = False
    output_counts: bool = True
    lowercase: bool = True
    min_doc_freq: int = 1

    def __post_init__(self):
        if self.min_doc_freq < 1:
            raise ValueError("min_doc_freq must be >= 1")

    def to_dict(self) -> dict:
        return {
            "tf_transform": self.tf_transform,
            "idf_transform": self.idf_transform,
            "output_counts": self.output_counts,
            "lowercase": self.lowercase,
            "min_doc_freq": self.min_doc_freq,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VectorizerOptions":
        return cls(**d)


class SparseVector:
    """Sorted ``(index, weight)`` pairs with no stored zeros."""

    __slots__ = ("indices", "weights")

    def __init__(self, indices=(), weights=()):
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        w = np.asarray(weights, dtype=float).reshape(-1)
        if idx.shape != w.shape:
            raise ValueError("indices and weights differ in length")
        if idx.size:
            order = np.argsort(idx, kind="stable")
            idx, w = idx[order], w[order]
            if np.any(np.diff(idx) == 0):
                raise ValueError("duplicate index in sparse vector")
            keep = w != 0
            idx, w = idx[keep], w[keep]
        self.indices = idx
        self.weights = w

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "SparseVector":
        pairs = list(pairs)
        return cls([i for i, _ in pairs], [w for _, w in pairs])

    @classmethod
    def from_dense(cls, values: Sequence[float]) -> "SparseVector":
        v = np.asarray(values, dtype=float)
        nz = np.flatnonzero(v)
        return cls(nz, v[nz])

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return zip(self.indices.tolist(), self.weights.tolist())

    def __len__(self):
        return int(self.indices.size)

    def pairs(self) -> list[tuple[int, float]]:
        return list(self)

    def to_dense(self, width: int) -> np.ndarray:
        out = np.zeros(width)
        out[self.indices] = self.weights
        return out

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return np.array_equal(self.indices, other.indices) and np.array_equal(
            self.weights, other.weights, equal_nan=True
        )

    def __repr__(self):
        return f"SparseVector({self.pairs()!r})"


def rows_to_csr(vectors: Sequence[SparseVector], width: int) -> sp.csr_matrix:
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(v) for v in vectors])
    if vectors:
        indices = np.concatenate([v.indices for v in vectors])
        data = np.concatenate([v.weights for v in vectors])
    else:
        indices = np.zeros(0, dtype=np.int64)
        data = np.zeros(0)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), width))


def word_tokenize(text: str, delimiters: str = DEFAULT_DELIMITERS) -> list[str]:
    delims = set(delimiters)
    out, cur = [], []
    for ch in text:
        if ch in delims:
            if cur:
                out.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur))
    return out


def char_ngrams(text: str, min_n: int, max_n: int) -> list[str]:
    if not 1 <= min_n <= max_n:
        raise ValueError(f"need 1 <= min <= max, got min={min_n} max={max_n}")
    out = []
    for n in range(min_n, max_n + 1):
        out.extend(text[i:i + n] for i in range(len(text) - n + 1))
    return out


def word_ngrams(text: str, min_n: int, max_n: int, delimiters: str = DEFAULT_DELIMITERS) -> list[str]:
    if not 1 <= min_n <= max_n:
        raise ValueError(f"need 1 <= min <= max, got min={min_n} max={max_n}")
    words = word_tokenize(text, delimiters)
    out = []
    for n in range(min_n, max_n + 1):
        out.extend(" ".join(words[i:i + n]) for i in range(len(words) - n + 1))
    return out


@dataclass(frozen=True)
class VocabularyModel:
    token_index: dict[str, int]
    doc_freq: dict[str, int]
    num_docs: int
    tokenizer: TokenizerSpec = field(default_factory=TokenizerSpec)
    options: VectorizerOptions = field(default_factory=VectorizerOptions)

    def __len__(self):
        return len(self.token_index)

    @property
    def tokens(self) -> list[str]:
        """Tokens in index order."""
        return sorted(self.token_index, key=self.token_index.__getitem__)

    def to_dict(self) -> dict:
        toks = self.tokens
        return {
            "tokens": toks,
            "doc_freq": [self.doc_freq[t] for t in toks],
            "num_docs": self.num_docs,
            "tokenizer": self.tokenizer.to_dict(),
            "options": self.options.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VocabularyModel":
        toks = d["tokens"]
        return cls(
            {t: i for i, t in enumerate(toks)},
            dict(zip(toks, d["doc_freq"])),
            d["num_docs"],
            TokenizerSpec.from_dict(d["tokenizer"]),
            VectorizerOptions.from_dict(d["options"]),
        )


def _tokens(doc: str, tokenizer: TokenizerSpec, options: VectorizerOptions) -> list[str]:
    return tokenizer.tokenize(doc.lower() if options.lowercase else doc)


def fit_vocabulary(
    docs: Sequence[str],
    tokenizer: TokenizerSpec | None = None,
    options: VectorizerOptions | None = None,
) -> VocabularyModel:
    tokenizer = tokenizer or TokenizerSpec()
    options = options or VectorizerOptions()
    if not docs:
        raise ValueError("cannot fit a vocabulary on zero documents")
    df = Counter()
    for doc in docs:
        df.update(set(_tokens(doc, tokenizer, options)))
    kept = sorted(t for t, n in df.items() if n >= options.min_doc_freq)
    if not kept:
        raise ValueError("empty vocabulary: every token was filtered out")
    return VocabularyModel(
        {t: i for i, t in enumerate(kept)},
        {t: df[t] for t in kept},
        len(docs),
        tokenizer,
        options,
    )


def transform(doc: str, vocab: VocabularyModel) -> SparseVector:
    opts = vocab.options
    counts = Counter(t for t in _tokens(doc, vocab.tokenizer, opts) if t in vocab.token_index)
    idx, weights = [], []
    for tok, f in counts.items():
        w = float(f) if opts.output_counts else 1.0
        if opts.tf_transform:
            w = math.log1p(w)
        if opts.idf_transform:
            w *= math.log(vocab.num_docs / vocab.doc_freq[tok])
        idx.append(vocab.token_index[tok])
        weights.append(w)
    return SparseVector(idx, weights)


def text_attribute_index(data: Dataset) -> int:
    strings = [i for i, a in enumerate(data.attributes) if a.is_string and i != data.class_index]
    if len(strings) != 1:
        raise ValueError(f"expected exactly one string attribute, found {len(strings)}")
    return strings[0]


def documents(data: Dataset) -> list[str]:
    idx = text_attribute_index(data)
    return [inst[idx] for inst in data.instances]


def transform_dataset(data: Dataset, vocab: VocabularyModel) -> Dataset:
    """Vectorize ``data`` with an already fitted vocabulary."""
    if not data.class_attribute.is_nominal:
        raise ValueError("class attribute must be nominal")
    cls_attr = data.class_attribute
    token_names = set(vocab.token_index)
    cls_name = cls_attr.name
    while cls_name in token_names:
        cls_name += "_"
    attrs = tuple(AttributeSpec.numeric(t) for t in vocab.tokens) + (
        AttributeSpec.nominal(cls_name, cls_attr.values),
    )
    defaults = (0.0,) * len(vocab) + (cls_attr.values[0],)
    V = len(vocab)
    rows = []
    for doc, label in zip(documents(data), data.class_values()):
        vec = transform(doc, vocab)
        entries = dict(vec)
        entries[V] = label
        rows.append(Instance.sparse(entries, defaults))
    return Dataset(data.relation, attrs, tuple(rows), V)


def vectorize_dataset(
    data: Dataset,
    tokenizer: TokenizerSpec | None = None,
    options: VectorizerOptions | None = None,
) -> tuple[Dataset, VocabularyModel]:
    vocab = fit_vocabulary(documents(data), tokenizer, options)
    return transform_dataset(data, vocab), vocab
