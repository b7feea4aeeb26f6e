"""A fitted vocabulary plus classifier, and its on-disk form.

Model files are UTF-8 JSON::

    {"format": "dialectid-model", "version": 1,
     "class_attribute": ...,
     "vocabulary": {...}, "model": {"spec": ..., "payload": ...}}

Python's float repr round-trips exactly, so a loaded model predicts
bit-identically to the one that was saved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arff import Dataset
from .classifiers import ClassDistribution, ClassifierSpec, Model, TrainingError, fit_matrix
from .features import (
    TokenizerSpec,
    VectorizerOptions,
    VocabularyModel,
    documents,
    fit_vocabulary,
    rows_to_csr,
    transform,
)

FORMAT = "dialectid-model"
VERSION = 1


@dataclass
class FittedPipeline:
    vocabulary: VocabularyModel
    model: Model
    class_attribute: str = "class"

    @property
    def class_labels(self) -> tuple[str, ...]:
        return self.model.class_labels

    def vectorize(self, texts: Sequence[str]):
        return rows_to_csr([transform(t, self.vocabulary) for t in texts], len(self.vocabulary))

    def predict_proba(self, texts: Sequence[str]) -> np.ndarray:
        return self.model.predict_proba(self.vectorize(texts))

    def predict(self, texts: Sequence[str]) -> list[str]:
        P = self.predict_proba(texts)
        return [self.class_labels[k] for k in P.argmax(axis=1)]

    def distribution(self, text: str) -> ClassDistribution:
        return ClassDistribution(self.predict_proba([text])[0], self.class_labels)

    def to_dict(self) -> dict:
        return {
            "format": FORMAT,
            "version": VERSION,
            "class_attribute": self.class_attribute,
            "vocabulary": self.vocabulary.to_dict(),
            "model": self.model.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FittedPipeline":
        if d.get("format") != FORMAT:
            raise ValueError(f"not a {FORMAT} file")
        if d.get("version") != VERSION:
            raise ValueError(f"unsupported model file version {d.get('version')!r}")
        return cls(
            VocabularyModel.from_dict(d["vocabulary"]),
            Model.from_dict(d["model"]),
            d.get("class_attribute", "class"),
        )


def fit_pipeline(
    spec: ClassifierSpec,
    tokenizer: TokenizerSpec,
    options: VectorizerOptions,
    data: Dataset,
) -> FittedPipeline:
    """Fit vocabulary and classifier on a text dataset."""
    return fit_on_documents(spec, fit_vocabulary(documents(data), tokenizer, options), data)


def fit_on_documents(spec: ClassifierSpec, vocab: VocabularyModel, data: Dataset) -> FittedPipeline:
    """Train ``spec`` on ``data`` as seen through an already fitted vocabulary."""
    if not data.class_attribute.is_nominal or len(data.class_labels) < 2:
        raise TrainingError("the class attribute must be nominal with at least two values")
    if len(data) == 0:
        raise TrainingError("cannot train on a dataset with no instances")
    X = rows_to_csr([transform(d, vocab) for d in documents(data)], len(vocab))
    y = np.asarray(data.class_codes(), dtype=np.int64)
    return FittedPipeline(vocab, fit_matrix(spec, X, y, data.class_labels), data.class_attribute.name)


def save_model(pipeline: FittedPipeline, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(pipeline.to_dict(), fh, ensure_ascii=False)


def load_model(path) -> FittedPipeline:
    with open(path, encoding="utf-8") as fh:
        return FittedPipeline.from_dict(json.load(fh))
