"""Turn raw concordance exports into a labelled ARFF dataset.

The cleaning pipeline, applied per label in this order:

1. keep lines carrying both ``<p>`` and ``</p>``
2. strip the paragraph tags
3. keep complete sentences (last character is a terminator)
4. drop exact duplicates and sentences with too few tokens
5. delete characters outside the French character class, collapse spaces
6. attach the label

Step 5 can merge two distinct sentences or shorten one, so step 4 runs a
second time on the normalized text.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .arff import AttributeSpec, Dataset, Instance

DEFAULT_LABELS = ("MC", "BE", "FR", "CA", "CH")

FRENCH_LETTERS = "àâäçéèêëîïôöùûüÿœæ"
FRENCH_CHARS = (
    "abcdefghijklmnopqrstuvwxyz"
    + "abcdefghijklmnopqrstuvwxyz".upper()
    + FRENCH_LETTERS
    + FRENCH_LETTERS.upper()
    + "0123456789"
    + " ',-"
)

_TAG = re.compile(r"</?p\s*>", re.IGNORECASE)
_OPEN = re.compile(r"<p\s*>", re.IGNORECASE)
_CLOSE = re.compile(r"</p\s*>", re.IGNORECASE)
_SPACES = re.compile(r"\s+")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class PrepConfig:
    label: str = ""
    min_tokens: int = 3
    terminators: str = ".!?"
    allowed_chars: str = FRENCH_CHARS

    def __post_init__(self):
        if self.min_tokens < 1:
            raise ValueError("min_tokens must be >= 1")
        if not self.terminators:
            raise ValueError("terminators must be non-empty")

    @property
    def allowed(self) -> frozenset[str]:
        return frozenset(self.allowed_chars) | frozenset(self.terminators)


@dataclass(frozen=True)
class LabeledSentence:
    text: str
    label: str


@dataclass
class CorpusStats:
    counts: dict[str, int]
    total: int
    max_tokens: int
    mean_tokens: float
    std_tokens: float
    by_label: dict[str, tuple[int, float, float]] = field(default_factory=dict)

    def format(self) -> str:
        lines = [f"{'No.':<4} {'Label':<8} {'Count':>7}"]
        for k, (label, n) in enumerate(self.counts.items(), start=1):
            lines.append(f"{k:<4} {label:<8} {n:>7}")
        lines.append(f"instances: {self.total}")
        lines.append(
            f"tokens per sentence: max {self.max_tokens}, "
            f"mean {self.mean_tokens:.2f}, stddev {self.std_tokens:.2f}"
        )
        return "\n".join(lines)


def extract_paragraph_lines(lines: Iterable[str]) -> list[str]:
    return [ln for ln in lines if _OPEN.search(ln) and _CLOSE.search(ln)]


def strip_tags(line: str) -> str:
    prev = None
    while prev != line:
        prev, line = line, _TAG.sub("", line)
    return line.strip()


def filter_complete_sentences(sentences: Iterable[str], cfg: PrepConfig) -> list[str]:
    out = []
    for s in sentences:
        s2 = s.rstrip()
        if s2 and s2[-1] in cfg.terminators:
            out.append(s)
    return out


def dedupe_and_length_filter(sentences: Iterable[str], cfg: PrepConfig) -> list[str]:
    seen = set()
    out = []
    for s in sentences:
        if s in seen:
            continue
        seen.add(s)
        if len(s.split()) >= cfg.min_tokens:
            out.append(s)
    return out


def normalize_french(sentence: str, cfg: PrepConfig) -> str:
    allowed = cfg.allowed
    s = _SPACES.sub(" ", sentence)
    s = "".join(c for c in s if c in allowed)
    return _SPACES.sub(" ", s).strip()


def clean_lines(lines: Iterable[str], cfg: PrepConfig) -> list[str]:
    """Run the whole pipeline on one label's raw lines."""
    sentences = [strip_tags(ln) for ln in extract_paragraph_lines(lines)]
    sentences = filter_complete_sentences(sentences, cfg)
    sentences = dedupe_and_length_filter(sentences, cfg)
    sentences = [normalize_french(s, cfg) for s in sentences]
    # normalization can strip a trailing terminator-adjacent symbol or merge sentences
    sentences = filter_complete_sentences(sentences, cfg)
    return dedupe_and_length_filter(sentences, cfg)


def label_sentences(sentences: Iterable[str], label: str) -> list[LabeledSentence]:
    return [LabeledSentence(s, label) for s in sentences]


def build_dataset(
    sources: Mapping[str, Sequence[str]],
    cfg: PrepConfig | Mapping[str, PrepConfig] | None = None,
    labels: Sequence[str] | None = None,
    relation: str = "french_dialects",
) -> Dataset:
    """Clean each label's raw lines and stack the survivors into a Dataset.

    ``cfg`` is either one config shared by all labels or a mapping from
    label to config. ``labels`` fixes the declared class values (defaults
    to the order of ``sources``).
    """
    if not sources:
        raise CorpusError("no input sources")
    labels = tuple(labels) if labels is not None else tuple(sources)
    unknown = [lab for lab in sources if lab not in labels]
    if unknown:
        raise CorpusError(f"labels {unknown} not in the declared label set {list(labels)}")

    rows = []
    for label in labels:
        if label not in sources:
            continue
        if isinstance(cfg, Mapping):
            c = cfg.get(label) or PrepConfig(label=label)
        else:
            c = cfg or PrepConfig(label=label)
        kept = clean_lines(sources[label], c)
        if not kept:
            raise CorpusError(f"label {label!r}: no sentence survived cleaning")
        rows.extend(Instance((s.text, s.label)) for s in label_sentences(kept, label))

    attrs = (AttributeSpec.string("text"), AttributeSpec.nominal("class", labels))
    return Dataset(relation, attrs, tuple(rows))


def read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _moments(lengths: Sequence[int]) -> tuple[int, float, float]:
    if not lengths:
        return 0, 0.0, 0.0
    n = len(lengths)
    mean = sum(lengths) / n
    var = sum((x - mean) ** 2 for x in lengths) / n
    return max(lengths), mean, math.sqrt(var)


def corpus_stats(data: Dataset, text_attribute: str | None = None) -> CorpusStats:
    """Per-label counts and token-length moments (population stddev)."""
    if text_attribute is None:
        idx = next(i for i, a in enumerate(data.attributes) if a.is_string)
    else:
        idx = data.attribute_index(text_attribute)
    labels = data.class_values()
    lengths = [len(inst[idx].split()) for inst in data.instances]

    counts = Counter(labels)
    ordered = {lab: counts.get(lab, 0) for lab in data.class_labels}
    by_label = {}
    for lab in data.class_labels:
        sub = [n for n, y in zip(lengths, labels) if y == lab]
        mx, mean, std = _moments(sub)
        by_label[lab] = (mx, mean, std)
    mx, mean, std = _moments(lengths)
    return CorpusStats(ordered, len(lengths), mx, mean, std, by_label)
