"""A small synthetic five-dialect corpus for demos and end-to-end checks.

Sentences are random strings of common French words; each one also carries
a regional marker word whose character trigrams occur nowhere else in the
corpus, so a character n-gram model can separate the labels.
"""

from __future__ import annotations

import numpy as np

from .arff import AttributeSpec, Dataset, Instance
from .corpus import DEFAULT_LABELS

FILLER = (
    "le la les un une des du de et en dans pour avec sur sous par mais donc "
    "il elle nous vous ils elles on je tu ce cette ces mon ton son notre votre "
    "est sont était avoir être faire aller voir dire venir prendre "
    "maison ville jour nuit temps monde enfant femme homme travail école "
    "petit grand beau bon nouveau vieux premier dernier autre même "
    "toujours souvent jamais encore déjà aussi très bien peu tout rien"
).split()

MARKERS = {
    "MC": ("wakha", "bezzaf", "khouya", "zwina"),
    "BE": ("septante", "nonante", "kot", "dracher"),
    "FR": ("bouquin", "chelou", "ouf", "kiffer"),
    "CA": ("pantoute", "magasiner", "tiguidou", "icitte"),
    "CH": ("huitante", "natel", "cornet", "panosse"),
}


def demo_sentences(label: str, n: int, rng: np.random.Generator) -> list[str]:
    markers = MARKERS[label]
    out = []
    for _ in range(n):
        words = list(rng.choice(FILLER, size=int(rng.integers(5, 13))))
        words.insert(int(rng.integers(0, len(words) + 1)), markers[int(rng.integers(len(markers)))])
        s = " ".join(words)
        out.append(s[0].upper() + s[1:] + ".")
    return out


def demo_dataset(per_label: int = 400, seed: int = 1, labels=DEFAULT_LABELS) -> Dataset:
    """``per_label`` sentences for each label, in label order."""
    rng = np.random.default_rng(seed)
    attrs = (AttributeSpec.string("text"), AttributeSpec.nominal("class", labels))
    rows = [Instance((s, lab)) for lab in labels for s in demo_sentences(lab, per_label, rng)]
    return Dataset("french_dialects_demo", attrs, tuple(rows))


def demo_raw_lines(label: str, n: int = 50, seed: int = 1) -> list[str]:
    """Raw export lines: paragraphs wrapped in <p> tags plus some noise
    (markup-only lines, duplicates, unfinished and very short sentences)."""
    rng = np.random.default_rng(seed)
    lines = ["<doc id=\"demo\">"]
    for s in demo_sentences(label, n, rng):
        lines.append(f"<p>{s}</p>")
        r = rng.random()
        if r < 0.1:
            lines.append(f"<p>{s}</p>")
        elif r < 0.2:
            lines.append(f"<p>{s[:-1]} et puis</p>")
        elif r < 0.25:
            lines.append("<p>Oui.</p>")
    lines.append("</doc>")
    return lines
