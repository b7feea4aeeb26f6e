"""Cleaning raw <p>-tagged text exports into a labelled ARFF corpus.

Run with ``python3 demos/01_prepare_corpus.py``.
"""

import tempfile
from pathlib import Path

from dialectid.arff import load_arff, save_arff
from dialectid.corpus import PrepConfig, build_dataset, clean_lines, corpus_stats
from dialectid.demo import DEFAULT_LABELS, demo_raw_lines

# %% A raw export mixes paragraph lines with markup noise and fragments
raw = demo_raw_lines("CA", n=12, seed=1)
for line in raw[:8]:
    print(repr(line))

# %% Cleaning keeps complete, normalized, unique sentences of 3+ tokens
cfg = PrepConfig()
kept = clean_lines(raw, cfg)
print(f"\n{len(raw)} raw lines -> {len(kept)} sentences")
for s in kept[:5]:
    print("  ", s)

# %% One source per label gives a two-attribute dataset (text, class)
sources = {label: demo_raw_lines(label, n=60, seed=i) for i, label in enumerate(DEFAULT_LABELS)}
data = build_dataset(sources, cfg, relation="french_dialects_raw")
print()
print(corpus_stats(data).format())

# %% The corpus round-trips through an ARFF file
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "corpus.arff"
    save_arff(data, path)
    print("\n" + "\n".join(path.read_text(encoding="utf-8").splitlines()[:6]))
    assert load_arff(path) == data
