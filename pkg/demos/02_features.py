"""Word, word n-gram and character n-gram features with count, TF and IDF weights.

Run with ``python3 demos/02_features.py``.
"""

from dialectid.demo import demo_dataset
from dialectid.features import (
    TokenizerSpec,
    VectorizerOptions,
    documents,
    fit_vocabulary,
    transform,
    vectorize_dataset,
)

text = "Wakha, on se voit demain."

# %% The three tokenizers on one sentence
for tok in (TokenizerSpec.word(), TokenizerSpec.word_ngram(1, 2), TokenizerSpec.char_ngram(3, 3)):
    print(f"{tok.describe():<20}", tok.tokenize(text.lower())[:8])

# %% The vocabulary is fitted on training documents only
train = ["wakha on y va.", "on se voit demain.", "wakha khouya."]
vocab = fit_vocabulary(train, TokenizerSpec.word())
print("\nvocabulary:", vocab.tokens)
print("document frequencies:", vocab.doc_freq)

# %% Counts, log(1 + f) and IDF weighting of the same sentence
for opts in (VectorizerOptions(), VectorizerOptions(tf_transform=True), VectorizerOptions(idf_transform=True)):
    v = fit_vocabulary(train, TokenizerSpec.word(), opts)
    pairs = [(v.tokens[i], round(w, 3)) for i, w in transform("wakha wakha demain", v)]
    print(f"tf={opts.tf_transform!s:<5} idf={opts.idf_transform!s:<5}", pairs)

# %% Tokens never seen in training are dropped
print("\nunseen:", transform("zzz qqq", vocab).pairs())

# %% A whole corpus becomes a sparse numeric dataset
data = demo_dataset(per_label=40, seed=2)
vec, vocab = vectorize_dataset(data, TokenizerSpec.char_ngram(3, 3))
print(f"\n{len(documents(data))} documents, {len(vocab)} character 3-grams")
print("first attributes:", [a.name for a in vec.attributes[:6]], "...", vec.class_attribute.name)
