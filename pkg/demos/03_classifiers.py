"""The seven classifiers on a small synthetic dialect corpus.

Run with ``python3 demos/03_classifiers.py``.
"""

import numpy as np
import scipy.sparse as sp

from dialectid.classifiers import ALGORITHMS, ClassifierSpec, fit_matrix, smo_solve_binary
from dialectid.demo import demo_dataset
from dialectid.features import TokenizerSpec, VectorizerOptions, documents
from dialectid.pipeline import fit_pipeline

data = demo_dataset(per_label=40, seed=3)
test = demo_dataset(per_label=10, seed=30)
tok = TokenizerSpec.char_ngram(3, 3)

# %% Fit each algorithm on the same features, score on fresh sentences
for name in ALGORITHMS:
    fit = fit_pipeline(ClassifierSpec(name, seed=1), tok, VectorizerOptions(), data)
    pred = fit.predict(documents(test))
    acc = np.mean([p == a for p, a in zip(pred, test.class_values())])
    print(f"{name:<24} {100 * acc:6.2f}%")

# %% Every model returns a full class distribution
fit = fit_pipeline(ClassifierSpec("naive_bayes_multinomial"), tok, VectorizerOptions(), data)
dist = fit.distribution("Septante-cinq euros pour un kot, c'est cher.")
print("\n", dict(zip(dist.labels, np.round(dist.probabilities, 4).tolist())), "->", dist.label())

# %% The binary SMO solver directly: alphas, bias and the support vectors
X = np.array([[0.0, 0.0], [1.0, 0.0], [3.0, 3.0], [4.0, 3.0]])
y = np.array([-1.0, -1.0, 1.0, 1.0])
sol = smo_solve_binary(X, y, C=1.0)
print("\nalpha:", np.round(sol.alpha, 4), "bias:", round(sol.bias, 4))
print("support vectors:", np.flatnonzero(sol.alpha > 1e-8))

# %% Trees and rules can be read
Xs = sp.csr_matrix(fit.vectorize(documents(data)))
codes = np.asarray(data.class_codes())
names = fit.vocabulary.tokens
for name in ("rep_tree", "ripper"):
    m = fit_matrix(ClassifierSpec(name, seed=1), Xs, codes, data.class_labels)
    print(f"\n{name}:\n" + m.payload.describe(names, data.class_labels))
