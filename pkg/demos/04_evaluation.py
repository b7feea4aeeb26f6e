"""Evaluation protocols, reports and ROC analysis.

Run with ``python3 demos/04_evaluation.py``.
"""

import numpy as np

from dialectid.classifiers import ClassifierSpec
from dialectid.demo import demo_dataset
from dialectid.evaluation import (
    auc,
    cross_validate,
    evaluate_resubstitution,
    percentage_split,
    roc_curve,
)
from dialectid.features import TokenizerSpec, VectorizerOptions

data = demo_dataset(per_label=60, seed=4)
tok, opts = TokenizerSpec.char_ngram(3, 3), VectorizerOptions()
mnb = ClassifierSpec("naive_bayes_multinomial")

# %% Stratified 10-fold cross-validation, predictions pooled over folds
report = cross_validate(mnb, tok, opts, data, k=10, seed=1)
print(report.format())

# %% Training-set and percentage-split accuracy for comparison
print("training set :", f"{100 * evaluate_resubstitution(mnb, tok, opts, data).accuracy:.2f}%")
print("66% split    :", f"{100 * percentage_split(mnb, tok, opts, data, 66, seed=1).accuracy:.2f}%")

# %% The majority-class baseline sets the floor
base = cross_validate(ClassifierSpec("zero_r"), tok, opts, data, k=10, seed=1)
print("ZeroR        :", f"{100 * base.accuracy:.2f}%")

# %% ROC for one class against the rest, with ties as diagonal steps
scores = np.array([0.9, 0.8, 0.8, 0.6, 0.4, 0.3])
actual = np.array([1, 1, 0, 1, 0, 0])
for p in roc_curve(scores, actual, 1):
    print(f"  fpr={p.fpr:.3f} tpr={p.tpr:.3f}")
print("AUC:", auc(scores, actual, 1))

# %% Reports serialize to JSON; the NaN AUC of an absent class becomes null
print(report.to_json()[:300], "...")
