import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dialectid.arff import AttributeSpec, Dataset, Instance
from dialectid.classifiers import ClassifierSpec
from dialectid.demo import demo_dataset
from dialectid.evaluation import (
    cross_validate,
    evaluate_holdout,
    evaluate_resubstitution,
    percentage_split,
    split_sizes,
    stratified_folds,
)
from dialectid.features import TokenizerSpec, VectorizerOptions
from dialectid.pipeline import fit_pipeline

TOK = TokenizerSpec.word()
OPTS = VectorizerOptions()
MNB = ClassifierSpec("naive_bayes_multinomial")


@pytest.fixture(scope="module")
def small():
    return demo_dataset(per_label=20, seed=5)


def test_split_sizes():
    assert split_sizes(10, 60) == (6, 4)
    assert split_sizes(5, 50) == (3, 2)  # 2.5 rounds half up
    assert split_sizes(6894, 66) == (4550, 2344)
    with pytest.raises(ValueError):
        split_sizes(10, 100)


def test_split_leaving_empty_test_part_errors(small):
    tiny = small.subset(range(10))
    with pytest.raises(ValueError, match="empty"):
        percentage_split(MNB, TOK, OPTS, tiny, 99)


def test_fold_count_bounds():
    with pytest.raises(ValueError):
        stratified_folds([0, 1, 0], 4, 1)
    with pytest.raises(ValueError):
        stratified_folds([0, 1, 0], 1, 1)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=2, max_size=60), st.integers(2, 10), st.integers(0, 1000))
def test_folds_partition_and_stratify(codes, k, seed):
    if k > len(codes):
        return
    folds = stratified_folds(codes, k, seed)
    joined = np.sort(np.concatenate(folds))
    assert np.array_equal(joined, np.arange(len(codes)))
    y = np.asarray(codes)
    for c in set(codes):
        n_c = int(np.sum(y == c))
        per_fold = [int(np.sum(y[f] == c)) for f in folds]
        assert min(per_fold) >= n_c // k and max(per_fold) <= -(-n_c // k)


def test_same_seed_same_report(small):
    a = cross_validate(MNB, TOK, OPTS, small, k=5, seed=3)
    b = cross_validate(MNB, TOK, OPTS, small, k=5, seed=3)
    assert a == b and a.total == len(small)
    assert len(a.fits) == 5


def test_parallel_folds_match_sequential(small):
    seq = cross_validate(ClassifierSpec("c45"), TOK, OPTS, small, k=4, seed=2)
    par = cross_validate(ClassifierSpec("c45"), TOK, OPTS, small, k=4, seed=2, workers=3)
    assert seq.to_dict() == par.to_dict()


def test_training_folds_never_see_test_vocabulary():
    attrs = (AttributeSpec.string("text"), AttributeSpec.nominal("class", ["A", "B"]))
    rows = [("alpha beta", "A"), ("alpha gamma", "A"), ("delta beta", "B"), ("delta omega", "B")]
    d = Dataset("r", attrs, tuple(Instance(r) for r in rows))
    rep = cross_validate(MNB, TOK, OPTS, d, k=2, seed=1)
    folds = stratified_folds(d.class_codes(), 2, 1)
    for fit, test_idx in zip(rep.fits, folds):
        train_idx = sorted(set(range(len(rows))) - set(test_idx.tolist()))
        seen = {tok for i in train_idx for tok in rows[i][0].split()}
        assert set(fit.vocabulary.tokens) == seen
    leaky = cross_validate(MNB, TOK, OPTS, d, k=2, seed=1, leaky=True)
    assert all(set(f.vocabulary.tokens) == {"alpha", "beta", "gamma", "delta", "omega"} for f in leaky.fits)
    assert leaky.protocol.leaky and "vocabulary fitted before splitting" in leaky.protocol.describe()


def test_resubstitution_and_split(small):
    rep = evaluate_resubstitution(MNB, TOK, OPTS, small)
    assert rep.total == len(small) and rep.protocol.kind == "resubstitution"
    sp = percentage_split(MNB, TOK, OPTS, small, 60, seed=4)
    assert sp.total == split_sizes(len(small), 60)[1]


def test_holdout_handles_unseen_tokens_and_checks_classes(small):
    fit = fit_pipeline(MNB, TOK, OPTS, small)
    attrs = small.attributes
    unseen = Dataset("t", attrs, (Instance(("zzzz qqqq", small.class_labels[0])),))
    rep = evaluate_holdout(fit, unseen)
    assert rep.total == 1
    two = Dataset("t", (attrs[0], AttributeSpec.nominal("class", ["MC", "BE"])), (Instance(("x", "MC")),))
    with pytest.raises(ValueError, match="do not match"):
        evaluate_holdout(fit, two)


def test_holdout_maps_classes_by_name(small):
    fit = fit_pipeline(MNB, TOK, OPTS, small)
    labels = small.class_labels
    shuffled = AttributeSpec.nominal("class", list(reversed(labels)))
    test = Dataset("t", (small.attributes[0], shuffled), small.instances)
    assert evaluate_holdout(fit, test).accuracy == evaluate_holdout(fit, small).accuracy
