"""Acceptance suite: one test per criterion, each at its stated tolerance.

Run on its own with ``pytest tests/test_acceptance.py`` (or
``python tests/test_acceptance.py``); the terminal summary prints one
PASS/FAIL line per criterion.
"""

import itertools
import math
import time

import numpy as np
import pytest
import scipy.sparse as sp

from dialectid.arff import MISSING, AttributeSpec, Dataset, Instance, parse_arff, write_arff
from dialectid.classifiers import ClassifierSpec, fit_matrix, smo_solve_binary
from dialectid.classifiers.ripper import foil_gain
from dialectid.classifiers.smo import dual_objective, kkt_violations
from dialectid.classifiers.trees import grow_tree, grow_prune_split, prune_set_errors, reduced_error_prune
from dialectid.classifiers._splits import gain_ratio, information_gain
from dialectid.evaluation import (
    auc,
    cross_validate,
    evaluate_resubstitution,
    f_beta,
    mae,
    stratified_folds,
    weighted_average,
)
from dialectid.features import TokenizerSpec, VectorizerOptions, char_ngrams, documents, word_ngrams, word_tokenize

from oracles import mann_whitney, multinomial_posterior, svm_dual_optimum

# Per-class precision, recall and F1 of the SMO char-trigram model on the
# 1350-sentence five-dialect test set, with that set's class supports.
REFERENCE_ROWS = {
    "MC": (0.426, 0.625, 0.506),
    "BE": (0.179, 0.099, 0.127),
    "FR": (0.386, 0.446, 0.414),
    "CA": (0.440, 0.345, 0.386),
    "CH": (0.348, 0.184, 0.241),
}
REFERENCE_SUPPORTS = (352, 110, 318, 284, 286)
REFERENCE_WEIGHTED = {"precision": 0.377, "f1": 0.373}


def _text_dataset(texts, labels, classes):
    attrs = (AttributeSpec.string("text"), AttributeSpec.nominal("class", classes))
    return Dataset("t", attrs, tuple(Instance((t, lab)) for t, lab in zip(texts, labels)))


@pytest.mark.criterion(1, "F1 from precision and recall")
def test_f1_reproduces_reference_rows():
    for label, (p, r, f1) in REFERENCE_ROWS.items():
        assert f_beta(p, r, 1.0) == pytest.approx(f1, abs=0.002), label


@pytest.mark.criterion(2, "support-weighted averages")
def test_weighted_averages_of_reference_rows():
    cols = list(zip(*REFERENCE_ROWS.values()))
    assert weighted_average(cols[0], REFERENCE_SUPPORTS) == pytest.approx(REFERENCE_WEIGHTED["precision"], abs=0.01)
    assert weighted_average(cols[2], REFERENCE_SUPPORTS) == pytest.approx(REFERENCE_WEIGHTED["f1"], abs=0.01)


@pytest.mark.criterion(3, "accuracy arithmetic")
def test_accuracy_arithmetic():
    from dialectid.evaluation import build_report
    from dialectid.evaluation.report import Protocol

    total, correct = 1350, 531
    assert 100 * correct / total == pytest.approx(39.33, abs=0.05)
    # a report with exactly that outcome keeps correct + incorrect = total
    y = np.repeat(np.arange(2), [correct, total - correct])
    P = np.zeros((total, 2))
    P[:, 0] = 1.0
    rep = build_report(P, y, ("a", "b"), Protocol("holdout"))
    assert (rep.correct, rep.incorrect, rep.total) == (531, 819, 1350)
    assert 100 * rep.accuracy == pytest.approx(39.33, abs=0.05)


@pytest.mark.criterion(4, "ZeroR accuracy and distribution")
def test_zero_r_matches_majority_prevalence():
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    words = ["le", "la", "chat", "chien", "maison", "bonjour"]
    spec, tok, opts = ClassifierSpec("zero_r"), TokenizerSpec.word(), VectorizerOptions()
    for _ in range(200):
        K = int(rng.integers(2, 6))
        n = int(rng.integers(1, 40))
        y = rng.integers(0, K, size=n)
        texts = [" ".join(rng.choice(words, size=3)) for _ in range(n)]
        classes = tuple(f"c{k}" for k in range(K))
        data = _text_dataset(texts, [classes[k] for k in y], classes)
        rep = evaluate_resubstitution(spec, tok, opts, data)
        counts = np.bincount(y, minlength=K)
        assert rep.accuracy == counts.max() / n
        P = rep.fits[0].predict_proba(texts)
        np.testing.assert_allclose(P, np.tile(counts / n, (n, 1)), rtol=0, atol=1e-12)
    assert time.perf_counter() - start < 5


@pytest.mark.criterion(5, "SMO against exact QP optimum")
def test_smo_matches_brute_force_qp():
    rng = np.random.default_rng(5)
    start = time.perf_counter()
    for _ in range(100):
        n = int(rng.integers(2, 5))
        d = int(rng.integers(1, 4))
        X = rng.normal(size=(n, d))
        y = np.ones(n)
        y[rng.permutation(n)[: int(rng.integers(1, n))]] = -1
        C = float(rng.choice([0.1, 1.0, 10.0]))
        best, _ = svm_dual_optimum(X, y, C)
        sol = smo_solve_binary(X, y, C, tolerance=1e-3)
        K = X @ X.T
        assert abs(dual_objective(sol.alpha, y, K) - best) <= 1e-6
        assert kkt_violations(sol.alpha, sol.bias, y, K, C).max() <= 1e-3
        assert np.all((sol.alpha >= 0) & (sol.alpha <= C))
    sol = smo_solve_binary(np.array([[-1.0], [1.0]]), np.array([-1.0, 1.0]), C=1.0)
    np.testing.assert_allclose(sol.alpha, [0.5, 0.5], atol=1e-9)
    assert sol.bias == pytest.approx(0.0, abs=1e-9)
    assert time.perf_counter() - start < 30


def _mnb_posterior(docs, labels, query, K):
    X = sp.csr_matrix(np.asarray(docs, dtype=float))
    model = fit_matrix(ClassifierSpec("naive_bayes_multinomial"), X, np.asarray(labels), [str(k) for k in range(K)])
    return model.predict_proba(sp.csr_matrix(np.asarray([query], dtype=float)))[0]


@pytest.mark.criterion(6, "multinomial NB against exact enumeration")
def test_multinomial_nb_matches_enumeration():
    start = time.perf_counter()
    # hand example: vocabulary {a, b}, one document per class
    p = _mnb_posterior([[2, 1], [1, 2]], [0, 1], [2, 0], 2)
    assert p[0] == pytest.approx(0.36 / 0.52, abs=1e-12)
    assert round(p[0], 4) == 0.6923

    # every two-document corpus over a 2-token vocabulary, every query
    vecs = list(itertools.product(range(4), repeat=2))
    for (d1, d2) in itertools.product(vecs, repeat=2):
        for labels in ((0, 1), (1, 0), (0, 0)):
            model_docs = [d1, d2]
            X = sp.csr_matrix(np.asarray(model_docs, dtype=float))
            model = fit_matrix(ClassifierSpec("naive_bayes_multinomial"), X, np.asarray(labels), ["0", "1"])
            P = model.predict_proba(sp.csr_matrix(np.asarray(vecs, dtype=float)))
            for q, row in zip(vecs, P):
                exact = multinomial_posterior(model_docs, labels, q, 2, 2)
                assert np.max(np.abs(row - [float(e) for e in exact])) <= 1e-12

    # random corpora up to 5 documents, 3 tokens, counts up to 3, 2-3 classes
    rng = np.random.default_rng(6)
    queries = list(itertools.product(range(4), repeat=3))
    for _ in range(400):
        n = int(rng.integers(1, 6))
        K = int(rng.integers(2, 4))
        docs = rng.integers(0, 4, size=(n, 3)).tolist()
        labels = rng.integers(0, K, size=n).tolist()
        X = sp.csr_matrix(np.asarray(docs, dtype=float))
        model = fit_matrix(ClassifierSpec("naive_bayes_multinomial"), X, np.asarray(labels), [str(k) for k in range(K)])
        P = model.predict_proba(sp.csr_matrix(np.asarray(queries, dtype=float)))
        for q, row in zip(queries, P):
            exact = multinomial_posterior(docs, labels, q, K, 3)
            assert np.max(np.abs(row - [float(e) for e in exact])) <= 1e-12
    assert time.perf_counter() - start < 10


@pytest.mark.criterion(7, "trapezoidal AUC equals Mann-Whitney")
def test_auc_equals_mann_whitney():
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    for _ in range(500):
        n = int(rng.integers(2, 21))
        y = rng.integers(0, 2, size=n)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        scores = rng.integers(0, 5, size=n) / 4  # coarse grid forces ties
        expected = mann_whitney(scores[y == 1], scores[y == 0])
        assert abs(auc(scores, y, 1) - expected) <= 1e-12
    assert auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0], 1) == 1.0
    assert auc([0.5] * 6, [1, 0, 1, 0, 0, 1], 1) == 0.5
    assert time.perf_counter() - start < 5


@pytest.mark.criterion(8, "stratified folds and no vocabulary leakage")
def test_stratified_folds_and_no_leakage():
    start = time.perf_counter()
    y = np.repeat(np.arange(5), 20)
    for f in stratified_folds(y, 10, seed=3):
        assert f.size == 10
        assert np.all(np.bincount(y[f], minlength=5) == 2)

    rng = np.random.default_rng(8)
    for _ in range(200):
        K = int(rng.integers(2, 6))
        n = int(rng.integers(10, 120))
        k = int(rng.integers(2, min(10, n) + 1))
        yy = rng.integers(0, K, size=n)
        folds = stratified_folds(yy, k, int(rng.integers(0, 1000)))
        assert sorted(np.concatenate(folds).tolist()) == list(range(n))
        total = np.bincount(yy, minlength=K)
        for f in folds:
            counts = np.bincount(yy[f], minlength=K)
            assert np.all(np.abs(counts - total / k) <= 1)

    # each document carries a token unique to it; none may reach the
    # vocabulary of a fold that holds that document out
    classes = ("A", "B")
    texts = [f"commun mot{i} fin" for i in range(40)]
    labels = [classes[i % 2] for i in range(40)]
    data = _text_dataset(texts, labels, classes)
    rep = cross_validate(ClassifierSpec("naive_bayes_multinomial"), TokenizerSpec.word(), VectorizerOptions(), data, 10, 1)
    folds = stratified_folds(data.class_codes(), 10, 1)
    assert len(rep.fits) == 10
    for fold, fit in zip(folds, rep.fits):
        vocab = fit.vocabulary.token_index
        for i in fold:
            assert f"mot{i}" not in vocab
        assert fit.vocabulary.num_docs == 40 - fold.size
    assert time.perf_counter() - start < 5


def _random_dataset(rng) -> Dataset:
    alphabet = list("abc xyz'\",%{}\\\t@?éèœ-") + ["\n"]
    n_attr = int(rng.integers(1, 6))
    attrs = []
    for j in range(n_attr):
        kind = rng.choice(["numeric", "string", "nominal"])
        name = f"a{j}" if rng.random() < 0.7 else f"at tr'{j}"
        if kind == "numeric":
            attrs.append(AttributeSpec.numeric(name))
        elif kind == "string":
            attrs.append(AttributeSpec.string(name))
        else:
            values = list(dict.fromkeys("".join(rng.choice(alphabet, size=int(rng.integers(1, 4)))) for _ in range(3)))
            attrs.append(AttributeSpec.nominal(name, values))
    attrs.append(AttributeSpec.nominal("class", ["A", "B", "c d"]))
    rows = []
    for _ in range(int(rng.integers(0, 6))):
        cells = []
        for a in attrs:
            if a.name != "class" and rng.random() < 0.15:
                cells.append(MISSING)
            elif a.is_numeric:
                cells.append(float(rng.choice([0.0, 1.0, -2.5, rng.normal() * 10 ** int(rng.integers(-3, 4))])))
            elif a.is_string:
                cells.append("".join(rng.choice(alphabet, size=int(rng.integers(0, 8)))))
            else:
                cells.append(a.values[int(rng.integers(len(a.values)))])
        rows.append(Instance(cells))
    return Dataset("rel " + str(int(rng.integers(100))), tuple(attrs), tuple(rows))


@pytest.mark.criterion(9, "ARFF round trip")
def test_arff_round_trip():
    rng = np.random.default_rng(9)
    start = time.perf_counter()
    for _ in range(1000):
        data = _random_dataset(rng)
        for sparse in (False, True):
            back = parse_arff(write_arff(data, sparse=sparse))
            assert back == data
    assert time.perf_counter() - start < 10


@pytest.mark.criterion(10, "tokenizer counting laws")
def test_tokenizer_laws():
    rng = np.random.default_rng(10)
    for _ in range(500):
        s = "".join(rng.choice(list("ab cdé'."), size=int(rng.integers(0, 15))))
        n = int(rng.integers(1, 6))
        assert len(char_ngrams(s, n, n)) == max(0, len(s) - n + 1)
    assert char_ngrams("bonjour", 3, 3) == ["bon", "onj", "njo", "jou", "our"]
    for _ in range(200):
        u = int(rng.integers(3, 12))
        text = " ".join(rng.choice(["je", "tu", "il", "mange", "bien"], size=u))
        assert len(word_tokenize(text)) == u
        assert len(word_ngrams(text, 1, 3)) == u + (u - 1) + (u - 2)


@pytest.mark.criterion(11, "end-to-end demo corpus experiment")
def test_end_to_end_demo_experiment(demo_data):
    start = time.perf_counter()
    assert len(demo_data) == 2000
    assert sorted(np.bincount(demo_data.class_codes()).tolist()) == [400] * 5
    tok = TokenizerSpec.char_ngram(3, 3)
    opts = VectorizerOptions(tf_transform=False, idf_transform=False)
    smo = cross_validate(ClassifierSpec("smo"), tok, opts, demo_data, k=10, seed=1)
    zero = cross_validate(ClassifierSpec("zero_r"), tok, opts, demo_data, k=10, seed=1)
    assert smo.accuracy >= 0.95
    assert zero.accuracy == pytest.approx(0.20, abs=0.01)
    assert smo.accuracy > zero.accuracy
    assert time.perf_counter() - start < 60


@pytest.mark.criterion(12, "MAE bounds and reference values")
def test_mae_properties():
    assert mae(np.eye(5), np.arange(5)) == 0.0
    assert mae(np.full((1, 5), 0.2), [3]) == pytest.approx(0.32, abs=1e-12)
    rng = np.random.default_rng(12)
    for _ in range(500):
        K = int(rng.integers(2, 7))
        n = int(rng.integers(1, 20))
        P = rng.dirichlet(np.ones(K) * rng.choice([0.1, 1.0, 10.0]), size=n)
        value = mae(P, rng.integers(0, K, size=n))
        assert 0.0 <= value <= 2 * (K - 1) / K + 1e-12


@pytest.mark.criterion(13, "tree and rule learner properties")
def test_tree_and_rule_properties():
    rng = np.random.default_rng(13)
    start = time.perf_counter()
    # consistent data: distinct rows, arbitrary labels
    for _ in range(20):
        n = int(rng.integers(5, 60))
        X = np.unique(rng.integers(0, 4, size=(n, 3)), axis=0).astype(float)
        y = rng.integers(0, 3, size=X.shape[0])
        spec = ClassifierSpec("c45", {"pruned": False, "min_leaf": 1})
        model = fit_matrix(spec, sp.csr_matrix(X), y, ["a", "b", "c"])
        assert np.array_equal(model.predict_proba(sp.csr_matrix(X)).argmax(axis=1), y)

    assert foil_gain(2, 2, 2, 0) == 2.0
    parent = [2, 2]
    assert information_gain(parent, [[2, 0], [0, 2]]) == 1.0
    assert gain_ratio(parent, [[2, 0], [0, 2]]) == 1.0

    for _ in range(30):
        n = int(rng.integers(10, 80))
        X = sp.csr_matrix(rng.integers(0, 5, size=(n, 4)).astype(float))
        y = rng.integers(0, 2, size=n)
        grow, prune = grow_prune_split(y, 1 / 3, rng)
        tree = grow_tree(X[grow], y[grow], 2, min_leaf=1, criterion="gain")
        pruned = reduced_error_prune(tree, X[prune], y[prune], 2)
        assert prune_set_errors(pruned, X[prune], y[prune]) <= prune_set_errors(tree, X[prune], y[prune])
    assert time.perf_counter() - start < 10


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
