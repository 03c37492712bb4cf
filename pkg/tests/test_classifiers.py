import numpy as np
import pytest

from tauswitch.classifiers import (
    ClassifierSpec,
    DecisionTreeClassifier,
    GridSearchCV,
    LogisticRegression,
    SVC,
    canonical_specs,
    grid_search_cv,
    standardize,
    stratified_fold_indices,
    train_classifier,
)


class TestStandardize:
    def test_two_point_column(self):
        scaler, transformed = standardize(np.array([[1.0], [3.0]]))
        assert scaler.mean_.tolist() == [2.0]
        assert scaler.scale_.tolist() == [1.0]  # population std
        np.testing.assert_array_equal(transformed, [[-1.0], [1.0]])

    def test_constant_column_centered_only(self):
        _, transformed = standardize(np.array([[5.0], [5.0], [5.0]]))
        np.testing.assert_array_equal(transformed, [[0.0], [0.0], [0.0]])

    def test_train_mean_maps_to_zero(self):
        X = np.array([[1.0, 10.0], [3.0, 30.0], [5.0, 20.0]])
        scaler, _ = standardize(X)
        np.testing.assert_allclose(
            scaler.transform(X.mean(axis=0, keepdims=True)), [[0.0, 0.0]], atol=1e-15
        )

    def test_idempotence(self):
        rng = np.random.default_rng(5)
        X = rng.normal(3.0, 10.0, size=(50, 4))
        _, once = standardize(X)
        _, twice = standardize(once)
        assert np.max(np.abs(twice - once)) < 1e-9

    def test_column_statistics(self):
        rng = np.random.default_rng(6)
        X = rng.normal(0.0, 5.0, size=(40, 3))
        _, transformed = standardize(X)
        assert np.max(np.abs(transformed.mean(axis=0))) < 1e-9
        np.testing.assert_allclose(transformed.std(axis=0), 1.0, atol=1e-9)


class TestLogisticRegression:
    def test_separable_pair(self):
        X = np.array([[-1.0], [1.0]])
        y = np.array([0, 1])
        model = LogisticRegression(penalty="l2", strength=0.01).fit(X, y)
        assert model.predict_proba([[1.0]])[0, 1] > 0.9

    def test_zero_weights_give_half(self):
        # A huge l1 penalty zeroes the weights; the balanced symmetric sample
        # keeps the intercept at exactly zero.
        X = np.array([[-1.0], [1.0], [-2.0], [2.0]])
        y = np.array([0, 1, 0, 1])
        model = LogisticRegression(penalty="l1", strength=100.0).fit(X, y)
        np.testing.assert_array_equal(model.coef_, [0.0])
        probs = model.predict_proba([[0.7]])
        np.testing.assert_array_equal(probs, [[0.5, 0.5]])

    def test_l1_sparsifies(self):
        rng = np.random.default_rng(13)
        informative = rng.normal(0, 1, size=(80, 1))
        noise = rng.normal(0, 1, size=(80, 3))
        X = np.hstack([informative, noise])
        y = (informative[:, 0] > 0).astype(int)
        model = LogisticRegression(penalty="l1", strength=0.1).fit(X, y)
        assert np.sum(model.coef_ == 0.0) >= 2
        assert model.coef_[0] != 0.0

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="both classes"):
            LogisticRegression().fit(np.ones((4, 1)), np.zeros(4, int))


class TestDecisionTree:
    def test_pure_leaves_probability_one(self):
        X = np.array([[0.0], [0.1], [1.0], [1.1]])
        y = np.array([0, 0, 1, 1])
        model = DecisionTreeClassifier(criterion="gini").fit(X, y)
        np.testing.assert_array_equal(model.predict_proba([[0.05]]), [[1.0, 0.0]])
        np.testing.assert_array_equal(model.predict_proba([[1.05]]), [[0.0, 1.0]])

    def test_leaf_frequencies(self):
        # All feature values equal: no valid split, the root is a 3-vs-1 leaf.
        X = np.zeros((4, 2))
        y = np.array([0, 0, 0, 1])
        model = DecisionTreeClassifier().fit(X, y)
        np.testing.assert_array_equal(model.predict_proba([[0.0, 0.0]]), [[0.75, 0.25]])

    def test_depth_cap(self):
        rng = np.random.default_rng(17)
        X = rng.normal(size=(200, 3))
        y = rng.integers(0, 2, 200)
        model = DecisionTreeClassifier(max_depth=2).fit(X, y)

        def depth(node):
            if node.is_leaf:
                return 0
            return 1 + max(depth(node.left), depth(node.right))

        assert depth(model.root_) <= 2

    def test_min_leaf_respected(self):
        rng = np.random.default_rng(19)
        X = rng.normal(size=(30, 2))
        y = rng.integers(0, 2, 30)
        model = DecisionTreeClassifier(min_samples_leaf=5).fit(X, y)

        def leaf_sizes(node, X_node, y_node):
            if node.is_leaf:
                yield len(y_node)
                return
            mask = X_node[:, node.feature] <= node.threshold
            yield from leaf_sizes(node.left, X_node[mask], y_node[mask])
            yield from leaf_sizes(node.right, X_node[~mask], y_node[~mask])

        assert min(leaf_sizes(model.root_, X, y)) >= 5


class TestSVC:
    def test_separable_pair_orientation(self):
        X = np.array([[-1.0], [1.0]])
        y = np.array([0, 1])
        model = SVC(kernel="linear", C=1.0).fit(X, y)
        assert model.decision_function([[1.0]])[0] > 0
        assert model.decision_function([[-1.0]])[0] < 0

    def test_probabilities_follow_decision(self, separable_xy):
        X, y = separable_xy
        model = SVC(kernel="rbf", C=1.0, gamma=0.5).fit(X, y)
        probs = model.predict_proba(X)
        decisions = model.decision_function(X)
        assert np.all((decisions > 0) == (probs[:, 1] > 0.5))
        assert np.mean(model.predict(X) == y) >= 0.95

    def test_all_kernels_fit(self, separable_xy):
        X, y = separable_xy
        for kernel in ("rbf", "linear", "poly", "sigmoid"):
            model = SVC(kernel=kernel, C=1.0).fit(X, y)
            assert np.mean(model.predict(X) == y) >= 0.95


class TestProbabilityContract:
    def models(self, X, y):
        yield LogisticRegression(penalty="elasticnet", strength=0.1, l1_ratio=0.5).fit(X, y)
        yield DecisionTreeClassifier(criterion="entropy").fit(X, y)
        yield SVC(kernel="rbf", C=1.0).fit(X, y)

    def test_rows_sum_to_one(self, separable_xy):
        X, y = separable_xy
        for model in self.models(X, y):
            probs = model.predict_proba(X)
            assert np.all(probs >= 0.0) and np.all(probs <= 1.0)
            np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-9)

    def test_feature_count_mismatch(self, separable_xy):
        X, y = separable_xy
        for model in self.models(X, y):
            with pytest.raises(ValueError, match="features"):
                model.predict_proba(X[:, :1])


class TestLabelPermutation:
    def test_tree_and_logreg_swap_exactly(self, separable_xy):
        X, y = separable_xy
        for make in (
            lambda: DecisionTreeClassifier(criterion="gini"),
            lambda: DecisionTreeClassifier(criterion="entropy"),
            lambda: LogisticRegression(penalty="l1", strength=0.1),
            lambda: LogisticRegression(penalty="l2", strength=0.1),
            lambda: LogisticRegression(penalty="elasticnet", strength=0.1, l1_ratio=0.25),
        ):
            base = make().fit(X, y).predict_proba(X)
            flipped = make().fit(X, 1 - y).predict_proba(X)
            np.testing.assert_array_equal(flipped[:, [1, 0]], base)

    def test_svm_swaps_within_tolerance(self, separable_xy):
        X, y = separable_xy
        base = SVC(kernel="linear", C=1.0, random_state=3).fit(X, y).predict_proba(X)
        flipped = SVC(kernel="linear", C=1.0, random_state=3).fit(X, 1 - y).predict_proba(X)
        np.testing.assert_allclose(flipped[:, [1, 0]], base, atol=1e-6)


class TestGridSearch:
    def test_single_point_grid_equals_plain_fit(self, separable_xy):
        X, y = separable_xy
        spec = ClassifierSpec("logreg", "l2", hyper_grid=({"strength": 0.1},))
        searched = grid_search_cv(spec, X, y, folds=5, seed=1)
        plain = train_classifier(spec, X, y, {"strength": 0.1})
        np.testing.assert_array_equal(searched.coef_, plain.coef_)
        assert searched.intercept_ == plain.intercept_

    def test_better_point_selected(self, separable_xy):
        X, y = separable_xy
        # A huge l1 strength zeroes every weight, leaving a coin-flip model.
        spec = ClassifierSpec(
            "logreg", "l1", hyper_grid=({"strength": 1e6}, {"strength": 0.01})
        )
        search = GridSearchCV(spec, folds=5, seed=2).fit(X, y)
        assert search.cv_scores_[0] <= 0.5
        assert search.cv_scores_[1] >= 0.95
        assert search.best_params_ == {"strength": 0.01}

    def test_tie_breaks_to_grid_order(self, separable_xy):
        X, y = separable_xy
        spec = ClassifierSpec(
            "logreg", "l2", hyper_grid=({"strength": 0.01}, {"strength": 0.01})
        )
        search = GridSearchCV(spec, folds=5, seed=2).fit(X, y)
        assert search.best_index_ == 0

    def test_seed_fixes_folds(self, separable_xy):
        X, y = separable_xy
        rng_a = np.random.default_rng(11)
        rng_b = np.random.default_rng(11)
        folds_a = stratified_fold_indices(y, 5, rng_a)
        folds_b = stratified_fold_indices(y, 5, rng_b)
        for a, b in zip(folds_a, folds_b):
            np.testing.assert_array_equal(a, b)

        spec = ClassifierSpec("svm", "rbf")
        first = GridSearchCV(spec, folds=5, seed=9).fit(X, y)
        second = GridSearchCV(spec, folds=5, seed=9).fit(X, y)
        assert first.best_params_ == second.best_params_
        assert first.cv_scores_ == second.cv_scores_

    def test_stratification_needs_enough_samples(self):
        X = np.arange(8.0).reshape(-1, 1)
        y = np.array([0, 0, 0, 0, 0, 1, 1, 1])
        with pytest.raises(ValueError, match="class 1"):
            GridSearchCV(ClassifierSpec("tree", "gini"), folds=5, seed=0).fit(X, y)

    def test_every_fold_has_both_classes(self, separable_xy):
        X, y = separable_xy
        folds = stratified_fold_indices(y, 5, np.random.default_rng(0))
        assert sorted(np.concatenate(folds).tolist()) == list(range(len(y)))
        for fold in folds:
            assert set(y[fold]) == {0, 1}


class TestCanonicalSpecs:
    def test_exactly_nine(self):
        specs = canonical_specs()
        assert len(specs) == 9
        by_family = {}
        for spec in specs:
            by_family.setdefault(spec.family, []).append(spec.variant)
        assert by_family["svm"] == ["rbf", "linear", "poly", "sigmoid"]
        assert by_family["tree"] == ["gini", "entropy"]
        assert by_family["logreg"] == ["l1", "l2", "elasticnet"]

    def test_illegal_variant_rejected(self):
        with pytest.raises(ValueError, match="not legal"):
            ClassifierSpec("tree", "rbf")

    def test_separable_sanity_all_specs(self, separable_xy):
        X, y = separable_xy
        for spec in canonical_specs():
            search = GridSearchCV(spec, folds=5, seed=3).fit(X, y)
            assert search.best_score_ >= 0.95, spec.name
