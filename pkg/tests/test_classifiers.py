import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from heartml.classifiers import (
    KINDS,
    ForestSpec,
    TreeSpec,
    default_spec,
    fit_model,
    make_spec,
    predict_label,
    predict_proba,
    sigmoid,
    spec_from_dict,
    spec_to_dict,
)
from heartml.classifiers import gnb, knn, logreg, tree
from heartml.classifiers.mlp import MlpParams, mlp_forward, mlp_grad, mlp_loss
from heartml.classifiers.svm import (
    decision_function,
    kernel_matrix,
    platt_calibrate,
    resolve_gamma,
    svm_train_smo,
)
from heartml.errors import DegenerateTrainingError, DomainError
from heartml.rng import RngStream

from oracles import central_difference, grid_argmin, max_relative_error

STREAM = RngStream(42, "test")


def _toy(gen, n=30, d=4):
    X = gen.normal(size=(n, d))
    y = (X[:, 0] + 0.5 * gen.normal(size=n) > 0).astype(int)
    y[:2] = [0, 1]
    return X, y


class TestSigmoid:
    def test_values(self):
        assert sigmoid(0.0) == 0.5
        assert sigmoid(math.log(3)) == pytest.approx(0.75, abs=1e-15)

    def test_no_overflow(self):
        with np.errstate(over="raise", invalid="raise"):
            out = sigmoid(np.array([-1e4, 1e4]))
        assert out.tolist() == [0.0, 1.0]

    @given(st.floats(-700, 700))
    def test_symmetry(self, z):
        assert abs(sigmoid(-z) - (1 - sigmoid(z))) < 1e-12


class TestPredictLabel:
    @pytest.mark.parametrize("p, label", [(0.51, 1), (0.5, 1), (0.49, 0)])
    def test_threshold_rule(self, p, label):
        assert predict_label(p) == label

    @pytest.mark.parametrize("threshold", [-0.1, 1.5])
    def test_threshold_domain(self, threshold):
        with pytest.raises(DomainError):
            predict_label(0.3, threshold)


class TestSpecs:
    def test_defaults(self):
        assert default_spec("knn").k == 5
        assert default_spec("forest").n_trees == 100
        assert default_spec("forest").n_candidates(13) == 4
        mlp = default_spec("mlp")
        assert (mlp.hidden_units, mlp.activation, mlp.epochs) == (16, "relu", 300)

    @pytest.mark.parametrize(
        "kind, params",
        [("knn", {"k": 0}), ("svm", {"C": 0}), ("logreg", {"learning_rate": -1}), ("svm", {"kernel": "poly"}),
         ("tree", {"depth": 3}), ("boost", {})],
    )
    def test_invalid(self, kind, params):
        with pytest.raises(DomainError):
            make_spec(kind, **params)

    @pytest.mark.parametrize("kind", KINDS)
    def test_dict_round_trip(self, kind):
        s = default_spec(kind)
        assert spec_from_dict(spec_to_dict(s)) == s


class TestFitContract:
    @pytest.mark.parametrize("kind", KINDS)
    def test_deterministic_and_bounded(self, kind, rng):
        X, y = _toy(rng)
        spec = make_spec("forest", n_trees=10) if kind == "forest" else default_spec(kind)
        a = fit_model(spec, X, y, STREAM)
        b = fit_model(spec, X, y, STREAM)
        pa, pb = predict_proba(a, X), predict_proba(b, X)
        assert np.array_equal(pa, pb)
        assert np.all((pa >= 0) & (pa <= 1))

    @pytest.mark.parametrize("kind", ["logreg", "svm", "gnb", "mlp"])
    def test_single_class_rejected(self, kind):
        with pytest.raises(DegenerateTrainingError, match=kind):
            fit_model(default_spec(kind), np.ones((4, 2)), np.zeros(4, dtype=int), STREAM)

    def test_single_class_tree_is_constant(self):
        m = fit_model(default_spec("tree"), np.arange(8.0).reshape(4, 2), np.ones(4, dtype=int), STREAM)
        assert predict_proba(m, np.zeros((1, 2))).tolist() == [1.0]

    def test_non_binary_labels(self):
        with pytest.raises(DomainError):
            fit_model(default_spec("knn"), np.ones((3, 2)), np.array([0, 1, 2]), STREAM)

    def test_width_mismatch(self, rng):
        X, y = _toy(rng)
        m = fit_model(default_spec("gnb"), X, y, STREAM)
        with pytest.raises(DomainError):
            predict_proba(m, np.zeros((1, 3)))


class TestLogReg:
    def test_zero_weights_loss(self):
        X = np.random.default_rng(0).normal(size=(6, 3))
        loss, _, _ = logreg.logreg_loss_grad(np.zeros(3), 0.0, X, np.array([0, 1] * 3))
        assert abs(loss - math.log(2)) < 1e-12

    def test_hand_gradient(self):
        _, gw, gb = logreg.logreg_loss_grad(np.zeros(1), 0.0, np.array([[-1.0], [1.0]]), np.array([0, 1]))
        assert gw[0] == pytest.approx(-0.5, abs=1e-15)
        assert gb == pytest.approx(0.0, abs=1e-15)

    def test_regularised_optimum(self):
        X, y = np.array([[-1.0], [1.0]]), np.array([0, 1])

        def loss(w, b):
            z = w * X[:, 0] + b
            return float(np.mean(np.logaddexp(0, z) - y * z)) + 0.05 * w * w

        _, w_star, b_star = grid_argmin(loss, np.arange(0, 4, 0.0005), np.arange(-0.01, 0.0101, 0.0005))
        assert w_star == pytest.approx(1.6335, abs=1e-9)  # frozen grid oracle
        default = fit_model(make_spec("logreg", l2_lambda=0.1), X, y, STREAM).learned
        assert 0 < default.weights[0] < 10
        tight = fit_model(make_spec("logreg", l2_lambda=0.1, max_iters=100000, tolerance=1e-14), X, y, STREAM)
        assert tight.learned.weights[0] == pytest.approx(w_star, abs=1e-3)
        assert tight.learned.bias == pytest.approx(b_star, abs=1e-3)

    def test_probability_is_sigmoid(self, rng):
        X, y = _toy(rng)
        m = fit_model(default_spec("logreg"), X, y, STREAM)
        expected = sigmoid(X @ m.learned.weights + m.learned.bias)
        np.testing.assert_allclose(predict_proba(m, X), expected, rtol=0, atol=1e-15)


class TestKnn:
    TRAIN = np.array([[0.0], [1.0], [10.0]])

    def test_hand_neighbours(self):
        assert knn.knn_neighbors(self.TRAIN, np.array([0.4]), 2).tolist() == [0, 1]

    def test_all(self):
        assert sorted(knn.knn_neighbors(self.TRAIN, np.array([3.0]), 3).tolist()) == [0, 1, 2]

    def test_tie_goes_to_lower_index(self):
        train = np.array([[1.0], [1.0], [1.0]])
        assert knn.knn_neighbors(train, np.array([0.0]), 2).tolist() == [0, 1]

    @pytest.mark.parametrize("k", [0, 4])
    def test_k_domain(self, k):
        with pytest.raises(DomainError):
            knn.knn_neighbors(self.TRAIN, np.array([0.0]), k)

    def test_k_equals_n_gives_base_rate(self, rng):
        X, y = _toy(rng)
        m = fit_model(make_spec("knn", k=len(y)), X, y, STREAM)
        np.testing.assert_allclose(predict_proba(m, rng.normal(size=(5, 4))), y.mean())

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.1, 100), st.floats(-50, 50))
    def test_affine_invariance(self, scale, shift):
        gen = np.random.default_rng(3)
        X, y = _toy(gen)
        Q = gen.normal(size=(6, 4))
        a = predict_proba(fit_model(default_spec("knn"), X, y, STREAM), Q)
        b = predict_proba(fit_model(default_spec("knn"), X * scale + shift, y, STREAM), Q * scale + shift)
        assert np.array_equal(a, b)


class TestSvm:
    def test_one_dimensional_max_margin(self):
        X = np.array([[-1.0], [1.0]])
        alpha, b, converged = svm_train_smo(X, np.array([-1.0, 1.0]), 100.0)
        assert converged
        m = fit_model(make_spec("svm", C=100.0), X, np.array([0, 1]), STREAM)
        xs = np.linspace(-3, 3, 13)[:, None]
        f = decision_function(m.learned, m.spec, xs)
        np.testing.assert_allclose(f, xs[:, 0], atol=0.01)

    @settings(max_examples=25, deadline=None)
    @given(
        seed=st.integers(0, 10**6),
        C=st.sampled_from([0.1, 1.0, 10.0]),
        kernel=st.sampled_from(["linear", "rbf"]),
    )
    def test_dual_feasibility(self, seed, C, kernel):
        gen = np.random.default_rng(seed)
        X, y = _toy(gen, n=25)
        y_pm = np.where(y == 1, 1.0, -1.0)
        alpha, _, _ = svm_train_smo(X, y_pm, C, kernel)
        assert np.all(alpha >= 0) and np.all(alpha <= C)
        assert abs(float(alpha @ y_pm)) < 1e-8

    def test_kkt_within_tolerance(self, rng):
        X, y = _toy(rng, n=40)
        y_pm = np.where(y == 1, 1.0, -1.0)
        C = 1.0
        alpha, b, converged = svm_train_smo(X, y_pm, C, tolerance=1e-3)
        assert converged
        f = (kernel_matrix(X, X, "linear", 1.0) @ (alpha * y_pm)) + b
        margin = y_pm * f
        assert np.all(margin[alpha < 1e-8] >= 1 - 2e-3)
        assert np.all(margin[alpha > C - 1e-8] <= 1 + 2e-3)
        free = (alpha > 1e-8) & (alpha < C - 1e-8)
        np.testing.assert_allclose(margin[free], 1.0, atol=2e-3)

    def test_gamma_auto(self):
        assert resolve_gamma("auto", 13) == 1 / 13
        assert resolve_gamma(0.5, 13) == 0.5

    def test_grid_point_from_reference(self, rng):
        X, y = _toy(rng)
        m = fit_model(make_spec("svm", kernel="linear", gamma="auto", C=2.0), X, y, STREAM)
        assert m.learned.converged


class TestPlatt:
    F = np.r_[[-2.0] * 10, [2.0] * 10]
    Y = np.r_[[0] * 10, [1] * 10]

    def _p(self, A, B, f):
        return 1 / (1 + math.exp(A * f + B))

    def test_symmetric(self):
        A, B, fallback = platt_calibrate(self.F, self.Y)
        assert not fallback and A <= 0
        assert self._p(A, B, 0.0) == pytest.approx(0.5, abs=1e-3)

    def test_matches_grid_oracle(self):
        t = np.where(self.Y == 1, 11 / 12, 1 / 12)

        def nll(A, B):
            z = A * self.F + B
            return float(np.sum(t * z + np.logaddexp(0, -z)))

        _, A_star, B_star = grid_argmin(nll, np.arange(-3, 0, 0.005), np.arange(-0.5, 0.5, 0.005))
        A, B, _ = platt_calibrate(self.F, self.Y)
        assert A == pytest.approx(A_star, abs=0.005)
        assert B == pytest.approx(B_star, abs=0.005)
        assert self._p(A, B, 2.0) > 0.9

    def test_degenerate_fallback(self):
        assert platt_calibrate(self.F, np.zeros(20)) == (-1.0, 0.0, True)

    @settings(max_examples=30, deadline=None)
    @given(arrays(np.float64, 12, elements=st.floats(-5, 5)))
    def test_monotone(self, f):
        y = np.array([0, 1] * 6)
        A, B, _ = platt_calibrate(f, y)
        grid = np.linspace(-6, 6, 25)
        p = 1 / (1 + np.exp(A * grid + B))
        assert np.all(np.diff(p) >= 0)


class TestTree:
    @pytest.mark.parametrize("counts, g", [((10, 0), 0.0), ((5, 5), 0.5), ((1, 3), 0.375)])
    def test_gini(self, counts, g):
        assert tree.gini_impurity(counts) == pytest.approx(g, abs=1e-15)

    def test_gini_empty(self):
        with pytest.raises(DomainError):
            tree.gini_impurity((0, 0))

    def test_hand_split(self):
        f, thr, gain = tree.best_split(np.array([[1.0], [2.0], [3.0], [4.0]]), np.array([0, 0, 1, 1]), [0])
        assert (f, thr) == (0, 2.5)
        assert gain == pytest.approx(0.5, abs=1e-15)

    def test_pure_node(self):
        assert tree.best_split(np.array([[1.0], [2.0]]), np.array([1, 1]), [0]) is None

    def test_xor_has_no_split(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
        assert tree.best_split(X, np.array([0, 0, 1, 1]), [0, 1]) is None

    def test_tie_prefers_lower_feature(self):
        X = np.array([[1.0, 1.0], [2.0, 2.0]])
        f, thr, _ = tree.best_split(X, np.array([0, 1]), [0, 1])
        assert (f, thr) == (0, 1.5)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6))
    def test_matches_exhaustive_enumeration(self, seed):
        gen = np.random.default_rng(seed)
        X = gen.integers(0, 5, size=(12, 3)).astype(float)
        y = gen.integers(0, 2, size=12)
        got = tree.best_split(X, y, [0, 1, 2])

        def gini(labels):
            if len(labels) == 0:
                return 0.0
            p = sum(labels) / len(labels)
            return 1 - p * p - (1 - p) ** 2

        best = (0.0, None, None)
        for f in range(3):
            vals = sorted(set(X[:, f]))
            for a, b in zip(vals, vals[1:]):
                thr = (a + b) / 2
                left = y[X[:, f] <= thr]
                right = y[X[:, f] > thr]
                gain = gini(y) - (len(left) * gini(left) + len(right) * gini(right)) / len(y)
                if gain > best[0] + 1e-12:
                    best = (gain, f, thr)
        if best[1] is None:
            assert got is None
        else:
            assert got[:2] == (best[1], best[2])
            assert got[2] == pytest.approx(best[0], abs=1e-12)

    def test_pure_leaf_probability(self, rng):
        X, y = _toy(rng)
        m = fit_model(default_spec("tree"), X, y, STREAM)
        p = predict_proba(m, X)
        # unlimited depth on distinct rows: every training row sits in a pure leaf
        assert np.array_equal(p, y.astype(float))

    def test_max_depth(self, rng):
        X, y = _toy(rng)
        m = fit_model(make_spec("tree", max_depth=2), X, y, STREAM)
        assert m.learned.depth <= 2


class TestGnb:
    def _symmetric(self):
        X = np.array([[-1.5], [-0.5], [0.5], [1.5]])
        return fit_model(default_spec("gnb"), X, np.array([0, 0, 1, 1]), STREAM)

    def test_midpoint(self):
        assert predict_proba(self._symmetric(), np.array([[0.0]]))[0] == pytest.approx(0.5, abs=1e-9)

    def test_at_class_mean(self):
        X = np.array([[0.0], [0.1], [5.0], [5.1]])
        m = fit_model(default_spec("gnb"), X, np.array([0, 0, 1, 1]), STREAM)
        assert predict_proba(m, np.array([[5.05]]))[0] > 0.99

    def test_doubling_counts(self, rng):
        X, y = _toy(rng)
        a = fit_model(default_spec("gnb"), X, y, STREAM)
        b = fit_model(default_spec("gnb"), np.vstack([X, X]), np.r_[y, y], STREAM)
        Q = rng.normal(size=(5, 4))
        np.testing.assert_allclose(predict_proba(a, Q), predict_proba(b, Q), atol=1e-12)

    def test_matches_direct_density(self, rng):
        X, y = _toy(rng)
        m = fit_model(default_spec("gnb"), X, y, STREAM).learned
        Q = rng.normal(size=(10, 4))
        for q, p in zip(Q, gnb.posterior(m, Q)):
            joint = []
            for c in (0, 1):
                like = m.class_counts[c] / sum(m.class_counts)
                for j in range(4):
                    v = m.variances[c][j]
                    like *= math.exp(-((q[j] - m.means[c][j]) ** 2) / (2 * v)) / math.sqrt(2 * math.pi * v)
                joint.append(like)
            assert p == pytest.approx(joint[1] / sum(joint), abs=1e-9)


class TestForest:
    @pytest.mark.parametrize("seed", range(5))
    def test_one_tree_equals_tree(self, seed):
        gen = np.random.default_rng(seed)
        X, y = _toy(gen, n=40, d=6)
        t = fit_model(TreeSpec(max_depth=4), X, y, STREAM)
        f = fit_model(ForestSpec(n_trees=1, bootstrap=False, features_per_split="all", max_depth=4), X, y, STREAM)
        Q = gen.normal(size=(50, 6))
        assert np.array_equal(predict_proba(t, Q), predict_proba(f, Q))

    def test_mean_of_trees(self, rng):
        X, y = _toy(rng)
        m = fit_model(make_spec("forest", n_trees=3), X, y, STREAM)
        Q = rng.normal(size=(8, 4))
        each = np.vstack([tree.proba(t, None, Q) for t in m.learned.trees])
        np.testing.assert_allclose(predict_proba(m, Q), each.mean(axis=0), atol=1e-15)

    def test_tree_stream_labels(self, rng):
        X, y = _toy(rng)
        m = fit_model(make_spec("forest", n_trees=3), X, y, STREAM)
        assert m.learned.labels == ("test/tree-0", "test/tree-1", "test/tree-2")


class TestMlp:
    @staticmethod
    def _params(gen, d=3, h=5, activation="relu"):
        return MlpParams(gen.normal(size=(h, d)), gen.normal(size=h), gen.normal(size=h), float(gen.normal()), activation)

    def test_zero_weights(self):
        p = MlpParams(np.zeros((4, 3)), np.zeros(4), np.zeros(4), 0.0)
        assert mlp_forward(p, np.array([1.0, -2.0, 3.0]))[1] == 0.5

    def test_positive_bias_path(self):
        p = MlpParams(np.zeros((2, 3)), np.full(2, 5.0), np.ones(2), 0.0)
        for x in np.random.default_rng(0).normal(size=(5, 3)):
            assert mlp_forward(p, x)[1] > 0.5

    def test_relu_blocks_negative(self):
        p = MlpParams(np.zeros((1, 1)), np.array([-3.0]), np.ones(1), 0.0)
        hidden = mlp_forward(p, np.array([0.0]))[0][1]
        assert hidden.tolist() == [0.0]

    @pytest.mark.parametrize("activation", ["relu", "logistic"])
    def test_finite_differences(self, activation):
        gen = np.random.default_rng(11)
        X = gen.normal(size=(4, 3))
        y = np.array([0, 1, 1, 0])
        p = self._params(gen, activation=activation)
        g = mlp_grad(p, X, y)
        for name in ("W1", "b1", "w2", "b2"):
            def f(v, name=name):
                fields = {"W1": p.W1, "b1": p.b1, "w2": p.w2, "b2": p.b2}
                fields[name] = v if name != "b2" else float(v)
                return mlp_loss(MlpParams(**fields, activation=activation), X, y)
            assert max_relative_error(g[name], central_difference(f, getattr(p, name))) < 1e-4

    def test_stationary_at_perfect_fit(self):
        # output saturates at the targets
        p = MlpParams(np.array([[1.0]]), np.zeros(1), np.array([60.0]), -30.0)
        g = mlp_grad(p, np.array([[0.0], [1.0]]), np.array([0, 1]))
        assert math.sqrt(sum(float(np.sum(v**2)) for v in g.values())) < 1e-6

    def test_duplicate_rows(self):
        gen = np.random.default_rng(2)
        X = gen.normal(size=(5, 3))
        y = np.array([0, 1, 0, 1, 1])
        p = self._params(gen)
        a = mlp_grad(p, X, y)
        b = mlp_grad(p, np.vstack([X, X]), np.r_[y, y])
        for k in a:
            np.testing.assert_allclose(a[k], b[k], atol=1e-14)

    def test_training_reduces_loss(self, rng):
        X, y = _toy(rng)
        from heartml.classifiers.mlp import init_params

        spec = make_spec("mlp", learning_rate=0.1)
        start = init_params(spec, 4, STREAM.child("init").generator())
        m = fit_model(spec, X, y, STREAM)
        assert mlp_loss(m.learned, X, y) < mlp_loss(start, X, y)
