import math

import numpy as np
import pytest

import priorlift as pl
from conftest import synthetic_binary


class TestProbability:
    def test_zero_coefficients_give_half(self):
        assert pl.g(np.array([1.0, 3.7]), np.zeros(2)) == 0.5

    def test_log_three_gives_three_quarters(self):
        # linear predictor ln 3 -> 1/(1 + 1/3)
        value = pl.g(np.array([1.0, 2.0]), np.array([math.log(3.0), 0.0]))
        assert value == pytest.approx(0.75, abs=1e-15)

    def test_saturation_is_stable(self):
        value = pl.g(np.array([1.0, 0.0]), np.array([-1000.0, 0.0]))
        assert 0.0 <= value <= 1e-300
        assert not math.isnan(value)
        high = pl.g(np.array([1.0, 0.0]), np.array([1000.0, 0.0]))
        assert high == 1.0

    def test_matrix_input(self):
        t = np.array([[1.0, 0.0], [1.0, 1.0]])
        np.testing.assert_allclose(pl.g(t, np.zeros(2)), [0.5, 0.5])

    def test_dimension_mismatch(self):
        with pytest.raises(pl.ShapeError):
            pl.g(np.array([1.0, 2.0]), np.zeros(3))


class TestGradient:
    def test_zero_theta_quarter_scaling(self):
        np.testing.assert_allclose(
            pl.g_prime(np.array([1.0, 2.0]), np.zeros(2)), [0.25, 0.5]
        )

    def test_vanishes_at_saturation(self):
        t = np.array([1.0, 50.0])
        grad = pl.g_prime(t, np.array([0.0, 2.0]))
        assert np.linalg.norm(grad) <= 1e-10 * np.linalg.norm(t)

    def test_matches_central_differences(self):
        rng = np.random.default_rng(101)
        step = 1e-5
        for _ in range(100):
            t = rng.normal(size=3)
            theta = rng.normal(size=3)
            grad = pl.g_prime(t, theta)
            numeric = np.empty(3)
            for k in range(3):
                delta = np.zeros(3)
                delta[k] = step
                numeric[k] = (pl.g(t, theta + delta) - pl.g(t, theta - delta)) / (2 * step)
            assert np.max(np.abs(grad - numeric)) <= 1e-6

    def test_dimension_mismatch(self):
        with pytest.raises(pl.ShapeError):
            pl.g_prime(np.array([1.0]), np.zeros(2))


class TestWeight:
    def test_half_gives_four(self):
        assert pl.weight(np.array([1.0, 0.0]), np.zeros(2)) == 4.0

    def test_three_quarters(self):
        value = pl.weight(np.array([1.0, 1.0]), np.array([math.log(3.0), 0.0]))
        assert value == pytest.approx(16.0 / 3.0, rel=1e-14)

    def test_clamped_weight_is_finite(self):
        value = pl.weight(np.array([1.0, 0.0]), np.array([-1000.0, 0.0]))
        assert value == pytest.approx(1.0 / (1e-10 * (1.0 - 1e-10)), rel=1e-12)
        assert math.isfinite(value)


class TestFit:
    def test_recovers_null_coefficients(self):
        data = synthetic_binary([0.0, 0.0], n=2000, r=2000, seed=42)
        fit = pl.fit_class(data, 1)
        assert fit.converged
        assert np.max(np.abs(fit.theta)) < 0.15

    def test_recovers_known_coefficients_within_4_se(self):
        truth = np.array([0.5, -1.0, 2.0])
        data = synthetic_binary(truth, n=5000, r=5000, seed=7)
        fit = pl.fit_class(data, 1)
        se = np.sqrt(np.diag(np.linalg.inv(fit.info)) / data.r)
        assert np.all(np.abs(fit.theta - truth) <= 4.0 * se)

    def test_constant_class_raises(self):
        data = pl.Dataset.from_arrays(
            np.random.default_rng(0).normal(size=(30, 1)),
            np.ones(30, dtype=np.int64),
            ("0", "1"),
        )
        with pytest.raises(pl.DegenerateClassError):
            pl.fit_class(data, 1)

    def test_converged_score_norm_within_tolerance(self):
        data = synthetic_binary([0.3, 1.0], n=500, r=400, seed=3)
        fit = pl.fit_class(data, 1)
        assert fit.converged
        assert fit.score_norm <= 1e-8
        # recompute the estimating equation from the exported primitives
        design = pl.add_intercept(data.labeled_features())
        y = data.indicator(1)
        rows = (
            pl.weight(design, fit.theta)
            * (y - pl.g(design, fit.theta))
        )[:, None] * pl.g_prime(design, fit.theta)
        recomputed = np.abs(rows.sum(axis=0)).max()
        assert recomputed == pytest.approx(fit.score_norm, abs=1e-10)

    def test_permutation_of_labeled_rows_is_bit_invariant(self):
        rng = np.random.default_rng(11)
        data = synthetic_binary([0.2, -0.7, 0.4], n=300, r=300, seed=11)
        perm = rng.permutation(300)
        shuffled = pl.Dataset.from_arrays(
            data.features[perm], data.label_indices[perm], data.class_values
        )
        a = pl.fit_class(data, 1)
        b = pl.fit_class(shuffled, 1)
        assert a.theta.tobytes() == b.theta.tobytes()
        assert a.info.tobytes() == b.info.tobytes()

    def test_fit_is_deterministic(self):
        data = synthetic_binary([0.1, 0.5], n=400, r=200, seed=2)
        a = pl.fit_class(data, 1)
        b = pl.fit_class(data, 1)
        assert a.theta.tobytes() == b.theta.tobytes()

    def test_rank_deficient_design(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=100)
        feats = np.column_stack([x, 2.0 * x])  # second column is collinear
        y = (rng.random(100) < pl.logistic(x)).astype(np.int64)
        data = pl.Dataset.from_arrays(feats, y, ("0", "1"))
        with pytest.raises(pl.SingularDesignError):
            pl.fit_class(data, 1)

    def test_separation_sets_flag_not_error(self):
        # tiny feature scale forces the coefficient norm through 1e4
        # while the score is still large
        x = np.concatenate([np.linspace(-3e-3, -5e-4, 25), np.linspace(5e-4, 3e-3, 25)])
        y = (x > 0).astype(np.int64)
        data = pl.Dataset.from_arrays(x[:, None], y, ("0", "1"))
        fit = pl.fit_class(data, 1)
        assert fit.separation
        assert not fit.converged
        assert np.linalg.norm(fit.theta) > 1e4

    def test_nonconvergence_carries_trace(self):
        data = synthetic_binary([0.3, 1.0], n=200, r=150, seed=5)
        with pytest.raises(pl.ConvergenceError) as err:
            pl.fit_class(data, 1, max_iterations=1)
        assert len(err.value.trace) >= 1


class TestInformation:
    def test_symmetric_psd_and_recomputable(self):
        data = synthetic_binary([0.4, -0.8, 0.6], n=600, r=450, seed=21)
        fit = pl.fit_class(data, 1)
        info = fit.info
        np.testing.assert_array_equal(info, info.T)
        assert np.linalg.eigvalsh(info).min() >= -1e-10
        # exact post-hoc recomputation: average w * g' g'^T over labeled
        # rows (upper triangle mirrored, matching the symmetric layout)
        design = pl.add_intercept(data.labeled_features())
        w = pl.weight(design, fit.theta)
        grads = pl.g_prime(design, fit.theta)
        p = design.shape[1]
        recomputed = np.empty((p, p))
        for a in range(p):
            for b in range(a, p):
                entry = math.fsum((w * grads[:, a] * grads[:, b]).tolist())
                recomputed[a, b] = recomputed[b, a] = entry
        recomputed /= data.r
        assert recomputed.tobytes() == info.tobytes()
        naive = (w[:, None] * grads).T @ grads / data.r
        np.testing.assert_allclose(naive, info, rtol=1e-12)

    def test_multiclass_fits_each_class(self):
        rng = np.random.default_rng(31)
        X = rng.normal(size=(400, 2))
        labels = rng.integers(0, 3, size=400)
        data = pl.Dataset.from_arrays(X, labels, ("a", "b", "c"))
        model = pl.fit_model(data)
        assert len(model) == 3
        assert {fit.class_index for fit in model} == {0, 1, 2}


class TestSerialization:
    def test_model_json_round_trip(self):
        data = synthetic_binary([0.2, 0.9], n=200, r=150, seed=8)
        model = pl.fit_model(data)
        back = pl.FittedModel.from_json(model.to_json())
        for a, b in zip(model, back):
            assert a.class_index == b.class_index
            np.testing.assert_array_equal(a.theta, b.theta)
            np.testing.assert_array_equal(a.info, b.info)
            assert a.converged == b.converged
            assert a.iterations == b.iterations
            assert a.score_norm == b.score_norm
