import json

import numpy as np
import pytest
from scipy.special import ndtri

from priorlift._stats import column_sums, exact_sum, normal_quantile, weighted_gram
from priorlift.serialize import dumps_json, format_float, render_table


class TestNormalQuantile:
    def test_matches_reference_inverse_cdf(self):
        levels = np.concatenate(
            [np.linspace(1e-10, 1 - 1e-10, 4001), [0.025, 0.975, 0.5, 1e-300]]
        )
        for p in levels:
            assert normal_quantile(float(p)) == pytest.approx(ndtri(p), abs=1e-9)

    def test_symmetry(self):
        for p in (0.01, 0.2, 0.4):
            assert normal_quantile(p) == pytest.approx(-normal_quantile(1 - p), abs=1e-12)

    def test_domain(self):
        for bad in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(ValueError):
                normal_quantile(bad)


class TestExactSums:
    def test_permutation_invariant_bits(self):
        rng = np.random.default_rng(0)
        values = rng.normal(size=5000) * 10.0 ** rng.integers(-8, 8, size=5000)
        total = exact_sum(values)
        for seed in range(5):
            shuffled = np.random.default_rng(seed).permutation(values)
            assert exact_sum(shuffled) == total

    def test_column_sums_match_fsum(self):
        rng = np.random.default_rng(1)
        m = rng.normal(size=(200, 3))
        np.testing.assert_array_equal(
            column_sums(m), [exact_sum(m[:, j]) for j in range(3)]
        )

    def test_weighted_gram_symmetric(self):
        rng = np.random.default_rng(2)
        m = rng.normal(size=(100, 4))
        w = rng.uniform(0.1, 2.0, size=100)
        gram = weighted_gram(m, w)
        assert gram.tobytes() == gram.T.copy().tobytes()
        np.testing.assert_allclose(gram, (m * w[:, None]).T @ m, rtol=1e-12)


class TestJsonEncoding:
    def test_floats_round_trip_through_17_digits(self):
        values = [1 / 3, 0.1, 2e-308, 1.2345678901234567e100, -0.0]
        for v in values:
            assert float(format_float(v)) == v

    def test_document_shape_and_determinism(self):
        doc = {"a": [1, 2.5, None, True], "b": {"c": "text"}}
        text = dumps_json(doc)
        assert text == dumps_json(doc)
        assert json.loads(text) == {"a": [1, 2.5, None, True], "b": {"c": "text"}}

    def test_non_finite_becomes_null(self):
        assert json.loads(dumps_json({"x": float("nan")}))["x"] is None

    def test_table_renders_six_digit_floats(self):
        text = render_table(("name", "value"), [["x", 0.123456789]])
        assert "0.123457" in text
