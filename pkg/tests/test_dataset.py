import math

import numpy as np
import pytest

import priorlift as pl
from priorlift.dataset import UNLABELED


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


SPEC = pl.ColumnSpec(("a", "b"), "y")


class TestLoadCsv:
    def test_fully_labeled(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,0\n3,4,1\n5,6,1\n7,8,0\n")
        data = pl.load_csv(path, SPEC)
        assert (data.n, data.r) == (4, 4)
        assert data.class_values == ("0", "1")
        np.testing.assert_array_equal(data.features[0], [1.0, 2.0])

    def test_partial_labels_reordered_first(self, tmp_path):
        path = write(
            tmp_path,
            "a,b,y\n1,0,0\n2,0,\n3,0,1\n4,0,\n5,0,1\n6,0,0\n",
        )
        data = pl.load_csv(path, SPEC)
        assert (data.n, data.r) == (6, 4)
        # labeled rows keep file order, then unlabeled rows keep file order
        np.testing.assert_array_equal(data.features[:, 0], [1, 3, 5, 6, 2, 4])
        assert list(data.label_indices) == [0, 1, 1, 0, UNLABELED, UNLABELED]

    def test_threshold_rule_recipe_layout(self, tmp_path):
        path = write(
            tmp_path,
            "Length,Diameter,Rings\n0.4,0.3,9\n0.5,0.35,10\n0.6,0.5,4\n",
            name="shell.csv",
        )
        data = pl.load_csv(path, pl.RECIPES["abalone"].spec)
        # class 1 iff rings <= 9
        assert list(data.label_indices) == [1, 0, 1]

    def test_header_match_is_case_insensitive(self, tmp_path):
        path = write(tmp_path, "GLUCOSE,bmi,Outcome\n100,30,1\n90,25,0\n")
        data = pl.load_csv(path, pl.RECIPES["pima"].spec)
        assert data.n == 2 and data.feature_count == 2

    def test_malformed_number_names_row_and_column(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,0\n1,oops,1\n")
        with pytest.raises(pl.CsvParseError) as err:
            pl.load_csv(path, SPEC)
        assert err.value.row == 3
        assert err.value.column == "b"

    def test_non_finite_cell_rejected(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,nan,0\n")
        with pytest.raises(pl.CsvParseError):
            pl.load_csv(path, SPEC)

    def test_zero_labeled_rows(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,\n3,4,\n")
        with pytest.raises(pl.InvalidDatasetError):
            pl.load_csv(path, SPEC)

    def test_ragged_row(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,0\n1,2\n")
        with pytest.raises(pl.SchemaError):
            pl.load_csv(path, SPEC)

    def test_missing_column(self, tmp_path):
        path = write(tmp_path, "a,c,y\n1,2,0\n")
        with pytest.raises(pl.SchemaError):
            pl.load_csv(path, SPEC)

    def test_quoted_cells_parse(self, tmp_path):
        path = write(tmp_path, '"a","b","y"\n"1","2","x,1"\n1,2,"x,0"\n')
        data = pl.load_csv(path, SPEC)
        assert data.class_values == ("x,0", "x,1")
        assert data.n == 2

    def test_multiclass_categorical_expansion(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,1,red\n2,2,blue\n3,3,red\n4,4,green\n")
        data = pl.load_csv(path, SPEC)
        assert data.class_values == ("blue", "green", "red")
        onehot = data.indicator_matrix()
        np.testing.assert_array_equal(onehot.sum(axis=1), np.ones(4))


class TestRoundTrip:
    def test_bit_for_bit(self, tmp_path):
        rng = np.random.default_rng(3)
        feats = np.concatenate(
            [rng.normal(size=(20, 2)), [[math.pi, 1 / 3], [1e-17, -0.0]]]
        )
        labels = np.array([1, 0] * 11)
        labels[15:] = -1
        data = pl.Dataset.from_arrays(feats, labels, ("0", "1"))
        out = tmp_path / "round.csv"
        pl.save_csv(data, out, feature_names=("a", "b"), label_name="y")
        back = pl.load_csv(out, SPEC)
        assert back.features.tobytes() == data.features.tobytes()
        np.testing.assert_array_equal(back.label_indices, data.label_indices)


class TestDatasetInvariants:
    def test_canonical_order_enforced(self):
        with pytest.raises(pl.InvalidDatasetError):
            pl.Dataset(np.zeros((2, 1)), np.array([-1, 0]), ("0",))

    def test_from_arrays_reorders(self):
        data = pl.Dataset.from_arrays(
            np.arange(6.0).reshape(3, 2), np.array([-1, 1, 0]), ("0", "1")
        )
        assert data.r == 2
        np.testing.assert_array_equal(data.features[:, 0], [2.0, 4.0, 0.0])

    def test_nonfinite_features_rejected(self):
        with pytest.raises(pl.InvalidDatasetError):
            pl.Dataset.from_arrays(np.array([[np.inf]]), np.array([0]), ("0",))

    def test_immutable(self):
        data = pl.Dataset.from_arrays(np.ones((2, 1)), np.array([0, 0]), ("0",))
        with pytest.raises(ValueError):
            data.features[0, 0] = 2.0

    def test_every_label_one_hot(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            n = int(rng.integers(1, 30))
            c = int(rng.integers(1, 4))
            labels = rng.integers(-1, c, size=n)
            if not (labels >= 0).any():
                labels[0] = 0
            data = pl.Dataset.from_arrays(rng.normal(size=(n, 2)), labels, tuple("abc"[:c]))
            onehot = data.indicator_matrix()
            np.testing.assert_array_equal(onehot.sum(axis=1), np.ones(data.r))


class TestPartition:
    def make(self, n=10, seed=0):
        rng = np.random.default_rng(seed)
        return pl.Dataset.from_arrays(
            rng.normal(size=(n, 2)), rng.integers(0, 2, size=n), ("0", "1")
        )

    def test_identity_when_r_equals_n(self):
        data = self.make()
        out = pl.partition(data, data.n, seed=1)
        np.testing.assert_array_equal(out.label_indices, data.label_indices)
        assert out.features.tobytes() == data.features.tobytes()

    def test_same_seed_same_split(self):
        data = self.make()
        a = pl.partition(data, 3, seed=7)
        b = pl.partition(data, 3, seed=7)
        np.testing.assert_array_equal(a.label_indices, b.label_indices)
        assert a.features.tobytes() == b.features.tobytes()

    def test_distinct_seeds_usually_differ(self):
        # 100 seed pairs; identical 3-of-10 subsets happen with
        # probability 1/C(10,3), so ~1 collision is expected and 5 is
        # far outside plausible
        data = self.make()
        collisions = 0
        for k in range(100):
            a = pl.partition(data, 3, seed=2 * k)
            b = pl.partition(data, 3, seed=2 * k + 1)
            if a.features.tobytes() == b.features.tobytes():
                collisions += 1
        assert collisions <= 5

    def test_truth_retained(self):
        data = self.make()
        out = pl.partition(data, 3, seed=5)
        assert out.true_label_indices is not None
        assert (out.true_label_indices >= 0).all()
        # visible labels agree with the truth on the labeled block
        np.testing.assert_array_equal(
            out.label_indices[: out.r], out.true_label_indices[: out.r]
        )

    def test_range_error(self):
        data = self.make()
        with pytest.raises(pl.ConfigError):
            pl.partition(data, data.n + 1, seed=0)
        with pytest.raises(pl.ConfigError):
            pl.partition(data, 0, seed=0)

    def test_requires_fully_labeled(self):
        data = self.make()
        stripped = pl.partition(data, 5, seed=0)
        with pytest.raises(pl.InvalidDatasetError):
            pl.partition(stripped, 3, seed=0)


class TestSpecFile:
    def test_key_value_lines(self, tmp_path):
        path = write(
            tmp_path,
            "# columns for the shell data\nfeatures = Length, Diameter\n"
            "label = Rings\ntransform = le:9\n\n",
            name="columns.conf",
        )
        spec = pl.load_spec_file(path)
        assert spec.feature_columns == ("Length", "Diameter")
        assert spec.label_column == "Rings"
        assert spec.label_rule == pl.LabelRule("le", "9")

    def test_unknown_key(self, tmp_path):
        path = write(tmp_path, "featurez=a\n", name="bad.conf")
        with pytest.raises(pl.ConfigError):
            pl.load_spec_file(path)

    def test_missing_separator(self, tmp_path):
        path = write(tmp_path, "features a,b\n", name="bad.conf")
        with pytest.raises(pl.ConfigError):
            pl.load_spec_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(pl.DataError):
            pl.load_spec_file(tmp_path / "absent.conf")


class TestRules:
    def test_rule_ops(self):
        assert pl.LabelRule("le", "9").apply("9") == 1
        assert pl.LabelRule("le", "9").apply("9.5") == 0
        assert pl.LabelRule("gt", "0").apply("0.1") == 1
        assert pl.LabelRule("eq", "yes").apply("yes") == 1
        assert pl.LabelRule("eq", "yes").apply("no") == 0

    def test_bad_rule(self):
        with pytest.raises(pl.ConfigError):
            pl.LabelRule("between", "1")
        with pytest.raises(pl.ConfigError):
            pl.LabelRule("le", "nine")
