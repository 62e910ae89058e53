import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heartml.dataset import (
    ATTRIBUTE_NAMES,
    CONTINUOUS_COLUMNS,
    FEATURE_NAMES,
    HEADERED_CSV,
    RAW_UCI,
    SCHEMA,
    binarize_target,
    from_arrays,
    holdout_split,
    parse_records,
    summarize,
    to_headered_csv,
)
from heartml.errors import DomainError, EmptyDatasetError, ParseError, SchemaError

LINE = "57.0,1.0,2.0,130.0,236.0,0.0,2.0,174.0,0.0,0.0,2.0,1.0,3.0,1"


def test_schema_shape():
    assert len(SCHEMA) == 14
    assert [FEATURE_NAMES[i] for i in CONTINUOUS_COLUMNS] == ["age", "trestbps", "chol", "thalach", "oldpeak"]
    assert SCHEMA[-1].name == "target" and SCHEMA[-1].allowed_values == (0, 1)


def test_raw_line_parses_and_binarizes():
    d = parse_records(LINE.encode(), RAW_UCI)
    assert d.n == 1
    assert d.targets.tolist() == [1]
    assert d.rows[0].tolist() == [57, 1, 2, 130, 236, 0, 2, 174, 0, 0, 2, 1, 3]


def test_raw_severity_codes_collapse():
    text = "\n".join(LINE[:-1] + str(t) for t in (0, 1, 2, 3, 4))
    assert parse_records(text, RAW_UCI).targets.tolist() == [0, 1, 1, 1, 1]


def test_missing_marker_drop_row():
    line = "57.0,1.0,2.0,130.0,236.0,0.0,2.0,174.0,0.0,0.0,2.0,?,3.0,0"
    d = parse_records(line, RAW_UCI, "drop-row")
    assert d.n == 0
    assert d.provenance.dropped == 1


def test_missing_marker_error_policy():
    line = "57.0,1.0,2.0,130.0,236.0,0.0,2.0,174.0,0.0,0.0,2.0,?,3.0,0"
    with pytest.raises(ParseError, match="line 1"):
        parse_records(line, RAW_UCI, "error")


@pytest.mark.parametrize(
    "text, line",
    [
        (LINE + "\n1,2,3", 2),
        (LINE + "\n" + LINE.replace("130.0", "abc"), 2),
    ],
)
def test_malformed_lines_report_line_number(text, line):
    with pytest.raises(ParseError) as exc:
        parse_records(text, RAW_UCI)
    assert exc.value.line == line


def test_empty_input():
    with pytest.raises(EmptyDatasetError):
        parse_records(b"", RAW_UCI)
    with pytest.raises(EmptyDatasetError):
        parse_records("\n\n", HEADERED_CSV)


def test_headered_unknown_column():
    header = ",".join(ATTRIBUTE_NAMES).replace("chol", "cholesterol")
    with pytest.raises(SchemaError, match="cholesterol"):
        parse_records(header + "\n" + LINE, HEADERED_CSV)


def test_headered_any_column_order():
    names = list(ATTRIBUTE_NAMES)
    values = LINE.split(",")
    perm = list(reversed(range(14)))
    text = ",".join(names[i] for i in perm) + "\n" + ",".join(values[i] for i in perm)
    d = parse_records(text, HEADERED_CSV)
    assert d.rows[0].tolist() == [float(v) for v in values[:13]]
    assert d.targets.tolist() == [1]


def test_headered_rejects_non_binary_target():
    text = ",".join(ATTRIBUTE_NAMES) + "\n" + LINE[:-1] + "3"
    with pytest.raises(SchemaError):
        parse_records(text, HEADERED_CSV)


def test_non_binary_sex_rejected():
    bad = LINE.replace("57.0,1.0", "57.0,2.0", 1)
    with pytest.raises(SchemaError, match="sex"):
        parse_records(bad, RAW_UCI)


def test_out_of_range_category_rejected():
    bad = LINE.replace(",3.0,1", ",5.0,1")  # thal
    with pytest.raises(SchemaError, match="thal"):
        parse_records(bad, RAW_UCI)


def test_headered_accepts_zero_based_recoding():
    row = "63,1,3,145,233,1,0,150,0,2.3,0,0,1,1"
    d = parse_records(",".join(ATTRIBUTE_NAMES) + "\n" + row, HEADERED_CSV)
    assert d.n == 1


def test_stream_input():
    d = parse_records(io.BytesIO(LINE.encode()), RAW_UCI)
    assert d.n == 1


@pytest.mark.parametrize("raw, expected", [(0, 0), (1, 1), (2, 1), (3, 1), (4, 1)])
def test_binarize_target(raw, expected):
    assert binarize_target(raw) == expected


@pytest.mark.parametrize("raw", [-1, 5, 1.5])
def test_binarize_target_domain(raw):
    with pytest.raises(DomainError):
        binarize_target(raw)


@given(st.integers(min_value=0, max_value=4))
def test_binarize_rule(r):
    assert binarize_target(r) == (1 if r != 0 else 0)


def test_bundled_cleveland_counts(cleveland):
    # counted on the bundled UCI file after dropping the 6 rows with "?"
    assert cleveland.n == 297
    assert cleveland.provenance.dropped == 6
    s = summarize(cleveland)
    assert s.class_counts == (160, 137)
    assert s.sex_counts == (96, 201)


def test_bundled_cleveland_all_rows(cleveland_path):
    text = cleveland_path.read_text()
    assert len(text.splitlines()) == 303
    assert sum("?" in ln for ln in text.splitlines()) == 6


def test_summary_toy():
    X = np.zeros((2, 13))
    X[1, 1] = 1.0
    d = from_arrays(X, [0, 1])
    s = summarize(d)
    assert s.class_counts == (1, 1)
    assert s.class_fractions == (0.5, 0.5)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=60))
def test_summary_matches_tallies(pairs):
    sex = [p[0] for p in pairs]
    y = [p[1] for p in pairs]
    X = np.zeros((len(pairs), 13))
    X[:, 1] = sex
    s = summarize(from_arrays(X, y))
    assert s.class_counts == (y.count(0), y.count(1))
    assert s.sex_counts == (sex.count(0), sex.count(1))
    assert sum(s.class_counts) == s.n_rows
    assert abs(sum(s.class_fractions) - 1) < 1e-12


def test_headered_round_trip(cleveland):
    text = to_headered_csv(cleveland)
    d1 = parse_records(text, HEADERED_CSV)
    d2 = parse_records(to_headered_csv(d1), HEADERED_CSV)
    assert d1 == cleveland
    assert d2 == d1
    assert to_headered_csv(d2) == text


def test_dataset_is_read_only(cleveland):
    with pytest.raises(ValueError):
        cleveland.rows[0, 0] = 1.0


class TestHoldout:
    def test_ten_rows(self):
        d = from_arrays(np.arange(130, dtype=float).reshape(10, 13), [0] * 5 + [1] * 5)
        train, test = holdout_split(d, 0.2, seed=1, stratified=True)
        assert sorted(test.targets.tolist()) == [0, 1]
        assert train.n == 8

    def test_deterministic(self, cleveland):
        a = holdout_split(cleveland, 0.25, seed=7)
        b = holdout_split(cleveland, 0.25, seed=7)
        assert a[0] == b[0] and a[1] == b[1]

    def test_303_rows(self):
        # class sizes of the 303-row heart.csv variant: 138 healthy, 165 defect
        y = np.array([0] * 138 + [1] * 165)
        d = from_arrays(np.tile(np.arange(303.0)[:, None], (1, 13)), y)
        train, test = holdout_split(d, 0.2, seed=42)
        assert abs(test.n - 61) <= 1
        assert abs(test.targets.mean() - y.mean()) <= 0.03
        assert train.n + test.n == 303

    def test_bundled(self, cleveland):
        train, test = holdout_split(cleveland, 0.2, seed=42)
        assert test.n == 59  # round(297 * 0.2)
        assert abs(test.targets.mean() - cleveland.targets.mean()) <= 0.03

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.5, 2])
    def test_fraction_domain(self, cleveland, fraction):
        with pytest.raises(DomainError):
            holdout_split(cleveland, fraction, seed=0)

    @settings(max_examples=40, deadline=None)
    @given(
        n=st.integers(4, 80),
        fraction=st.floats(0.1, 0.9),
        seed=st.integers(0, 2**64 - 1),
        stratified=st.booleans(),
    )
    def test_partition(self, n, fraction, seed, stratified):
        gen = np.random.default_rng(n)
        y = gen.integers(0, 2, size=n)
        X = np.arange(n * 13, dtype=float).reshape(n, 13)  # row id recoverable from column 0
        d = from_arrays(X, y)
        try:
            train, test = holdout_split(d, fraction, seed, stratified)
        except DomainError:
            return  # empty side for tiny n
        ids = np.concatenate([train.rows[:, 0], test.rows[:, 0]]) / 13
        assert train.n + test.n == n
        assert sorted(ids.astype(int).tolist()) == list(range(n))
