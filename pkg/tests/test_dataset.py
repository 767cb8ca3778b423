import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vecmlab.dataset import (
    TimeSeriesTable, TransformSpec, apply_transforms, describe, first_difference,
    format_quarter, load_table, parse_quarter, save_table,
)
from vecmlab.errors import DataError


def test_parse_quarter_formats():
    assert parse_quarter("2004Q1") == parse_quarter("2004-01-01")
    assert parse_quarter("2004Q4") + 1 == parse_quarter("2005Q1")
    assert parse_quarter(" 2010q3 ") == parse_quarter("2010-07-01")
    assert format_quarter(parse_quarter("2019Q2")) == "2019Q2"


@pytest.mark.parametrize("bad", ["2004-02-01", "2004-04-15", "2004M03", "garbage", "2004Q5"])
def test_parse_quarter_rejects(bad):
    with pytest.raises(DataError):
        parse_quarter(bad)


def test_table_validation():
    with pytest.raises(DataError, match="gap"):
        TimeSeriesTable(("2000Q1", "2000Q3"), ("a",), np.zeros((2, 1)))
    with pytest.raises(DataError):
        TimeSeriesTable(("2000Q1", "2000Q1"), ("a",), np.zeros((2, 1)))
    with pytest.raises(DataError):
        TimeSeriesTable(("2000Q1", "2000Q2"), ("a",), np.array([[1.0], [np.nan]]))
    with pytest.raises(DataError):
        TimeSeriesTable(("2000Q1",), ("a", "a"), np.zeros((1, 2)))


def test_values_are_read_only():
    t = TimeSeriesTable.from_array(np.arange(6.0).reshape(3, 2))
    with pytest.raises(ValueError):
        t.values[0, 0] = 1.0


def test_csv_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(0)
    t = TimeSeriesTable.from_array(rng.normal(size=(30, 3)) * 1e3, ["a", "b c", "d"], start="1995Q3")
    save_table(t, tmp_path / "x.csv")
    back = load_table(tmp_path / "x.csv")
    assert back.names == t.names and back.dates == t.dates
    assert np.array_equal(back.values, t.values)


def test_load_reports_location(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("date,a,b\n2000Q1,1,2\n2000Q2,1,oops\n")
    with pytest.raises(DataError, match=r"row 3.*'b'"):
        load_table(p)
    p.write_text("date,a\n2000-01-01,1\n2000-02-01,2\n")
    with pytest.raises(DataError, match="quarter"):
        load_table(p)
    with pytest.raises(DataError, match="not found"):
        load_table(tmp_path / "missing.csv")


def test_transforms():
    t = TimeSeriesTable.from_array(np.array([[1.0, -1.0], [np.e, 2.0]]), ["p", "i"])
    out = apply_transforms(t, TransformSpec({"p": "log", "i": "level"}))
    assert np.allclose(out.values, [[0.0, -1.0], [1.0, 2.0]])
    with pytest.raises(DataError, match="positive"):
        apply_transforms(t, TransformSpec({"p": "log", "i": "log"}))
    with pytest.raises(DataError, match="missing"):
        apply_transforms(t, TransformSpec({"p": "log"}))
    with pytest.raises(ValueError):
        TransformSpec({"p": "sqrt"})


def test_describe_single_observation():
    d = describe([3.0])
    assert d.sd == 0.0 and not d.sd_defined and d.p50 == 3.0


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(2, 60), elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_describe_properties(x):
    d = describe(x)
    assert d.min <= d.p25 <= d.p50 <= d.p75 <= d.max
    assert d.sd >= 0
    assert np.isclose(d.sd, np.std(x, ddof=1), rtol=1e-12, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(2, 60), elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_difference_inverts_cumsum(x):
    assert np.allclose(np.cumsum(first_difference(x)) + x[0], x[1:], atol=1e-8)
