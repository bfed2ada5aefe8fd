import json

import numpy as np
import pytest

from sparsesel.core import IngestionError, InvalidArgumentError
from sparsesel.io import load_config, read_curve_csv, read_table, split_response, write_curve_csv, write_json


def test_read_table_rejects_missing_rows(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("a,b,y\n1,2,3\n4,NA,6\n7,8,9\n,1,2\n")
    header, values, rejected = read_table(f)
    assert header == ["a", "b", "y"]
    np.testing.assert_array_equal(values, [[1, 2, 3], [7, 8, 9]])
    assert rejected == 2


def test_non_numeric_names_row_and_column(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("a,b\n1,2\n3,oops\n")
    with pytest.raises(IngestionError, match=r"d\.csv:3: column 'b'"):
        read_table(f)


def test_quoted_fields(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text('"x, one",y\n"1.5",2\n')
    header, values, _ = read_table(f)
    assert header == ["x, one", "y"]
    np.testing.assert_array_equal(values, [[1.5, 2.0]])


def test_missing_file(tmp_path):
    with pytest.raises(IngestionError, match="cannot open"):
        read_table(tmp_path / "nope.csv")


def test_split_response():
    names, x, y = split_response(["a", "y", "b"], np.arange(6.0).reshape(2, 3), "y")
    assert names == ["a", "b"]
    np.testing.assert_array_equal(x, [[0, 2], [3, 5]])
    np.testing.assert_array_equal(y, [1, 4])
    with pytest.raises(InvalidArgumentError):
        split_response(["a"], np.zeros((1, 1)), "y")


def test_curve_roundtrip(tmp_path):
    f = tmp_path / "c.csv"
    rows = [("iht", 1.0, 0.0, 0.5, 3), ("iht", 2.0, 0.1, 1.0, 2)]
    write_curve_csv(f, rows, {"seed": 4, "config": {"a": 1}})
    lines = f.read_text().splitlines()
    assert lines[0].startswith("# config:") and lines[1] == "# seed: 4"
    assert lines[2] == "method,s_hat_or_lambda,fdr,tpr,replicates_used"
    back = read_curve_csv(f)
    assert [(r["method"], r["s_hat_or_lambda"], r["fdr"], r["tpr"], r["replicates_used"]) for r in back] == rows


def test_configs(tmp_path):
    y = tmp_path / "c.yaml"
    y.write_text("sim:\n  p: 5\nmethods: [iht]\n")
    j = tmp_path / "c.json"
    j.write_text(json.dumps({"sim": {"p": 5}, "methods": ["iht"]}))
    assert load_config(y) == load_config(j) == {"sim": {"p": 5}, "methods": ["iht"]}
    bad = tmp_path / "b.yaml"
    bad.write_text("- 1\n- 2\n")
    with pytest.raises(InvalidArgumentError):
        load_config(bad)


def test_json_special_values(tmp_path):
    f = tmp_path / "r.json"
    write_json(f, {"b": np.float64("inf"), "a": np.int64(3), "c": (1, 2), "d": np.bool_(True)})
    assert json.loads(f.read_text()) == {"a": 3, "b": "inf", "c": [1, 2], "d": True}
