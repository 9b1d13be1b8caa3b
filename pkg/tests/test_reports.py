import json
import math

import pytest

from prclab.reports import (
    ExperimentReport,
    binomial_report,
    format_cell,
    render_rows,
    write_rows,
)


def test_binomial_report_values():
    r = binomial_report(25, 100)
    assert r.estimate == 0.25
    assert r.trials == 100
    assert r.ci95_halfwidth == pytest.approx(1.96 * math.sqrt(0.25 * 0.75 / 100), abs=1e-15)
    assert binomial_report(0, 200).ci95_halfwidth == 0.0
    assert binomial_report(200, 200).estimate == 1.0


def test_binomial_report_validation():
    with pytest.raises(ValueError):
        binomial_report(1, 99)
    with pytest.raises(ValueError):
        binomial_report(-1, 100)
    with pytest.raises(ValueError):
        binomial_report(101, 100)


def test_report_json_dict():
    r = binomial_report(50, 100, params={"rho": 0.5}, counts={"accept": 50})
    d = r.to_json_dict()
    assert d == {
        "estimate": 0.5,
        "trials": 100,
        "ci95": r.ci95_halfwidth,
        "counts": {"accept": 50},
        "params": {"rho": 0.5},
    }
    assert isinstance(r, ExperimentReport)


def test_format_cell():
    assert format_cell(True) == "true"
    assert format_cell(False) == "false"
    assert format_cell(0.1) == "0.1"
    assert format_cell(1 / 3) == repr(1 / 3)
    assert format_cell(7) == "7"
    assert format_cell("x") == "x"


def test_render_csv():
    text = render_rows(
        "csv",
        ["n", "value", "ok"],
        [[2, 0.5, True], [3, 1.25, False]],
        {"seed": 9, "beta": 0.1},
        "0.1.0",
    )
    lines = text.splitlines()
    assert lines[0] == "# prclab 0.1.0"
    assert lines[1] == "# beta=0.1"  # config keys sorted
    assert lines[2] == "# seed=9"
    assert lines[3] == "n,value,ok"
    assert lines[4] == "2,0.5,true"
    assert lines[5] == "3,1.25,false"
    assert text.endswith("\n")


def test_render_json():
    text = render_rows("json", ["a"], [[1.5]], {"seed": 1}, "0.1.0")
    doc = json.loads(text)
    assert doc["artifact"] == "prclab"
    assert doc["version"] == "0.1.0"
    assert doc["config"] == {"seed": 1}
    assert doc["columns"] == ["a"]
    assert doc["rows"] == [[1.5]]


def test_render_unknown_format():
    with pytest.raises(ValueError):
        render_rows("yaml", [], [], {}, "0.1.0")


def test_write_rows_round_trip(tmp_path):
    path = tmp_path / "out.csv"
    text = write_rows(path, "csv", ["a"], [[1]], {"seed": 0}, "0.1.0")
    assert path.read_text() == text


def test_float_repr_survives_round_trip():
    # repr is the shortest string that parses back to the same float
    for v in [0.1, 1 / 3, 2.2250738585072014e-308, 12345.6789]:
        assert float(format_cell(v)) == v
