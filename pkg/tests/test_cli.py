import json

import pytest

from prclab import __version__
from prclab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_hyper_small_sweep(capsys):
    code, out, _ = run_cli(
        capsys, "hyper", "--n", "2", "3", "--rho", "0.5", "--trials", "8", "--seed", "1"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == f"# prclab {__version__}"
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "check,n,rho,lhs,rhs,margin,ok"
    data = [l for l in lines if not l.startswith("#")][1:]
    assert all(row.endswith(",true") for row in data)
    assert any(row.startswith("hyper,") for row in data)
    assert any(row.startswith("collision,") for row in data)


def test_hyper_config_echo(capsys):
    code, out, _ = run_cli(capsys, "hyper", "--n", "2", "--rho", "0.0", "--trials", "2")
    assert code == 0
    comments = [l for l in out.splitlines() if l.startswith("# ")]
    echoed = dict(c[2:].split("=", 1) for c in comments[1:])
    assert echoed["subcommand"] == "hyper"
    assert echoed["seed"] == "0"
    assert echoed["format"] == "csv"
    assert echoed["n"] == "2"


def test_hyper_cap_is_usage_error(capsys, tmp_path):
    out_path = tmp_path / "should_not_exist.csv"
    code, _, err = run_cli(
        capsys, "hyper", "--n", "14", "--trials", "2", "--out", str(out_path)
    )
    assert code == 2
    assert "error:" in err
    assert not out_path.exists()  # no partial file on usage errors


def test_hyper_rejects_bad_rho(capsys):
    code, _, err = run_cli(capsys, "hyper", "--n", "2", "--rho", "1.5", "--trials", "2")
    assert code == 2 and "rho" in err


def test_deterministic_reruns(capsys):
    args = ("hyper", "--n", "2", "3", "--rho", "0.25", "--trials", "6", "--seed", "9")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second


def test_worker_pool_does_not_change_output(capsys, monkeypatch):
    args = ("hyper", "--n", "2", "3", "4", "--rho", "0.0", "0.5", "--trials", "12")
    _, serial, _ = run_cli(capsys, *args)
    monkeypatch.setenv("PRCLAB_WORKERS", "4")
    _, pooled, _ = run_cli(capsys, *args)
    assert serial == pooled
    monkeypatch.setenv("PRCLAB_WORKERS", "zebra")
    code, _, err = run_cli(capsys, *args)
    assert code == 2 and "PRCLAB_WORKERS" in err


def test_json_format(capsys):
    code, out, _ = run_cli(
        capsys, "hyper", "--n", "2", "--rho", "1.0", "--trials", "2", "--format", "json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["artifact"] == "prclab"
    assert doc["version"] == __version__
    assert doc["config"]["subcommand"] == "hyper"
    assert doc["columns"][0] == "check"
    assert all(row[-1] is True for row in doc["rows"])


def test_out_file_matches_stdout(capsys, tmp_path):
    args = ("hyper", "--n", "2", "--rho", "0.5", "--trials", "4", "--seed", "3")
    _, printed, _ = run_cli(capsys, *args)
    path = tmp_path / "report.csv"
    code, out, _ = run_cli(capsys, *args, "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text() == printed


def test_prc_eval_small_grid(capsys):
    code, out, _ = run_cli(
        capsys,
        "prc-eval", "--lambda", "8", "--rho", "0.9", "--ell", "4", "--blocks", "16",
        "--trials", "100", "--seed", "2",
    )
    assert code == 0
    data = [l for l in out.splitlines() if not l.startswith("#")]
    header = data[0].split(",")
    assert header[:6] == ["lambda", "rho", "ell", "blocks", "n", "trials"]
    assert "completeness_closed" in header and "soundness_bound" in header
    row = data[1].split(",")
    assert row[0] == "8" and row[4] == str(2 * 4 * 16)


def test_prc_eval_usage_errors(capsys):
    code, _, _ = run_cli(capsys, "prc-eval", "--trials", "99")
    assert code == 2
    code, _, _ = run_cli(capsys, "prc-eval", "--rho", "1.5", "--trials", "100")
    assert code == 2
    code, _, _ = run_cli(capsys, "prc-eval", "--ell", "0", "--trials", "100")
    assert code == 2


def test_compile_pad_rows(capsys):
    code, out, _ = run_cli(
        capsys,
        "compile", "--scheme", "pad", "--n", "16", "--lambda", "4",
        "--rho", "0.5", "--tau", "0.25", "--trials", "100", "--seed", "4",
    )
    assert code == 0
    data = [l for l in out.splitlines() if not l.startswith("#")]
    header = data[0].split(",")
    row = dict(zip(header, data[1].split(",")))
    assert row["Q"] == "0"
    assert row["bad1_freq"] == "0.0" and row["bad2_freq"] == "0.0"
    assert row["bad1_mode"] == "analytic"
    assert row["scheme"] == "pad" and row["ok"] == "true"
    # Q=0 collapses the theory column onto the uncompiled error
    assert float(row["delta_prime_theory"]) == pytest.approx(
        1.0 - float(row["completeness_uncompiled"]), abs=1e-12
    )


def test_compile_prf_small(capsys):
    code, out, _ = run_cli(
        capsys,
        "compile", "--scheme", "prf", "--lambda", "4", "--ell", "3", "--blocks", "2",
        "--rho", "0.5", "--tau", "0.5", "--trials", "100", "--seed", "6",
    )
    assert code == 0
    data = [l for l in out.splitlines() if not l.startswith("#")]
    row = dict(zip(data[0].split(","), data[1].split(",")))
    assert row["scheme"] == "prf" and row["Q"] == "6"
    assert float(row["S_size_mean"]) > 0.0


def test_compile_usage_errors(capsys):
    code, _, _ = run_cli(capsys, "compile", "--tau", "0", "--trials", "100")
    assert code == 2
    code, _, _ = run_cli(capsys, "compile", "--trials", "99")
    assert code == 2


def test_bounds_q_zero(capsys):
    code, out, _ = run_cli(
        capsys, "bounds", "--lambda", "16", "--q-bound", "0", "--delta", "0.125",
        "--tau", "0.1", "--rho", "0.5",
    )
    assert code == 0
    values = {}
    for line in out.splitlines():
        name, _, value = line.partition("  ")
        values[name.strip()] = value.strip()
    assert float(values["delta_prime_theory"]) == 0.125
    assert float(values["bad1_bound"]) == 0.0
    assert float(values["bad2_tau_term"]) == 0.0


def test_bounds_full_output(capsys):
    code, out, _ = run_cli(
        capsys,
        "bounds", "--lambda", "16", "--q-bound", "4", "--tau", "0.25", "--rho", "0.5",
        "--ell", "8", "--blocks", "64", "--m", "100", "--c", "2.0",
    )
    assert code == 0
    names = [line.split()[0] for line in out.splitlines()]
    for expected in (
        "exponent", "bad1_bound", "bad2_tau_term", "eps_term", "delta_prime_theory",
        "closed_form_completeness", "closed_form_soundness_bound",
        "key_leakage_bound", "tau_at_c", "tau_term_exponent_at_c", "bad2_tau_term_at_c",
    ):
        assert expected in names
    values = dict(
        (line.split()[0], float(line.split()[-1])) for line in out.splitlines()
    )
    assert values["tau_at_c"] == pytest.approx(16.0**-2.0, abs=1e-15)
    assert values["tau_term_exponent_at_c"] == pytest.approx(-2.0 * 0.3, abs=1e-15)


def test_bounds_usage_errors(capsys):
    assert run_cli(capsys, "bounds", "--tau", "1.5")[0] == 2
    assert run_cli(capsys, "bounds", "--rho", "-0.1")[0] == 2
    assert run_cli(capsys, "bounds", "--delta", "-1")[0] == 2
