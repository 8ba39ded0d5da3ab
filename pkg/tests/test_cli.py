"""CLI surface: flags, outputs, exit codes, determinism."""

import json

import pytest

from besicov.cli import main, parse_alpha
from besicov.levels import LevelParams, Profile


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_cf_table(capsys):
    code, out, _ = run(capsys, "cf", "--alpha", "golden", "--upto", "10", "--out", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,p,q,side"
    assert len(lines) == 12
    qs = [line.split(",")[2] for line in lines[1:]]
    assert qs == ["1", "1", "2", "3", "5", "8", "13", "21", "34", "55", "89"]


def test_levels_fixed_golden(capsys):
    code, out, _ = run(
        capsys, "levels", "--alpha", "golden", "--strategy", "fixed", "--n", "3",
        "--out", "csv",
    )
    assert code == 0
    ks = [line.split(",")[1] for line in out.strip().splitlines()[1:]]
    assert ks == ["5", "17", "37"]


def test_sum_prints_identical_rationals(capsys):
    code, out, _ = run(
        capsys, "sum", "--alpha", "golden", "--variant", "tent", "--x", "1/7",
        "--m", "25", "--out", "csv",
    )
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert row[1] == row[2] and row[3] == "True"


def test_target_sample_json(capsys):
    code, out, _ = run(
        capsys, "target", "--alpha", "golden", "--family", "pp", "--depth", "3",
        "--out", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["family"] == "++" and len(data["indices"]) == 3


def test_audit_csv_and_exit(capsys):
    code, out, _ = run(capsys, "audit", "--alpha", "golden", "--family", "pp", "--m", "1")
    assert code == 0
    header = out.splitlines()[0]
    assert header == "m,n_of_m,l,term,sign,bound,pass"


def test_dimension_table(capsys):
    code, out, _ = run(
        capsys, "dimension", "--alpha", "golden", "--strategy", "greedy", "--n", "4",
    )
    assert code == 0
    assert out.splitlines()[0] == "n,delta,epsilon,m,mbar,lower,upper,closed_lower,closed_upper"


def test_orbit_csv(capsys):
    code, out, _ = run(
        capsys, "orbit", "--alpha", "golden", "--variant", "tent", "--n", "3",
        "--x", "1/7", "--steps", "3",
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 5


def test_probe_json_deterministic(capsys):
    argv = (
        "probe", "--kind", "classify", "--alpha", "golden", "--variant", "tent",
        "--n", "4", "--x", "0", "--horizon", "150",
    )
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert json.loads(out1)["kind"] == "classification"


def test_usage_error_is_exit_one(capsys):
    code, _, err = run(capsys, "cf", "--bogus")
    assert code == 1
    assert "usage" in err.lower() or "error" in err.lower()


def test_missing_required_flag(capsys):
    code, _, err = run(capsys, "eval")
    assert code == 1 and "--x" in err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": "golden", "upto": 4, "out": "csv"}))
    code, out, _ = run(capsys, "cf", "--config", str(cfg))
    assert code == 0
    assert len(out.strip().splitlines()) == 6


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"upto": 4}))
    code, out, _ = run(capsys, "cf", "--config", str(cfg), "--upto", "2")
    assert code == 0
    assert len(out.strip().splitlines()) == 4


def test_byte_identical_reruns(capsys):
    argv = ("audit", "--alpha", "golden", "--variant", "tent", "--n", "6",
            "--trunc", "6", "--family", "mp", "--m-range", "83:85", "--out", "json")
    _, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    assert out1 == out2


def test_certificate_failure_exit_two(capsys, monkeypatch):
    import besicov.cli as cli

    def tampered(spec, strategy, variant, n_max):
        good = cli.select_levels(spec, strategy, variant, n_max)
        lv = good.levels[-1]
        bad = LevelParams(n=lv.n, k=lv.k, p=lv.p, q=lv.q, q_next=lv.q_next, a=lv.a + 1)
        return Profile(
            alpha=good.alpha, strategy=good.strategy, variant=good.variant,
            n_max=good.n_max, levels=good.levels[:-1] + (bad,),
        )

    monkeypatch.setattr(cli.RunConfig, "profile", lambda self, n=None: tampered(
        self.spec(), self.strategy, self.variant, n or self.n))
    code, _, err = run(capsys, "levels", "--alpha", "golden", "--n", "3")
    assert code == 2
    assert "failed" in err


def test_parse_alpha_forms():
    assert parse_alpha("golden").tail == (1,)
    assert parse_alpha("quotients=2,3").tail == (2, 3)
    spec = parse_alpha("periodic=4;1,2")
    assert spec.head == (0, 4) and spec.tail == (1, 2)
    with pytest.raises(ValueError):
        parse_alpha("0.618")


def test_eval_csv_totals(capsys):
    code, out, _ = run(capsys, "eval", "--alpha", "golden", "--x", "3/7", "--out", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "l,f_l,term"
    assert lines[-1].startswith("phi,,")


def test_target_single_interval(capsys):
    code, out, _ = run(
        capsys, "target", "--alpha", "golden", "--family", "mp", "--level", "2",
        "--j", "17",
    )
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert row[0] == "2" and row[1] == "17"


def test_dimension_measured_json(capsys):
    code, out, _ = run(
        capsys, "dimension", "--alpha", "golden", "--n", "2", "--mode", "measured",
        "--out", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["mode"] == "measured"
    assert data["rows"][1]["m"] == "5"


def test_orbit_json_error_bound(capsys):
    code, out, _ = run(
        capsys, "orbit", "--alpha", "golden", "--variant", "tent", "--n", "3",
        "--x", "1/7", "--steps", "4", "--out", "json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["steps"] == 4 and float(data["error_bound"]) < 1e-20
