import csv
import io

import pytest

from rotspec.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _report_value(text, key):
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith(key + ":"):
            return stripped.split(":", 1)[1].strip()
    raise KeyError(key)


def test_shoot_summary(capsys):
    code, out, _ = run_cli(["shoot", "--n", "5", "--l", "1"], capsys)
    assert code == 0
    assert float(_report_value(out, "a0")) == pytest.approx(0.14971329,
                                                            abs=1e-6)
    assert float(_report_value(out, "T")) == pytest.approx(2.0293246,
                                                           abs=1e-5)
    assert _report_value(out, "k") == "3"


def test_dimension_resolution_from_k_and_l(capsys):
    code, out, _ = run_cli(["shoot", "--k", "3", "--l", "1"], capsys)
    assert code == 0
    assert _report_value(out, "n") == "5"


def test_inconsistent_dimensions_usage_error(capsys):
    code, _, err = run_cli(["shoot", "--n", "5", "--k", "3", "--l", "9"],
                           capsys)
    assert code == 64
    assert "kind: usage" in err


def test_missing_dimensions_usage_error(capsys):
    code, _, err = run_cli(["shoot", "--n", "5"], capsys)
    assert code == 64
    assert "kind: usage" in err


def test_unknown_flag_usage_error(capsys):
    code, _, _ = run_cli(["shoot", "--n", "5", "--l", "1", "--bogus"], capsys)
    assert code == 64


def test_out_of_regime_radius_usage_error(capsys):
    code, _, err = run_cli(["profile", "--n", "5", "--l", "1",
                            "--a0", "0.9"], capsys)
    assert code == 64
    assert "a0" in err


def test_profile_csv(tmp_path, capsys):
    out_path = tmp_path / "profile.csv"
    code, _, _ = run_cli(["profile", "--n", "5", "--l", "1",
                          "--out", str(out_path)], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out_path.read_text())))
    assert rows[0] == ["u", "f1", "f2", "theta", "nH_residual"]
    assert len(rows) == 402
    assert float(rows[1][0]) == 0.0
    assert float(rows[1][2]) == pytest.approx(0.14971329, abs=1e-6)
    assert all(abs(float(r[4])) < 1e-8 for r in rows[1:])


def test_table_csv(tmp_path, capsys):
    out_path = tmp_path / "table.csv"
    code, _, _ = run_cli(["table", "--l", "1", "--n-from", "4",
                          "--n-to", "6", "--out", str(out_path)], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out_path.read_text())))
    assert len(rows) == 4
    assert [r[0] for r in rows[1:]] == ["4", "5", "6"]
    assert float(rows[2][3]) == pytest.approx(0.149713, abs=1e-5)


def test_discriminant_csv_spot_value(tmp_path, capsys):
    out_path = tmp_path / "disc.csv"
    code, _, _ = run_cli(["discriminant", "--n", "5", "--l", "1",
                          "--mode", "0,0", "--lambda-min", "11.95",
                          "--lambda-max", "12", "--step", "0.025",
                          "--out", str(out_path)], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out_path.read_text())))
    assert rows[0] == ["lambda", "delta0", "z1T", "z2T", "dz1T", "dz2T"]
    last = rows[-1]
    assert float(last[0]) == pytest.approx(11.975)
    assert float(last[1]) == pytest.approx(1.1755, abs=5e-3)


def test_discriminant_requires_mode(capsys):
    code, _, err = run_cli(["discriminant", "--n", "5", "--l", "1"], capsys)
    assert code == 64
    assert "mode" in err


def test_spectrum_requires_operator(capsys):
    code, _, err = run_cli(["spectrum", "--n", "5", "--l", "1"], capsys)
    assert code == 64
    assert "operator" in err


def test_format_mismatch_usage_error(capsys):
    code, _, _ = run_cli(["shoot", "--n", "5", "--l", "1",
                          "--format", "csv"], capsys)
    assert code == 64


def test_config_file_and_flag_precedence(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("n = 4\nl = 1\n")
    code, out, _ = run_cli(["shoot", "--config", str(config)], capsys)
    assert code == 0
    assert _report_value(out, "n") == "4"
    # a flag must override the file value
    code, out, _ = run_cli(["shoot", "--config", str(config),
                            "--n", "5"], capsys)
    assert code == 0
    assert _report_value(out, "n") == "5"
    assert float(_report_value(out, "a0")) == pytest.approx(0.149713,
                                                            abs=1e-5)


def test_config_file_unknown_key(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("banana = 3\n")
    code, _, _ = run_cli(["shoot", "--config", str(config), "--n", "5",
                          "--l", "1"], capsys)
    assert code == 64


def test_byte_identical_reruns(tmp_path, capsys):
    args = ["discriminant", "--n", "5", "--l", "1", "--mode", "0,0",
            "--lambda-min", "0", "--lambda-max", "0.1", "--step", "0.025"]
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    capsys.readouterr()
    assert first.read_bytes() == second.read_bytes()


def test_convergence_failure_leaves_no_output(tmp_path, capsys):
    out_path = tmp_path / "should_not_exist.txt"
    # a radius on the axis guard fails the flight before any output exists
    code, _, err = run_cli(["profile", "--n", "5", "--l", "1",
                            "--a0", "1e-13", "--out", str(out_path)], capsys)
    assert code == 2
    assert "kind: convergence" in err
    assert not out_path.exists()
    assert not list(tmp_path.iterdir())     # no stray temp files either


def test_io_failure_exit_code(tmp_path, capsys):
    target = tmp_path / "missing_dir" / "x.csv"
    code, _, err = run_cli(["table", "--l", "1", "--n-from", "4",
                            "--n-to", "4", "--out", str(target)], capsys)
    assert code == 74
    assert "kind: io" in err


def test_check_command_passes_on_converged_profile(capsys):
    code, out, _ = run_cli(["check", "--n", "5", "--l", "1"], capsys)
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln]
    assert all(ln.endswith("PASS") for ln in lines)
    assert any(ln.startswith("trace_identity") for ln in lines)
    assert any(ln.startswith("abel_identity_jacobi") for ln in lines)


def test_check_command_flags_perturbed_radius(capsys):
    code, out, _ = run_cli(["check", "--n", "5", "--l", "1",
                            "--a0", "0.15071329"], capsys)
    assert code == 1
    lines = out.splitlines()
    by_name = {ln.split(":")[0]: ln for ln in lines if ":" in ln}
    # still a solution of the minimality ODE ...
    assert by_name["minimality_residual"].endswith("PASS")
    # ... but no longer a closed curve
    assert by_name["full_period_closure"].endswith("FAIL")
