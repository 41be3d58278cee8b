import csv
import io
import json
import subprocess
import sys

import pytest

from stochheat.cli import EXIT_CONFIG, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_exact_at_time_zero(capsys):
    code, out, _ = run(capsys, "--mode", "exact", "--M-list", "1", "--N-list", "1", "--t-list", "0")
    assert code == EXIT_OK
    (row,) = read_csv(out)
    assert float(row["total_sq"]) == 0.0
    assert list(row) == ["M", "N", "t", "spatial_sq", "temporal_sq", "total_sq"]


def test_exact_unbounded_row(capsys):
    code, out, _ = run(capsys, "--M-list", "4", "--N-list", "8,inf")
    assert code == EXIT_OK
    rows = read_csv(out)
    assert rows[1]["N"] == "inf"
    assert float(rows[1]["spatial_sq"]) == 0.0


def test_bounds_rows_ordered(capsys):
    code, out, _ = run(capsys, "--mode", "bounds", "--M-list", "1,8,64", "--N-list", "1,5,inf")
    assert code == EXIT_OK
    rows = read_csv(out)
    assert {r["kind"] for r in rows} == {"temporal", "spatial", "full", "smoothing"}
    assert all(float(r["lower"]) <= float(r["upper"]) for r in rows)


def test_csv_and_json_carry_identical_values(capsys):
    args = ["--mode", "exact", "--M-list", "3,7", "--N-list", "2,inf", "--t-list", "0.3,1"]
    _, csv_out, _ = run(capsys, *args)
    _, json_out, _ = run(capsys, *args, "--format", "json")
    payload = json.loads(json_out)
    assert list(payload) == ["config", "rows"]
    rows = read_csv(csv_out)
    assert len(rows) == len(payload["rows"]) == 8
    for c, j in zip(rows, payload["rows"]):
        for key in c:
            assert float(c[key]) == float(j[key])


def test_rates_mode(capsys):
    code, out, _ = run(capsys, "--mode", "rates", "--M-list", "16,64,256,1024",
                       "--N-list", "16,64,256,1024,inf")
    assert code == EXIT_OK
    rows = {r["axis"]: r for r in read_csv(out)}
    assert -0.27 <= float(rows["M"]["slope"]) <= -0.23
    assert -0.52 <= float(rows["N"]["slope"]) <= -0.48


def test_mc_mode(capsys):
    code, out, _ = run(capsys, "--mode", "mc", "--M-list", "4", "--N-list", "8",
                       "--samples", "20000", "--seed", "42")
    assert code == EXIT_OK
    (row,) = read_csv(out)
    assert abs(float(row["z"])) < 4
    assert row["K"] == "8"


@pytest.mark.parametrize(
    "argv",
    [
        ["--mode", "mc", "--N-list", "4,inf"],
        ["--mode", "mc", "--N-list", "4,8", "--K", "6"],
        ["--M-list", "4,2"],
        ["--M-list", "0"],
        ["--N-list", "x"],
        ["--nu", "-1"],
        ["--samples", "1"],
        ["--t-list", "2"],
        ["--mode", "nonsense"],
        ["--config", "/nonexistent/file.cfg"],
        ["--mode", "rates", "--M-list", "4"],
    ],
)
def test_config_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_CONFIG


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nmode = exact\nM-list = 2,4\nN_list = 3\nnu = 0.5\n")
    code, out, _ = run(capsys, "--config", str(cfg), "--nu", "2.0", "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["config"]["nu"] == 2.0
    assert payload["config"]["M_list"] == [2, 4]
    assert payload["config"]["N_list"] == [3]

    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(capsys, "--config", str(bad))[0] == EXIT_CONFIG


def test_verify_defaults_pass_and_are_deterministic(tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "stochheat", "--mode", "verify", "--out", str(path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == EXIT_OK, proc.stderr
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rows = read_csv(outs[0].decode())
    assert rows and all(r["status"] == "pass" for r in rows)
    assert any(r["check"] == "mc_z" for r in rows)


def test_verify_failure_exit_code(monkeypatch, capsys):
    from stochheat import cli
    from stochheat.bounds import BoundKind, BoundPair

    monkeypatch.setattr(cli, "temporal_bounds", lambda *a: BoundPair(0.0, 1e-9, BoundKind.TEMPORAL))
    code, out, err = run(capsys, "--mode", "verify", "--M-list", "2", "--N-list", "3")
    assert code == cli.EXIT_VERIFY
    assert "FAIL temporal_sup" in err
    assert any(r["status"] == "FAIL" for r in read_csv(out))


def test_numerical_error_exit_code(monkeypatch, capsys):
    from stochheat import cli
    from stochheat.errors import TruncationError

    def broken(*args, **kwargs):
        raise TruncationError("cut exceeded")

    monkeypatch.setattr(cli, "projected_temporal_error_sq", broken)
    code, _, err = run(capsys, "--M-list", "2", "--N-list", "inf")
    assert code == cli.EXIT_NUMERICAL
    assert "numerical error" in err
