"""
Tests for the assoc-clt command line.
"""

import json

import numpy as np
import pytest

from assoc_clt import __version__
from assoc_clt.cli import EXIT_FAILURE, EXIT_OK, OUTPUT_DIR_ENV, parse_and_dispatch
from assoc_clt.core.config import build_config, dump_config, parse_family
from assoc_clt.generators import replicate

SMALL = ["--n-grid", "64,128,256", "--reps", "1000", "--seed", "5"]


@pytest.fixture(autouse=True)
def no_output_env(monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)


# ---------------------------------------------------------------------------
# Usage
# ---------------------------------------------------------------------------


def test_help_exits_cleanly(capsys):
    with pytest.raises(SystemExit) as info:
        parse_and_dispatch(["--help"])
    assert info.value.code == 0
    assert "report" in capsys.readouterr().out


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        parse_and_dispatch(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["simulate"],
        ["report", "--family", "iid-normal"],
        ["report", "--theorem", "T9", "--family", "iid-normal"],
        ["clt", "--family", "iid-normal", "--normalizer", "mad"],
    ],
)
def test_usage_errors_exit_with_two(argv):
    with pytest.raises(SystemExit) as info:
        parse_and_dispatch(argv)
    assert info.value.code == 2


def test_family_or_config_is_required(capsys):
    assert parse_and_dispatch(["check"]) == EXIT_FAILURE
    assert "--config or --family" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "--family", "iid-normal", "--n-grid", "10:5:x2"],
        ["check", "--family", "geo-gauss:rho=-0.3"],
        ["check", "--family", "iid-normal", "--set", "reps"],
        ["check", "--family", "iid-normal", *SMALL, "--format", "xml"],
        ["check", "--family", "iid-normal", *SMALL, "--conditions", "H9"],
        ["check", "--family", "iid-normal", *SMALL, "--format", "csv"],
    ],
)
def test_failures_exit_with_one(argv):
    assert parse_and_dispatch(argv) == EXIT_FAILURE


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def test_generate_csv_is_deterministic(tmp_path):
    argv = ["generate", "--family", "geo-gauss:rho=0.5", "--n", "8", "--reps", "5", "--seed", "3"]
    assert parse_and_dispatch([*argv, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert parse_and_dispatch([*argv, "--out", str(tmp_path / "b")]) == EXIT_OK
    first = (tmp_path / "a" / "replicates.csv").read_bytes()
    assert first == (tmp_path / "b" / "replicates.csv").read_bytes()
    lines = first.decode().splitlines()
    family_hash = parse_family("geo-gauss:rho=0.5").family_hash()
    assert lines[0].startswith("# assoc-clt ")
    assert "master_seed=3" in lines[0]
    assert lines[0].endswith(f"family_hash={family_hash}")
    assert lines[1] == "replicate,index,value"
    assert len(lines) == 2 + 5 * 8
    rows = [line.split(",") for line in lines[2:]]
    assert [(int(r), int(i)) for r, i, _ in rows[:9]] == [(0, k) for k in range(1, 9)] + [(1, 1)]
    assert (int(rows[-1][0]), int(rows[-1][1])) == (4, 8)


def test_generate_csv_values_match_replicates(tmp_path):
    argv = ["generate", "--family", "iid-normal", "--n", "3", "--reps", "2", "--seed", "1"]
    assert parse_and_dispatch([*argv, "--out", str(tmp_path)]) == EXIT_OK
    lines = (tmp_path / "replicates.csv").read_text().splitlines()[2:]
    values = np.array([float(line.split(",")[2]) for line in lines]).reshape(2, 3)
    expected = replicate(parse_family("iid-normal"), 3, 2, 1).values
    np.testing.assert_array_equal(values, expected)


def test_generate_npz(tmp_path):
    argv = ["generate", "--family", "iid-normal", "--n", "8", "--reps", "5", "--format", "npz"]
    assert parse_and_dispatch([*argv, "--out", str(tmp_path)]) == EXIT_OK
    with np.load(tmp_path / "replicates.npz") as data:
        assert data["values"].shape == (5, 8)
        assert data["seeds"].shape == (5,)


def test_check_json_envelope_uses_output_env(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert parse_and_dispatch(["check", "--family", "iid-normal", *SMALL]) == EXIT_OK
    data = json.loads((tmp_path / "check.json").read_text())
    assert set(data) == {"schema", "provenance", "conditions", "composites", "failures", "incomplete"}
    assert [c["condition_id"] for c in data["conditions"]] == ["H0", "Ha", "Hab", "Hb", "Hc"]
    assert data["incomplete"] is False
    assert "n_grid=64,128,256" in data["provenance"]["overrides"]


def test_check_csv_bundle(tmp_path):
    argv = ["check", "--family", "iid-normal", *SMALL, "--conditions", "Ha,Hb", "--format", "csv"]
    assert parse_and_dispatch([*argv, "--out", str(tmp_path)]) == EXIT_OK
    assert sorted(p.name for p in tmp_path.iterdir()) == ["Ha.csv", "Hb.csv", "verdicts.csv"]


def test_check_composite(tmp_path):
    argv = ["check", "--family", "geo-gauss:rho=0.5", *SMALL, "--conditions", "Cox"]
    assert parse_and_dispatch([*argv, "--out", str(tmp_path)]) == EXIT_OK
    data = json.loads((tmp_path / "check.json").read_text())
    assert [c["name"] for c in data["composites"]] == ["Cox"]


def test_analyze_writes_to_stdout(capsys):
    argv = ["analyze", "--family", "geo-gauss:rho=0.5", *SMALL, "--n", "64"]
    assert parse_and_dispatch(argv) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["covariance"]["sigma2"] == pytest.approx(3.0)


def test_analyze_with_probes(tmp_path):
    argv = ["analyze", "--family", "geo-gauss:rho=0.5", *SMALL, "--n", "8", "--probes"]
    assert parse_and_dispatch([*argv, "--out", str(tmp_path)]) == EXIT_OK
    data = json.loads((tmp_path / "analyze.json").read_text())
    assert [p["probe"] for p in data["covariance"]["probes"]] == ["association", "demimartingale"]


def test_cf_command(tmp_path):
    argv = ["cf", "--family", "geo-gauss:rho=0.5", *SMALL, "--n", "128", "--t-grid", "0.5,1"]
    assert parse_and_dispatch([*argv, "--format", "json", "--out", str(tmp_path)]) == EXIT_OK
    data = json.loads((tmp_path / "cf.json").read_text())
    assert [p["t"] for p in data["ecf"]] == [0.5, 1.0]
    assert set(data["gaps"]) == {"block", "full_block", "product_limit", "truncation"}


def test_clt_command(tmp_path):
    argv = ["clt", "--family", "iid-normal", "--n", "32", "--reps", "300", "--seed", "1"]
    assert parse_and_dispatch([*argv, "--out", str(tmp_path)]) == EXIT_OK
    clt = json.loads((tmp_path / "clt.json").read_text())["clt"]
    assert clt["n"] == 32
    assert clt["normalizer"] == "analytic_s_n"
    assert "samples" not in clt


def test_report_from_config_file(tmp_path):
    config = build_config({"family": "iid-normal", "n_grid": [64, 128, 256], "reps": 200})
    path = tmp_path / "exp.json"
    dump_config(config, path)
    argv = ["report", "--theorem", "T1_general", "--config", str(path), "--set", "seed=9"]
    assert parse_and_dispatch([*argv, "--out", str(tmp_path / "out")]) == EXIT_OK
    data = json.loads((tmp_path / "out" / "T1_general.json").read_text())
    assert data["provenance"]["master_seed"] == 9
    assert data["provenance"]["overrides"] == ["seed=9"]
    assert data["clt"]["n"] == 256


def test_report_csv_needs_out():
    argv = ["report", "--theorem", "T1_general", "--family", "iid-normal", *SMALL, "--format", "csv"]
    assert parse_and_dispatch(argv) == EXIT_FAILURE
