"""Command-line interface, exercised in process through ``main(argv)``."""

import json
import math

import numpy as np
import pytest

from gateforge.cli import RunConfig, build_parser, main
from gateforge.gatesets import (
    diagonal_generators,
    is_lps,
    parse_gateset,
    serialize_gateset,
)
from gateforge.words import word_from_str


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -------------------------------------------------------------------- gates

def test_gates_emits_parseable_lps(capsys):
    code, out, _ = run_cli(capsys, "gates")
    assert code == 0
    assert is_lps(parse_gateset(out))


def test_gates_from_file_round_trip(capsys, tmp_path):
    path = tmp_path / "diag.json"
    path.write_text(serialize_gateset(diagonal_generators()))
    code, out, _ = run_cli(capsys, "gates", "--gateset-file", str(path))
    assert code == 0
    assert parse_gateset(out).content_hash() == diagonal_generators().content_hash()


def test_gates_rejects_csv(capsys):
    code, _, err = run_cli(capsys, "gates", "--format", "csv")
    assert code == 2
    assert "json" in err


def test_gd_preset_dimension(capsys):
    code, out, _ = run_cli(capsys, "gates", "--dim", "3")
    assert code == 0
    assert parse_gateset(out).dim == 3


# ---------------------------------------------------------------------- net

def test_net_csv_row_count(capsys):
    code, out, _ = run_cli(capsys, "net", "--length", "2")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 1 + 37


def test_net_json_stats(capsys):
    code, out, _ = run_cli(capsys, "net", "--length", "2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["entries"] == 37
    assert doc["length_counts"] == {"0": 1, "1": 6, "2": 30}


# ------------------------------------------------------------------ compile

def test_compile_identity(capsys):
    code, out, _ = run_cli(capsys, "compile", "--target", "identity", "--length", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["word"] == ""
    assert doc["distance_op"] < 1e-12


def test_compile_tgate_json(capsys):
    code, out, _ = run_cli(capsys, "compile", "--target", "tgate", "--length", "6")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"word", "distance_op", "distance_frob", "searched"}
    word = word_from_str(doc["word"])
    assert 0 < len(word) <= 6
    assert doc["distance_op"] < 0.1


def test_compile_target_file(capsys, tmp_path):
    theta = math.pi / 5
    mat = [[[math.cos(theta), 0.0], [-math.sin(theta), 0.0]],
           [[math.sin(theta), 0.0], [math.cos(theta), 0.0]]]
    path = tmp_path / "target.json"
    path.write_text(json.dumps({"matrix": mat}))
    code, out, _ = run_cli(capsys, "compile", "--target-file", str(path),
                           "--length", "6")
    assert code == 0
    assert json.loads(out)["distance_op"] < 0.5


def test_compile_budget_exit_code(capsys):
    code, out, err = run_cli(capsys, "compile", "--target", "tgate",
                             "--length", "8", "--max-entries", "100")
    assert code == 3
    assert "budget" in err
    # the best word over the partial net is still reported
    doc = json.loads(out)
    assert doc["searched"] <= 100


def test_compile_csv_format(capsys):
    code, out, _ = run_cli(capsys, "compile", "--target", "tgate",
                           "--length", "4", "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "word,distance_op,distance_frob,searched"
    assert len(lines) == 2


# -------------------------------------------------------------------- cover

def test_cover_csv_and_fit_line(capsys):
    code, out, err = run_cli(capsys, "cover", "--length", "6",
                             "--targets", "5", "--seed", "2")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "n,mean_eps,max_eps,targets,seed"
    assert [row.split(",")[0] for row in lines[1:]] == ["2", "4", "6"]
    assert err.startswith("scaling: slope=-")


def test_cover_json_includes_fit(capsys):
    code, out, _ = run_cli(capsys, "cover", "--length", "6", "--targets", "5",
                           "--seed", "2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["slope"] < 0
    assert 0.0 <= doc["r_squared"] <= 1.0
    assert len(doc["rows"]) == 3


def test_cover_without_enough_rows_has_null_fit(capsys):
    code, out, _ = run_cli(capsys, "cover", "--length", "4", "--targets", "3",
                           "--format", "json")
    assert code == 0
    assert json.loads(out)["slope"] is None


# ---------------------------------------------------------------------- gap

def test_gap_csv_has_reference_for_builtin_set(capsys):
    code, out, _ = run_cli(capsys, "gap", "--jmax", "4")
    assert code == 0
    assert out.startswith("two_j,block_norm\n")
    assert "reference" in out


def test_gap_json(capsys):
    code, out, _ = run_cli(capsys, "gap", "--jmax", "3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["lambda_hat"] == pytest.approx(1 / math.sqrt(5), abs=1e-12)
    assert doc["reference"] == pytest.approx(math.sqrt(5) / 3, abs=1e-15)
    assert len(doc["block_norms"]) == 3


def test_gap_perturbed_set_has_no_reference(capsys, tmp_path):
    path = tmp_path / "diag.json"
    path.write_text(serialize_gateset(diagonal_generators()))
    code, out, _ = run_cli(capsys, "gap", "--jmax", "2", "--gateset-file",
                           str(path), "--format", "json")
    assert code == 0
    assert "reference" not in json.loads(out)


# ------------------------------------------------------- prop4, haar, bounds

def test_prop4_defaults_to_minimal_m(capsys):
    code, out, _ = run_cli(capsys, "prop4", "--dim", "3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["m"] == doc["minimal_m"] == 4
    assert doc["word_block_bound"] == pytest.approx(0.9999819155092593, abs=1e-12)


def test_prop4_rejects_small_m(capsys):
    code, _, err = run_cli(capsys, "prop4", "--dim", "3", "--m", "2")
    assert code == 2
    assert "m must be at least" in err


def test_haar_csv(capsys):
    code, out, _ = run_cli(capsys, "haar", "--count", "500", "--seed", "4")
    assert code == 0
    assert out.startswith("p,q,mean,stderr,haar_prediction,deviation_sigmas\n")


def test_haar_ds_json(capsys):
    code, out, _ = run_cli(capsys, "haar", "--sampler", "ds", "--dim", "3",
                           "--count", "400", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["sampler"] == "ds"
    assert doc["entry_mean"][2][0] == 0.0  # structural zero survives to JSON


def test_bounds_table(capsys):
    code, out, _ = run_cli(capsys, "bounds", "--eps", "0.1,0.01,0.001",
                           "--format", "json")
    assert code == 0
    doc = json.loads(out)
    rows = {r["eps"]: r for r in doc["rows"]}
    assert rows[0.01]["upper_bound"] == 60
    for r in doc["rows"]:
        assert r["lower_bound"] <= r["upper_bound"]
    assert doc["k1"] == pytest.approx(0.2081821949750352, rel=1e-12)


def test_bounds_csv_layout(capsys):
    code, out, _ = run_cli(capsys, "bounds", "--eps", "0.5", "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "eps,lower_bound,upper_bound"
    assert len(lines) == 2


def test_perturb_json(capsys):
    code, out, _ = run_cli(capsys, "perturb", "--delta", "1e-3", "--length",
                           "5", "--samples", "20")
    assert code == 0
    doc = json.loads(out)
    assert doc["telescoping_bound"] == pytest.approx(5e-3)
    assert 0 < doc["max_deviation"] <= doc["telescoping_bound"] + 1e-12


# ----------------------------------------------------------- files and errors

def test_out_flag_writes_file_byte_stable(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, out, _ = run_cli(capsys, "cover", "--length", "4", "--targets",
                               "4", "--seed", "6", "--out", str(path))
        assert code == 0
        assert out == ""
    assert a.read_bytes() == b.read_bytes()


def test_missing_gateset_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "net", "--gateset-file",
                           str(tmp_path / "nope.json"))
    assert code == 2
    assert "error" in err


def test_bad_gateset_file_content(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\"dim\": 2}")
    code, _, err = run_cli(capsys, "net", "--gateset-file", str(path))
    assert code == 2


def test_dim_too_small(capsys):
    code, _, err = run_cli(capsys, "net", "--dim", "1")
    assert code == 2
    assert "--dim" in err


def test_lps_preset_requires_dim_two(capsys):
    code, _, err = run_cli(capsys, "net", "--dim", "3", "--preset", "lps")
    assert code == 2


def test_tgate_requires_dim_two(capsys):
    code, _, err = run_cli(capsys, "compile", "--dim", "3", "--target", "tgate")
    assert code == 2


def test_unknown_subcommand_is_usage_error(capsys):
    assert run_cli(capsys, "frobnicate")[0] == 2


def test_run_config_from_args_defaults():
    args = build_parser().parse_args(["net", "--length", "3"])
    cfg = RunConfig.from_args(args)
    assert cfg.subcommand == "net"
    assert cfg.length == 3
    assert cfg.dim == 2
    assert cfg.seed == 0
    assert cfg.dedup_tol == 1e-8
