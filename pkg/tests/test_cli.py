import json
import math
import os

import numpy as np
import pytest

from reformlab.cli import main
from reformlab.data import parse_dataset, serialize_dataset
from reformlab.synth import synthetic_dataset

SQRT_HALF_PI = math.sqrt(math.pi / 2.0)


@pytest.fixture()
def data_csv(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text(serialize_dataset(synthetic_dataset(80, seed=21)), encoding="utf-8")
    return str(path)


def fast_train_args(data_csv, out_dir):
    return ["train", "--data", data_csv, "--out", out_dir,
            "--cycles", "25", "--leaf", "3", "--splits", "4",
            "--folds", "3", "--policy", "none"]


def test_ingest_roundtrip(tmp_path, data_csv, capsys):
    out = tmp_path / "clean.csv"
    report = tmp_path / "report.txt"
    code = main(["ingest", "--data", data_csv, "--out", str(out),
                 "--report", str(report), "--policy", "iqr:1.5"])
    assert code == 0
    cleaned = parse_dataset(out.read_text(encoding="utf-8"))
    assert cleaned.n <= 80
    assert "ingested 80 rows" in capsys.readouterr().out


def test_xrd_command(tmp_path, capsys):
    x = np.arange(42.0, 46.0, 0.02)
    y = 2.0 + (50.0 / (0.3 * SQRT_HALF_PI)) * np.exp(-2 * (x - 44.0) ** 2 / 0.3 ** 2)
    curve = tmp_path / "curve.csv"
    curve.write_text("\n".join(f"{a},{b}" for a, b in zip(x, y)), encoding="utf-8")
    windows = tmp_path / "windows.txt"
    windows.write_text("42.5 45.5 crystalline\n", encoding="utf-8")
    out = tmp_path / "report.txt"
    frag = tmp_path / "fragment.csv"
    code = main(["xrd", "--curve", str(curve), "--windows", str(windows),
                 "--out", str(out), "--fragment", str(frag)])
    assert code == 0
    text = out.read_text(encoding="utf-8")
    assert "crystallinity_index_percent: 100.0" in text
    assert "avg_crystal_size_nm:" in text
    assert frag.read_text(encoding="utf-8").startswith(
        "Average crystal size (nm),Crystallinity index (%)\n")


def test_train_writes_bundle_and_report(tmp_path, data_csv):
    out_dir = str(tmp_path / "model")
    assert main(fast_train_args(data_csv, out_dir)) == 0
    names = sorted(os.listdir(out_dir))
    assert {"schema", "background.v1", "eval_report.txt", "eval_folds.csv",
            "conversion.v1", "h2.v1", "co.v1", "co2.v1", "ch4.v1"} <= set(names)


def test_train_missing_file_diagnostic(tmp_path, capsys):
    code = main(["train", "--data", str(tmp_path / "missing.csv"),
                 "--out", str(tmp_path / "m")])
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and "missing.csv" in err


def test_evaluate_command(tmp_path, data_csv, capsys):
    report = tmp_path / "eval.txt"
    csv_out = tmp_path / "eval.csv"
    code = main(["evaluate", "--data", data_csv, "--cycles", "20", "--leaf", "3",
                 "--folds", "3", "--policy", "none",
                 "--report", str(report), "--csv", str(csv_out)])
    assert code == 0
    assert "Toluene conversion" in report.read_text(encoding="utf-8")
    assert csv_out.read_text(encoding="utf-8").startswith("target,phase,fold")


def test_tune_command(tmp_path, data_csv):
    out = tmp_path / "best.json"
    trace = tmp_path / "trace.txt"
    code = main(["tune", "--data", data_csv, "--out", str(out), "--trace", str(trace),
                 "--swarm", "3", "--iters", "2", "--folds", "3",
                 "--max-cycles", "40", "--policy", "none"])
    assert code == 0
    best = json.loads(out.read_text(encoding="utf-8"))
    assert best["family"] == "lsboost"
    assert trace.read_text(encoding="utf-8").startswith("eval 1:")


def test_optimize_and_explain_and_stats(tmp_path, data_csv, capsys):
    model_dir = str(tmp_path / "model")
    assert main(fast_train_args(data_csv, model_dir)) == 0

    pareto = tmp_path / "pareto.csv"
    code = main(["optimize", "--model", model_dir, "--out", str(pareto),
                 "--swarm", "10", "--iters", "15", "--seed", "1"])
    assert code == 0
    lines = pareto.read_text(encoding="utf-8").splitlines()
    assert len(lines[0].split(",")) == 16
    assert len(lines) >= 2

    instance = tmp_path / "instance.json"
    ds = parse_dataset(open(data_csv, encoding="utf-8").read())
    keys = ds.schema.feature_keys
    instance.write_text(json.dumps(dict(zip(keys, ds.samples[0].features))),
                        encoding="utf-8")
    exp_dir = str(tmp_path / "explain")
    code = main(["explain", "--model", model_dir, "--instance", str(instance),
                 "--out", exp_dir])
    assert code == 0
    assert sorted(os.listdir(exp_dir)) == [f"explain_{k}.csv" for k in
                                           sorted(["conversion", "h2", "co", "co2", "ch4"])]

    summary_dir = str(tmp_path / "summary")
    code = main(["explain", "--model", model_dir, "--data", data_csv,
                 "--rows", "0,1,2", "--out", summary_dir])
    assert code == 0
    assert "summary_conversion.csv" in os.listdir(summary_dir)

    stats_dir = str(tmp_path / "stats")
    code = main(["stats", "--data", data_csv, "--out", stats_dir,
                 "--kde-pair", "reaction_temp,conversion",
                 "--response-pair", "reaction_temp,steam_carbon_ratio",
                 "--model", model_dir, "--grid", "9"])
    assert code == 0
    files = os.listdir(stats_dir)
    assert "spearman.csv" in files and "pca_fractions.csv" in files
    assert "kde_reaction_temp_conversion.csv" in files
    assert "response_reaction_temp_steam_carbon_ratio_h2.csv" in files


def test_unknown_subcommand_exits_nonzero():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
