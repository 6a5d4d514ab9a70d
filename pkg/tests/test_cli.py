import csv
import shutil

import pytest

from compindex.cli import main
from compindex.config import CONFIG_ENV
from compindex.ingest import write_dataset


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory, synth_dataset):
    return write_dataset(synth_dataset, tmp_path_factory.mktemp("cli") / "data")


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_validate_ok(dataset_dir, capsys):
    assert main(["validate", str(dataset_dir)]) == 0
    assert "1372 records" in capsys.readouterr().out


def test_validate_missing_cell_exits_1(dataset_dir, tmp_path):
    d = tmp_path / "d"
    shutil.copytree(dataset_dir, d)
    f = sorted((d / "reaches").glob("*.csv"))[0]
    lines = f.read_text().splitlines()
    # drop both frames of the file's last reach
    f.write_text("\n".join(lines[:-2]) + "\n")
    assert main(["validate", str(d)]) == 1
    assert main(["validate", str(d), "--allow-partial"]) == 0


def test_truncated_file_exits_2(dataset_dir, tmp_path, capsys):
    d = tmp_path / "d"
    shutil.copytree(dataset_dir, d)
    f = sorted((d / "reaches").glob("*.csv"))[0]
    text = f.read_text()
    f.write_text(text[:-30])
    assert main(["validate", str(d)]) == 2
    assert "MalformedRow" in capsys.readouterr().err


def test_missing_path_exits_2(tmp_path):
    assert main(["validate", str(tmp_path / "nope")]) == 2


def test_bad_config_exits_2(dataset_dir, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("reference_scope = 'global'\n")
    assert main(["compute", str(dataset_dir), "--out", str(tmp_path / "o"), "--config", str(cfg)]) == 2
    cfg.write_text("not toml [")
    assert main(["validate", str(dataset_dir), "--config", str(cfg)]) == 2


def test_config_from_environment(dataset_dir, tmp_path, monkeypatch):
    cfg = tmp_path / "c.toml"
    cfg.write_text("bogus_key = 1\n")
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    assert main(["validate", str(dataset_dir)]) == 2


def test_zero_gain_pipeline(tmp_path):
    data, out = tmp_path / "data", tmp_path / "out"
    assert main(["synth", "--out", str(data), "--seed", "3", "--gain", "0"]) == 0
    assert main(["report", str(data), "--orientation", "both", "--out", str(out)]) == 0
    for o in ("horizontal", "vertical"):
        rows = _rows(out / f"metrics_{o}.csv")
        assert len(rows) == 49
        # equal up to the rounding left by removing per-condition origins
        assert all(float(r["L"]) <= 1e-9 and float(r["A"]) == 0.0 for r in rows)
        for metric in ("L", "A", "J", "H", "I"):
            assert (out / f"heatmap_{metric}_{o}.svg").exists()
    assert {"dA_s_z", "dA_e_x"} <= set(_rows(out / "axes_horizontal.csv")[0])
    assert "config_e" in _rows(out / "joints_vertical.csv")[0]


def test_compute_reruns_are_byte_identical(dataset_dir, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["compute", str(dataset_dir), "--out", str(a)]) == 0
    assert main(["compute", str(dataset_dir), "--out", str(b)]) == 0
    for f in sorted(a.iterdir()):
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_strict_degenerate_exits_3(tmp_path):
    params = tmp_path / "p.toml"
    params.write_text(
        "height_range_mm = [1700.0, 1700.0]\n"
        "arm_length_range_mm = [650.0, 650.0]\n"
        "strategy_noise = 0.0\n"
        "compensation_gain = 0.0\n"
    )
    data = tmp_path / "data"
    assert main(["synth", "--out", str(data), "--params", str(params)]) == 0
    assert main(["compute", str(data), "--out", str(tmp_path / "o1")]) == 0
    assert main(["compute", str(data), "--out", str(tmp_path / "o2"), "--strict"]) == 3
    rows = _rows(tmp_path / "o1" / "metrics_horizontal.csv")
    assert all(r["I"] == "nan" and "I_unavailable" in r["flags"] for r in rows)


def test_render_formats(dataset_dir, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["compute", str(dataset_dir), "--out", str(out)]) == 0
    metrics = out / "metrics_horizontal.csv"
    svg = tmp_path / "I.svg"
    assert main(["render", str(metrics), "--metric", "I", "--out", str(svg), "--scale", "fixed:0,1"]) == 0
    text = svg.read_text()
    assert 'class="legend-min" data-value="0.0"' in text and 'class="legend-max" data-value="1.0"' in text
    mat = tmp_path / "I.csv"
    assert main(["render", str(metrics), "--metric", "I", "--out", str(mat)]) == 0
    assert len(mat.read_text().splitlines()) == 7
    capsys.readouterr()
    assert main(["render", str(metrics), "--metric", "L", "--format", "term"]) == 0
    assert "scale:" in capsys.readouterr().out
    assert main(["render", str(out / "axes_horizontal.csv"), "--metric", "dA_s_z", "--out", str(tmp_path / "r.svg")]) == 0
    assert ">shoulder internal rotation</text>" in (tmp_path / "r.svg").read_text()


def test_render_constant_column(tmp_path):
    data, out = tmp_path / "data", tmp_path / "out"
    assert main(["synth", "--out", str(data), "--seed", "1", "--gain", "0"]) == 0
    assert main(["compute", str(data), "--out", str(out)]) == 0
    svg = tmp_path / "A.svg"
    assert main(["render", str(out / "metrics_horizontal.csv"), "--metric", "A", "--out", str(svg)]) == 0
    assert 'class="legend-value"' in svg.read_text()


def test_unknown_metric_exits_2(dataset_dir, tmp_path, capsys):
    out = tmp_path / "o"
    main(["compute", str(dataset_dir), "--out", str(out)])
    assert main(["render", str(out / "metrics_horizontal.csv"), "--metric", "Q"]) == 2
    assert "UnknownMetric" in capsys.readouterr().err


def test_bad_scale_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["render", "x.csv", "--metric", "I", "--scale", "0,1"])
    assert exc.value.code == 2
