import json

import yaml

from hbfsim.cli import main
from hbfsim.harness import CSV_HEADER, ExperimentConfig


def tiny_yaml(tmp_path, **overrides):
    data = dict(
        n_r=8,
        n_t=8,
        alpha_t=0.8,
        snr_grid_db=[0.0, 10.0],
        trials=3,
        master_seed=7,
        schemes=[
            {"label": "cap-full"},
            {"label": "cap-cs", "tx_rf": "column_spreader", "k_t": 2},
        ],
    )
    data.update(overrides)
    path = tmp_path / "exp.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)


def test_run_with_config_file_writes_csv(tmp_path):
    out = tmp_path / "result.csv"
    rc = main(["run", "--config", tiny_yaml(tmp_path), "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * 2  # schemes x snrs


def test_run_preset_to_stdout(capsys):
    rc = main(["run", "--preset", "fig5", "--scale", "0.25", "--trials", "2"])
    assert rc == 0
    outp = capsys.readouterr().out
    assert outp.startswith(CSV_HEADER)
    assert len(outp.splitlines()) == 1 + 6 * 5


def test_worker_count_does_not_change_file_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cfg = tiny_yaml(tmp_path, trials=8)
    assert main(["run", "--config", cfg, "--out", str(a), "--workers", "1"]) == 0
    assert main(["run", "--config", cfg, "--out", str(b), "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_flag_overrides(tmp_path):
    out = tmp_path / "result.csv"
    rc = main([
        "run", "--config", tiny_yaml(tmp_path), "--out", str(out),
        "--trials", "2", "--seed", "123", "--snr-grid-db", "5",
    ])
    assert rc == 0
    lines = out.read_text().splitlines()[1:]
    assert len(lines) == 2  # one snr point
    for line in lines:
        fields = line.split(",")
        assert fields[1] == "5.0"
        assert fields[2] == "2"
        assert fields[7] == "123"


def test_schemes_override_json(tmp_path):
    out = tmp_path / "result.csv"
    schemes = json.dumps([{"label": "only", "tx_rf": "column_spreader", "k_t": 4}])
    rc = main([
        "run", "--config", tiny_yaml(tmp_path), "--out", str(out),
        "--schemes", schemes,
    ])
    assert rc == 0
    rows = out.read_text().splitlines()[1:]
    assert all(r.startswith("only,") for r in rows)


def test_missing_source_is_config_error(capsys):
    assert main(["run"]) == 2
    assert "error" in capsys.readouterr().err


def test_both_sources_is_config_error(tmp_path):
    assert main(["run", "--config", tiny_yaml(tmp_path), "--preset", "fig3"]) == 2


def test_unknown_preset_is_config_error():
    assert main(["run", "--preset", "fig9"]) == 2


def test_semantic_error_exits_2(tmp_path):
    cfg = tiny_yaml(
        tmp_path, schemes=[{"label": "bad", "tx_rf": "column_spreader", "k_t": 3}]
    )
    assert main(["run", "--config", cfg]) == 2


def test_bad_schemes_json_exits_2(tmp_path):
    assert main(["run", "--config", tiny_yaml(tmp_path), "--schemes", "{notjson"]) == 2


def test_output_path_from_config(tmp_path):
    target = tmp_path / "from_config.csv"
    cfg = tiny_yaml(tmp_path, output_path=str(target))
    assert main(["run", "--config", cfg]) == 0
    assert target.exists()


def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    assert capsys.readouterr().out.split() == ["fig3", "fig4", "fig5", "fig6"]


def test_presets_dump_is_loadable(capsys):
    assert main(["presets", "--name", "fig3", "--scale", "1.0"]) == 0
    data = yaml.safe_load(capsys.readouterr().out)
    cfg = ExperimentConfig.model_validate(data)
    assert (cfg.n_r, cfg.n_t) == (256, 60)


def test_verbose_prints_summary(tmp_path, capsys):
    out = tmp_path / "r.csv"
    rc = main(["run", "--config", tiny_yaml(tmp_path), "--out", str(out), "--verbose"])
    assert rc == 0
    err = capsys.readouterr().err
    assert "scheme" in err and "cap-cs" in err
