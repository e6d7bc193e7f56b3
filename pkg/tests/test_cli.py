import csv
import json

import pytest

from vptkit.cli import ExperimentConfig, build_parser, config_from_args, main, parse_grid, parse_orders, run


def test_parse_orders():
    assert parse_orders("1..5") == [1, 2, 3, 4, 5]
    assert parse_orders("2,3,4") == [2, 3, 4]
    assert parse_orders("1..3,9") == [1, 2, 3, 9]
    assert parse_orders("") == []


def test_parse_grid():
    assert parse_grid("-0.1,0.05") == [-0.1, 0.05]


def test_config_round_trip():
    cfg = ExperimentConfig("bec", orders=[2, 3], rule="real", options={"variant": "full"})
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_config_rejects_unknown_keys_and_values():
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"command": "bec", "colour": "red"})
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"command": "plot"})
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"command": "bec", "rule": "nearest"})
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"command": "bec", "precision_bits": 10})


def test_defaults_from_parser():
    args = build_parser().parse_args(["zerodim"])
    cfg = config_from_args(args)
    assert cfg.precision_bits == 200 and cfg.format == "both" and not cfg.full
    assert cfg.options == {"g": 10.0}


def test_rule_choices_enforced():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["zerodim", "--rule", "nearest"])


def test_empty_orders_give_empty_report(tmp_path):
    assert main(["oscillator", "--orders", "", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "oscillator.json").read_text())
    assert doc["rows"] == [] and doc["checks"] == [] and doc["status"] == "PASS"


def test_oscillator_report(tmp_path):
    assert main(["oscillator", "--orders", "1..15", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "oscillator.csv").open()))
    assert [int(r["L"]) for r in rows] == list(range(1, 16))
    doc = json.loads((tmp_path / "oscillator.json").read_text())
    assert all(c["status"] == "PASS" for c in doc["checks"])
    assert list(doc) == sorted(doc)


def test_bec_full_variant(tmp_path):
    assert main(["bec", "--variant", "full", "--orders", "2..4", "--out", str(tmp_path), "--format", "json"]) == 0
    doc = json.loads((tmp_path / "bec.json").read_text())
    names = {c["check"] for c in doc["checks"]}
    assert "extrapolated c1" in names and "c1 full L=4" in names
    assert not (tmp_path / "bec.csv").exists()


def test_failing_check_gives_nonzero_exit(tmp_path, monkeypatch):
    from vptkit import cli

    def failing(cfg):
        return cli.ExperimentReport(cfg.report_inputs(), ["x"], [{"x": 1}], [cli._within("x", 1, 2, 0.5)])
    monkeypatch.setitem(cli.RUNNERS, "membrane", failing)
    assert main(["membrane", "--out", str(tmp_path)]) == 1
    doc = json.loads((tmp_path / "membrane.json").read_text())
    assert doc["status"] == "FAIL" and doc["checks"][0]["status"] == "FAIL"


def test_partial_orders_skip_unreachable_checks():
    report = run(ExperimentConfig("zerodim", orders=[5, 7], options={"g": 10.0}))
    assert report.passed and len(report.checks) == 1


def test_precision_is_restored():
    import mpmath as mp
    before = mp.mp.prec
    run(ExperimentConfig("membrane", orders=[2], precision_bits=120))
    assert mp.mp.prec == before


def test_membrane_and_hydrogen_commands(tmp_path):
    assert main(["membrane", "--out", str(tmp_path)]) == 0
    assert main(["hydrogen", "--grid", "0.01,1,100000", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader((tmp_path / "hydrogen.csv").open()))
    assert len(rows) == 3 and float(rows[-1]["binding"]) == pytest.approx(20.6035, abs=1e-3)
