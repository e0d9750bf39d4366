import json

import pytest

from conftest import SEEDS_DIR
from geoforge.cdl import parse_problem
from geoforge.cli import build_parser, config_from_args, main


def test_validate_accepts_the_fixture_seeds(capsys):
    assert main(["validate", str(SEEDS_DIR)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 10
    assert all(line.startswith("OK seed") for line in lines)


def test_validate_reports_a_bad_seed(tmp_path, capsys):
    bad = tmp_path / "bad.cdl"
    bad.write_text("Shape(AB,BC,CA)\nEqual(LengthOfLine(AD),3)\nValue(LengthOfLine(BC))\n", encoding="utf-8")
    assert main(["validate", str(bad)]) == 1
    assert "INVALID" in capsys.readouterr().out


def test_synth_then_stats(tmp_path, capsys):
    out = tmp_path / "out"
    code = main([
        "synth",
        "--seeds", str(SEEDS_DIR / "002_right_triangle.json"),
        "--out", str(out),
        "--per-seed", "1",
        "--sizes", "224",
    ])
    assert code == 0
    assert (out / "run_stats.json").is_file()
    capsys.readouterr()
    assert main(["stats", str(out)]) == 0
    printed = capsys.readouterr().out
    assert '"seeds_read": 1' in printed


def test_stats_without_a_run_is_an_error(tmp_path, capsys):
    assert main(["stats", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_backtranslate_writes_pairs(tmp_path):
    target = tmp_path / "pairs.jsonl"
    assert main(["backtranslate", str(SEEDS_DIR / "002_right_triangle.json"), "--out", str(target), "--count", "2"]) == 0
    pairs = [json.loads(line) for line in target.read_text(encoding="utf-8").splitlines()]
    assert [p["id"] for p in pairs] == ["seed002_bt0", "seed002_bt1"]
    for pair in pairs:
        assert not parse_problem(pair["cdl"]).image_facts


def test_bad_sizes_are_refused(tmp_path, capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["synth", "--sizes", "large"])
    assert main(["synth", "--seeds", str(SEEDS_DIR), "--out", str(tmp_path), "--sizes", "224,200"]) == 1
    assert "sizes" in capsys.readouterr().err


def test_a_command_is_required():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_resume_flag_reaches_the_config():
    args = build_parser().parse_args(["synth", "--seeds", str(SEEDS_DIR), "--out", "x", "--resume"])
    assert config_from_args(args).resume is True
    args = build_parser().parse_args(["synth", "--seeds", str(SEEDS_DIR), "--out", "x"])
    assert config_from_args(args).resume is False
