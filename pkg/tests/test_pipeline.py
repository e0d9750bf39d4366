import json
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import SEEDS_DIR
from geoforge import pipeline
from geoforge.config import PipelineConfig
from geoforge.errors import GeoForgeError
from geoforge.layout import LayoutConfig
from geoforge.pipeline import (
    Artifact,
    DatasetWriter,
    InstructionRecord,
    LATE_REASONS,
    RunStats,
    canonical_number,
    emit_record,
    ingest_seeds,
    load_seed_problems,
    read_dataset,
    read_stats,
    run_pipeline,
)
from geoforge.verbalize import verify_answer

SEED_FILES = (
    str(SEEDS_DIR / "002_right_triangle.json"),
    str(SEEDS_DIR / "006_rectangle.json"),
)

ROW_KEYS = {"id", "image", "question", "solution", "answer", "unit", "provenance"}


def run_config(out, **overrides):
    values = dict(
        seeds=SEED_FILES,
        out=str(out),
        per_seed=2,
        sizes=(224,),
        layout=LayoutConfig(restarts=6),
    )
    values.update(overrides)
    return PipelineConfig(**values)


@pytest.fixture(scope="module")
def run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    stats = run_pipeline(run_config(out))
    return out, stats


def test_run_reconciles(run):
    out, stats = run
    assert stats.seeds_read == 2
    assert stats.seeds_valid == 2
    assert stats.reconciles()
    saved = read_stats(out)
    assert saved["emitted"] == stats.emitted
    assert saved["attempted"] == saved["accepted"] + sum(
        n for reason, n in saved["rejections"].items()
        if reason not in LATE_REASONS
    )


def test_rows_are_complete(run):
    out, stats = run
    rows = read_dataset(out)
    assert len(rows) == stats.emitted
    assert len({row["id"] for row in rows}) == len(rows)
    for row in rows:
        assert set(row) == ROW_KEYS
        assert (Path(out) / row["image"]).is_file()
        assert row["image"] == f"images/{row['id']}.png"
        assert verify_answer(row["solution"], row["answer"])
        assert row["question"].startswith("As shown in the figure")
        assert row["provenance"]["seed_id"] in ("seed002", "seed006")
        assert row["provenance"]["rewriter_used"] is False
        assert row["provenance"]["image_size"] == [299, 224]


def test_runs_are_deterministic(run, tmp_path):
    out, _ = run
    run_pipeline(run_config(tmp_path))
    first = (Path(out) / "dataset.jsonl").read_text(encoding="utf-8")
    second = (tmp_path / "dataset.jsonl").read_text(encoding="utf-8")
    assert first == second
    for row in read_dataset(out):
        assert (Path(out) / row["image"]).read_bytes() == (tmp_path / row["image"]).read_bytes()


def test_rerun_rewrites_in_place(tmp_path):
    config = run_config(tmp_path, seeds=SEED_FILES[:1])
    run_pipeline(config)
    before = read_dataset(tmp_path)
    run_pipeline(config)
    assert read_dataset(tmp_path) == before


def test_smaller_rerun_drops_the_old_rows(tmp_path):
    run_pipeline(run_config(tmp_path, seeds=SEED_FILES[:1], per_seed=3, keep_svg=True))
    old_ids = {row["id"] for row in read_dataset(tmp_path)}
    stats = run_pipeline(run_config(tmp_path, seeds=SEED_FILES[:1], per_seed=1))
    rows = read_dataset(tmp_path)
    assert len(rows) == stats.emitted
    assert read_stats(tmp_path)["emitted"] == len(rows)
    kept = {row["id"] for row in rows}
    for rid in old_ids - kept:
        assert not (tmp_path / "images" / f"{rid}.png").exists()
        assert not (tmp_path / "svg" / f"{rid}.svg").exists()
    assert len(list((tmp_path / "images").iterdir())) == len(rows)


def test_resume_keeps_the_old_rows(tmp_path):
    run_pipeline(run_config(tmp_path, seeds=SEED_FILES[:1]))
    first = {row["id"] for row in read_dataset(tmp_path)}
    run_pipeline(run_config(tmp_path, seeds=SEED_FILES[1:], resume=True))
    rows = {row["id"] for row in read_dataset(tmp_path)}
    assert first <= rows


def test_optional_artifacts(tmp_path):
    stats = run_pipeline(run_config(tmp_path, seeds=SEED_FILES[:1], dump_trace=True, dump_layout=True, keep_svg=True))
    for row in read_dataset(tmp_path):
        assert (tmp_path / "traces" / f"{row['id']}.json").is_file()
        assert (tmp_path / "layouts" / f"{row['id']}.json").is_file()
        assert (tmp_path / "svg" / f"{row['id']}.svg").read_text(encoding="utf-8").startswith("<svg")
    assert len(read_dataset(tmp_path)) == stats.emitted


class HintClient:
    """Returns the template solution handed to it in the prompt."""

    def complete(self, prompt):
        return prompt.split("Hint\n", 1)[1].strip()


class WrongClient:
    def complete(self, prompt):
        return "After some work, the answer is 987654."


def test_rewritten_solution_is_kept_when_it_verifies(tmp_path):
    stats = run_pipeline(run_config(tmp_path, seeds=SEED_FILES[:1]), client=HintClient())
    rows = read_dataset(tmp_path)
    assert len(rows) == stats.emitted
    assert all(row["provenance"]["rewriter_used"] for row in rows)
    assert stats.reconciles()


def test_wrong_rewrites_are_rejected(tmp_path):
    stats = run_pipeline(run_config(tmp_path, seeds=SEED_FILES[:1]), client=WrongClient())
    assert stats.emitted == 0
    assert read_dataset(tmp_path) == []
    if stats.accepted:
        assert stats.rejections["VerifyFail"] > 0
    assert stats.reconciles()


def test_bad_seeds_become_diagnostics(tmp_path):
    (tmp_path / "bad.cdl").write_text("Shape(AB,BC,CA)\nFoo(AB)\nValue(LengthOfLine(AB))\n", encoding="utf-8")
    (tmp_path / "empty.cdl").write_text("", encoding="utf-8")
    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    problems, diagnostics = load_seed_problems([tmp_path])
    assert problems == []
    assert len(diagnostics) == 3


def test_run_without_valid_seeds_fails(tmp_path):
    seeds = tmp_path / "seeds"
    seeds.mkdir()
    (seeds / "bad.cdl").write_text("Shape(AB,BC,CA\n", encoding="utf-8")
    with pytest.raises(GeoForgeError):
        run_pipeline(run_config(tmp_path / "out", seeds=(str(seeds),)))


def test_reconciliation_arithmetic():
    stats = RunStats(attempted=10, accepted=6, emitted=4)
    stats.rejections.update({"NoGoal": 3, "Unsolvable": 1, "ThresholdFail": 1, "VerifyFail": 1})
    assert stats.reconciles()
    stats.emitted = 5
    assert not stats.reconciles()


def test_canonical_numbers():
    assert canonical_number(Fraction(10, 2)) == 5
    assert isinstance(canonical_number(Fraction(10, 2)), int)
    assert canonical_number(Fraction(1, 4)) == 0.25
    assert canonical_number(3.0) == 3
    assert canonical_number(2.5) == 2.5


def artifact(answer, png=b"png"):
    record = InstructionRecord("x_000", "q", "images/x_000.png", f"The answer is {answer}.", answer, "cm", {})
    return Artifact(record, png)


def test_reemitting_an_id_replaces_the_row(tmp_path):
    emit_record(artifact(3), tmp_path)
    emit_record(artifact(4, b"other"), tmp_path)
    rows = read_dataset(tmp_path)
    assert [row["answer"] for row in rows] == [4]
    assert (tmp_path / "images" / "x_000.png").read_bytes() == b"other"


def test_writer_keeps_existing_rows(tmp_path):
    writer = DatasetWriter(tmp_path)
    writer.emit(artifact(3))
    writer.flush()
    again = DatasetWriter(tmp_path)
    assert set(again.rows) == {"x_000"}
    assert json.loads((tmp_path / "dataset.jsonl").read_text(encoding="utf-8"))["unit"] == "cm"


def test_stats_need_a_finished_run(tmp_path):
    with pytest.raises(GeoForgeError):
        read_stats(tmp_path)


def test_ingest_keeps_the_full_closure():
    seeds, diagnostics = ingest_seeds([SEEDS_DIR])
    assert diagnostics == []
    assert [s.id for s in seeds] == [f"seed{i:03d}" for i in range(1, 11)]
    for seed in seeds:
        assert set(seed.m_p) <= set(seed.m_all)


def test_full_seed_set_reconciles(tmp_path):
    stats = run_pipeline(run_config(tmp_path, seeds=(str(SEEDS_DIR),), per_seed=8, seed=42))
    assert stats.seeds_read == stats.seeds_valid == 10
    assert stats.reconciles()
    assert 0 < stats.accepted <= 80
    assert stats.attempted >= stats.accepted
    assert len(read_dataset(tmp_path)) == stats.emitted
    assert read_stats(tmp_path)["attempted"] == stats.attempted


def test_seed_that_crashes_the_engine_is_skipped(tmp_path, monkeypatch):
    real = pipeline.formalize

    def flaky(problem, budget=None):
        if problem.id == "seed002":
            raise RuntimeError("solver blew up")
        return real(problem, budget)

    monkeypatch.setattr(pipeline, "formalize", flaky)
    stats = run_pipeline(run_config(tmp_path))
    assert stats.seeds_read == 2
    assert stats.seeds_valid == 1
    assert any("seed002" in line and "RuntimeError" in line for line in stats.diagnostics)
    assert stats.reconciles()
    assert all(row["provenance"]["seed_id"] == "seed006" for row in read_dataset(tmp_path))


def test_synthesis_crash_keeps_the_counters_whole(tmp_path, monkeypatch):
    def broken(*args, **kwargs):
        raise MemoryError("out of room")

    monkeypatch.setattr(pipeline, "synthesize_batch", broken)
    stats = run_pipeline(run_config(tmp_path, seeds=SEED_FILES[:1]))
    assert stats.seeds_valid == 1
    assert stats.attempted == stats.accepted == stats.emitted == 0
    assert stats.reconciles()
    assert read_dataset(tmp_path) == []
