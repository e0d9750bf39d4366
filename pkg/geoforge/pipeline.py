"""
Dataset pipeline: seed ingestion, per-seed synthesis fan-out, layout,
rendering, verbalization, verification and emission
"""

from __future__ import annotations

import json
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .cdl.catalog import UNITS
from .cdl.facts import FormalProblem
from .cdl.parser import scan_problem, scan_seed_json
from .cdl.printer import format_fact
from .cdl.validate import validate
from .config import PipelineConfig
from .engine.deduce import DeductionBudget, trace_to_json
from .errors import AnnotationOverflow, GeoForgeError, InconsistentFacts, Rejected, UnmappablePredicate
from .layout import compile_constraints, optimize
from .log import debug_log
from .render import diagram_spec, render_diagram
from .rng import RNGManager
from .synth import FormalizedSeed, SynthesisCandidate, formalize, synthesize_batch
from .verbalize import (
    RewriterClient,
    TemplateBank,
    channel_secrecy_violations,
    default_bank,
    rewrite_many,
    verbalize_problem,
    verbalize_solution,
    verify_answer,
)

DATASET_FILE = "dataset.jsonl"
IMAGES_DIR = "images"
STATS_FILE = "run_stats.json"
TRACES_DIR = "traces"
LAYOUTS_DIR = "layouts"
SVG_DIR = "svg"

SEED_SUFFIXES = (".json", ".cdl", ".txt")

# rejections after a candidate was accepted by synthesis
LATE_REASONS = ("Unmappable", "ThresholdFail", "NumericalFailure", "RenderOverflow", "SecrecyFail", "VerifyFail", "Crash")


def canonical_number(value):
    """Integral values as int, everything else as float."""
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else float(value)
    number = float(value)
    return int(number) if number.is_integer() and abs(number) < 2 ** 53 else number


@dataclass(frozen=True)
class InstructionRecord:
    id: str
    question: str
    image: str
    solution: str
    answer: object
    unit: str
    provenance: Dict

    def to_json(self) -> Dict:
        return {
            "id": self.id,
            "image": self.image,
            "question": self.question,
            "solution": self.solution,
            "answer": canonical_number(self.answer),
            "unit": self.unit,
            "provenance": self.provenance,
        }


@dataclass
class Artifact:
    """A verified record with the files that go beside it."""

    record: InstructionRecord
    png: bytes
    svg: str = ""
    trace: Optional[list] = None
    layout: Optional[dict] = None


@dataclass
class RunStats:
    seeds_read: int = 0
    seeds_valid: int = 0
    attempted: int = 0
    accepted: int = 0
    emitted: int = 0
    rejections: Counter = field(default_factory=Counter)
    cross_seed_duplicates: int = 0
    wall_time: float = 0.0
    diagnostics: List[str] = field(default_factory=list)

    def absorb(self, other: "RunStats") -> None:
        self.seeds_read += other.seeds_read
        self.seeds_valid += other.seeds_valid
        self.attempted += other.attempted
        self.accepted += other.accepted
        self.emitted += other.emitted
        self.rejections.update(other.rejections)
        self.diagnostics.extend(other.diagnostics)

    def synth_rejections(self) -> int:
        return sum(n for reason, n in self.rejections.items() if reason not in LATE_REASONS)

    def late_rejections(self) -> int:
        return sum(self.rejections[r] for r in LATE_REASONS)

    def reconciles(self) -> bool:
        return (
            self.attempted == self.accepted + self.synth_rejections()
            and self.emitted == self.accepted - self.late_rejections()
        )

    def to_json(self) -> Dict:
        return {
            "seeds_read": self.seeds_read,
            "seeds_valid": self.seeds_valid,
            "attempted": self.attempted,
            "accepted": self.accepted,
            "emitted": self.emitted,
            "rejections": dict(sorted(self.rejections.items())),
            "cross_seed_duplicates": self.cross_seed_duplicates,
            "wall_time": round(self.wall_time, 3),
            "diagnostics": list(self.diagnostics),
        }


# seeds


def seed_files(paths: Iterable) -> List[Path]:
    files = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(p for p in path.iterdir() if p.suffix in SEED_SUFFIXES))
        else:
            files.append(path)
    return files


def _json_entries(payload, stem) -> List[Tuple[dict, str]]:
    if isinstance(payload, list):
        return [(obj, f"{stem}_{i}") for i, obj in enumerate(payload)]
    if isinstance(payload, dict) and "construction_cdl" in payload:
        return [(payload, stem)]
    if isinstance(payload, dict):
        return [(obj, str(key)) for key, obj in payload.items()]
    raise GeoForgeError("seed JSON must be an object, a list or an id-keyed mapping")


def load_seed_problems(paths: Iterable) -> Tuple[List[FormalProblem], List[str]]:
    """Parse and validate every seed; bad ones become diagnostics."""
    problems, diagnostics = [], []
    for path in seed_files(paths):
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            diagnostics.append(f"{path}: unreadable ({e})")
            continue
        if not text.strip():
            diagnostics.append(f"{path}: empty file")
            continue
        try:
            if path.suffix == ".json":
                found = [scan_seed_json(obj, default_id) for obj, default_id in _json_entries(json.loads(text), path.stem)]
            else:
                found = [scan_problem(text, path.stem)]
        except (ValueError, GeoForgeError) as e:
            diagnostics.append(f"{path}: {e}")
            continue
        for problem, errors in found:
            if errors or problem is None:
                reason = errors[0] if errors else "no statements"
                diagnostics.append(f"{path}: {reason}")
                continue
            report = validate(problem)
            if not report.ok:
                diagnostics.append(f"{path} [{problem.id}]: {report.summary()}")
                continue
            problems.append(problem)
    return problems, diagnostics


def ingest_seeds(paths: Iterable, budget: Optional[DeductionBudget] = None) -> Tuple[List[FormalizedSeed], List[str]]:
    """Parse, validate and deduce every seed; a seed whose deduction times
    out keeps the closure it reached."""
    problems, diagnostics = load_seed_problems(paths)
    seeds = []
    for problem in problems:
        try:
            seeds.append(formalize(problem, budget))
        except InconsistentFacts as e:
            diagnostics.append(f"{problem.id}: inconsistent seed ({e})")
    for line in diagnostics:
        debug_log(f"Seed skipped: {line}", "WARN")
    return seeds, diagnostics


# candidates


def _reject(stats: RunStats, reason: str, cid: str, detail: str = "") -> None:
    stats.rejections[reason] += 1
    debug_log(f"Candidate {cid} rejected: {reason} {detail}".rstrip(), "DEBUG")


def _provenance(candidate: SynthesisCandidate) -> Dict:
    swap = candidate.swap
    return {
        "seed_id": candidate.seed_id,
        "swap": {
            "n": swap.n if swap else 0,
            "deleted": [format_fact(f) for f in swap.deleted] if swap else [],
            "added": [format_fact(f) for f in swap.added] if swap else [],
        },
        "goal_provenance": candidate.provenance,
        "rewriter_used": False,
    }


def build_draft(candidate: SynthesisCandidate, config: PipelineConfig, streams: RNGManager, bank: TemplateBank, stats: RunStats):
    """Layout, render and template text for one candidate, or None after
    counting the rejection."""
    cid = candidate.id
    problem = candidate.problem
    try:
        system = compile_constraints(problem.constructions, problem.image_facts, problem.text_facts)
    except UnmappablePredicate as e:
        _reject(stats, "Unmappable", cid, str(e))
        return None
    layout = optimize(system, streams.fresh(cid, "layout"), config.layout)
    if isinstance(layout, Rejected):
        _reject(stats, layout.reason, cid, layout.detail)
        return None
    size = streams.fresh(cid, "render").choice(list(config.sizes))
    try:
        diagram = render_diagram(diagram_spec(problem, layout, size))
    except AnnotationOverflow as e:
        _reject(stats, "RenderOverflow", cid, str(e))
        return None
    question = verbalize_problem(problem, bank, streams.fresh(cid, "question"))
    leaks = channel_secrecy_violations(question, problem.text_facts, problem.image_facts)
    if leaks:
        _reject(stats, "SecrecyFail", cid, ", ".join(leaks))
        return None
    solution = verbalize_solution(candidate.trace, candidate.goal_value, bank, streams.fresh(cid, "solution"))
    provenance = _provenance(candidate)
    provenance["image_size"] = [diagram.width, diagram.height]
    provenance["layout_restarts"] = layout.restarts_used
    record = InstructionRecord(
        cid,
        question,
        f"{IMAGES_DIR}/{cid}.png",
        solution,
        candidate.goal_value,
        UNITS[candidate.goal_symbol.kind],
        provenance,
    )
    return Artifact(
        record,
        diagram.png,
        diagram.svg if config.keep_svg else "",
        trace_to_json(candidate.trace) if config.dump_trace else None,
        layout.to_json() if config.dump_layout else None,
    )


def _finish(drafts: List[Artifact], client, config: PipelineConfig, stats: RunStats) -> List[Artifact]:
    """Optional rewrite, then answer verification; failures are dropped."""
    texts = rewrite_many(
        [(a.record.question, a.record.solution) for a in drafts], client, config.rewriter.max_in_flight
    )
    done = []
    for artifact, (text, used) in zip(drafts, texts):
        record = artifact.record
        if not verify_answer(text, record.answer):
            _reject(stats, "VerifyFail", record.id, "answer mismatch after rewrite" if used else "answer mismatch")
            continue
        provenance = dict(record.provenance, rewriter_used=used)
        artifact.record = InstructionRecord(
            record.id, record.question, record.image, text, record.answer, record.unit, provenance
        )
        done.append(artifact)
    return done


def _client_for(config: PipelineConfig):
    if not config.rewriter.enabled:
        return None
    return RewriterClient(config.rewriter.with_env_key())


@dataclass
class SeedOutcome:
    seed_id: str
    artifacts: List[Artifact]
    stats: RunStats
    dedup_keys: List[tuple] = field(default_factory=list)


def process_seed(problem: FormalProblem, config: PipelineConfig, client=None, bank: Optional[TemplateBank] = None) -> SeedOutcome:
    """Everything for one seed; a crash only loses the seed or the candidate it hit."""
    stats = RunStats(seeds_read=1)
    bank = bank or (TemplateBank.load(config.templates) if config.templates else default_bank())
    streams = RNGManager(config.seed)
    try:
        seed = formalize(problem, config.budget)
    except InconsistentFacts as e:
        stats.diagnostics.append(f"{problem.id}: inconsistent seed ({e})")
        debug_log(f"Seed {problem.id} skipped: {e}", "WARN")
        return SeedOutcome(problem.id, [], stats)
    except Exception as e:
        stats.diagnostics.append(f"{problem.id}: engine crashed ({type(e).__name__}: {e})")
        debug_log(f"Seed {problem.id} skipped, engine crashed: {type(e).__name__}: {e}", "ERROR")
        return SeedOutcome(problem.id, [], stats)
    stats.seeds_valid = 1

    try:
        batch = synthesize_batch(seed, config.per_seed, streams, config.image_ratio, config.budget)
    except Exception as e:
        # nothing was counted yet, so the seed contributes zeros
        stats.diagnostics.append(f"{problem.id}: synthesis crashed ({type(e).__name__}: {e})")
        debug_log(f"Seed {problem.id}: synthesis crashed: {type(e).__name__}: {e}", "ERROR")
        return SeedOutcome(problem.id, [], stats)
    stats.attempted = batch.attempted
    stats.accepted = len(batch.candidates)
    stats.rejections.update(batch.diagnostics)

    drafts, keys = [], []
    for candidate in batch.candidates:
        try:
            artifact = build_draft(candidate, config, streams, bank, stats)
        except Exception as e:
            debug_log(f"Candidate {candidate.id} crashed: {type(e).__name__}: {e}", "ERROR")
            _reject(stats, "Crash", candidate.id)
            continue
        if artifact is not None:
            drafts.append(artifact)
            keys.append((str(candidate.goal_symbol), tuple(sorted(format_fact(f) for f in candidate.problem.metric_facts))))

    if client is None:
        client = _client_for(config)
    finished = _finish(drafts, client, config, stats)
    kept = {a.record.id for a in finished}
    stats.emitted = len(finished)
    dedup = [k for a, k in zip(drafts, keys) if a.record.id in kept]
    debug_log(f"Seed {problem.id}: {stats.emitted}/{stats.attempted} emitted", "INFO")
    return SeedOutcome(problem.id, finished, stats, dedup)


# output


class DatasetWriter:
    """Single sink for dataset rows; files are keyed by record id.

    With resume the rows already in the directory are kept and re-emitted
    ids replace them; without it the previous dataset and the files of its
    rows are removed, so the directory only ever holds one run.
    """

    def __init__(self, out_dir, resume: bool = True):
        self.root = Path(out_dir)
        try:
            (self.root / IMAGES_DIR).mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise GeoForgeError(f"cannot create output directory {self.root}: {e}") from e
        self.rows: Dict[str, Dict] = {}
        previous = read_dataset(self.root)
        if resume:
            self.rows = {row["id"]: row for row in previous}
        else:
            self._discard(previous)

    def _discard(self, rows: List[Dict]) -> None:
        for row in rows:
            rid = row["id"]
            for sub, name in ((IMAGES_DIR, f"{rid}.png"), (SVG_DIR, f"{rid}.svg"),
                              (TRACES_DIR, f"{rid}.json"), (LAYOUTS_DIR, f"{rid}.json")):
                (self.root / sub / name).unlink(missing_ok=True)
        for name in (DATASET_FILE, STATS_FILE):
            (self.root / name).unlink(missing_ok=True)
        if rows:
            debug_log(f"Removed {len(rows)} record(s) of the previous run in {self.root}", "INFO")

    def _write_file(self, sub, name, data) -> None:
        folder = self.root / sub
        folder.mkdir(parents=True, exist_ok=True)
        path = folder / name
        if isinstance(data, bytes):
            path.write_bytes(data)
        else:
            path.write_text(data, encoding="utf-8")

    def emit(self, artifact: Artifact) -> None:
        record = artifact.record
        self._write_file(IMAGES_DIR, f"{record.id}.png", artifact.png)
        if artifact.svg:
            self._write_file(SVG_DIR, f"{record.id}.svg", artifact.svg)
        if artifact.trace is not None:
            self._write_file(TRACES_DIR, f"{record.id}.json", json.dumps(artifact.trace, indent=2))
        if artifact.layout is not None:
            self._write_file(LAYOUTS_DIR, f"{record.id}.json", json.dumps(artifact.layout, indent=2))
        self.rows[record.id] = record.to_json()

    def flush(self) -> None:
        lines = [json.dumps(self.rows[k], ensure_ascii=False, sort_keys=True) for k in self.rows]
        (self.root / DATASET_FILE).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def emit_record(artifact: Artifact, out_dir) -> None:
    """Write one record and its image; re-emitting an id rewrites it in place."""
    writer = DatasetWriter(out_dir)
    writer.emit(artifact)
    writer.flush()


def _outcomes(problems: Sequence[FormalProblem], config: PipelineConfig, client):
    if config.workers == 1 or len(problems) <= 1:
        for problem in problems:
            yield process_seed(problem, config, client)
        return
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        # map yields in submission order, so output never depends on scheduling
        yield from pool.map(process_seed, problems, [config] * len(problems), [client] * len(problems))


def run_pipeline(config: PipelineConfig, client=None) -> RunStats:
    config.validate()
    started = time.monotonic()
    writer = DatasetWriter(config.out, resume=config.resume)
    problems, diagnostics = load_seed_problems(config.seeds)
    stats = RunStats(seeds_read=len(diagnostics), diagnostics=list(diagnostics))
    for line in diagnostics:
        debug_log(f"Seed skipped: {line}", "WARN")
    if not problems:
        raise GeoForgeError("no valid seed problems")

    seen_keys = set()
    for outcome in _outcomes(problems, config, client):
        stats.absorb(outcome.stats)
        for artifact in outcome.artifacts:
            writer.emit(artifact)
        for key in outcome.dedup_keys:
            if key in seen_keys:
                stats.cross_seed_duplicates += 1
            seen_keys.add(key)
    if stats.seeds_valid == 0:
        raise GeoForgeError("no valid seed problems")
    writer.flush()
    stats.wall_time = time.monotonic() - started
    (Path(config.out) / STATS_FILE).write_text(json.dumps(stats.to_json(), indent=2), encoding="utf-8")
    if not stats.reconciles():
        debug_log("Run statistics do not reconcile", "ERROR")
    debug_log(
        f"Run finished: {stats.emitted} record(s) from {stats.seeds_valid}/{stats.seeds_read} seed(s) "
        f"in {stats.wall_time:.1f}s",
        "INFO",
    )
    return stats


def read_stats(out_dir) -> Dict:
    path = Path(out_dir) / STATS_FILE
    if not path.exists():
        raise GeoForgeError(f"no {STATS_FILE} in {out_dir}")
    return json.loads(path.read_text(encoding="utf-8"))


def read_dataset(out_dir) -> List[Dict]:
    path = Path(out_dir) / DATASET_FILE
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]


__all__ = [
    "Artifact",
    "DatasetWriter",
    "InstructionRecord",
    "RunStats",
    "SeedOutcome",
    "canonical_number",
    "emit_record",
    "ingest_seeds",
    "load_seed_problems",
    "process_seed",
    "read_dataset",
    "read_stats",
    "run_pipeline",
]
