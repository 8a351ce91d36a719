"""Checking campaigns: run the register protocol over enumerated or sampled
schedules, validate every output tuple, and aggregate a JSON report."""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import random
import time
from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Iterator

from . import mwmr
from .memory import SingleWriterViolation
from .objects import SPECS, spec_by_name
from .ordering import consistent_with, happened_before
from .sim import (
    DEFAULT_STEP_CAP,
    Trace,
    enumerate_schedules,
    format_trace,
    interleaving_count,
    random_schedule,
    run_schedule,
    to_jsonable,
)
from .tasks import OpexRecord, PendingRecord, Verdict, validate_output_tuple

log = logging.getLogger(__name__)

SCHEMA = 1
DEFAULT_RUN_CAP = 5_000_000


class ConfigError(ValueError):
    pass


@dataclass
class CampaignConfig:
    object: str = "mwmr"
    writers: int = 2
    readers: int = 1
    values: list | None = None
    mode: str = "exhaustive"
    trials: int = 100
    seed: int = 0
    snapshot: str = "primitive"
    crash: bool = False
    mutant: str | None = None
    allow_duplicate_values: bool = False
    run_cap: int = DEFAULT_RUN_CAP
    max_failures: int = 50
    witness_samples: int = 5

    @classmethod
    def from_dict(cls, data: dict) -> CampaignConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def validate(self) -> None:
        if self.object not in SPECS:
            raise ConfigError(f"unknown object {self.object!r}; choose from {sorted(SPECS)}")
        if self.object != "mwmr":
            raise ConfigError(f"no shared-memory protocol exists for {self.object!r}; only mwmr can be checked")
        if self.mode not in ("exhaustive", "random"):
            raise ConfigError(f"mode must be 'exhaustive' or 'random', not {self.mode!r}")
        if self.snapshot not in ("primitive", "collect"):
            raise ConfigError(f"snapshot must be 'primitive' or 'collect', not {self.snapshot!r}")
        if self.snapshot == "collect" and self.mode != "random":
            raise ConfigError("the collect-based snapshot is only checked in random mode")
        if self.writers < 0 or self.readers < 0 or self.writers + self.readers == 0:
            raise ConfigError("need at least one processor")
        if self.trials < 0:
            raise ConfigError("trials must be non-negative")
        if self.mutant is not None and self.mutant not in mwmr.MUTANTS:
            raise ConfigError(f"unknown mutant {self.mutant!r}; choose from {list(mwmr.MUTANTS)}")

    def build(self) -> mwmr.Setup:
        try:
            return mwmr.setup(
                self.writers,
                self.readers,
                values=self.values,
                snapshot=self.snapshot,
                mutant=self.mutant,
                allow_duplicate_values=self.allow_duplicate_values,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class Report:
    config: dict
    processors: list
    runs_executed: int = 0
    valid: int = 0
    invalid: int = 0
    pending_adoptions: int = 0
    failures: list = field(default_factory=list)
    witness_samples: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.invalid == 0

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "config": self.config,
            "processors": self.processors,
            "runs_executed": self.runs_executed,
            "verdicts": {"valid": self.valid, "invalid": self.invalid},
            "pending_adoptions": self.pending_adoptions,
            "failures": self.failures,
            "witness_samples": self.witness_samples,
            "wall_time": self.wall_time,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps() + "\n")


def records_from_trace(trace: Trace, commands: dict) -> tuple[tuple[OpexRecord, ...], tuple[PendingRecord, ...]]:
    """Completed ``(response, late_snapshot)`` outputs become records;
    participating processors without output become pending records."""
    completed = tuple(
        OpexRecord(p, commands[p], trace.outputs[p][0], frozenset(trace.outputs[p][1]))
        for p in sorted(trace.outputs)
    )
    pending = tuple(PendingRecord(p, commands[p]) for p in trace.crashed())
    return completed, pending


def _truncations(full: dict[int, int]) -> Iterator[dict[int, int]]:
    procs = sorted(full)
    for counts in itertools.product(*(range(full[p] + 1) for p in procs)):
        yield dict(zip(procs, counts))


def _count_vectors(config: CampaignConfig, full: dict[int, int]) -> list[dict[int, int]]:
    if config.crash:
        return [c for c in _truncations(full) if sum(c.values())]
    return [full]


def schedules(config: CampaignConfig, full: dict[int, int]) -> Iterator[tuple]:
    if config.mode == "exhaustive":
        vectors = _count_vectors(config, full)
        total = sum(interleaving_count(c) for c in vectors)
        if total > config.run_cap:
            raise ConfigError(f"{total} interleavings exceeds the run cap of {config.run_cap}")
        if sum(full.values()) > DEFAULT_STEP_CAP:
            raise ConfigError(
                f"{sum(full.values())} steps per run exceeds the step cap of {DEFAULT_STEP_CAP}"
            )
        for counts in vectors:
            yield from enumerate_schedules(counts)
        return
    rng = random.Random(config.seed)
    for _ in range(config.trials):
        counts = full
        if config.crash:
            counts = {p: (c if rng.random() < 0.5 else rng.randrange(c + 1)) for p, c in full.items()}
        yield random_schedule(counts, rng.getrandbits(64))


def check_run(config: CampaignConfig, setup: mwmr.Setup, schedule, cache: dict | None = None):
    """Run one schedule.  Returns ``(trace, verdict, problem)``; ``problem``
    is a string for liveness/consistency breaches, otherwise ``None``."""
    trace = run_schedule(setup.protocols, schedule, setup.memory)
    # Raw outputs determine the records, so they key the verdict cache.
    key = (tuple(sorted(trace.outputs.items())), tuple(trace.crashed()))
    verdict = cache.get(key) if cache is not None else None
    if verdict is None:
        completed, pending = records_from_trace(trace, setup.commands)
        verdict = validate_output_tuple(spec_by_name(config.object), completed, pending)
        if cache is not None:
            cache[key] = verdict
    problem = None
    taken = Counter(schedule)
    stalled = [p for p, c in setup.step_counts.items() if taken.get(p, 0) >= c and p not in trace.outputs]
    if stalled:
        problem = f"liveness: processor(s) {stalled} did not output within their step budget"
    elif verdict.valid and not consistent_with(verdict.witness, happened_before(trace)):
        problem = f"happened-before: witness {list(verdict.witness)} contradicts real-time order"
    return trace, verdict, problem


def run_campaign(config: CampaignConfig) -> Report:
    config.validate()
    setup = config.build()
    report = Report(
        config=to_jsonable(asdict(config)),
        processors=[[p, to_jsonable(c)] for p, c in sorted(setup.commands.items())],
    )
    t0 = time.perf_counter()
    cache: dict = {}
    for schedule in schedules(config, setup.step_counts):
        index = report.runs_executed
        report.runs_executed += 1
        try:
            trace, verdict, problem = check_run(config, setup, schedule, cache)
        except SingleWriterViolation as exc:
            _fail(report, config, index, schedule, None, f"single-writer: {exc}")
            continue
        if not verdict.valid:
            _fail(report, config, index, schedule, trace, verdict.violation)
            continue
        if problem is not None:
            _fail(report, config, index, schedule, trace, problem)
            continue
        report.valid += 1
        if verdict.adopted:
            report.pending_adoptions += 1
        if len(report.witness_samples) < config.witness_samples:
            report.witness_samples.append(
                {"run": index, "schedule": list(schedule), "witness": list(verdict.witness),
                 "adopted": list(verdict.adopted)}
            )
    report.wall_time = round(time.perf_counter() - t0, 3)
    log.info("%d runs, %d invalid, %.1fs", report.runs_executed, report.invalid, report.wall_time)
    return report


def _digest(trace: Trace | None) -> str | None:
    if trace is None:
        return None
    return hashlib.sha256(format_trace(trace).encode()).hexdigest()[:16]


def _fail(report: Report, config: CampaignConfig, index: int, schedule, trace, why: str) -> None:
    report.invalid += 1
    if len(report.failures) < config.max_failures:
        report.failures.append(
            {"run": index, "schedule": list(schedule), "trace_digest": _digest(trace), "violation": why}
        )


def load_report(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema") != SCHEMA:
        raise ConfigError(f"{path}: unsupported report schema {data.get('schema')!r}")
    return data


def replay_failure(report_path: str, failure_index: int) -> str:
    """Re-execute a recorded failing schedule; return its trace dump followed
    by the validator's explanation."""
    data = load_report(report_path)
    failures = data["failures"]
    if not failures:
        raise IndexError("no failures")
    if not 0 <= failure_index < len(failures):
        raise IndexError(f"failure index {failure_index} out of range ({len(failures)} recorded)")
    entry = failures[failure_index]
    config = CampaignConfig.from_dict(data["config"])
    config.validate()
    setup = config.build()
    schedule = tuple(entry["schedule"])
    lines = [f"# run {entry['run']} schedule {list(schedule)}"]
    try:
        trace, verdict, problem = check_run(config, setup, schedule)
    except SingleWriterViolation as exc:
        return "\n".join(lines + [f"violation: single-writer: {exc}"])
    lines.append(format_trace(trace))
    why = verdict.violation if not verdict.valid else problem
    lines.append(f"violation: {why}")
    digest = _digest(trace)
    if entry.get("trace_digest") is not None and digest != entry["trace_digest"]:
        lines.append(f"warning: trace digest {digest} differs from recorded {entry['trace_digest']}")
    return "\n".join(lines)
