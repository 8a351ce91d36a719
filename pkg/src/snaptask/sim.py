"""Deterministic scheduler for asynchronous processors over SWMR memory.

A run is driven by an explicit schedule: a sequence of processor ids, one
shared-memory operation per entry.  A processor that has already output is
skipped (no-op step); a processor whose steps stop early has crashed.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Generator, Iterator, Mapping, NamedTuple, Sequence

from .memory import Mark, Read, SharedMemory, Snap, Write
from .snapshot import SnapshotView, atomic_snap

Protocol = Callable[[int], Generator[Any, Any, Any]]
Schedule = tuple[int, ...]

DEFAULT_STEP_CAP = 20


class ScheduleCapExceeded(ValueError):
    def __init__(self, total_steps: int, count: int, cap: int):
        super().__init__(
            f"{total_steps} total steps exceeds the cap of {cap} "
            f"({count} interleavings)"
        )
        self.total_steps = total_steps
        self.count = count
        self.cap = cap


class Event(NamedTuple):
    step: int
    proc: int
    kind: str  # post | read | write | snapshot | output
    array: str | None
    value: Any


class ScanRecord(NamedTuple):
    proc: int
    array: str
    start: int
    end: int
    cells: tuple
    embedded: bool = False


class UpdateRecord(NamedTuple):
    proc: int
    array: str
    step: int


@dataclass(frozen=True)
class Trace:
    nprocs: int
    schedule: Schedule
    initial: dict[str, tuple]
    events: tuple[Event, ...]
    intervals: dict[int, tuple[int, int | None]]
    outputs: dict[int, Any]
    scans: tuple[ScanRecord, ...] = ()
    updates: tuple[UpdateRecord, ...] = ()

    def completed(self) -> list[int]:
        return sorted(self.outputs)

    def crashed(self) -> list[int]:
        """Participating processors that never output."""
        return sorted(p for p, (_, end) in self.intervals.items() if end is None)

    def completion_order(self) -> list[int]:
        return sorted(self.outputs, key=lambda p: (self.intervals[p][1], p))


def run_schedule(
    protocols: Mapping[int, Protocol],
    schedule: Sequence[int],
    memory_init: SharedMemory,
) -> Trace:
    """Execute ``schedule`` and return the resulting trace.

    Raises :class:`~snaptask.memory.SingleWriterViolation` if a protocol
    writes a cell it does not own, and ``KeyError`` for a scheduled
    processor without a protocol.
    """
    mem = memory_init.copy()
    gens: dict[int, Generator] = {}
    nextop: dict[int, Any] = {}
    last: dict[int, int] = {}
    opening: dict[int, list[list]] = {}
    events: list[Event] = []
    intervals: dict[int, list] = {}
    outputs: dict[int, Any] = {}
    scans: list[ScanRecord] = []
    updates: list[UpdateRecord] = []

    def advance(proc: int, gen: Generator, result: Any) -> None:
        # Run local code up to the next shared operation, handling marks.
        while True:
            try:
                op = gen.send(result)
            except StopIteration as stop:
                step = last[proc]
                outputs[proc] = stop.value
                intervals[proc][1] = step
                events.append(Event(step, proc, "output", None, stop.value))
                nextop.pop(proc, None)
                return
            if type(op) is Mark:
                result = None
                if op.tag == "begin":
                    opening.setdefault(proc, []).append([op.array, None])
                elif op.tag == "scan":
                    arr, start = opening[proc].pop()
                    cells, embedded = op.data
                    scans.append(ScanRecord(proc, arr, start, last[proc], tuple(cells), embedded))
                else:
                    raise ValueError(f"unknown mark {op.tag!r}")
                continue
            nextop[proc] = op
            return

    for step, proc in enumerate(schedule):
        gen = gens.get(proc)
        if gen is None:
            gen = gens[proc] = protocols[proc](proc)
            intervals[proc] = [step, None]
            last[proc] = step
            advance(proc, gen, None)
        if proc not in nextop:
            continue  # terminated: no-op step
        for pending in opening.get(proc, ()):
            if pending[1] is None:
                pending[1] = step
        op = nextop[proc]
        kind = type(op)
        if kind is Read:
            result = mem.read(op.array, op.index)
            events.append(Event(step, proc, "read", op.array, result))
        elif kind is Write:
            mem.write(step, proc, op.array, op.index, op.value)
            events.append(Event(step, proc, op.kind, op.array, op.value))
            if op.update:
                updates.append(UpdateRecord(proc, op.array, step))
            result = None
        elif kind is Snap:
            result = atomic_snap(mem, op.array, step)
            events.append(Event(step, proc, "snapshot", op.array, result.cells))
            scans.append(ScanRecord(proc, op.array, step, step, result.cells))
        else:
            raise TypeError(f"processor {proc} yielded {op!r}")
        last[proc] = step
        advance(proc, gen, result)

    return Trace(
        nprocs=memory_init.nprocs,
        schedule=tuple(schedule),
        initial={k: tuple(v) for k, v in memory_init.arrays.items()},
        events=tuple(events),
        intervals={p: (s, e) for p, (s, e) in intervals.items()},
        outputs=outputs,
        scans=tuple(scans),
        updates=tuple(updates),
    )


def interleaving_count(step_counts: Mapping[int, int]) -> int:
    """Multinomial coefficient: number of distinct interleavings."""
    total, count = 0, 1
    for c in step_counts.values():
        total += c
        count *= math.comb(total, c)
    return count


def enumerate_schedules(
    step_counts: Mapping[int, int], cap: int = DEFAULT_STEP_CAP
) -> Iterator[Schedule]:
    """Yield every interleaving of the given per-processor step counts once."""
    items = [(p, c) for p, c in sorted(step_counts.items()) if c > 0]
    total = sum(c for _, c in items)
    if total > cap:
        raise ScheduleCapExceeded(total, interleaving_count(step_counts), cap)
    return _interleavings(items, total)


def _interleavings(items: list[tuple[int, int]], total: int) -> Iterator[Schedule]:
    if not items:
        yield ()
        return
    sched = [0] * total

    def place(k: int, free: tuple[int, ...]) -> Iterator[Schedule]:
        proc, count = items[k]
        if k == len(items) - 1:
            for i in free:
                sched[i] = proc
            yield tuple(sched)
            return
        for chosen in combinations(free, count):
            for i in chosen:
                sched[i] = proc
            taken = set(chosen)
            yield from place(k + 1, tuple(i for i in free if i not in taken))

    yield from place(0, tuple(range(total)))


def random_schedule(step_counts: Mapping[int, int], seed: int) -> Schedule:
    """Uniformly random interleaving; the same seed gives the same schedule."""
    if not step_counts:
        raise ValueError("step_counts is empty")
    steps = [p for p, c in sorted(step_counts.items()) for _ in range(c)]
    random.Random(seed).shuffle(steps)
    return tuple(steps)


# -- trace dump -------------------------------------------------------------


def to_jsonable(value: Any) -> Any:
    """Structural conversion used by trace dumps and reports."""
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, (frozenset, set)):
        return sorted((to_jsonable(v) for v in value), key=json.dumps)
    if isinstance(value, SnapshotView):
        return to_jsonable(value.cells)
    if isinstance(value, (tuple, list)):
        if hasattr(value, "_asdict"):
            return {k: to_jsonable(v) for k, v in value._asdict().items()}
        return [to_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if hasattr(value, "__dataclass_fields__"):
        return {k: to_jsonable(getattr(value, k)) for k in value.__dataclass_fields__}
    return repr(value)


def format_event(ev: Event) -> str:
    val = json.dumps(to_jsonable(ev.value), sort_keys=True, separators=(",", ":"))
    return f"step={ev.step} proc={ev.proc} op={ev.kind} array={ev.array or '-'} val={val}"


def format_trace(trace: Trace) -> str:
    return "\n".join(format_event(ev) for ev in trace.events)
