"""One-shot multi-writer register built from single-writer arrays.

Every processor first posts its id in ``Id``.  A writer snapshots ``Id``
(its early-snapshot), publishes ``(v, early)`` in ``Value`` and snapshots
``Id`` again (its late-snapshot).  A reader snapshots ``Value``, takes the
published write with the largest early-snapshot (ties to the higher id),
then takes its late-snapshot.  Each processor outputs
``(response, late_snapshot)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Any, Sequence

from .memory import BOTTOM, SharedMemory
from .objects import OK, Command, read, write
from .sim import Protocol
from .snapshot import IMPLEMENTATIONS, collect_scan_bound, collect_update_bound, logical

ID = "Id"
VALUE = "Value"
VIRTUAL = -1  # stands for the register's initial value

MUTANTS = ("no-early", "low-tiebreak", "late-first", "smallest-early")


@dataclass(frozen=True)
class ValueCell:
    value: Any
    early_snapshot: frozenset[int]


def select_latest(view: Sequence[Any], low_tiebreak: bool = False, smallest: bool = False) -> int:
    """Index of the published write ordered last, or :data:`VIRTUAL`.

    Writes are ranked by early-snapshot size, then by processor id.  The
    virtual initial cell ranks below every real write.
    """
    best, best_key = VIRTUAL, (0, -1)
    for p, cell in enumerate(view):
        cell = logical(cell)
        if cell is BOTTOM:
            continue
        size = len(cell.early_snapshot)
        key = (-size if smallest else size, -p if low_tiebreak else p)
        if best == VIRTUAL or key > best_key:
            best, best_key = p, key
    return best


def writer(proc: int, value: Any, *, nprocs: int, snapshot: str = "primitive",
           mutant: str | None = None):
    scan, update = IMPLEMENTATIONS[snapshot]
    yield from update(proc, ID, proc, nprocs, kind="post")
    if mutant == "no-early":
        early = frozenset()
    else:
        early = (yield from scan(proc, ID, nprocs)).members()
    yield from update(proc, VALUE, ValueCell(value, early), nprocs)
    late = (yield from scan(proc, ID, nprocs)).members()
    return OK, late


def reader(proc: int, *, nprocs: int, snapshot: str = "primitive",
           mutant: str | None = None, initial: Any = BOTTOM):
    scan, update = IMPLEMENTATIONS[snapshot]
    yield from update(proc, ID, proc, nprocs, kind="post")
    if mutant == "late-first":
        late = (yield from scan(proc, ID, nprocs)).members()
        view = yield from scan(proc, VALUE, nprocs)
    else:
        view = yield from scan(proc, VALUE, nprocs)
        late = (yield from scan(proc, ID, nprocs)).members()
    j = select_latest(view.cells, low_tiebreak=mutant == "low-tiebreak",
                      smallest=mutant == "smallest-early")
    return (initial if j == VIRTUAL else view.cell(j).value), late


def step_bounds(nprocs: int, snapshot: str, mutant: str | None = None) -> tuple[int, int]:
    """Shared steps needed by (writer, reader) to finish in the worst case."""
    if snapshot == "primitive":
        w = 3 if mutant == "no-early" else 4
        return w, 3
    scan, upd = collect_scan_bound(nprocs), collect_update_bound(nprocs)
    w = 2 * upd + (1 if mutant == "no-early" else 2) * scan
    return w, upd + 2 * scan


@dataclass(frozen=True)
class Setup:
    protocols: dict[int, Protocol]
    commands: dict[int, Command]
    step_counts: dict[int, int]
    memory: SharedMemory


def setup(
    writers: int,
    readers: int,
    *,
    values: Sequence[Any] | None = None,
    snapshot: str = "primitive",
    mutant: str | None = None,
    initial: Any = BOTTOM,
    allow_duplicate_values: bool = False,
) -> Setup:
    """Writers get ids ``0..writers-1`` and readers the ids after them.
    Writer ``p`` writes ``values[p]`` (default ``"v<p>"``)."""
    if snapshot not in IMPLEMENTATIONS:
        raise ValueError(f"unknown snapshot implementation {snapshot!r}")
    if mutant is not None and mutant not in MUTANTS:
        raise ValueError(f"unknown mutant {mutant!r}; choose from {MUTANTS}")
    if values is None:
        values = [f"v{p}" for p in range(writers)]
    values = list(values)
    if len(values) != writers:
        raise ValueError(f"{writers} writers but {len(values)} values")
    if not allow_duplicate_values and len(set(map(repr, values))) != len(values):
        raise ValueError("write values must be distinct")
    n = writers + readers
    wsteps, rsteps = step_bounds(n, snapshot, mutant)
    protocols: dict[int, Protocol] = {}
    commands: dict[int, Command] = {}
    counts: dict[int, int] = {}
    for p in range(writers):
        protocols[p] = partial(writer, value=values[p], nprocs=n, snapshot=snapshot, mutant=mutant)
        commands[p] = write(values[p])
        counts[p] = wsteps
    for p in range(writers, n):
        protocols[p] = partial(reader, nprocs=n, snapshot=snapshot, mutant=mutant, initial=initial)
        commands[p] = read()
        counts[p] = rsteps
    return Setup(protocols, commands, counts, SharedMemory(n, (ID, VALUE)))
