"""Atomic snapshots: the one-step primitive, a collect-based construction from
plain reads and writes, and a post-hoc linearizability check over traces.

Both implementations expose the same pair of generator helpers,
``scan(proc, array, nprocs)`` and ``update(proc, array, value, nprocs)``, so a
protocol can be written once and run on either (see :data:`IMPLEMENTATIONS`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, NamedTuple

from .memory import BOTTOM, Mark, Read, SharedMemory, Snap, Write

if TYPE_CHECKING:
    from .sim import Trace


class SnapshotView(NamedTuple):
    """A full copy of one array at a consistent cut.

    ``cut`` is the step the view is linearized at.  The primitive knows it
    immediately; for collect-based scans it is ``None`` until
    :func:`linearize_scans` recovers it.
    """

    array: str
    cells: tuple
    cut: int | None = None

    def members(self) -> frozenset[int]:
        """Indices of the non-empty cells, i.e. the set of posted processors."""
        return frozenset(i for i, c in enumerate(self.cells) if logical(c) is not BOTTOM)

    def cell(self, i: int) -> Any:
        return logical(self.cells[i])


@dataclass(frozen=True)
class Tagged:
    """Cell content written by :func:`collect_update`."""

    value: Any
    seq: int
    view: tuple  # logical cells of the updater's embedded scan


def logical(cell: Any) -> Any:
    return cell.value if isinstance(cell, Tagged) else cell


def _seq(cell: Any) -> int:
    return cell.seq if isinstance(cell, Tagged) else 0


def atomic_snap(memory: SharedMemory, array: str, step: int) -> SnapshotView:
    """Contents of ``array`` at ``step``.  Unknown arrays raise ``KeyError``."""
    return SnapshotView(array, memory.cells(array), step)


# -- primitive flavour ------------------------------------------------------


def atomic_scan(proc: int, array: str, nprocs: int, embedded: bool = False):
    view = yield Snap(array)
    return view


def atomic_update(proc: int, array: str, value: Any, nprocs: int, kind: str = "write"):
    yield Write(array, proc, value, kind, update=True)


# -- collect-based flavour --------------------------------------------------


def _collect(array: str, nprocs: int):
    cells = []
    for j in range(nprocs):
        cells.append((yield Read(array, j)))
    return tuple(cells)


def _scan(proc: int, array: str, nprocs: int, embedded: bool):
    yield Mark("begin", array)
    moved = [0] * nprocs
    prev = yield from _collect(array, nprocs)
    while True:
        cur = yield from _collect(array, nprocs)
        changed = [j for j in range(nprocs) if _seq(prev[j]) != _seq(cur[j])]
        if not changed:
            view = tuple(logical(c) for c in cur)
            break
        borrowed = None
        for j in changed:
            moved[j] += 1
            if moved[j] >= 2 and borrowed is None:
                # j wrote twice since we started, so its second embedded
                # scan lies entirely inside our interval
                borrowed = cur[j].view
        if borrowed is not None:
            view = borrowed
            break
        prev = cur
    yield Mark("scan", array, (view, embedded))
    return SnapshotView(array, view), cur


def collect_scan(proc: int, array: str, nprocs: int, embedded: bool = False):
    """Double-collect scan that borrows an embedded scan from any
    processor seen moving twice.  Wait-free: at most ``nprocs + 1`` collects."""
    view, _ = yield from _scan(proc, array, nprocs, embedded)
    return view


def collect_update(proc: int, array: str, value: Any, nprocs: int, kind: str = "write"):
    """Scan, then write ``value`` tagged with a fresh sequence number and
    the scan's view."""
    view, raw = yield from _scan(proc, array, nprocs, embedded=True)
    yield Write(array, proc, Tagged(value, _seq(raw[proc]) + 1, view.cells), kind, update=True)


IMPLEMENTATIONS = {
    "primitive": (atomic_scan, atomic_update),
    "collect": (collect_scan, collect_update),
}


def collect_scan_bound(nprocs: int) -> int:
    """Worst-case shared steps of one collect scan."""
    return (nprocs + 1) * nprocs


def collect_update_bound(nprocs: int) -> int:
    return collect_scan_bound(nprocs) + 1


# -- post-hoc check -------------------------------------------------------


def _logical_history(trace: Trace, array: str) -> list[tuple[int, tuple]]:
    """(step, logical contents after that step) at every change, starting
    with (-1, initial contents)."""
    cells = [logical(c) for c in trace.initial[array]]
    history = [(-1, tuple(cells))]
    for ev in trace.events:
        if ev.array == array and ev.kind in ("write", "post"):
            cells[ev.proc] = logical(ev.value)
            history.append((ev.step, tuple(cells)))
    return history


def linearize_scans(trace: Trace) -> list[int] | None:
    """Earliest valid cut for every scan in ``trace.scans``, or ``None`` if
    some scan's view never held during its interval.

    A cut ``c`` means "the contents after every event with step <= c"; the
    admissible cuts for a scan over ``[start, end]`` are ``start-1 .. end``.
    """
    histories: dict[str, list[tuple[int, tuple]]] = {}
    cuts = []
    for scan in trace.scans:
        hist = histories.get(scan.array)
        if hist is None:
            hist = histories[scan.array] = _logical_history(trace, scan.array)
        view = tuple(logical(c) for c in scan.cells)
        found = None
        for i, (step, cells) in enumerate(hist):
            valid_until = hist[i + 1][0] - 1 if i + 1 < len(hist) else scan.end
            lo, hi = max(step, scan.start - 1), min(valid_until, scan.end)
            if lo <= hi and cells == view:
                found = lo
                break
        if found is None:
            return None
        cuts.append(found)
    return cuts


def verify_snapshot_linearizable(trace: Trace) -> bool:
    """True iff every scan's view equals the array contents at some step
    inside the scan's interval."""
    return linearize_scans(trace) is not None


def primitive_schedule(trace: Trace) -> tuple[int, ...] | None:
    """Schedule for the one-step-snapshot version of the same run.

    Every top-level scan and update of ``trace`` becomes one primitive step,
    ordered by where it linearizes: updates at their write, scans at the
    earliest valid cut.  Returns ``None`` if some scan is not linearizable.
    """
    cuts = linearize_scans(trace)
    if cuts is None:
        return None
    keyed = [(u.step, 0, u.proc) for u in trace.updates]
    keyed += [(c, 1, s.proc) for s, c in zip(trace.scans, cuts) if not s.embedded]
    # Python's sort is stable, so one processor's ops keep program order on ties
    return tuple(proc for *_, proc in sorted(keyed, key=lambda k: k[:2]))
