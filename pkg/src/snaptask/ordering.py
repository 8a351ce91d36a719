"""Happened-before extraction, the well-ordering predicate on snapshot
sequences, and enumeration of the orders that satisfy it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .sim import Trace

SnapshotSet = frozenset

DEFAULT_RECORD_BOUND = 8


class RecordBoundExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OpexInterval:
    proc: int
    start: int
    end: int | None  # None: never output

    def __post_init__(self):
        if self.end is not None and self.end < self.start:
            raise ValueError(f"interval of {self.proc} ends before it starts")


@dataclass(frozen=True)
class HappenedBefore:
    """Strict partial order: ``(i, j)`` in ``pairs`` iff opex i ended before
    opex j started."""

    procs: frozenset[int]
    pairs: frozenset[tuple[int, int]]

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return pair in self.pairs


def intervals(trace: Trace) -> list[OpexInterval]:
    return [OpexInterval(p, s, e) for p, (s, e) in sorted(trace.intervals.items())]


def happened_before(trace: Trace) -> HappenedBefore:
    ivs = trace.intervals
    pairs = frozenset(
        (i, j)
        for i, (_, end) in ivs.items()
        if end is not None
        for j, (start, _) in ivs.items()
        if end < start
    )
    return HappenedBefore(frozenset(ivs), pairs)


def check_well_ordering(seq: Sequence[tuple[int, frozenset]]) -> bool:
    """For every position k, the snapshots from k onward all contain every
    processor placed before k."""
    suffix_meet: list[frozenset | None] = [None] * (len(seq) + 1)
    for k in range(len(seq) - 1, -1, -1):
        snap = frozenset(seq[k][1])
        nxt = suffix_meet[k + 1]
        suffix_meet[k] = snap if nxt is None else snap & nxt
    before: set[int] = set()
    for k, (proc, _) in enumerate(seq):
        if not before <= suffix_meet[k]:
            return False
        before.add(proc)
    return True


def well_ordered_permutations(
    records: Iterable[tuple[int, frozenset]], bound: int = DEFAULT_RECORD_BOUND
) -> Iterator[tuple[int, ...]]:
    """Yield, as tuples of processor ids, every order of ``records`` that
    passes :func:`check_well_ordering`.

    Orders are built back to front: a record may go last among the
    remaining set R only if its snapshot covers the rest of R.  Candidates
    for the last slot are tried highest id first, so the first order
    yielded is the canonical witness.
    """
    snaps = {p: frozenset(s) for p, s in records}
    if len(snaps) > bound:
        raise RecordBoundExceeded(f"{len(snaps)} records exceeds the bound of {bound}")

    def back(remaining: frozenset[int], tail: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if not remaining:
            yield tail
            return
        for p in sorted(remaining, reverse=True):
            rest = remaining - {p}
            if rest <= snaps[p]:
                yield from back(rest, (p,) + tail)

    yield from back(frozenset(snaps), ())


def consistent_with(seq: Sequence[int], hb: HappenedBefore) -> bool:
    """True iff ``seq`` never places j before i for a pair (i, j) in ``hb``."""
    pos = {p: k for k, p in enumerate(seq)}
    return all(pos[i] < pos[j] for i, j in hb.pairs if i in pos and j in pos)
