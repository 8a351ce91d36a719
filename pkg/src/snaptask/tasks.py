"""One-shot objects recast as tasks whose outputs carry late-snapshots, with
the validator that recovers a linearization from them.  Also holds the
plain task validators for adaptive renaming, ordered renaming and SWAP.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Any, Callable, Iterable, Mapping, Sequence

from .memory import BOTTOM
from .objects import Command, ObjectStateMachine, replay
from .ordering import (
    DEFAULT_RECORD_BOUND,
    RecordBoundExceeded,
    check_well_ordering,
    well_ordered_permutations,
)


@dataclass(frozen=True)
class OpexRecord:
    """A completed operation: ``(proc, (response, late_snapshot))``."""

    proc: int
    command: Command
    response: Any
    late_snapshot: frozenset[int]


@dataclass(frozen=True)
class PendingRecord:
    """A participating processor that never produced an output."""

    proc: int
    command: Command


@dataclass(frozen=True)
class Verdict:
    valid: bool
    witness: tuple[int, ...] | None = None
    violation: str | None = None
    adopted: tuple[int, ...] = ()  # pending processors placed in the witness

    @property
    def pending_adoption(self) -> bool:
        return bool(self.adopted)


@dataclass(frozen=True)
class TaskSpec:
    """A task (I, O, Delta) restricted to one fixed input assignment."""

    inputs: Mapping[int, Command]
    delta: Callable[[Iterable[OpexRecord]], bool]


def object_task(spec: ObjectStateMachine, inputs: Mapping[int, Command]) -> TaskSpec:
    """The task form of a one-shot object: an output tuple is acceptable iff
    its records carry the assigned commands and :func:`validate_output_tuple`
    accepts them."""

    def delta(outputs: Iterable[OpexRecord]) -> bool:
        outputs = list(outputs)
        if any(inputs.get(r.proc) != r.command for r in outputs):
            return False
        return validate_output_tuple(spec, outputs).valid

    return TaskSpec(dict(inputs), delta)


def _embed(
    spec: ObjectStateMachine,
    order: Sequence[OpexRecord],
    pending: Sequence[PendingRecord],
    limit: int,
) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Fit ``order`` to the spec, inserting at most ``limit`` pending
    operations.

    Completed records keep their relative order and must get their recorded
    response; pending ones may go anywhere (or nowhere) with any response.
    A completed record is always tried before a pending insertion, so
    adopted operations land as late as possible.  Returns
    ``(witness, adopted)`` or ``None``.
    """
    dead: set = set()

    def go(i: int, used: frozenset[int], state: Any) -> list[int] | None:
        if i == len(order):
            return []
        key = (i, used, state)
        if key in dead:
            return None
        rec = order[i]
        for nxt, resp in spec.step(state, rec.command):
            if resp == rec.response:
                rest = go(i + 1, used, nxt)
                if rest is not None:
                    return [rec.proc] + rest
        for pend in pending if len(used) < limit else ():
            if pend.proc in used:
                continue
            for nxt, _ in spec.step(state, pend.command):
                rest = go(i, used | {pend.proc}, nxt)
                if rest is not None:
                    return [pend.proc] + rest
        dead.add(key)
        return None

    witness = go(0, frozenset(), spec.initial)
    if witness is None:
        return None
    done = {r.proc for r in order}
    return tuple(witness), tuple(sorted(p for p in witness if p not in done))


def _first_mismatch(spec: ObjectStateMachine, order: Sequence[OpexRecord]) -> str:
    # deterministic specs have exactly one outcome; otherwise report any
    outcome = min(replay(spec, [r.command for r in order]), key=repr)
    for resp, rec in zip(outcome, order):
        if resp != rec.response:
            return f"p{rec.proc} {rec.command!r} recorded {rec.response!r}, spec gives {resp!r}"
    return "responses match"


def validate_output_tuple(
    spec: ObjectStateMachine,
    completed: Iterable[OpexRecord],
    pending: Iterable[PendingRecord] = (),
    bound: int = DEFAULT_RECORD_BOUND,
) -> Verdict:
    """Decide whether the output tuple is explained by some linearization.

    Valid iff some order of the completed records is well-ordered with
    respect to their late-snapshots and, after inserting a subset of the
    pending operations, replays through ``spec`` to the recorded responses.
    """
    completed = sorted(completed, key=lambda r: r.proc)
    pending = sorted(pending, key=lambda r: r.proc)
    total = len(completed) + len(pending)
    if total > bound:
        raise RecordBoundExceeded(
            f"{total} records exceeds the bound of {bound} "
            f"(up to {factorial(total)} orders per pending subset)"
        )
    byproc = {r.proc: r for r in completed}
    if len(byproc) != len(completed) or byproc.keys() & {p.proc for p in pending}:
        raise ValueError("duplicate processor ids among records")

    candidates = 0
    first_failure = None
    for order in well_ordered_permutations(((r.proc, r.late_snapshot) for r in completed), bound):
        candidates += 1
        recs = [byproc[p] for p in order]
        fit = None
        for limit in range(len(pending) + 1):
            fit = _embed(spec, recs, pending, limit)
            if fit is not None:
                break
        if fit is not None:
            witness, adopted = fit
            _check_witness(spec, witness, byproc, pending)
            return Verdict(True, witness=witness, adopted=adopted)
        if first_failure is None:
            first_failure = (order, _first_mismatch(spec, recs))

    if candidates == 0:
        return Verdict(
            False,
            violation="well-ordering: no order of the completed records has every "
            "late-snapshot covering all records placed before it",
        )
    order, why = first_failure
    extra = " even with pending operations inserted" if pending else ""
    return Verdict(
        False,
        violation=f"replay: none of the {candidates} well-ordered order(s) reproduces "
        f"the recorded responses{extra}; e.g. order {list(order)}: {why}",
    )


def _check_witness(spec, witness, byproc, pending) -> None:
    cmds = {p.proc: p.command for p in pending}
    cmds.update({p: r.command for p, r in byproc.items()})
    done = [p for p in witness if p in byproc]
    assert check_well_ordering([(p, byproc[p].late_snapshot) for p in done])
    assert any(
        all(p not in byproc or byproc[p].response == r for p, r in zip(witness, rs))
        for rs in replay(spec, [cmds[p] for p in witness])
    ), "witness does not replay"


# -- plain task validators --------------------------------------------------


def renaming_task_validator(outputs: Iterable[tuple[int, int]]) -> bool:
    """Adaptive renaming: k participants get distinct names in 1..2k-1."""
    outputs = list(outputs)
    k = len(outputs)
    names = [name for _, name in outputs]
    return len(set(names)) == k and all(1 <= n <= 2 * k - 1 for n in names)


def ordered_renaming_validator(seq: Iterable[tuple[int, int, frozenset]]) -> bool:
    """Renaming whose outputs, sorted by name, are well-ordered by snapshot."""
    seq = list(seq)
    if not renaming_task_validator((p, n) for p, n, _ in seq):
        return False
    ranked = sorted(seq, key=lambda t: t[1])
    return check_well_ordering([(p, s) for p, _, s in ranked])


def swap_task_validator(outputs: Iterable[tuple[int, Any]]) -> bool:
    """The invoker -> returned edges form one simple path ending at bottom."""
    edges = dict(outputs)
    procs = set(edges)
    if not procs:
        return False
    if sum(1 for v in edges.values() if v is BOTTOM) != 1:
        return False
    targets = [v for v in edges.values() if v is not BOTTOM]
    if len(set(targets)) != len(targets) or not set(targets) <= procs:
        return False
    heads = procs - set(targets)
    if len(heads) != 1:
        return False
    node, seen = heads.pop(), set()
    while node is not BOTTOM:
        if node in seen:
            return False
        seen.add(node)
        node = edges[node]
    return seen == procs
