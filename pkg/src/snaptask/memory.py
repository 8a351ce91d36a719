"""SWMR shared memory and the operations protocols yield to the scheduler.

A protocol is a generator.  Every value it yields is one of the operation
objects below; the scheduler performs it and sends the result back.  ``Read``,
``Write`` and ``Snap`` each cost exactly one scheduler step.  ``Mark`` is local
bookkeeping and is folded into the surrounding shared step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping

#: The distinguished empty cell value (the paper's bottom).
BOTTOM = None


class SingleWriterViolation(RuntimeError):
    """A processor wrote a cell it does not own."""

    def __init__(self, step: int, proc: int, array: str, index: int):
        super().__init__(
            f"step {step}: processor {proc} wrote {array}[{index}], "
            f"which is owned by processor {index}"
        )
        self.step = step
        self.proc = proc
        self.array = array
        self.index = index


@dataclass(frozen=True)
class Read:
    array: str
    index: int


@dataclass(frozen=True)
class Write:
    array: str
    index: int
    value: Any
    kind: str = "write"  # "post" when the write registers participation
    update: bool = False  # linearization point of a snapshot-array update


@dataclass(frozen=True)
class Snap:
    """One-step atomic snapshot of a whole array."""

    array: str


@dataclass(frozen=True)
class Mark:
    """Local annotation; consumes no step.

    ``tag`` is ``"begin"`` or ``"scan"``.  Snapshot implementations built
    from plain reads and writes use marks to tell the scheduler where their
    scans begin and end.
    """

    tag: str
    array: str
    data: Any = None


def post(array: str, proc: int, value: Any, update: bool = False) -> Write:
    return Write(array, proc, value, "post", update)


class SharedMemory:
    """Named arrays of ``n+1`` single-writer cells.

    Instances handed to :func:`snaptask.sim.run_schedule` are never mutated;
    the simulator works on a :meth:`copy`.
    """

    def __init__(self, nprocs: int, arrays: Mapping[str, Iterable[Any]] | Iterable[str]):
        self.nprocs = nprocs
        self.arrays: dict[str, list[Any]] = {}
        if isinstance(arrays, Mapping):
            for name, cells in arrays.items():
                cells = list(cells)
                if len(cells) != nprocs:
                    raise ValueError(f"array {name!r} has {len(cells)} cells, expected {nprocs}")
                self.arrays[name] = cells
        else:
            for name in arrays:
                self.arrays[name] = [BOTTOM] * nprocs

    def copy(self) -> SharedMemory:
        return SharedMemory(self.nprocs, {k: list(v) for k, v in self.arrays.items()})

    def cells(self, array: str) -> tuple:
        try:
            return tuple(self.arrays[array])
        except KeyError:
            raise KeyError(f"unknown shared array {array!r}") from None

    def read(self, array: str, index: int) -> Any:
        return self.arrays[array][index]

    def write(self, step: int, proc: int, array: str, index: int, value: Any) -> None:
        if index != proc:
            raise SingleWriterViolation(step, proc, array, index)
        self.arrays[array][index] = value

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SharedMemory):
            return NotImplemented
        return self.nprocs == other.nprocs and self.arrays == other.arrays

    def __repr__(self) -> str:
        return f"SharedMemory({self.nprocs}, {self.arrays!r})"
