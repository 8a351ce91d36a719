"""Sequential specifications of one-shot objects as state machines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

from .memory import BOTTOM

OK = "ok"


@dataclass(frozen=True)
class Command:
    kind: str
    payload: Any = None

    def __repr__(self) -> str:
        if self.payload is None:
            return self.kind
        return f"{self.kind}({self.payload!r})"


def write(v: Any) -> Command:
    return Command("write", v)


def read() -> Command:
    return Command("read")


def enqueue(x: Any) -> Command:
    return Command("enqueue", x)


def dequeue() -> Command:
    return Command("dequeue")


def swap(x: Any) -> Command:
    return Command("swap", x)


class UndefinedTransition(ValueError):
    pass


Transition = Callable[[Any, Command], Iterable[tuple[Any, Any]]]


@dataclass(frozen=True)
class ObjectStateMachine:
    """``transition(state, command)`` returns the possible
    ``(next_state, response)`` pairs; deterministic machines return one.

    States and responses are compared structurally and must be hashable.
    """

    name: str
    initial: Any
    transition: Transition

    def step(self, state: Any, command: Command) -> tuple[tuple[Any, Any], ...]:
        try:
            outcomes = tuple(self.transition(state, command))
        except UndefinedTransition:
            outcomes = ()
        if not outcomes:
            raise UndefinedTransition(
                f"{self.name}: no transition for state {state!r} on {command!r}"
            )
        return outcomes


def replay(spec: ObjectStateMachine, commands: Sequence[Command]) -> set[tuple]:
    """All response sequences obtainable by threading the state through
    ``commands`` from the initial state."""
    frontier = {(spec.initial, ())}
    for cmd in commands:
        frontier = {
            (nxt, responses + (resp,))
            for state, responses in frontier
            for nxt, resp in spec.step(state, cmd)
        }
    return {responses for _, responses in frontier}


def mwmr_register_spec(initial: Any = BOTTOM) -> ObjectStateMachine:
    def transition(state, cmd):
        if cmd.kind == "read":
            return ((state, state),)
        if cmd.kind == "write":
            return ((cmd.payload, OK),)
        raise UndefinedTransition(cmd)

    return ObjectStateMachine("mwmr", initial, transition)


def queue_spec() -> ObjectStateMachine:
    def transition(state, cmd):
        if cmd.kind == "enqueue":
            return ((state + (cmd.payload,), OK),)
        if cmd.kind == "dequeue":
            if state:
                return ((state[1:], state[0]),)
            return ((state, BOTTOM),)
        raise UndefinedTransition(cmd)

    return ObjectStateMachine("queue", (), transition)


def swap_object_spec() -> ObjectStateMachine:
    # swap(x) installs x and hands back whatever was there before
    def transition(state, cmd):
        if cmd.kind == "swap":
            return ((cmd.payload, state),)
        raise UndefinedTransition(cmd)

    return ObjectStateMachine("swap", BOTTOM, transition)


SPECS: dict[str, Callable[[], ObjectStateMachine]] = {
    "mwmr": mwmr_register_spec,
    "queue": queue_spec,
    "swap": swap_object_spec,
}


def spec_by_name(name: str) -> ObjectStateMachine:
    try:
        return SPECS[name]()
    except KeyError:
        raise ValueError(f"unknown object {name!r}; choose from {sorted(SPECS)}") from None
