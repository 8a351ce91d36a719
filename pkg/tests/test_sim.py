import math

import pytest
from hypothesis import given, settings, strategies as st

from snaptask import mwmr
from snaptask.memory import Read, SharedMemory, SingleWriterViolation, Write, post
from snaptask.sim import (
    ScheduleCapExceeded,
    enumerate_schedules,
    format_trace,
    interleaving_count,
    random_schedule,
    run_schedule,
)


@pytest.fixture
def two_writers_one_reader():
    return mwmr.setup(2, 1)


def kinds(trace, proc):
    return [ev.kind for ev in trace.events if ev.proc == proc]


def test_solo_writer_trace():
    s = mwmr.setup(1, 0)
    trace = run_schedule(s.protocols, (0, 0, 0, 0), s.memory)
    assert kinds(trace, 0) == ["post", "snapshot", "write", "snapshot", "output"]
    assert trace.intervals[0] == (0, 3)
    assert trace.outputs[0] == ("ok", frozenset({0}))


def test_alternating_writers_share_early_snapshot(two_writers_one_reader):
    s = two_writers_one_reader
    trace = run_schedule(s.protocols, (0, 1) * 4, s.memory)
    earlies = {ev.proc: ev.value.early_snapshot for ev in trace.events if ev.kind == "write"}
    assert earlies == {0: {0, 1}, 1: {0, 1}}


def test_truncated_processor_is_participating_but_not_live(two_writers_one_reader):
    s = two_writers_one_reader
    trace = run_schedule(s.protocols, (1, 0, 0, 0, 0), s.memory)
    assert trace.intervals[1] == (0, None)
    assert trace.crashed() == [1]
    assert 1 not in trace.outputs and 0 in trace.outputs


def test_steps_after_termination_are_noops(two_writers_one_reader):
    s = two_writers_one_reader
    padded = run_schedule(s.protocols, (0,) * 7 + (2,) * 3, s.memory)
    plain = run_schedule(s.protocols, (0,) * 4 + (2,) * 3, s.memory)
    assert padded.outputs == plain.outputs
    assert [ev.kind for ev in padded.events] == [ev.kind for ev in plain.events]


def test_run_is_deterministic_and_leaves_memory_untouched(two_writers_one_reader):
    s = two_writers_one_reader
    before = s.memory.copy()
    sched = random_schedule(s.step_counts, 7)
    assert run_schedule(s.protocols, sched, s.memory) == run_schedule(s.protocols, sched, s.memory)
    assert s.memory == before


def test_events_match_schedule(two_writers_one_reader):
    s = two_writers_one_reader
    sched = random_schedule(s.step_counts, 3)
    trace = run_schedule(s.protocols, sched, s.memory)
    for ev in trace.events:
        assert sched[ev.step] == ev.proc
    steps = [ev.step for ev in trace.events]
    assert steps == sorted(steps)


def test_single_writer_violation_names_step():
    def rogue(proc):
        yield post("Id", proc, proc)
        yield Write("Id", 0, "stolen")

    mem = SharedMemory(2, ["Id"])
    with pytest.raises(SingleWriterViolation) as err:
        run_schedule({0: rogue, 1: rogue}, (1, 0, 1), mem)
    assert err.value.step == 2 and err.value.proc == 1 and err.value.index == 0


def test_read_returns_cell():
    def peek(proc):
        return (yield Read("Id", 0))

    mem = SharedMemory(2, {"Id": ["x", None]})
    assert run_schedule({1: peek}, (1,), mem).outputs == {1: "x"}


def test_trace_dump_format():
    s = mwmr.setup(1, 1)
    trace = run_schedule(s.protocols, (0, 0, 0, 0, 1, 1, 1), s.memory)
    assert format_trace(trace).splitlines() == [
        "step=0 proc=0 op=post array=Id val=0",
        "step=1 proc=0 op=snapshot array=Id val=[0,null]",
        'step=2 proc=0 op=write array=Value val={"early_snapshot":[0],"value":"v0"}',
        "step=3 proc=0 op=snapshot array=Id val=[0,null]",
        'step=3 proc=0 op=output array=- val=["ok",[0]]',
        "step=4 proc=1 op=post array=Id val=1",
        'step=5 proc=1 op=snapshot array=Value val=[{"early_snapshot":[0],"value":"v0"},null]',
        "step=6 proc=1 op=snapshot array=Id val=[0,1]",
        'step=6 proc=1 op=output array=- val=["v0",[0,1]]',
    ]


@pytest.mark.parametrize(
    "counts, expected",
    [({0: 1, 1: 1}, 2), ({0: 3}, 1), ({0: 4, 1: 4, 2: 3}, 11_550), ({0: 2, 1: 0, 2: 2}, 6)],
)
def test_enumeration_count(counts, expected):
    scheds = list(enumerate_schedules(counts))
    assert len(scheds) == expected == interleaving_count(counts)
    assert len(set(scheds)) == expected
    for sched in scheds:
        assert {p: sched.count(p) for p in set(sched)} == {p: c for p, c in counts.items() if c}


def test_enumeration_multinomial_by_formula():
    assert interleaving_count({0: 4, 1: 4, 2: 3}) == math.factorial(11) // (
        math.factorial(4) ** 2 * math.factorial(3)
    )


def test_enumeration_cap():
    with pytest.raises(ScheduleCapExceeded) as err:
        enumerate_schedules({0: 11, 1: 10})
    assert err.value.count == math.comb(21, 10)


def test_random_schedule_deterministic():
    counts = {0: 2, 1: 2}
    assert random_schedule(counts, 42) == random_schedule(counts, 42)
    assert len(random_schedule(counts, 42)) == 4
    assert random_schedule({0: 1}, 5) == (0,)


def test_random_schedules_vary_across_seeds():
    counts = {0: 2, 1: 2}
    seen = {random_schedule(counts, s) for s in range(1000)}
    assert seen == set(enumerate_schedules(counts))


def test_random_schedule_rejects_empty():
    with pytest.raises(ValueError):
        random_schedule({}, 0)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32), victim=st.integers(0, 2), keep=st.integers(0, 4))
def test_crash_of_one_processor_never_blocks_others(seed, victim, keep):
    s = mwmr.setup(2, 1)
    sched = random_schedule(s.step_counts, seed)
    kept, out = 0, []
    for p in sched:
        if p == victim:
            if kept >= keep:
                continue
            kept += 1
        out.append(p)
    trace = run_schedule(s.protocols, out, s.memory)
    assert set(trace.outputs) >= {0, 1, 2} - {victim}
