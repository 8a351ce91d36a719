# %% [markdown]
# # Running protocols under an explicit schedule
#
# A protocol is a generator that yields shared-memory operations.  The
# scheduler runs exactly one operation per schedule entry, so a schedule is a
# complete description of an interleaving.

# %%
from snaptask import mwmr
from snaptask.sim import enumerate_schedules, format_trace, interleaving_count, run_schedule

s = mwmr.setup(writers=2, readers=1)
print("steps per processor:", s.step_counts)
print("interleavings:", interleaving_count(s.step_counts))

# %% Strict alternation between the writers, then the reader.
trace = run_schedule(s.protocols, (0, 1, 0, 1, 0, 1, 0, 1, 2, 2, 2), s.memory)
print(format_trace(trace))

# %% Dropping the tail of a processor's steps models a crash.
crashed = run_schedule(s.protocols, (1, 1, 1, 0, 0, 0, 0, 2, 2, 2), s.memory)
print("opex intervals:", crashed.intervals)
print("crashed:", crashed.crashed(), "outputs:", crashed.outputs)

# %% Enumeration visits every interleaving once.
scheds = list(enumerate_schedules({0: 2, 1: 1}))
print(scheds)
