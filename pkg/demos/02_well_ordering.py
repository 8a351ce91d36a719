# %% [markdown]
# # Snapshots as timing witnesses
#
# A sequence of (processor, snapshot) pairs is well-ordered when every
# snapshot contains all processors placed before it.  Ending each operation
# with a snapshot of the registration array makes the real-time order
# recoverable: every well-ordered arrangement is consistent with
# happened-before.

# %%
from snaptask import mwmr
from snaptask.ordering import check_well_ordering, consistent_with, happened_before, well_ordered_permutations
from snaptask.sim import run_schedule

F = frozenset
print(check_well_ordering([(0, F({0})), (1, F({0, 1}))]))   # True
print(check_well_ordering([(0, F({0, 1})), (1, F({1}))]))   # False: p1's snapshot misses p0

# %% One writer finishes before the other starts; the reader overlaps both.
s = mwmr.setup(2, 1)
trace = run_schedule(s.protocols, (2,) + (0,) * 4 + (1,) * 4 + (2, 2), s.memory)
hb = happened_before(trace)
print("happened-before:", sorted(hb.pairs))
recs = [(p, late) for p, (_, late) in trace.outputs.items()]
for seq in well_ordered_permutations(recs):
    print(seq, "consistent:", consistent_with(seq, hb))
