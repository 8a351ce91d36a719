# %% [markdown]
# # Validating an output tuple
#
# Each completed operation reports its response and its late-snapshot.  The
# tuple is acceptable when some well-ordered arrangement replays through the
# sequential specification to exactly those responses.  The arrangement
# found is a linearization.

# %%
from snaptask.objects import mwmr_register_spec, queue_spec, read, write, enqueue, dequeue
from snaptask.tasks import OpexRecord, PendingRecord, validate_output_tuple

F = frozenset
reg = mwmr_register_spec()

print(validate_output_tuple(reg, [
    OpexRecord(0, write(5), "ok", F({0})),
    OpexRecord(1, read(), 5, F({0, 1})),
]))

# A read that saw nothing may linearize before a write it overlapped.
print(validate_output_tuple(reg, [
    OpexRecord(0, write(5), "ok", F({0, 1})),
    OpexRecord(1, read(), None, F({1})),
]))

# A stale read after a completed write is rejected.
print(validate_output_tuple(reg, [
    OpexRecord(0, write(5), "ok", F({0})),
    OpexRecord(1, read(), None, F({0, 1})),
]).violation)

# %% A crashed writer whose value was read gets adopted into the witness.
v = validate_output_tuple(reg, [OpexRecord(1, read(), 5, F({1}))], [PendingRecord(0, write(5))])
print(v.witness, "adopted:", v.adopted)

# %% The validator is generic in the object.
print(validate_output_tuple(queue_spec(), [
    OpexRecord(0, enqueue("x"), "ok", F({0})),
    OpexRecord(1, dequeue(), "x", F({0, 1})),
]).valid)
