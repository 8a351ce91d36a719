"""One-shot objects as snapshot-augmented tasks.

A deterministic SWMR shared-memory simulator, atomic snapshots, the
well-ordering machinery that turns late-snapshots into linearizations, and
a one-shot multi-writer register checked exhaustively against it.
"""

from .memory import BOTTOM, SharedMemory, SingleWriterViolation
from .objects import (
    Command,
    ObjectStateMachine,
    mwmr_register_spec,
    queue_spec,
    replay,
    swap_object_spec,
)
from .ordering import (
    HappenedBefore,
    OpexInterval,
    check_well_ordering,
    consistent_with,
    happened_before,
    well_ordered_permutations,
)
from .sim import Trace, enumerate_schedules, format_trace, random_schedule, run_schedule
from .snapshot import SnapshotView, atomic_snap, verify_snapshot_linearizable
from .tasks import (
    OpexRecord,
    PendingRecord,
    Verdict,
    ordered_renaming_validator,
    renaming_task_validator,
    swap_task_validator,
    validate_output_tuple,
)

__version__ = "0.1.0"
