"""Shared schedule structure and the first-fit placement primitives.

The multischedule holds one frame table per allocated slot, covering every
cycle of the hyperperiod.  Signals used by several vehicle variants are
stored once; two stored signals may occupy overlapping bit ranges of the
same multiframe when no variant uses both of them.  Per-variant (native)
schedules fall out by dropping foreign signals.

Placement works position by position: `find_position_for_signal` walks
slots in allocation order and cycles inside the signal's admissible window,
returning the lowest feasible in-frame offset of the first frame that fits.
`place_signal_to_schedule` then re-checks that same offset for every
periodic job of the signal before committing, resuming the search behind
the failed candidate otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .core import CycleWindow, FlexRayConfig, Instance, Signal, round_time_constraints
from .exclusion import ExclusionMatrices


class ScheduleError(ValueError):
    """Raised for malformed schedule documents (unknown signals, bad shape)."""


@dataclass(frozen=True)
class Placement:
    """Position of a signal's first job; the remaining jobs repeat it every
    period_cycles at the same slot and offset."""

    slot: int
    first_cycle: int
    offset_bits: int


class Entry(NamedTuple):
    signal: str
    offset_bits: int
    length_bits: int


class Multiframe:
    """One (cycle, slot) cell: resident entries plus cached occupancy.

    `occupancy` is the OR of all resident bit ranges regardless of
    conflicts and `max_run` caches its longest free gap.  A signal in
    conflict with every resident fits iff max_run >= its length, so the
    cache doubles as an exact fast path; frames holding residents the
    queried signal may overlap still go through `find_suitable_offset`.
    `packed` mirrors `entries` as (signal index, range mask) pairs for the
    hot conflict-mask loops.
    """

    __slots__ = ("payload_bits", "entries", "packed", "occupancy", "max_run")

    def __init__(self, payload_bits: int):
        self.payload_bits = payload_bits
        self.entries: list[Entry] = []
        self.packed: list[tuple[Optional[int], int]] = []
        self.occupancy = 0
        self.max_run = payload_bits

    def add_entry(
        self,
        signal_id: str,
        offset_bits: int,
        length_bits: int,
        signal_index: Optional[int] = None,
    ) -> None:
        self.entries.append(Entry(signal_id, offset_bits, length_bits))
        mask = ((1 << length_bits) - 1) << offset_bits
        self.packed.append((signal_index, mask))
        self.occupancy |= mask
        self.max_run = _longest_zero_run(self.occupancy, self.payload_bits)


def _longest_zero_run(mask: int, width: int) -> int:
    """Length of the longest gap of zero bits in mask[0:width].

    Collapses runs exponentially (a run of 2k is two adjacent runs of k),
    then refines with descending power-of-two steps: O(log width) big-int
    operations.
    """
    free = ~mask & ((1 << width) - 1)
    if not free:
        return 0
    length = 1
    while True:
        collapsed = free & (free >> length)
        if not collapsed:
            break
        free = collapsed
        length *= 2
    step = length >> 1
    while step:
        collapsed = free & (free >> step)
        if collapsed:
            free = collapsed
            length += step
        step >>= 1
    return length


class Slot:
    __slots__ = ("index", "nodes", "frames", "residents")

    def __init__(self, index: int, hyperperiod_cycles: int, payload_bits: int):
        self.index = index
        self.nodes: set = set()
        self.frames = [Multiframe(payload_bits) for _ in range(hyperperiod_cycles)]
        # (signal matrix index, first cycle, period in cycles) per placed
        # signal; lets the search find frames whose residents the queried
        # signal may overlap even when the frame looks full.
        self.residents: list[tuple[int, int, int]] = []


class Multischedule:
    def __init__(self, config: FlexRayConfig):
        self.config = config
        self.slots: list[Slot] = []
        self.placements: dict[str, Placement] = {}
        # every committed (signal, placement) pair in commit order; unlike
        # `placements` this keeps duplicates, which the validator must see
        self.placement_records: list[tuple[str, Placement]] = []
        self.signal_nodes: dict[str, object] = {}
        self._windows: dict[str, CycleWindow] = {}

    @property
    def slot_count(self) -> int:
        return len(self.slots)

    def allocate_slot(self) -> Slot:
        slot = Slot(
            len(self.slots), self.config.hyperperiod_cycles, self.config.payload_bits
        )
        self.slots.append(slot)
        return slot

    def window_for(self, signal: Signal) -> CycleWindow:
        win = self._windows.get(signal.id)
        if win is None:
            win = round_time_constraints(signal, self.config)
            self._windows[signal.id] = win
        return win


def slot_count(ms: Multischedule) -> int:
    """Number of allocated static slots -- the minimization objective."""
    return len(ms.slots)


def find_suitable_offset(
    frame: Multiframe, signal: Signal, mems: ExclusionMatrices
) -> Optional[int]:
    """Smallest in-frame offset where the signal fits, or None.

    A resident blocks the bits of its range only when it conflicts with the
    queried signal; residents never co-used in any variant are transparent.
    """
    length = signal.length_bits
    width = frame.payload_bits
    if length > width:
        return None
    sidx = mems.signal_index[signal.id]
    row = mems.smem_row(sidx)
    index = mems.signal_index
    mask = 0
    for entry in frame.entries:
        if row[index[entry.signal]]:
            mask |= ((1 << entry.length_bits) - 1) << entry.offset_bits
    return _first_fit_offset(mask, length, width)


def _first_fit_offset(mask: int, length: int, width: int) -> Optional[int]:
    """First offset with `length` clear bits in `mask`, or None.

    On a collision the scan jumps past the highest blocking bit: every
    offset in between would contain that bit as well.
    """
    want = (1 << length) - 1
    offset = 0
    limit = width - length
    while offset <= limit:
        hit = mask & (want << offset)
        if not hit:
            return offset
        offset = hit.bit_length()
    return None


def _conflict_mask(frame: Multiframe, row: bytes) -> int:
    # entries without a matrix index (frames assembled by hand) count as
    # conflicting, the conservative reading
    mask = 0
    for idx, entry_mask in frame.packed:
        if idx is None or row[idx]:
            mask |= entry_mask
    return mask


def _node_admissible(slot: Slot, node, mems: ExclusionMatrices) -> bool:
    for other in slot.nodes:
        if other != node and mems.nodes_conflict(node, other):
            return False
    return True


def find_position_for_signal(
    ms: Multischedule,
    signal: Signal,
    mems: ExclusionMatrices,
    resume_from: Optional[Placement] = None,
) -> Optional[Placement]:
    """Next candidate position strictly after `resume_from`.

    Candidates are enumerated slot-major (allocation order), then by cycle
    inside the signal's window; per frame only the minimal feasible offset
    is a candidate.  Slots whose registered nodes clash with the signal's
    node are skipped whole.  `resume_from=None` starts at slot 0, cycle
    release_cycle; otherwise the scan continues at the next cycle after the
    cursor.
    """
    window = ms.window_for(signal)
    length = signal.length_bits
    sidx = mems.signal_index[signal.id]
    row = mems.smem_row(sidx)
    hi = window.deadline_cycle

    start_slot = 0
    start_cycle = window.release_cycle
    if resume_from is not None:
        start_slot = resume_from.slot
        start_cycle = resume_from.first_cycle + 1

    for si in range(start_slot, len(ms.slots)):
        slot = ms.slots[si]
        lo = start_cycle if si == start_slot else window.release_cycle
        if lo > hi:
            continue
        if not _node_admissible(slot, signal.node, mems):
            continue

        frames = slot.frames
        # a frame whose residents all conflict with the signal admits it
        # exactly when the occupancy gap is long enough
        candidates = {c for c in range(lo, hi + 1) if frames[c].max_run >= length}
        # frames that look full may still admit the signal on top of a
        # resident it never shares a variant with
        for ridx, first, period in slot.residents:
            if not row[ridx]:
                c = first
                if c < lo:
                    c += -((first - lo) // period) * period
                while c <= hi:
                    candidates.add(c)
                    c += period
        for c in sorted(candidates):
            frame = frames[c]
            mask = _conflict_mask(frame, row)
            offset = _first_fit_offset(mask, length, frame.payload_bits)
            if offset is not None:
                return Placement(si, c, offset)
    return None


def _jobs_fit(
    ms: Multischedule,
    signal: Signal,
    mems: ExclusionMatrices,
    pos: Placement,
    window: CycleWindow,
) -> bool:
    """Check the fixed offset range in every later job's multiframe."""
    period = window.period_cycles
    hyper = ms.config.hyperperiod_cycles
    slot = ms.slots[pos.slot]
    row = mems.smem_row(mems.signal_index[signal.id])
    want = ((1 << signal.length_bits) - 1) << pos.offset_bits
    for cycle in range(pos.first_cycle + period, hyper, period):
        for idx, entry_mask in slot.frames[cycle].packed:
            if entry_mask & want and (idx is None or row[idx]):
                return False
    return True


def _commit(
    ms: Multischedule,
    signal: Signal,
    mems: ExclusionMatrices,
    pos: Placement,
    window: CycleWindow,
) -> None:
    slot = ms.slots[pos.slot]
    slot.nodes.add(signal.node)
    hyper = ms.config.hyperperiod_cycles
    sidx = mems.signal_index[signal.id]
    for cycle in range(pos.first_cycle, hyper, window.period_cycles):
        slot.frames[cycle].add_entry(
            signal.id, pos.offset_bits, signal.length_bits, sidx
        )
    slot.residents.append((sidx, pos.first_cycle, window.period_cycles))
    ms.placements[signal.id] = pos
    ms.placement_records.append((signal.id, pos))
    ms.signal_nodes[signal.id] = signal.node


def place_signal_to_schedule(
    ms: Multischedule, signal: Signal, mems: ExclusionMatrices
) -> Placement:
    """Place one signal and all of its periodic jobs, first fit.

    Draws candidate positions for the first job and verifies that every
    later job can hold the same (slot, offset) range; the first fully
    feasible candidate is committed.  When the allocated slots are
    exhausted a fresh slot is opened, which always admits the signal at
    (release_cycle, offset 0).
    """
    window = ms.window_for(signal)
    cursor = None
    while True:
        pos = find_position_for_signal(ms, signal, mems, cursor)
        if pos is None:
            break
        if _jobs_fit(ms, signal, mems, pos, window):
            _commit(ms, signal, mems, pos, window)
            return pos
        cursor = pos

    slot = ms.allocate_slot()
    pos = Placement(slot.index, window.release_cycle, 0)
    _commit(ms, signal, mems, pos, window)
    return pos


def extract_native_schedule(
    ms: Multischedule, variant: int, variants
) -> dict:
    """Single-variant schedule: same slot grid, foreign signals dropped.

    Slots hosting none of the variant's signals stay in the output (empty),
    so slot indices line up across all variants.
    """
    group = variants.members[variant]
    slots_doc = []
    for slot in ms.slots:
        placements = [
            {
                "signal": sid,
                "first_cycle": pos.first_cycle,
                "offset_bits": pos.offset_bits,
            }
            for sid, pos in ms.placement_records
            if pos.slot == slot.index and sid in group
        ]
        nodes = sorted({ms.signal_nodes[e["signal"]] for e in placements}, key=str)
        slots_doc.append(
            {
                "index": slot.index,
                "nodes": nodes,
                "placements": placements,
            }
        )
    return {
        "variant": variant,
        "config": _config_dict(ms.config),
        "slots": slots_doc,
    }


def _config_dict(config: FlexRayConfig) -> dict:
    return {
        "cycle_us": config.cycle_us,
        "hyperperiod_cycles": config.hyperperiod_cycles,
        "payload_bits": config.payload_bits,
        "static_slots": config.static_slots,
        "slot_us": config.slot_us,
    }


def schedule_to_dict(ms: Multischedule) -> dict:
    """Serialize to the schedule document shape (deterministic)."""
    slots_doc = []
    for slot in ms.slots:
        placements = [
            {
                "signal": sid,
                "first_cycle": pos.first_cycle,
                "offset_bits": pos.offset_bits,
            }
            for sid, pos in ms.placement_records
            if pos.slot == slot.index
        ]
        slots_doc.append(
            {
                "index": slot.index,
                "nodes": sorted(slot.nodes, key=str),
                "placements": placements,
            }
        )
    return {"config": _config_dict(ms.config), "slots": slots_doc}


def schedule_from_dict(doc: dict, instance: Instance) -> Multischedule:
    """Rebuild a Multischedule from its document form.

    Tolerates infeasible placements (the validator needs to see them) but
    rejects documents referencing unknown signals or lacking structure.
    """
    if not isinstance(doc, dict) or "slots" not in doc:
        raise ScheduleError("schedule document must be an object with 'slots'")
    by_id = {s.id: s for s in instance.signals}
    indexes = {s.id: i for i, s in enumerate(instance.signals)}
    ms = Multischedule(instance.config)
    hyper = instance.config.hyperperiod_cycles
    for raw_slot in doc["slots"]:
        slot = ms.allocate_slot()
        for raw in raw_slot.get("placements", ()):
            sid = raw.get("signal")
            if sid not in by_id:
                raise ScheduleError(f"schedule references unknown signal {sid!r}")
            sig = by_id[sid]
            try:
                pos = Placement(
                    slot.index, int(raw["first_cycle"]), int(raw["offset_bits"])
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ScheduleError(f"malformed placement for {sid}: {exc}") from None
            period = max(1, sig.period_us // instance.config.cycle_us)
            slot.nodes.add(sig.node)
            if 0 <= pos.first_cycle < hyper:
                for cycle in range(pos.first_cycle, hyper, period):
                    slot.frames[cycle].add_entry(
                        sid, pos.offset_bits, sig.length_bits, indexes[sid]
                    )
                slot.residents.append((indexes[sid], pos.first_cycle, period))
            ms.placements[sid] = pos
            ms.placement_records.append((sid, pos))
            ms.signal_nodes[sid] = sig.node
    return ms
