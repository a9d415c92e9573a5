"""Instance data model: network configuration, signals, variants.

All values are immutable after construction and can be shared freely
between concurrent scheduler runs.  Times are integer microseconds; cycle
indices are 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

NodeId = Union[int, str]

ALLOWED_HYPERPERIODS = (1, 2, 4, 8, 16, 32, 64)


class InstanceError(ValueError):
    """Raised when an instance document violates the model invariants."""


class InfeasibleSignalError(ValueError):
    """Raised when a signal's time constraints leave no complete cycle."""

    def __init__(self, signal_id: str, message: str):
        super().__init__(message)
        self.signal_id = signal_id


@dataclass(frozen=True)
class FlexRayConfig:
    """Bus parameters that are fixed before scheduling starts.

    `static_slots` is the slot count declared by the network designer; the
    scheduler may allocate more and the CLI warns when it does.  `slot_us`
    is informational only.
    """

    cycle_us: int
    hyperperiod_cycles: int
    payload_bits: int
    static_slots: int = 0
    slot_us: int = 0

    def __post_init__(self):
        if self.cycle_us <= 0:
            raise InstanceError("config: cycle_us must be positive")
        if self.hyperperiod_cycles not in ALLOWED_HYPERPERIODS:
            raise InstanceError(
                "config: hyperperiod_cycles must be one of %s"
                % (ALLOWED_HYPERPERIODS,)
            )
        if self.payload_bits < 1:
            raise InstanceError("config: payload_bits must be >= 1")


@dataclass(frozen=True)
class Signal:
    """One periodic message: transmitting node, period, length and the
    release/deadline pair constraining its first instance."""

    id: str
    node: NodeId
    period_us: int
    length_bits: int
    release_us: int = 0
    deadline_us: int = 0

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise InstanceError("signal id must be a non-empty string")
        if self.period_us <= 0:
            raise InstanceError(f"signal {self.id}: period must be positive")
        if self.length_bits < 1:
            raise InstanceError(f"signal {self.id}: length must be >= 1 bit")
        if self.release_us < 0:
            raise InstanceError(f"signal {self.id}: release must be >= 0")
        if self.deadline_us <= 0:
            raise InstanceError(f"signal {self.id}: deadline must be positive")


@dataclass(frozen=True)
class VariantMatrix:
    """Binary signal-to-variant membership, stored as one signal-id set per
    vehicle variant."""

    members: tuple[frozenset[str], ...]

    @property
    def count(self) -> int:
        return len(self.members)

    def uses(self, signal_id: str, variant: int) -> bool:
        return signal_id in self.members[variant]

    def variants_of(self, signal_id: str) -> frozenset[int]:
        return frozenset(
            j for j, group in enumerate(self.members) if signal_id in group
        )


@dataclass(frozen=True)
class CycleWindow:
    """Admissible first-job cycles of a signal, at cycle granularity.

    Any first cycle in [release_cycle, deadline_cycle] yields exactly
    hyperperiod/period jobs, all inside the hyperperiod.
    """

    release_cycle: int
    deadline_cycle: int
    period_cycles: int

    @property
    def span(self) -> int:
        return self.deadline_cycle - self.release_cycle


@dataclass(frozen=True)
class Instance:
    config: FlexRayConfig
    signals: tuple[Signal, ...]
    variants: VariantMatrix

    def signal_by_id(self, signal_id: str) -> Signal:
        for s in self.signals:
            if s.id == signal_id:
                return s
        raise KeyError(signal_id)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def round_time_constraints(signal: Signal, config: FlexRayConfig) -> CycleWindow:
    """Round a signal's release/deadline to whole communication cycles.

    The release moves to the start of the earliest complete cycle, the
    deadline to the end of the latest complete cycle that still ends by
    release + deadline.  The window is further clipped so that every
    admissible first cycle keeps all periodic jobs inside the hyperperiod:
    deadline_cycle <= period_cycles - 1.
    """
    cycle = config.cycle_us
    hyper = config.hyperperiod_cycles
    period_cycles = signal.period_us // cycle
    release_cycle = -(-signal.release_us // cycle)
    raw_deadline = (signal.release_us + signal.deadline_us) // cycle - 1
    deadline_cycle = min(
        raw_deadline,
        release_cycle + period_cycles - 1,
        period_cycles - 1,
        hyper - 1,
    )
    if deadline_cycle < release_cycle:
        raise InfeasibleSignalError(
            signal.id,
            f"signal {signal.id}: no complete cycle between release "
            f"{signal.release_us} us and deadline {signal.deadline_us} us",
        )
    return CycleWindow(release_cycle, deadline_cycle, period_cycles)


def load_instance(doc: dict) -> Instance:
    """Build a validated Instance from a parsed instance document.

    Unknown top-level keys (e.g. generator metadata) are ignored.
    """
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    try:
        raw_cfg = doc["config"]
        raw_signals = doc["signals"]
        raw_variants = doc["variants"]
    except KeyError as exc:
        raise InstanceError(f"instance document missing key {exc}") from None

    try:
        config = FlexRayConfig(
            cycle_us=int(raw_cfg["cycle_us"]),
            hyperperiod_cycles=int(raw_cfg["hyperperiod_cycles"]),
            payload_bits=int(raw_cfg["payload_bits"]),
            static_slots=int(raw_cfg.get("static_slots", 0)),
            slot_us=int(raw_cfg.get("slot_us", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(f"malformed config section: {exc}") from None

    signals = []
    seen = set()
    for raw in raw_signals:
        try:
            period = int(raw["period_us"])
            sig = Signal(
                id=raw["id"],
                node=raw["node"],
                period_us=period,
                length_bits=int(raw["length_bits"]),
                release_us=int(raw.get("release_us", 0)),
                deadline_us=int(raw.get("deadline_us") or period),
            )
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed signal record: {exc}") from None
        if sig.id in seen:
            raise InstanceError(f"duplicate signal id {sig.id!r}")
        seen.add(sig.id)
        if sig.length_bits > config.payload_bits:
            raise InstanceError(
                f"signal {sig.id}: signal exceeds frame payload "
                f"({sig.length_bits} > {config.payload_bits} bits)"
            )
        if sig.period_us % config.cycle_us != 0 or not _is_power_of_two(
            sig.period_us // config.cycle_us
        ):
            raise InstanceError(
                f"signal {sig.id}: period {sig.period_us} us is not "
                f"cycle * 2^n (cycle = {config.cycle_us} us)"
            )
        if sig.period_us // config.cycle_us > config.hyperperiod_cycles:
            raise InstanceError(
                f"signal {sig.id}: period {sig.period_us} us exceeds the "
                f"hyperperiod"
            )
        signals.append(sig)

    members = []
    for j, group in enumerate(raw_variants):
        member_set = set()
        for sid in group:
            if sid not in seen:
                raise InstanceError(f"variant {j} references unknown signal {sid!r}")
            member_set.add(sid)
        members.append(frozenset(member_set))
    variants = VariantMatrix(tuple(members))

    covered = set().union(*members) if members else set()
    for sig in signals:
        if sig.id not in covered:
            raise InstanceError(f"signal {sig.id} not assigned to any variant")

    return Instance(config, tuple(signals), variants)


def instance_to_dict(instance: Instance) -> dict:
    """Serialize an Instance back to the document format.

    Variant member lists are emitted in instance signal order, which makes
    the serialization canonical.
    """
    order = {s.id: i for i, s in enumerate(instance.signals)}
    return {
        "config": {
            "cycle_us": instance.config.cycle_us,
            "hyperperiod_cycles": instance.config.hyperperiod_cycles,
            "payload_bits": instance.config.payload_bits,
            "static_slots": instance.config.static_slots,
            "slot_us": instance.config.slot_us,
        },
        "signals": [
            {
                "id": s.id,
                "node": s.node,
                "period_us": s.period_us,
                "length_bits": s.length_bits,
                "release_us": s.release_us,
                "deadline_us": s.deadline_us,
            }
            for s in instance.signals
        ],
        "variants": [
            sorted(group, key=order.__getitem__) for group in instance.variants.members
        ],
    }


def read_instance(path: Union[str, Path]) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: not valid JSON ({exc})") from None
    return load_instance(doc)


def write_instance(instance: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps(instance_to_dict(instance), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
