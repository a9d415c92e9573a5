"""Signal ordering strategies and the top-level first-fit driver."""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .core import CycleWindow, Instance, Signal, round_time_constraints
from .exclusion import compute_mems
from .multischedule import Multischedule, Placement, place_signal_to_schedule


class OrderingStrategy(Enum):
    """How the signal list is ordered before first-fit placement.

    FF   input order (no sorting)
    FFP  period, ascending
    FFW  admissible-window span, ascending (tightest signals first)
    FFL  payload length, descending
    FFC  stable sorts chained: payload desc, window asc, period asc,
         node asc -- so node is the most significant key
    """

    FF = "ff"
    FFP = "ffp"
    FFW = "ffw"
    FFL = "ffl"
    FFC = "ffc"

    @classmethod
    def from_name(cls, name: str) -> "OrderingStrategy":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(
                f"unknown strategy {name!r}; expected one of "
                + "|".join(s.value for s in cls)
            ) from None


@dataclass
class ScheduleResult:
    multischedule: Multischedule
    strategy: OrderingStrategy
    slot_count: int
    wall_time_s: float
    placements: dict[str, Placement]


def sort_signals(
    signals: Sequence[Signal],
    strategy: OrderingStrategy,
    windows: Optional[dict[str, CycleWindow]] = None,
) -> list[Signal]:
    """Ordered signal list for the given strategy.

    All sorts are stable, so equal keys keep input order and results are
    reproducible.  FFW and FFC need precomputed cycle windows.
    """
    sl = list(signals)
    if strategy is OrderingStrategy.FF:
        return sl
    if strategy is OrderingStrategy.FFP:
        sl.sort(key=lambda s: s.period_us)
        return sl
    if strategy in (OrderingStrategy.FFW, OrderingStrategy.FFC) and windows is None:
        raise ValueError(f"{strategy.value} ordering requires cycle windows")
    if strategy is OrderingStrategy.FFW:
        sl.sort(key=lambda s: windows[s.id].span)
        return sl
    if strategy is OrderingStrategy.FFL:
        sl.sort(key=lambda s: s.length_bits, reverse=True)
        return sl
    # FFC: chain of stable sorts; the last applied key dominates
    sl.sort(key=lambda s: s.length_bits, reverse=True)
    sl.sort(key=lambda s: windows[s.id].span)
    sl.sort(key=lambda s: s.period_us)
    sl.sort(key=lambda s: s.node)
    return sl


def schedule(instance: Instance, strategy: OrderingStrategy) -> ScheduleResult:
    """Run the first-fit heuristic over the whole instance.

    The wall time covers the algorithm only (exclusion matrices, sorting,
    placement); parsing and serialization are measured elsewhere.
    Propagates InfeasibleSignalError when a signal's window is empty.
    """
    t0 = time.perf_counter()
    mems = compute_mems(instance.signals, instance.variants)
    windows = {
        s.id: round_time_constraints(s, instance.config) for s in instance.signals
    }
    ordered = sort_signals(instance.signals, strategy, windows)
    ms = Multischedule(instance.config)
    ms._windows.update(windows)
    placements = {}
    for sig in ordered:
        placements[sig.id] = place_signal_to_schedule(ms, sig, mems)
    wall = time.perf_counter() - t0
    return ScheduleResult(
        multischedule=ms,
        strategy=strategy,
        slot_count=len(ms.slots),
        wall_time_s=wall,
        placements=placements,
    )
