"""Deterministic benchmark instance generator.

Reproduces the structure of the extended SAE-style benchmark families:
periods drawn from the classic 5/10/20/100/1000 ms mass points (with
payload sizes that grow with the period, as in the original signal set),
resampled down onto the cycle * 2^n grid, releases spread over the first
five communication cycles, deadline policies per family, and twenty
randomly weighted vehicle variants covering every signal.

Instances are a pure function of (profile, seed): the PRNG is Python's
Mersenne Twister seeded from "<profile>:<seed>", so documents are
byte-identical across runs and platforms.  Profile name and seed are
recorded in the document under "meta".
"""

from __future__ import annotations

import random
from dataclasses import dataclass

CYCLE_US = 5000
HYPERPERIOD = 64
DECLARED_SLOTS = 75
SLOT_US = 40

# (period_ms, weight, payload choices in bits); longer periods carry
# bigger payloads, which is what makes length-first ordering lose
_PERIOD_CLASSES = (
    (5, 0.12, (1, 2, 4)),
    (10, 0.22, (1, 2, 4)),
    (20, 0.16, (2, 4)),
    (100, 0.28, (8, 16)),
    (1000, 0.22, (16, 32)),
)


@dataclass(frozen=True)
class BenchmarkProfile:
    name: str
    node_count: int
    signal_count_range: tuple[int, int]
    payload_bits: int
    release_policy: str = "none"  # none | first_five_cycles
    deadline_policy: str = "none"  # none | last_third | random
    variants: int = 20
    variant_prob_max: float = 0.7


PROFILES: dict[str, BenchmarkProfile] = {
    p.name: p
    for p in (
        BenchmarkProfile("set1", 3, (500, 1000), 32, "none", "none"),
        BenchmarkProfile("set2", 3, (500, 1000), 32, "first_five_cycles", "none"),
        BenchmarkProfile("set3", 3, (500, 1000), 32, "first_five_cycles", "last_third"),
        BenchmarkProfile("set4", 3, (500, 1000), 32, "first_five_cycles", "none"),
        BenchmarkProfile("set5", 6, (500, 750), 64, "first_five_cycles", "none"),
        BenchmarkProfile("set6", 6, (750, 1000), 32, "first_five_cycles", "none"),
        BenchmarkProfile("set7", 23, (850, 1000), 32, "none", "none"),
        BenchmarkProfile("1ecu500", 1, (450, 550), 32, "first_five_cycles", "random"),
        BenchmarkProfile("1ecu1000", 1, (900, 1100), 32, "first_five_cycles", "random"),
        BenchmarkProfile("1ecu3000", 1, (2800, 3200), 128, "first_five_cycles", "random"),
    )
}


def resample_period(raw_us: int, cycle_us: int, hyperperiod_cycles: int = HYPERPERIOD) -> int:
    """Largest admissible period cycle_us * 2^n that does not exceed raw_us,
    clamped to [cycle_us, cycle_us * hyperperiod_cycles]."""
    if raw_us <= cycle_us:
        return cycle_us
    factor = raw_us // cycle_us
    power = 1 << (factor.bit_length() - 1)
    return cycle_us * min(power, hyperperiod_cycles)


def generate_instance(profile: BenchmarkProfile, seed: int) -> dict:
    """Instance document for one benchmark case, deterministic in seed."""
    rng = random.Random(f"{profile.name}:{seed}")
    n_signals = rng.randint(*profile.signal_count_range)

    weights = [c[1] for c in _PERIOD_CLASSES]
    signals = []
    for i in range(n_signals):
        period_ms, _, lengths = _pick_class(rng, weights)
        period_us = resample_period(period_ms * 1000, CYCLE_US, HYPERPERIOD)
        period_cycles = period_us // CYCLE_US
        length = min(rng.choice(lengths), profile.payload_bits)
        node = rng.randint(1, profile.node_count)

        if profile.release_policy == "first_five_cycles":
            release_cycle = rng.randint(0, min(4, period_cycles - 1))
        else:
            release_cycle = 0
        release_us = release_cycle * CYCLE_US

        if profile.deadline_policy == "last_third":
            deadline_us = max(rng.randint(2 * period_us // 3, period_us), CYCLE_US)
        elif profile.deadline_policy == "random":
            deadline_us = rng.randint(CYCLE_US, period_us)
        else:
            deadline_us = period_us

        signals.append(
            {
                "id": f"s{i:04d}",
                "node": node,
                "period_us": period_us,
                "length_bits": length,
                "release_us": release_us,
                "deadline_us": deadline_us,
            }
        )

    probs = [rng.uniform(0.0, profile.variant_prob_max) for _ in range(profile.variants)]
    members: list[list[str]] = [[] for _ in range(profile.variants)]
    assigned = [False] * n_signals
    for i, sig in enumerate(signals):
        for j, p in enumerate(probs):
            if rng.random() < p:
                members[j].append(sig["id"])
                assigned[i] = True
    for i, sig in enumerate(signals):
        if not assigned[i]:
            members[rng.randrange(profile.variants)].append(sig["id"])

    return {
        "config": {
            "cycle_us": CYCLE_US,
            "hyperperiod_cycles": HYPERPERIOD,
            "payload_bits": profile.payload_bits,
            "static_slots": DECLARED_SLOTS,
            "slot_us": SLOT_US,
        },
        "signals": signals,
        "variants": members,
        "meta": {"profile": profile.name, "seed": seed, "generator": "fraysched"},
    }


def _pick_class(rng: random.Random, weights) -> tuple:
    x = rng.random() * sum(weights)
    for cls, w in zip(_PERIOD_CLASSES, weights):
        x -= w
        if x < 0:
            return cls
    return _PERIOD_CLASSES[-1]
