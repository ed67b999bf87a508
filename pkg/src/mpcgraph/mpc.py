"""Round and space accounting for a simulated (gamma, delta)-MPC system.

Algorithms in this package run sequentially on the host. Every bulk data
exchange is reported to a :class:`RoundLedger`, which charges the canonical
round cost of the primitive and audits the per-machine load implied by the
words that are live when the primitive finishes.
"""
from __future__ import annotations

import json
import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

PRIMITIVES = ("sort", "multi_query", "link_double_step", "local_round", "route")


@dataclass(frozen=True)
class MachineConfig:
    """Machine layout for input size ``N`` under local memory ``N**delta``.

    ``space_factor`` is the constant hidden in ``p * s = Theta(N**(1+gamma))``;
    with the default of 1 the machine count is the tight ``ceil(N**(1+gamma)/s)``.
    """

    input_size: int
    delta: float
    gamma: float
    local_capacity: int
    machine_count: int
    space_factor: int = 1

    @property
    def total_space(self) -> int:
        return self.local_capacity * self.machine_count


def configure(input_size: int, delta: float = 0.5, gamma: float = 0.0,
              space_factor: int = 1, min_capacity: int = 1) -> MachineConfig:
    """Local capacity ``ceil(N**delta)`` (at least ``min_capacity``) and enough
    machines to hold ``space_factor * N**(1+gamma)`` words."""
    if input_size < 1:
        raise ValueError(f"input size must be >= 1, got {input_size}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    if space_factor < 1:
        raise ValueError(f"space_factor must be >= 1, got {space_factor}")
    s = max(_ceil_pow(input_size, delta), int(min_capacity))
    total = space_factor * _ceil_pow(input_size, 1.0 + gamma)
    p = -(-total // s)
    return MachineConfig(input_size, float(delta), float(gamma), s, p, space_factor)


def _ceil_pow(base: int, exponent: float) -> int:
    """``ceil(base**exponent)`` that is exact when the power is an integer."""
    value = base ** exponent
    nearest = round(value)
    if nearest >= 1 and abs(value - nearest) <= 1e-9 * max(1.0, value):
        return int(nearest)
    return int(math.ceil(value))


class Charge(NamedTuple):
    kind: str
    volume: int
    rounds: int
    stage: str


class AuditViolation(NamedTuple):
    machines: tuple[int, ...]
    loads: tuple[int, ...]
    capacity: int
    note: str


@dataclass
class AuditVerdict:
    ok: bool
    violations: list[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def audit_load(config: MachineConfig, loads: Sequence[int],
               ledger: RoundLedger | None = None, note: str = "") -> AuditVerdict:
    """Check that no machine holds more than ``config.local_capacity`` words."""
    if len(loads) > config.machine_count:
        raise ValueError(
            f"{len(loads)} loads given for {config.machine_count} machines")
    s = config.local_capacity
    bad = [i for i, w in enumerate(loads) if w > s]
    if bad and ledger is not None:
        ledger.audit_failures.append(AuditViolation(
            tuple(bad), tuple(int(loads[i]) for i in bad), s, note))
    return AuditVerdict(not bad, bad)


class RoundLedger:
    """Charged rounds, per-primitive counts and peak live space of a run.

    The ledger is owned by a single caller and mutated sequentially.
    Independent sub-computations that would run side by side on disjoint
    machines use :meth:`fork` and :meth:`join`: the joined rounds are the
    maximum over branches and the joined space is their sum.
    """

    def __init__(self, config: MachineConfig | None = None, *,
                 sort_constant: float = 1.0, multi_query_rounds: int = 3,
                 delta: float | None = None):
        if delta is None:
            delta = config.delta if config is not None else 0.5
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        self.config = config
        self.delta = delta
        self.sort_constant = sort_constant
        self.multi_query_rounds = multi_query_rounds
        self.rounds_charged = 0
        self.charges: list[Charge] = []
        self.peak_space = 0
        self.audit_failures: list[AuditViolation] = []
        self._resident = 0
        self._stage = "main"

    # -- charging -----------------------------------------------------------

    def rounds_for(self, kind: str) -> int:
        if kind == "sort":
            return max(1, math.ceil(self.sort_constant / self.delta - 1e-12))
        if kind == "multi_query":
            return self.multi_query_rounds
        if kind in PRIMITIVES:
            return 1
        raise ValueError(f"unknown primitive kind {kind!r}")

    def charge(self, kind: str, volume: int = 0) -> RoundLedger:
        """Record one primitive whose working set is ``volume`` live words."""
        rounds = self.rounds_for(kind)
        volume = int(volume)
        self.rounds_charged += rounds
        self.charges.append(Charge(kind, volume, rounds, self._stage))
        self._touch(self._resident + volume, kind)
        return self

    def _touch(self, live: int, note: str) -> None:
        if live > self.peak_space:
            self.peak_space = live
        if self.config is not None and live > 0:
            p = self.config.machine_count
            per_machine = -(-live // p)
            if per_machine > self.config.local_capacity:
                self.audit_failures.append(AuditViolation(
                    tuple(range(min(p, 8))), (per_machine,),
                    self.config.local_capacity,
                    f"{note}: {live} live words over {p} machines"))

    def audit(self, loads: Sequence[int], note: str = "") -> AuditVerdict:
        if self.config is None:
            return AuditVerdict(True)
        return audit_load(self.config, loads, self, note)

    # -- scoping ------------------------------------------------------------

    @contextmanager
    def resident(self, words: int) -> Iterator[RoundLedger]:
        """Count ``words`` of caller-owned data as live inside the block."""
        self._resident += int(words)
        try:
            yield self
        finally:
            self._resident -= int(words)

    @contextmanager
    def stage(self, name: str) -> Iterator[RoundLedger]:
        previous, self._stage = self._stage, name
        try:
            yield self
        finally:
            self._stage = previous

    def fork(self) -> RoundLedger:
        child = RoundLedger(self.config, sort_constant=self.sort_constant,
                            multi_query_rounds=self.multi_query_rounds,
                            delta=self.delta)
        child._stage = self._stage
        return child

    def join(self, branches: Sequence[RoundLedger]) -> RoundLedger:
        if not branches:
            return self
        critical = max(branches, key=lambda b: b.rounds_charged)
        self.rounds_charged += critical.rounds_charged
        self.charges.extend(critical.charges)
        for b in branches:
            self.audit_failures.extend(b.audit_failures)
        live = sum(b.peak_space for b in branches)
        if live:
            self._touch(self._resident + live, "join")
        return self

    def extend(self, other: RoundLedger) -> RoundLedger:
        """Append ``other``'s charges as if they ran after ours."""
        self.rounds_charged += other.rounds_charged
        self.charges.extend(other.charges)
        self.audit_failures.extend(other.audit_failures)
        self.peak_space = max(self.peak_space, other.peak_space)
        return self

    # -- reporting ----------------------------------------------------------

    def rounds_in_stage(self, name: str) -> int:
        return sum(c.rounds for c in self.charges if c.stage == name)

    def report(self) -> dict:
        return report(self)


def report(ledger: RoundLedger) -> dict:
    """Flat, JSON-compatible metrics record of ``ledger``."""
    per_kind = {k: {"count": 0, "rounds": 0} for k in PRIMITIVES}
    per_stage: dict[str, int] = {}
    for c in ledger.charges:
        per_kind[c.kind]["count"] += 1
        per_kind[c.kind]["rounds"] += c.rounds
        per_stage[c.stage] = per_stage.get(c.stage, 0) + c.rounds
    return {
        "rounds": ledger.rounds_charged,
        "peak_space_words": ledger.peak_space,
        "per_kind": per_kind,
        "per_stage": per_stage,
        "charges": [c._asdict() for c in ledger.charges],
        "audit_failures": len(ledger.audit_failures),
    }


def dumps_report(ledger: RoundLedger) -> str:
    return json.dumps(report(ledger), indent=1, sort_keys=True)
