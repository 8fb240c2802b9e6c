"""One RTGS settlement day: instruction arrivals, FIFO queueing, costs.

Payments are unit-valued. A bank settles the head of its queue whenever
its balance is at least one unit; incoming funds trigger cascade releases
at the same timestamp. Whatever is still queued at the close is charged
delay up to the close and does not move balances.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterator, NamedTuple, Sequence

import numpy as np

from ._kernel import settle_day
from .errors import ContractViolation, InvalidConfiguration

SCENARIOS = ("base", "throughput", "incident")


class PaymentInstruction(NamedTuple):
    sender: int
    receiver: int
    arrival_time: float


@dataclass(frozen=True)
class Instructions:
    """Column store of a day's payment instructions, sorted by arrival time."""

    times: np.ndarray
    senders: np.ndarray
    receivers: np.ndarray

    def __len__(self) -> int:
        return self.times.shape[0]

    def __iter__(self) -> Iterator[PaymentInstruction]:
        for s, r, t in zip(self.senders.tolist(), self.receivers.tolist(), self.times.tolist()):
            yield PaymentInstruction(s, r, t)

    @classmethod
    def from_list(cls, items: Sequence[PaymentInstruction | tuple]) -> "Instructions":
        items = [PaymentInstruction(*it) for it in items]
        return cls(
            times=np.array([it.arrival_time for it in items], dtype=np.float64),
            senders=np.array([it.sender for it in items], dtype=np.int64),
            receivers=np.array([it.receiver for it in items], dtype=np.int64),
        )


@dataclass(frozen=True)
class CostParams:
    """Liquidity price ``lam`` per unit per day, delay price ``kappa`` per day."""

    lam: float = 1.0
    kappa: float = 1.0
    day_length: float = 10_000.0

    def __post_init__(self):
        for name in ("lam", "kappa", "day_length"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidConfiguration("must be finite", name)
        if self.lam <= 0:
            raise InvalidConfiguration("must be > 0", "lam")
        if self.kappa < 0:
            raise InvalidConfiguration("must be >= 0", "kappa")
        if self.day_length <= 0:
            raise InvalidConfiguration("must be > 0", "day_length")


@dataclass(frozen=True)
class ScenarioConfig:
    """Scenario kind plus its parameters.

    ``throughput_threshold`` and ``incident_fraction`` are fractions of the
    day length. Throughput fields only matter for ``kind="throughput"``, the
    incident window only for ``kind="incident"``.
    """

    kind: str = "base"
    throughput_penalty: float = 64.0
    throughput_threshold: float = 0.1
    incident_fraction: float = 0.5

    def __post_init__(self):
        if self.kind not in SCENARIOS:
            raise InvalidConfiguration(f"must be one of {SCENARIOS}, got {self.kind!r}", "scenario")
        if not (self.throughput_penalty >= 0 and math.isfinite(self.throughput_penalty)):
            raise InvalidConfiguration("must be finite and >= 0", "throughput_penalty")
        if not 0 < self.throughput_threshold <= 1:
            raise InvalidConfiguration("must be in (0, 1]", "throughput_threshold")
        if not 0 <= self.incident_fraction <= 1:
            raise InvalidConfiguration("must be in [0, 1]", "incident_fraction")


@dataclass
class DayOutcome:
    """Per-bank cost decomposition for one settled day (all arrays length N)."""

    liquidity_cost: np.ndarray
    delay_cost: np.ndarray
    penalty_cost: np.ndarray
    payoff: np.ndarray
    sent_count: np.ndarray
    received_count: np.ndarray
    settled_count: np.ndarray
    total_delay_fraction: np.ndarray
    end_balance: np.ndarray
    # per instruction; nan where the instruction was still queued at the close
    settle_time: np.ndarray = field(repr=False)
    # event ordinals, used to rebuild the settlement trace
    arrival_seq: np.ndarray = field(repr=False)
    settle_seq: np.ndarray = field(repr=False)
    release_seq: int = -1


def sample_instructions(rng: np.random.Generator, n_banks: int, day_length: float) -> Instructions:
    """Draw a day of instructions from a rate-1 Poisson stream.

    Senders are uniform over banks, receivers uniform over the other banks.
    """
    if n_banks < 2:
        raise InvalidConfiguration("need at least 2 banks", "n_banks")
    if day_length < 0:
        raise InvalidConfiguration("must be >= 0", "day_length")
    chunk = int(day_length + 6.0 * math.sqrt(day_length) + 16)
    times = np.cumsum(rng.exponential(1.0, chunk))
    while times[-1] <= day_length:
        more = np.cumsum(rng.exponential(1.0, chunk)) + times[-1]
        times = np.concatenate([times, more])
    times = times[: np.searchsorted(times, day_length, side="right")]
    n = times.shape[0]
    senders = rng.integers(0, n_banks, n)
    receivers = (senders + rng.integers(1, n_banks, n)) % n_banks
    return Instructions(times, senders.astype(np.int64), receivers.astype(np.int64))


def select_incident_victim(rng: np.random.Generator, n_banks: int) -> int:
    """Pick the bank that cannot send during the incident window."""
    return int(rng.integers(0, n_banks))


def run_day(
    actions: Sequence[int] | np.ndarray,
    instructions: Instructions,
    costs: CostParams,
    scenario: ScenarioConfig | None = None,
    victim: int | None = None,
) -> DayOutcome:
    """Settle one day for the liquidity profile ``actions``."""
    scenario = scenario or ScenarioConfig()
    actions = np.asarray(actions)
    n_banks = actions.shape[0]
    if n_banks < 2:
        raise InvalidConfiguration("need at least 2 banks", "n_banks")
    if np.any(actions < 0):
        raise InvalidConfiguration("liquidity levels must be >= 0", "actions")
    if np.any(actions != np.floor(actions)):
        raise InvalidConfiguration("liquidity levels must be whole units", "actions")
    actions = actions.astype(np.int64)

    times, senders, receivers = instructions.times, instructions.senders, instructions.receivers
    n = times.shape[0]
    if n > 1 and np.any(np.diff(times) < 0):
        raise ContractViolation("instructions must be sorted by arrival_time")
    T = costs.day_length
    if n and (times[0] < 0 or times[-1] > T):
        raise ContractViolation("arrival times must lie in [0, day_length]")
    if n and (np.any(senders == receivers) or senders.min() < 0 or receivers.min() < 0
              or max(senders.max(), receivers.max()) >= n_banks):
        raise ContractViolation("instruction endpoints must be distinct banks in range")

    if scenario.kind == "incident":
        if victim is None or not 0 <= victim < n_banks:
            raise ContractViolation("incident scenario needs a victim bank in range")
        gate_bank, gate_until = int(victim), scenario.incident_fraction * T
    else:
        if victim is not None:
            raise ContractViolation("victim given outside the incident scenario")
        gate_bank, gate_until = -1, 0.0

    settle_time, settle_seq, arrival_seq, release_seq, balance = settle_day(
        n_banks, actions, times, senders, receivers, gate_bank, gate_until, float(T))

    settled = ~np.isnan(settle_time)
    delay = np.where(settled, settle_time, T) - times
    delay_frac = np.bincount(senders, weights=delay, minlength=n_banks) / T
    delay_cost = costs.kappa * delay_frac
    liquidity_cost = costs.lam * actions.astype(np.float64)
    if scenario.kind == "throughput":
        late = delay > scenario.throughput_threshold * T
        penalty_cost = scenario.throughput_penalty * np.bincount(
            senders, weights=late.astype(np.float64), minlength=n_banks)
    else:
        penalty_cost = np.zeros(n_banks)

    return DayOutcome(
        liquidity_cost=liquidity_cost,
        delay_cost=delay_cost,
        penalty_cost=penalty_cost,
        payoff=-(liquidity_cost + delay_cost + penalty_cost),
        sent_count=np.bincount(senders, minlength=n_banks),
        received_count=np.bincount(receivers[settled], minlength=n_banks),
        settled_count=np.bincount(senders[settled], minlength=n_banks),
        total_delay_fraction=delay_frac,
        end_balance=balance,
        settle_time=settle_time,
        arrival_seq=arrival_seq,
        settle_seq=settle_seq,
        release_seq=int(release_seq),
    )


def day_trace(instructions: Instructions, outcome: DayOutcome, victim: int | None = None,
              release_time: float | None = None) -> list[dict]:
    """Settlement events of a day in processing order.

    Record types: ``arrival``, ``settle``, ``release`` (incident gate lifts)
    and ``unsettled`` (still queued at the close, listed last).
    """
    events = []
    for k, inst in enumerate(instructions):
        rec = {"time": inst.arrival_time, "type": "arrival",
               "sender": inst.sender, "receiver": inst.receiver}
        events.append((int(outcome.arrival_seq[k]), rec))
        if outcome.settle_seq[k] >= 0:
            rec = {"time": float(outcome.settle_time[k]), "type": "settle",
                   "sender": inst.sender, "receiver": inst.receiver}
            events.append((int(outcome.settle_seq[k]), rec))
    if outcome.release_seq >= 0:
        rec = {"time": release_time, "type": "release", "sender": victim, "receiver": None}
        events.append((outcome.release_seq, rec))
    events.sort(key=lambda e: e[0])
    records = [rec for _, rec in events]
    for k, inst in enumerate(instructions):
        if outcome.settle_seq[k] < 0:
            records.append({"time": inst.arrival_time, "type": "unsettled",
                            "sender": inst.sender, "receiver": inst.receiver})
    return records


def write_trace(records: list[dict], fh: IO[str]) -> None:
    """Write trace records as JSON lines (floats in round-trip repr)."""
    for rec in records:
        fh.write(json.dumps(rec) + "\n")
