"""Slow, direct discrete-event version of the settlement day.

Used as a test oracle for the compiled kernel: same rules, different data
structures (a heap of timed events, per-bank deques, a FIFO of banks
whose balance rose). Checks its own invariants while running.
"""
from __future__ import annotations

import heapq
from collections import deque

from .settlement import CostParams, Instructions, ScenarioConfig

ARRIVAL, RELEASE = 1, 0  # release sorts first at equal time


def reference_day(actions, instructions: Instructions, costs: CostParams,
                  scenario: ScenarioConfig | None = None, victim: int | None = None):
    """Return ``(settle_times, end_balance, payoff)`` as plain Python lists.

    ``settle_times[k]`` is ``None`` for instructions unsettled at the close.
    """
    scenario = scenario or ScenarioConfig()
    n_banks = len(actions)
    T = costs.day_length
    balance = [int(a) for a in actions]
    queues = [deque() for _ in range(n_banks)]
    items = list(instructions)
    settle = [None] * len(items)

    gate_until = scenario.incident_fraction * T if scenario.kind == "incident" else None
    events = [(inst.arrival_time, ARRIVAL, k) for k, inst in enumerate(items)]
    if gate_until is not None and gate_until <= T:
        events.append((gate_until, RELEASE, -1))
    heapq.heapify(events)

    while events:
        t, kind, k = heapq.heappop(events)
        if kind == ARRIVAL:
            start = items[k].sender
            queues[start].append(k)
        else:
            start = victim
        work = deque([start])
        waiting = {start}
        while work:
            b = work.popleft()
            waiting.discard(b)
            if b == victim and gate_until is not None and t < gate_until:
                continue
            while queues[b] and balance[b] >= 1:
                j = queues[b].popleft()
                r = items[j].receiver
                balance[b] -= 1
                balance[r] += 1
                assert balance[b] >= 0
                settle[j] = t
                if r not in waiting:
                    waiting.add(r)
                    work.append(r)

    payoff = []
    for i in range(n_banks):
        delays = [(T if settle[k] is None else settle[k]) - inst.arrival_time
                  for k, inst in enumerate(items) if inst.sender == i]
        cost = costs.lam * float(actions[i]) + costs.kappa * sum(delays) / T
        if scenario.kind == "throughput":
            limit = scenario.throughput_threshold * T
            cost += scenario.throughput_penalty * sum(d > limit for d in delays)
        payoff.append(-cost)
    return settle, balance, payoff
