"""Compiled settlement-day kernel.

Event loop over pre-sorted arrivals. Each bank's queue is a slice of a
per-sender index table (arrival order, so FIFO for free); a ring buffer of
bank ids drives the cascade, each bank being pending at most once.
"""
from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def _drain(t, work, pending, wq_head, wq_len, n_banks, balance, head, tail,
           slots, receivers, gate_bank, gate_until, settle_time, seq, counter):
    while wq_len > 0:
        b = work[wq_head]
        wq_head = (wq_head + 1) % n_banks
        wq_len -= 1
        pending[b] = False
        if b == gate_bank and t < gate_until:
            continue
        while head[b] < tail[b] and balance[b] >= 1:
            k = slots[head[b]]
            head[b] += 1
            r = receivers[k]
            balance[b] -= 1
            balance[r] += 1
            settle_time[k] = t
            seq[k] = counter
            counter += 1
            if not pending[r]:
                pending[r] = True
                work[(wq_head + wq_len) % n_banks] = r
                wq_len += 1
    return wq_head, counter


@numba.njit(cache=True)
def settle_day(n_banks, actions, times, senders, receivers, gate_bank, gate_until,
               day_length):
    """Run one day.

    Returns ``(settle_time, settle_seq, arrival_seq, release_seq, balance)``.
    Unsettled instructions keep ``settle_time = nan`` and ``settle_seq = -1``.
    ``release_seq`` is the event counter value of the gate release (-1 if none).
    """
    n = times.shape[0]
    balance = actions.astype(np.int64).copy()

    counts = np.zeros(n_banks, np.int64)
    for k in range(n):
        counts[senders[k]] += 1
    offsets = np.zeros(n_banks + 1, np.int64)
    for b in range(n_banks):
        offsets[b + 1] = offsets[b] + counts[b]
    slots = np.empty(n, np.int64)
    head = offsets[:n_banks].copy()
    tail = offsets[:n_banks].copy()

    settle_time = np.full(n, np.nan)
    seq = np.full(n, -1, np.int64)
    arrival_seq = np.empty(n, np.int64)
    work = np.empty(n_banks, np.int64)
    pending = np.zeros(n_banks, np.bool_)
    wq_head = 0
    counter = 0
    release_seq = -1
    released = gate_bank < 0

    for k in range(n):
        t = times[k]
        if not released and t >= gate_until:
            released = True
            release_seq = counter
            counter += 1
            pending[gate_bank] = True
            work[wq_head] = gate_bank
            wq_head, counter = _drain(gate_until, work, pending, wq_head, 1, n_banks,
                                      balance, head, tail, slots, receivers,
                                      gate_bank, gate_until, settle_time, seq, counter)
        s = senders[k]
        slots[tail[s]] = k
        tail[s] += 1
        arrival_seq[k] = counter
        counter += 1
        pending[s] = True
        work[wq_head] = s
        wq_head, counter = _drain(t, work, pending, wq_head, 1, n_banks,
                                  balance, head, tail, slots, receivers,
                                  gate_bank, gate_until, settle_time, seq, counter)

    if not released and gate_until <= day_length:
        release_seq = counter
        counter += 1
        pending[gate_bank] = True
        work[wq_head] = gate_bank
        wq_head, counter = _drain(gate_until, work, pending, wq_head, 1, n_banks,
                                  balance, head, tail, slots, receivers,
                                  gate_bank, gate_until, settle_time, seq, counter)
    return settle_time, seq, arrival_seq, release_seq, balance
