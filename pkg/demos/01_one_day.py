"""Settle a single day and watch payments cascade.

Three banks, a twenty-unit day, and only bank 0 brings any liquidity.
Every other payment has to wait for incoming funds.
"""
import numpy as np

from rtgsim import CostParams, run_day, sample_instructions
from rtgsim.seeding import substream
from rtgsim.settlement import day_trace

costs = CostParams(lam=1.0, kappa=8.0, day_length=20.0)
instructions = sample_instructions(substream(7), n_banks=3, day_length=20.0)
print(f"{len(instructions)} payments today")

out = run_day(np.array([1, 0, 0]), instructions, costs)

# the event log: arrivals, settlements (possibly many at one instant), leftovers
for rec in day_trace(instructions, out):
    print(f"{rec['time']:7.3f}  {rec['type']:9s}  {rec['sender']} -> {rec['receiver']}")

print()
for i in range(3):
    print(f"bank {i}: settled {out.settled_count[i]}/{out.sent_count[i]}, "
          f"delay cost {out.delay_cost[i]:.2f}, payoff {out.payoff[i]:.2f}")

# a single unit goes round and round: end balances still add up to what was committed
print("end balances", out.end_balance, "total", out.end_balance.sum())
