"""Fifteen banks learn how much liquidity to commit.

The first 500 days are random exploration. After that each bank plays the
level with the best expected payoff given how it has seen the others behave,
and the play stops once nobody changes for ten days.
"""
import numpy as np

from rtgsim import CostParams, PlayConfig, run_play

for kappa in (0.5, 8.0, 512.0):
    r = run_play(PlayConfig(costs=CostParams(kappa=kappa), seed=1))
    totals = r.total_liquidity_trajectory
    print(f"kappa {kappa:>5}: converged={r.converged} after {r.days_run} days, "
          f"total liquidity {r.total_liquidity}")
    # average commitment while exploring vs once decisions are informed
    print(f"   exploring mean {totals[:500].mean():.0f}, informed mean {totals[500:].mean():.0f}")
    print(f"   final profile {np.sort(r.final_profile)[::-1].tolist()}")
