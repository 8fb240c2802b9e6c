"""How much liquidity do banks demand as delays get dearer?

Runs a small sweep over delay prices from 1/8 to 512 and prints the
demand curve next to the two fixed strategies: hold nothing, or hold what
the most delay-averse banks chose. Takes about a minute on one core.
"""
import sys

from rtgsim import PlayConfig
from rtgsim.experiments import compare_strategies, demand_curve, run_sweep

plays = int(sys.argv[1]) if len(sys.argv) > 1 else 3
base = PlayConfig(seed=42)
sweep = run_sweep(base, plays_per_point=plays)

print(f"{'kappa':>7} {'liquidity':>10} {'min':>6} {'max':>6} {'netting':>8} {'cost':>8}")
for row in demand_curve(sweep):
    print(f"{row['kappa']:>7g} {row['mean_liquidity']:>10.1f} {row['min_liquidity']:>6.0f} "
          f"{row['max_liquidity']:>6.0f} {row['netting_ratio']:>8.2%} {row['mean_cost']:>8.1f}")

print("\nper-bank daily cost: adaptive vs hold-nothing vs hold-plenty")
for row in compare_strategies(sweep, base, days=100):
    print(f"{row['kappa']:>7g} {row['adaptive_cost']:>9.1f} {row['min_liquidity_cost']:>9.1f} "
          f"{row['min_delay_cost']:>9.1f}   (hold-nothing analytic {row['analytic_min_liquidity_cost']:.1f})")
