"""Throughput rules and an operational incident, compared with the base system.

Throughput: each payment settled more than a tenth of a day late costs a
flat penalty. Incident: one random bank cannot pay out for the first half
of the day but keeps receiving, soaking up everyone else's liquidity.
"""
from dataclasses import replace

from rtgsim import PlayConfig, ScenarioConfig
from rtgsim.experiments import run_sweep, scenario_deltas

kappas = (0.125, 0.5, 2.0, 8.0)
base_cfg = PlayConfig(seed=42)
base = run_sweep(base_cfg, kappas, plays_per_point=2)

for kind in ("throughput", "incident"):
    other = run_sweep(replace(base_cfg, scenario=ScenarioConfig(kind)), kappas, plays_per_point=2)
    print(f"\n{kind}")
    print(f"{'kappa':>7} {'base':>8} {kind:>11} {'delta':>8} {'cost change':>12}")
    for r in scenario_deltas(base, other):
        print(f"{r['kappa']:>7g} {r['base_liquidity']:>8.1f} {r['scenario_liquidity']:>11.1f} "
              f"{r['liquidity_delta']:>+8.1f} {r['cost_delta_pct']:>+11.0f}%")
