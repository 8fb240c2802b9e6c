"""Is a converged profile really a stage-game equilibrium?

On a two-bank, three-level game we can afford to try every deviation. The
check replays the same sampled days for every alternative so the payoff
gains are paired differences with small standard errors.
"""
from rtgsim import ActionGrid, CostParams, PlayConfig, run_play
from rtgsim.experiments import best_response_check

cfg = PlayConfig(n_banks=2, grid=ActionGrid((0, 2, 4)), costs=CostParams(kappa=512.0, day_length=100.0), seed=3)
play = run_play(cfg)
print("converged:", play.converged, "profile:", play.final_profile.tolist())

rep = best_response_check(play.final_profile, cfg, samples=2000)
for i in range(2):
    gains = ", ".join(f"{lv}: {g:+.2f} ({s:.2f})" for lv, g, s in
                      zip(rep.levels, rep.gain[i], rep.gain_stderr[i]))
    print(f"bank {i} gain from switching to  {gains}")
print("epsilon-Nash at 2 standard errors:", rep.is_epsilon_nash)
