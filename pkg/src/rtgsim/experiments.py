"""Experiment harness: kappa sweeps, fixed-profile baselines, size study, Nash check.

Every play in a sweep gets its seed from ``(base seed, kappa index, play
index)``, so scenario sweeps run on the same seeds as the base sweep and
comparisons use common random numbers. Plays run in a process pool sized by
``RTGSIM_WORKERS`` (default: CPU count); results are keyed, not ordered by
completion, so the pool size never changes the output.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import seeding
from .errors import InvalidConfiguration
from .play import PlayConfig, run_play
from .settlement import (CostParams, ScenarioConfig, run_day, sample_instructions,
                         select_incident_victim)

DEFAULT_KAPPAS = (0.125, 0.5, 2.0, 8.0, 32.0, 128.0, 512.0)
DESK_PLAYS, FULL_PLAYS = 5, 30
EVAL_PURPOSE = 7  # seed path for post-convergence evaluation days


def worker_count() -> int:
    env = os.environ.get("RTGSIM_WORKERS")
    if env:
        n = int(env)
        if n < 1:
            raise InvalidConfiguration("must be >= 1", "RTGSIM_WORKERS")
        return n
    return os.cpu_count() or 1


@dataclass
class PlaySummary:
    kappa: float
    play_index: int
    seed: int
    converged: bool
    days_run: int
    total_liquidity: int
    mean_payoff: float   # per bank per day, converged profile re-evaluated
    mean_delay: float    # per bank per day, in day units
    final_profile: list[int]
    liquidity_trajectory: list[int] = field(default_factory=list, repr=False)

    @property
    def mean_cost(self) -> float:
        return -self.mean_payoff


@dataclass
class SweepPoint:
    kappa: float
    plays: list[PlaySummary]

    @property
    def converged_plays(self) -> list[PlaySummary]:
        return [p for p in self.plays if p.converged]

    def _stat(self, attr, fn):
        vals = [getattr(p, attr) for p in self.converged_plays]
        return float(fn(vals)) if vals else float("nan")

    @property
    def mean_liquidity(self) -> float:
        return self._stat("total_liquidity", np.mean)

    @property
    def min_liquidity(self) -> float:
        return self._stat("total_liquidity", np.min)

    @property
    def max_liquidity(self) -> float:
        return self._stat("total_liquidity", np.max)

    @property
    def mean_payoff(self) -> float:
        return self._stat("mean_payoff", np.mean)

    @property
    def mean_cost(self) -> float:
        return -self.mean_payoff

    @property
    def mean_delay(self) -> float:
        return self._stat("mean_delay", np.mean)

    @property
    def n_unconverged(self) -> int:
        return len(self.plays) - len(self.converged_plays)


@dataclass
class SweepResult:
    scenario: str
    n_banks: int
    day_length: float
    points: list[SweepPoint]

    def point(self, kappa: float) -> SweepPoint:
        for p in self.points:
            if p.kappa == kappa:
                return p
        raise KeyError(kappa)

    @property
    def kappas(self) -> list[float]:
        return [p.kappa for p in self.points]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "n_banks": self.n_banks,
            "day_length": self.day_length,
            "points": [
                {
                    "kappa": p.kappa,
                    "mean_liquidity": p.mean_liquidity,
                    "min_liquidity": p.min_liquidity,
                    "max_liquidity": p.max_liquidity,
                    "mean_payoff": p.mean_payoff,
                    "mean_delay": p.mean_delay,
                    "n_unconverged": p.n_unconverged,
                    "plays": [asdict(s) for s in p.plays],
                }
                for p in self.points
            ],
        }


@dataclass
class FixedProfileResult:
    mean_payoff: np.ndarray       # per bank
    mean_delay: np.ndarray        # per bank, day units
    payoff_stderr: np.ndarray     # per bank, over days
    days: int

    @property
    def mean_cost(self) -> float:
        return float(-self.mean_payoff.mean())

    @property
    def total_delay(self) -> float:
        return float(self.mean_delay.sum())


def _day_outcomes(actions, days, costs, scenario, seed, first_day=0, purpose=()):
    n = len(actions)
    for d in range(first_day, first_day + days):
        ins = sample_instructions(
            seeding.substream(seed, *purpose, d, seeding.INSTRUCTIONS), n, costs.day_length)
        victim = None
        if scenario.kind == "incident":
            victim = select_incident_victim(
                seeding.substream(seed, *purpose, d, seeding.VICTIM), n)
        yield run_day(actions, ins, costs, scenario, victim)


def run_fixed_profile(actions, days: int, costs: CostParams, scenario: ScenarioConfig | None = None,
                      seed: int = 0, purpose: tuple = ()) -> FixedProfileResult:
    """Settle ``days`` days with frozen actions and average the outcomes."""
    if days < 1:
        raise InvalidConfiguration("must be >= 1", "days")
    scenario = scenario or ScenarioConfig()
    actions = np.asarray(actions, dtype=np.int64)
    pay = np.empty((days, len(actions)))
    delay = np.empty((days, len(actions)))
    for k, out in enumerate(_day_outcomes(actions, days, costs, scenario, seed, purpose=purpose)):
        pay[k] = out.payoff
        delay[k] = out.total_delay_fraction
    se = pay.std(axis=0, ddof=1) / math.sqrt(days) if days > 1 else np.zeros(len(actions))
    return FixedProfileResult(pay.mean(axis=0), delay.mean(axis=0), se, days)


def _play_job(args):
    cfg, kappa, k_idx, p_idx, eval_days = args
    result = run_play(cfg)
    if result.converged and eval_days > 0:
        ev = run_fixed_profile(result.final_profile, eval_days, cfg.costs, cfg.scenario,
                               seed=cfg.seed, purpose=(EVAL_PURPOSE,))
        pay, delay = float(ev.mean_payoff.mean()), float(ev.mean_delay.mean())
    elif result.days_run:
        pay, delay = result.mean_payoff(cfg.convergence_window), result.mean_delay(cfg.convergence_window)
    else:
        pay = delay = float("nan")
    return (k_idx, p_idx), PlaySummary(
        kappa=kappa, play_index=p_idx, seed=cfg.seed, converged=result.converged,
        days_run=result.days_run, total_liquidity=result.total_liquidity,
        mean_payoff=pay, mean_delay=delay, final_profile=result.final_profile.tolist(),
        liquidity_trajectory=result.total_liquidity_trajectory.tolist(),
    )


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def run_sweep(base: PlayConfig, kappas=DEFAULT_KAPPAS, plays_per_point: int = DESK_PLAYS,
              eval_days: int = 50, workers: int | None = None) -> SweepResult:
    """Run ``plays_per_point`` independent plays at each delay price.

    Plays that hit ``max_days`` stay in the result but are left out of
    every aggregate.
    """
    kappas = [float(k) for k in kappas]
    if not kappas:
        raise InvalidConfiguration("need at least one kappa", "kappas")
    if plays_per_point < 1:
        raise InvalidConfiguration("must be >= 1", "plays_per_point")
    jobs = []
    for k_idx, kappa in enumerate(kappas):
        for p_idx in range(plays_per_point):
            cfg = replace(base, costs=replace(base.costs, kappa=kappa),
                          seed=seeding.derive_seed(base.seed, k_idx, p_idx))
            jobs.append((cfg, kappa, k_idx, p_idx, eval_days))
    done = dict(_map(_play_job, jobs, worker_count() if workers is None else workers))
    points = [SweepPoint(kappa, [done[(k_idx, p)] for p in range(plays_per_point)])
              for k_idx, kappa in enumerate(kappas)]
    return SweepResult(base.scenario.kind, base.n_banks, base.costs.day_length, points)


def run_size_study(sizes, base: PlayConfig, kappas=DEFAULT_KAPPAS,
                   plays_per_point: int = DESK_PLAYS, **kw) -> dict[int, SweepResult]:
    """Sweep each system size with the day length (payment volume) held fixed."""
    out = {}
    for n in sizes:
        if n < 2:
            raise InvalidConfiguration("sizes must be >= 2", "sizes")
        out[int(n)] = run_sweep(replace(base, n_banks=int(n)), kappas, plays_per_point, **kw)
    return out


def demand_curve(sweep: SweepResult) -> list[dict]:
    """Liquidity demand per kappa, with the netting ratio (liquidity / expected payments)."""
    if not sweep.points:
        raise InvalidConfiguration("empty sweep", "sweep")
    rows = []
    for p in sorted(sweep.points, key=lambda p: p.kappa):
        rows.append({
            "kappa": p.kappa,
            "mean_liquidity": p.mean_liquidity,
            "min_liquidity": p.min_liquidity,
            "max_liquidity": p.max_liquidity,
            "netting_ratio": p.mean_liquidity / sweep.day_length,
            "mean_cost": p.mean_cost,
            "mean_delay": p.mean_delay,
            "n_plays": len(p.plays),
            "n_unconverged": p.n_unconverged,
        })
    return rows


def scenario_deltas(base: SweepResult, other: SweepResult) -> list[dict]:
    """Per-kappa change in liquidity, cost and delay of ``other`` relative to ``base``."""
    rows = []
    for p in sorted(base.points, key=lambda p: p.kappa):
        q = other.point(p.kappa)
        rows.append({
            "kappa": p.kappa,
            "base_liquidity": p.mean_liquidity,
            "scenario_liquidity": q.mean_liquidity,
            "liquidity_delta": q.mean_liquidity - p.mean_liquidity,
            "liquidity_delta_pct": 100.0 * (q.mean_liquidity / p.mean_liquidity - 1.0)
            if p.mean_liquidity else float("nan"),
            "base_cost": p.mean_cost,
            "scenario_cost": q.mean_cost,
            "cost_delta_pct": 100.0 * (q.mean_cost / p.mean_cost - 1.0),
            "base_delay": p.mean_delay,
            "scenario_delay": q.mean_delay,
        })
    return rows


def compare_strategies(sweep: SweepResult, base: PlayConfig, days: int = 200) -> list[dict]:
    """Adaptive outcome against (a) everyone holds nothing and (b) prompt-payment liquidity.

    Strategy (b) reuses the first converged profile at the highest kappa.
    """
    top = max(sweep.points, key=lambda p: p.kappa)
    prompt = next((p.final_profile for p in top.converged_plays), None)
    if prompt is None:
        raise InvalidConfiguration("no converged play at the highest kappa", "sweep")
    zero = [0] * sweep.n_banks
    rows = []
    for p in sorted(sweep.points, key=lambda p: p.kappa):
        costs = replace(base.costs, kappa=p.kappa)
        a = run_fixed_profile(zero, days, costs, base.scenario, seed=base.seed, purpose=(8,))
        b = run_fixed_profile(prompt, days, costs, base.scenario, seed=base.seed, purpose=(8,))
        rows.append({
            "kappa": p.kappa,
            "adaptive_cost": p.mean_cost,
            "min_liquidity_cost": a.mean_cost,
            "min_delay_cost": b.mean_cost,
            "analytic_min_liquidity_cost": p.kappa * sweep.day_length / (2 * sweep.n_banks),
        })
    return rows


def delay_curve(levels, n_banks: int = 15, days: int = 50, costs: CostParams | None = None,
                seed: int = 0) -> list[dict]:
    """Mean total delay for symmetric profiles (every bank at the same level)."""
    costs = costs or CostParams()
    rows = []
    for level in levels:
        r = run_fixed_profile([int(level)] * n_banks, days, costs, seed=seed)
        rows.append({"level": int(level), "total_liquidity": int(level) * n_banks,
                     "mean_total_delay": r.total_delay})
    return rows


def loglinear_fit(x, y) -> tuple[float, float, float]:
    """Least-squares fit of ``log(y) = a + b x``; returns ``(a, b, r_squared)``."""
    x = np.asarray(x, float)
    ly = np.log(np.asarray(y, float))
    b, a = np.polyfit(x, ly, 1)
    resid = ly - (a + b * x)
    ss_tot = ((ly - ly.mean()) ** 2).sum()
    return float(a), float(b), float(1.0 - (resid ** 2).sum() / ss_tot)


@dataclass
class NashReport:
    profile: list[int]
    levels: list[int]
    payoff: np.ndarray        # (N, L) estimated payoff of bank i playing level l
    gain: np.ndarray          # (N, L) payoff[i, l] - payoff[i, own]
    gain_stderr: np.ndarray   # (N, L) paired standard error of each gain
    epsilon: float
    z: float
    samples: int

    @property
    def max_gain(self) -> float:
        return float(self.gain.max())

    @property
    def is_epsilon_nash(self) -> bool:
        return bool(np.all(self.gain <= self.epsilon + self.z * self.gain_stderr))

    def best_responses(self) -> list[int]:
        return [self.levels[int(np.argmax(row))] for row in self.payoff]


def best_response_check(profile, config: PlayConfig, samples: int = 200,
                        epsilon: float = 0.0, z: float = 2.0) -> NashReport:
    """Estimate every unilateral deviation gain by Monte Carlo.

    All deviations of all banks share the same ``samples`` days (common
    random numbers), so gains are paired differences. The profile passes
    when no gain exceeds ``epsilon`` plus ``z`` standard errors.
    """
    if samples < 1:
        raise InvalidConfiguration("must be >= 1", "samples")
    profile = np.asarray(profile, dtype=np.int64)
    levels = config.grid.as_array()
    N, L = len(profile), len(levels)
    days = []
    for d in range(samples):
        ins = sample_instructions(seeding.substream(config.seed, 9, d, seeding.INSTRUCTIONS),
                                  N, config.costs.day_length)
        victim = None
        if config.scenario.kind == "incident":
            victim = select_incident_victim(seeding.substream(config.seed, 9, d, seeding.VICTIM), N)
        days.append((ins, victim))
    draws = np.empty((N, L, samples))
    for i in range(N):
        for l, level in enumerate(levels):
            prof = profile.copy()
            prof[i] = level
            for d, (ins, victim) in enumerate(days):
                draws[i, l, d] = run_day(prof, ins, config.costs, config.scenario, victim).payoff[i]
    own = np.searchsorted(levels, profile)
    if not np.array_equal(levels[own], profile):
        raise InvalidConfiguration("profile levels must lie on the grid", "profile")
    diff = draws - draws[np.arange(N), own][:, None, :]
    se = diff.std(axis=2, ddof=1) / math.sqrt(samples) if samples > 1 else np.zeros((N, L))
    return NashReport(profile.tolist(), levels.tolist(), draws.mean(axis=2), diff.mean(axis=2),
                      se, float(epsilon), float(z), samples)
