"""A play: repeated settlement days with learning banks until the profile freezes."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import seeding
from .errors import InvalidConfiguration
from .learning import ActionGrid, BeliefState, choose_action, others_bins, update_beliefs
from .settlement import CostParams, ScenarioConfig, run_day, sample_instructions, select_incident_victim

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlayConfig:
    n_banks: int = 15
    grid: ActionGrid = field(default_factory=ActionGrid)
    costs: CostParams = field(default_factory=CostParams)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    exploration_days: int = 500
    convergence_window: int = 10
    max_days: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.n_banks < 2:
            raise InvalidConfiguration("need at least 2 banks", "n_banks")
        if self.convergence_window < 1:
            raise InvalidConfiguration("must be >= 1", "convergence_window")
        if self.max_days < 0:
            raise InvalidConfiguration("must be >= 0", "max_days")
        if self.exploration_days < 0:
            raise InvalidConfiguration("must be >= 0", "exploration_days")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfiguration("must be an unsigned 64-bit integer", "seed")


@dataclass
class PlayResult:
    converged: bool
    days_run: int
    final_profile: np.ndarray
    profiles: np.ndarray            # (days, N) chosen levels
    payoff_trajectory: np.ndarray   # (days, N)
    mean_delay_trajectory: np.ndarray

    @property
    def total_liquidity_trajectory(self) -> np.ndarray:
        return self.profiles.sum(axis=1)

    @property
    def total_liquidity(self) -> int:
        return int(self.final_profile.sum())

    def mean_payoff(self, last: int | None = None) -> float:
        """Mean per-bank payoff over the last ``last`` days (default: the final day)."""
        if self.days_run == 0:
            return float("nan")
        last = last or 1
        return float(self.payoff_trajectory[-last:].mean())

    def mean_delay(self, last: int | None = None) -> float:
        if self.days_run == 0:
            return float("nan")
        last = last or 1
        return float(self.mean_delay_trajectory[-last:].mean())


def has_converged(profile_history, window: int) -> bool:
    """True iff the last ``window`` profiles exist and are identical."""
    if window < 1:
        raise InvalidConfiguration("must be >= 1", "window")
    if len(profile_history) < window:
        return False
    tail = np.asarray(profile_history[-window:])
    return bool(np.all(tail == tail[0]))


def run_play(config: PlayConfig, beliefs: list[BeliefState] | None = None) -> PlayResult:
    """Run days until no bank changes its action for ``convergence_window`` informed days.

    Days still inside the exploration phase never count toward convergence.
    """
    cfg = config
    N = cfg.n_banks
    levels = cfg.grid.as_array()
    T = cfg.costs.day_length
    incident = cfg.scenario.kind == "incident"
    if beliefs is None:
        beliefs = [BeliefState.fresh(len(levels), cfg.exploration_days) for _ in range(N)]

    profiles = np.zeros((cfg.max_days, N), dtype=np.int64)
    payoffs = np.zeros((cfg.max_days, N))
    delays = np.zeros(cfg.max_days)
    informed_start = None
    converged = False
    days = 0
    for day in range(cfg.max_days):
        explore_rng = seeding.substream(cfg.seed, day, seeding.EXPLORATION)
        exploring = any(b.exploration_remaining > 0 for b in beliefs)
        idx = np.array([choose_action(b, explore_rng) for b in beliefs], dtype=np.int64)
        profile = levels[idx]
        instructions = sample_instructions(
            seeding.substream(cfg.seed, day, seeding.INSTRUCTIONS), N, T)
        victim = None
        if incident:
            victim = select_incident_victim(seeding.substream(cfg.seed, day, seeding.VICTIM), N)
        out = run_day(profile, instructions, cfg.costs, cfg.scenario, victim)
        bins = others_bins(profile, cfg.grid)
        for i, b in enumerate(beliefs):
            update_beliefs(b, int(idx[i]), int(bins[i]), float(out.payoff[i]))

        profiles[day] = profile
        payoffs[day] = out.payoff
        delays[day] = out.total_delay_fraction.mean()
        days = day + 1
        if not exploring and informed_start is None:
            informed_start = day
        if informed_start is not None and has_converged(
                profiles[informed_start:days], cfg.convergence_window):
            converged = True
            break

    if not converged and cfg.max_days > 0:
        log.warning("play seed=%d did not converge in %d days", cfg.seed, cfg.max_days)
    return PlayResult(
        converged=converged,
        days_run=days,
        final_profile=profiles[days - 1].copy() if days else np.zeros(N, dtype=np.int64),
        profiles=profiles[:days],
        payoff_trajectory=payoffs[:days],
        mean_delay_trajectory=delays[:days],
    )
