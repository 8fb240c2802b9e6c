"""Bank beliefs: payoff table estimates, fictitious-play frequencies, action choice.

A bank sees only its own action, its own realized payoff and the binned
average of the other banks' actions. It keeps running sums per
``(own action, others' bin)`` cell and a count per observed bin.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, InvalidConfiguration


@dataclass(frozen=True)
class ActionGrid:
    """Evenly spaced integer liquidity levels starting at 0."""

    levels: tuple[int, ...] = tuple(range(0, 81, 2))

    def __post_init__(self):
        lv = self.levels
        if len(lv) == 0:
            raise InvalidConfiguration("grid needs at least one level", "grid")
        if lv[0] != 0:
            raise InvalidConfiguration("first level must be 0", "grid")
        if any(int(x) != x for x in lv):
            raise InvalidConfiguration("levels must be whole units", "grid")
        steps = {b - a for a, b in zip(lv, lv[1:])}
        if len(steps) > 1 or (steps and min(steps) <= 0):
            raise InvalidConfiguration("levels must be strictly increasing and evenly spaced", "grid")

    @classmethod
    def from_range(cls, top: int = 80, step: int = 2) -> "ActionGrid":
        return cls(tuple(range(0, top + 1, step)))

    @property
    def step(self) -> int:
        return self.levels[1] - self.levels[0] if len(self.levels) > 1 else 1

    def __len__(self) -> int:
        return len(self.levels)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.int64)


def bin_of_others_average(actions, self_index: int, grid: ActionGrid) -> int:
    """Grid index nearest to the mean of the other banks' levels (midpoints round up)."""
    actions = np.asarray(actions, dtype=np.int64)
    if actions.shape[0] < 2:
        raise ContractViolation("profile needs at least two banks")
    return int(others_bins(actions, grid)[self_index])


def others_bins(actions: np.ndarray, grid: ActionGrid) -> np.ndarray:
    """Vectorized :func:`bin_of_others_average` for every bank at once."""
    actions = np.asarray(actions, dtype=np.int64)
    m = actions.shape[0] - 1
    others = actions.sum() - actions
    step = grid.step
    # exact integer rounding: floor(mean/step + 1/2)
    idx = (2 * others + step * m) // (2 * step * m)
    return np.minimum(idx, len(grid) - 1)


@dataclass
class BeliefState:
    """One bank's accumulated observations.

    ``payoff_sum``/``payoff_count`` are indexed ``[own action, others' bin]``.
    ``forced_tried`` marks cells already targeted by forced exploration, so a
    try that lands in a different bin is not repeated forever.
    """

    payoff_sum: np.ndarray
    payoff_count: np.ndarray
    bin_count: np.ndarray
    days_observed: int = 0
    exploration_remaining: int = 0
    forced_tried: np.ndarray | None = None

    def __post_init__(self):
        if self.forced_tried is None:
            self.forced_tried = np.zeros(self.payoff_count.shape, dtype=bool)

    @classmethod
    def fresh(cls, n_levels: int, exploration_days: int = 0) -> "BeliefState":
        return cls(
            payoff_sum=np.zeros((n_levels, n_levels)),
            payoff_count=np.zeros((n_levels, n_levels), dtype=np.int64),
            bin_count=np.zeros(n_levels, dtype=np.int64),
            exploration_remaining=int(exploration_days),
        )

    @property
    def n_levels(self) -> int:
        return self.bin_count.shape[0]

    def estimate(self, action: int, bin_: int) -> float | None:
        """Mean payoff seen in a cell, or ``None`` if never visited."""
        c = self.payoff_count[action, bin_]
        return None if c == 0 else float(self.payoff_sum[action, bin_] / c)

    def probabilities(self) -> np.ndarray:
        return (1.0 + self.bin_count) / (self.days_observed + self.n_levels)

    def filled_estimates(self) -> np.ndarray:
        """Payoff table with unvisited cells filled by the row mean, else the global mean."""
        count = self.payoff_count
        seen = count > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            est = np.where(seen, self.payoff_sum / np.where(seen, count, 1), 0.0)
        n_seen = seen.sum(axis=1)
        total = count.sum()
        global_mean = self.payoff_sum.sum() / total if total else 0.0
        row_mean = np.where(n_seen > 0, est.sum(axis=1) / np.maximum(n_seen, 1), global_mean)
        return np.where(seen, est, row_mean[:, None])

    def to_dict(self) -> dict:
        return {
            "payoff_sum": self.payoff_sum.tolist(),
            "payoff_count": self.payoff_count.tolist(),
            "bin_count": self.bin_count.tolist(),
            "days_observed": self.days_observed,
            "exploration_remaining": self.exploration_remaining,
            "forced_tried": self.forced_tried.astype(int).tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BeliefState":
        return cls(
            payoff_sum=np.array(d["payoff_sum"], dtype=np.float64),
            payoff_count=np.array(d["payoff_count"], dtype=np.int64),
            bin_count=np.array(d["bin_count"], dtype=np.int64),
            days_observed=int(d["days_observed"]),
            exploration_remaining=int(d["exploration_remaining"]),
            forced_tried=np.array(d["forced_tried"], dtype=bool) if "forced_tried" in d else None,
        )


def update_beliefs(b: BeliefState, own_action: int, observed_bin: int, payoff: float) -> BeliefState:
    """Record one day's observation in place and return the same state."""
    L = b.n_levels
    if not (0 <= own_action < L and 0 <= observed_bin < L):
        raise ContractViolation(f"indices ({own_action}, {observed_bin}) outside 0..{L - 1}")
    b.payoff_sum[own_action, observed_bin] += payoff
    b.payoff_count[own_action, observed_bin] += 1
    b.bin_count[observed_bin] += 1
    b.days_observed += 1
    return b


def estimate_probability(b: BeliefState, bin_: int, n_levels: int | None = None) -> float:
    """Fictitious-play probability of the others' average landing in ``bin_``."""
    L = b.n_levels if n_levels is None else n_levels
    return (1.0 + b.bin_count[bin_]) / (b.days_observed + L)


def expected_payoffs(b: BeliefState) -> np.ndarray:
    return b.filled_estimates() @ b.probabilities()


def choose_action(b: BeliefState, rng: np.random.Generator, grid: ActionGrid | None = None) -> int:
    """Pick tomorrow's action index.

    Random while the exploration budget lasts. Afterwards, any action never
    sampled (nor already tried) against the most frequently seen bin is
    tried first: least-used action overall, then lowest level. Otherwise
    maximize expected payoff under the current bin probabilities; ties go
    to the lower level.
    """
    if b.exploration_remaining > 0:
        b.exploration_remaining -= 1
        return int(rng.integers(0, b.n_levels))
    modal = int(np.argmax(b.bin_count))
    untried = np.flatnonzero((b.payoff_count[:, modal] == 0) & ~b.forced_tried[:, modal])
    if untried.size:
        usage = b.payoff_count[untried].sum(axis=1)
        a = int(untried[np.argmin(usage)])
        b.forced_tried[a, modal] = True
        return a
    return int(np.argmax(expected_payoffs(b)))
