"""Learning banks in a real-time gross settlement system.

Banks choose how much intraday liquidity to commit each day, settle a
Poisson stream of unit payments under a FIFO rule, and learn from their own
realized costs until the profile of choices stops changing.
"""
__version__ = "0.1.0"

from .errors import ContractViolation, InvalidConfiguration
from .experiments import (best_response_check, compare_strategies, delay_curve, demand_curve,
                          run_fixed_profile, run_size_study, run_sweep, scenario_deltas)
from .learning import (ActionGrid, BeliefState, bin_of_others_average, choose_action,
                       estimate_probability, update_beliefs)
from .play import PlayConfig, PlayResult, has_converged, run_play
from .settlement import (CostParams, DayOutcome, Instructions, PaymentInstruction, ScenarioConfig,
                         run_day, sample_instructions, select_incident_victim)

__all__ = [
    "ActionGrid", "BeliefState", "ContractViolation", "CostParams", "DayOutcome", "Instructions",
    "InvalidConfiguration", "PaymentInstruction", "PlayConfig", "PlayResult", "ScenarioConfig",
    "best_response_check", "bin_of_others_average", "choose_action", "compare_strategies",
    "delay_curve", "demand_curve", "estimate_probability", "has_converged", "run_day",
    "run_fixed_profile", "run_play", "run_size_study", "run_sweep", "sample_instructions",
    "scenario_deltas", "select_incident_victim", "update_beliefs",
]
