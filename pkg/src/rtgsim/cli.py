"""Command-line entry point: ``rtgsim <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, replace
from datetime import datetime, timezone

import numpy as np

from . import seeding
from .config import Settings, parse_config, settings_to_dict
from .errors import InvalidConfiguration
from .experiments import (best_response_check, compare_strategies, delay_curve, demand_curve,
                          run_fixed_profile, run_size_study, run_sweep, scenario_deltas)
from .output import Table, emit_results
from .play import run_play
from .settlement import (CostParams, day_trace, run_day, sample_instructions,
                         select_incident_victim)

log = logging.getLogger("rtgsim")

COMMANDS = ("sweep", "play", "fixed", "size-study", "nash-check", "day-trace")

PLAY_COLUMNS = ["kappa", "play_index", "seed", "converged", "days_run", "total_liquidity",
                "mean_payoff", "mean_delay", "final_profile"]
CURVE_COLUMNS = ["kappa", "mean_liquidity", "min_liquidity", "max_liquidity", "netting_ratio",
                 "mean_cost", "mean_delay", "n_plays", "n_unconverged"]


def _play_rows(sweep):
    rows, traj = [], []
    for point in sweep.points:
        for s in point.plays:
            row = asdict(s)
            rows.append(row)
            traj.extend({"kappa": s.kappa, "play_index": s.play_index, "day": d, "total_liquidity": v}
                        for d, v in enumerate(s.liquidity_trajectory))
    return rows, traj


def _sweep_tables(sweep, prefix=""):
    rows, traj = _play_rows(sweep)
    return {
        f"{prefix}plays.csv": Table(PLAY_COLUMNS, rows),
        f"{prefix}demand_curve.csv": Table(CURVE_COLUMNS, demand_curve(sweep)),
        f"{prefix}trajectories.csv": Table(["kappa", "play_index", "day", "total_liquidity"], traj),
    }


def cmd_sweep(s: Settings):
    base_cfg = s.play_config()
    sweep = run_sweep(base_cfg, s.kappas, s.plays_per_point, s.eval_days)
    tables = _sweep_tables(sweep)
    docs = {"sweep.json": sweep.to_dict()}
    if s.scenario == "base":
        if any(p.converged_plays for p in sweep.points if p.kappa == max(sweep.kappas)):
            comp = compare_strategies(sweep, base_cfg, s.compare_days)
            tables["comparison.csv"] = Table(list(comp[0]), comp)
        ladder = delay_curve(s.grid().levels, s.n_banks, s.ladder_days, s.costs(), s.seed)
        tables["delay_curve.csv"] = Table(list(ladder[0]), ladder)
    else:
        base = run_sweep(s.play_config("base"), s.kappas, s.plays_per_point, s.eval_days)
        tables.update(_sweep_tables(base, prefix="base_"))
        deltas = scenario_deltas(base, sweep)
        tables["scenario_deltas.csv"] = Table(list(deltas[0]), deltas)
        docs["base_sweep.json"] = base.to_dict()
    return tables, docs


def cmd_play(s: Settings):
    r = run_play(s.play_config())
    totals = [{"day": d, "total_liquidity": int(r.profiles[d].sum()),
               "mean_payoff": float(r.payoff_trajectory[d].mean()),
               "mean_delay": float(r.mean_delay_trajectory[d])} for d in range(r.days_run)]
    banks = [{"day": d, "bank": i, "action": int(r.profiles[d, i]),
              "payoff": float(r.payoff_trajectory[d, i])}
             for d in range(r.days_run) for i in range(s.n_banks)]
    doc = {"converged": r.converged, "days_run": r.days_run,
           "final_profile": r.final_profile.tolist(), "total_liquidity": r.total_liquidity}
    return {
        "trajectory.csv": Table(["day", "total_liquidity", "mean_payoff", "mean_delay"], totals),
        "bank_trajectory.csv": Table(["day", "bank", "action", "payoff"], banks),
    }, {"play.json": doc}


def cmd_fixed(s: Settings):
    profile = list(s.fixed_profile) or [0] * s.n_banks
    r = run_fixed_profile(profile, s.fixed_days, s.costs(), s.scenario_config(), s.seed)
    rows = [{"bank": i, "action": profile[i], "mean_payoff": float(r.mean_payoff[i]),
             "payoff_stderr": float(r.payoff_stderr[i]), "mean_delay": float(r.mean_delay[i])}
            for i in range(len(profile))]
    doc = {"profile": profile, "days": r.days, "mean_cost": r.mean_cost,
           "total_delay": r.total_delay, "kappa": s.kappa, "scenario": s.scenario}
    return {"fixed.csv": Table(list(rows[0]), rows)}, {"fixed.json": doc}


def cmd_size_study(s: Settings):
    study = run_size_study(s.sizes, s.play_config(), s.kappas, s.plays_per_point,
                           eval_days=s.eval_days)
    smallest = study[min(study)]
    rows, plays = [], []
    for n, sweep in study.items():
        for row in demand_curve(sweep):
            ref = smallest.point(row["kappa"]).mean_liquidity
            rows.append({"n_banks": n, **row,
                         "ratio_to_smallest": row["mean_liquidity"] / ref if ref else float("nan")})
        for r in _play_rows(sweep)[0]:
            plays.append({"n_banks": n, **r})
    return {
        "size_study.csv": Table(["n_banks", *CURVE_COLUMNS, "ratio_to_smallest"], rows),
        "size_plays.csv": Table(["n_banks", *PLAY_COLUMNS], plays),
    }, {"size_study.json": {str(n): sw.to_dict() for n, sw in study.items()}}


def cmd_nash_check(s: Settings):
    cfg = replace(s.play_config())
    if s.fixed_profile:
        profile, origin = list(s.fixed_profile), "config"
    else:
        r = run_play(cfg)
        profile, origin = r.final_profile.tolist(), ("converged play" if r.converged else "unconverged play")
    rep = best_response_check(profile, cfg, s.nash_samples, s.nash_epsilon)
    rows = [{"bank": i, "level": lv, "payoff": float(rep.payoff[i, l]), "gain": float(rep.gain[i, l]),
             "gain_stderr": float(rep.gain_stderr[i, l])}
            for i in range(len(profile)) for l, lv in enumerate(rep.levels)]
    doc = {"profile": profile, "profile_source": origin, "max_gain": rep.max_gain,
           "epsilon": rep.epsilon, "z": rep.z, "samples": rep.samples,
           "is_epsilon_nash": rep.is_epsilon_nash, "best_responses": rep.best_responses()}
    return {"nash.csv": Table(["bank", "level", "payoff", "gain", "gain_stderr"], rows)}, {"nash.json": doc}


def trace_day(s: Settings):
    """The small, hand-checkable day used by ``day-trace``."""
    n, T = s.trace_n_banks, s.trace_day_length
    costs = CostParams(s.lam, s.kappa, T)
    scenario = s.scenario_config()
    instructions = sample_instructions(seeding.substream(s.seed, 0, seeding.INSTRUCTIONS), n, T)
    victim = None
    if scenario.kind == "incident":
        victim = select_incident_victim(seeding.substream(s.seed, 0, seeding.VICTIM), n)
    out = run_day(np.array(s.trace_actions), instructions, costs, scenario, victim)
    records = day_trace(instructions, out, victim, scenario.incident_fraction * T)
    return instructions, out, records


def cmd_day_trace(s: Settings):
    import json
    _, out, records = trace_day(s)
    text = "".join(json.dumps(rec) + "\n" for rec in records)
    rows = [{"bank": i, "liquidity": int(s.trace_actions[i]), "sent": int(out.sent_count[i]),
             "settled": int(out.settled_count[i]), "received": int(out.received_count[i]),
             "end_balance": int(out.end_balance[i]), "delay_fraction": float(out.total_delay_fraction[i]),
             "payoff": float(out.payoff[i])} for i in range(s.trace_n_banks)]
    return {"day.csv": Table(list(rows[0]), rows)}, {}, {"trace.jsonl": text}


HANDLERS = {
    "sweep": cmd_sweep, "play": cmd_play, "fixed": cmd_fixed, "size-study": cmd_size_study,
    "nash-check": cmd_nash_check, "day-trace": cmd_day_trace,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rtgsim", description="Adaptive-bank RTGS simulator.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON settings file (flat object)")
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--scenario", choices=("base", "throughput", "incident"))
    p.add_argument("--plays", type=int, help="plays per kappa value")
    p.add_argument("--paper-scale", action="store_true", help="30 plays per kappa value")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = datetime.now(timezone.utc)
    try:
        overrides = {k: v for k, v in (("seed", args.seed), ("scenario", args.scenario),
                                        ("plays_per_point", args.plays)) if v is not None}
        settings = parse_config(args.config, overrides)
        if args.paper_scale:
            settings = settings.full_scale()
        produced = HANDLERS[args.command](settings)
        tables, docs = produced[0], produced[1]
        texts = produced[2] if len(produced) > 2 else None
        emit_results(args.out, tables, docs, texts, manifest_extra={
            "command": args.command, "seed": settings.seed, "config": settings_to_dict(settings),
        }, started=started)
    except InvalidConfiguration as e:
        print(f"rtgsim: configuration error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"rtgsim: I/O error: {e}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
