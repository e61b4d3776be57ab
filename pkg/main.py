#!/usr/bin/env python3
"""
Adiabatic Accessibility Toolkit - Main Application
Counts microcanonical shells, extrapolates entropy densities and decides
which macrostates can be reached from which by unital maps
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import yaml
from pydantic import ValidationError

from accessibility.verdicts import VerdictConfig, decide
from channels.random_maps import majorized_pair
from channels.t_transform import apply_map, t_transform_chain
from channels.vectors import pad_pair
from config.defaults import get_defaults
from config.scenario_loader import load_scenario
from eval.utils import timestamp_dir
from models.errors import ComputationFailure, EmptyShellError, NotMajorizedError, ValidationFailure
from models.macrostate import Macrostate, ShellConvention
from models.schedule import DeltaSchedule
from regularization.bounds import geometric_scales
from regularization.sequence import DOWNWARD, entropy_density_sequence
from spectra.families import build_model
from storage.run_store import SEQUENCE_COLUMNS, RunStore, render_csv, sequence_rows, verdict_summary

BASES = ["theorem1", "theorem2", "lemma4", "finite-scale"]


def progress(message: str, quiet: bool = False, stream=None):
    if not quiet:
        print(message, file=stream or sys.stdout)


def parse_scales(text: str) -> List[int]:
    """Comma list such as 256,512,1024 or a geometric grid start:ratio:count"""
    try:
        if ":" in text:
            start, ratio, count = (int(part) for part in text.split(":"))
            return [start * ratio ** k for k in range(count)]
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValidationFailure(f"cannot parse scales '{text}'")


def parse_macrostate(text: str) -> Macrostate:
    try:
        return Macrostate(densities=tuple(part.strip() for part in text.split(",")))
    except (ValueError, ValidationError) as e:
        raise ValidationFailure(f"cannot parse macrostate '{text}': {e}")


def parse_schedule(text: str):
    """'downward', 'power:c:alpha' or 'constant:delta'"""
    if text == DOWNWARD:
        return DOWNWARD
    kind, _, rest = text.partition(":")
    try:
        if kind == "power":
            coefficient, exponent = rest.split(":")
            return DeltaSchedule.power(coefficient, exponent)
        if kind == "constant":
            return DeltaSchedule.constant(rest)
    except (ValueError, ValidationError) as e:
        raise ValidationFailure(f"cannot parse schedule '{text}': {e}")
    raise ValidationFailure(f"unknown schedule '{text}'; use downward, power:c:alpha or constant:delta")


def parse_vector(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise ValidationFailure(f"cannot parse probability vector '{text}'")


def run_scenario(
    path: str,
    out: Optional[str] = None,
    seed: Optional[int] = None,
    convention: Optional[str] = None,
    scales: Optional[List[int]] = None,
    quiet: bool = False,
) -> Path:
    """Write sequences, verdicts and a manifest for one scenario file"""
    scenario = load_scenario(path)
    updates = {}
    if seed is not None:
        updates["seed"] = seed
    if convention is not None:
        updates["convention"] = ShellConvention.model_validate(convention)
    if scales is not None:
        updates["scales"] = scales
    if updates:
        try:
            scenario = scenario.model_validate({**scenario.model_dump(), **updates})
        except ValidationError as e:
            raise ValidationFailure(str(e))

    model = build_model(scenario.model)
    output_dir = out or scenario.output_dir or str(Path("runs") / timestamp_dir())
    tolerances = scenario.tolerances
    store = RunStore(output_dir, {
        "scenario": scenario.name,
        "seed": scenario.seed,
        "convention": scenario.convention.mode,
        "map_tolerance": tolerances.map,
        "witness_tolerance": tolerances.witness,
        "normalization_tolerance": tolerances.normalization,
    })

    progress(f"=== Scenario {scenario.name} ===", quiet)
    progress(f"Model: {model.name}  Scales: {scenario.scales}", quiet)
    progress(f"Output: {output_dir}", quiet)

    sequences, skipped = [], []
    for state in scenario.macrostates:
        for schedule in [DOWNWARD] + scenario.schedules:
            schedule_id = schedule if isinstance(schedule, str) else schedule.id
            try:
                seq = entropy_density_sequence(model, state, schedule, scenario.scales, scenario.convention)
            except EmptyShellError as e:
                skipped.append({"macrostate": state.label, "schedule_id": schedule_id, "reason": str(e)})
                continue
            store.write_sequence(seq)
            sequences.append({
                "macrostate": state.label,
                "schedule_id": schedule_id,
                "last_density": format(seq.densities[-1], ".12g"),
                "dropped_scales": list(seq.dropped_scales),
            })
    if not sequences:
        raise EmptyShellError("every shell in the scenario is empty on the tested scales")
    progress(f"Sequences written: {len(sequences)} (skipped {len(skipped)})", quiet)

    config = VerdictConfig.from_scenario(scenario)
    decisions = []
    for pair in scenario.ordered_pairs():
        source, target = scenario.macrostate(pair.source), scenario.macrostate(pair.target)
        schedule = scenario.schedule(pair.schedule) if pair.schedule else None
        schedule_prime = scenario.schedule(pair.schedule_prime) if pair.schedule_prime else None
        for basis in scenario.bases:
            verdict = decide(model, source, target, basis, config, schedule, schedule_prime)
            store.write_verdict(verdict)
            decisions.append({
                "source": pair.source,
                "target": pair.target,
                "basis": basis,
                "decision": verdict.decision,
                "branch": verdict.branch,
            })
            progress(f"  {pair.source} -> {pair.target} [{basis}]: {verdict.decision}", quiet)

    store.write_manifest({
        "scenario": scenario.name,
        "version": scenario.version,
        "seed": scenario.seed,
        "model": scenario.model.model_dump(mode="json"),
        "scales": scenario.scales,
        "convention": scenario.convention.describe(),
        "margins": scenario.margins.model_dump(mode="json"),
        "tolerances": tolerances.model_dump(mode="json"),
        "schedule_family": [schedule.model_dump(mode="json") for schedule in scenario.schedules],
        "tail_fraction": scenario.margins.tail_fraction,
        "convexity": "unchecked",
        "sequences": sequences,
        "skipped_sequences": skipped,
        "decisions": decisions,
    })
    progress(f"\nResults saved to: {output_dir}", quiet)
    return Path(output_dir)


def sweep_entropy(args) -> int:
    model = build_model(args.model)
    state = parse_macrostate(args.macrostate)
    schedule = parse_schedule(args.schedule)
    scales = parse_scales(args.scales) if args.scales else geometric_scales()
    convention = ShellConvention.model_validate(args.convention or get_defaults()["convention"])
    progress(f"Sweeping {state.describe()} on {model.name} over {len(scales)} scales", args.quiet, sys.stderr)
    seq = entropy_density_sequence(model, state, schedule, scales, convention)
    sys.stdout.write(render_csv(SEQUENCE_COLUMNS, sequence_rows(seq)))
    if seq.dropped_scales:
        progress(f"Empty shells at X = {list(seq.dropped_scales)}", args.quiet, sys.stderr)
    return 0


def verdict_command(args) -> int:
    model = build_model(args.model)
    source, target = parse_macrostate(args.source), parse_macrostate(args.target)
    schedules = [parse_schedule(text) for text in args.schedules.split(";")]
    if any(isinstance(schedule, str) for schedule in schedules):
        raise ValidationFailure("verdict schedules must be explicit delta schedules")
    scales = parse_scales(args.scales) if args.scales else geometric_scales()
    overrides = {}
    if args.convention:
        overrides["convention"] = ShellConvention.model_validate(args.convention)
    if args.min_scale:
        overrides["min_scale"] = args.min_scale
    config = VerdictConfig.with_defaults(scales, schedules, **overrides)
    bases = BASES if args.basis == "all" else [args.basis]
    reports = []
    for basis in bases:
        progress(f"Deciding {source.describe()} -> {target.describe()} under {basis}...", args.quiet, sys.stderr)
        schedule_prime = schedules[1] if len(schedules) > 1 else None
        reports.append(verdict_summary(decide(model, source, target, basis, config, schedules[0], schedule_prime)))
    print(json.dumps(reports if len(reports) > 1 else reports[0], indent=2, sort_keys=True))
    return 0


def witness_command(args) -> int:
    defaults = get_defaults()
    if args.random:
        rng = np.random.default_rng(args.seed)
        p, q = majorized_pair(args.random, rng)
    elif args.p and args.q:
        p, q = parse_vector(args.p), parse_vector(args.q)
    else:
        raise ValidationFailure("witness needs --p and --q, or --random N")
    try:
        T = t_transform_chain(p, q)
    except NotMajorizedError as e:
        print(f"No witness: {e}", file=sys.stderr)
        return 2
    p_padded, q_padded = pad_pair(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
    image = apply_map(T, p_padded)
    print(json.dumps({
        "size": T.size,
        "transforms": [step.as_list() for step in T.transforms],
        "input_order": list(T.input_order),
        "output_order": list(T.output_order),
        "image": [float(format(v, ".12g")) for v in image],
        "l1_error": float(format(float(np.abs(image - q_padded).sum()), ".12g")),
        "witness_tolerance": defaults["witness_tolerance"],
        "seed": args.seed,
    }, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Adiabatic accessibility between microcanonical macrostates")
    parser.add_argument("--quiet", action="store_true", help="Suppress progress output")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    def common(sub, with_seed=True):
        sub.add_argument("--convention", choices=["mult", "add"], help="Shell window convention")
        sub.add_argument("--scales", help="Comma list or start:ratio:count grid")
        if with_seed:
            sub.add_argument("--seed", type=int, help="Seed recorded in outputs")
        sub.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                         help="Suppress progress output")

    run_parser = subparsers.add_parser("run", help="Run a scenario file")
    run_parser.add_argument("scenario", help="Path to a YAML scenario")
    run_parser.add_argument("--out", help="Output directory (default: runs/<timestamp>)")
    common(run_parser)

    sweep_parser = subparsers.add_parser("sweep", help="Stream (X, D, s_X) rows as CSV")
    sweep_parser.add_argument("--model", default="paramagnet", help="Model family name")
    sweep_parser.add_argument("--macrostate", required=True, help="Comma-separated densities")
    sweep_parser.add_argument("--schedule", default=DOWNWARD, help="downward, power:c:alpha or constant:delta")
    common(sweep_parser, with_seed=False)

    verdict_parser = subparsers.add_parser("verdict", help="Decide one ordered macrostate pair")
    verdict_parser.add_argument("--model", default="paramagnet", help="Model family name")
    verdict_parser.add_argument("--source", required=True, help="Source densities")
    verdict_parser.add_argument("--target", required=True, help="Target densities")
    verdict_parser.add_argument("--basis", choices=BASES + ["all"], default="theorem1")
    verdict_parser.add_argument("--schedules", default="power:1:1/3",
                                help="Semicolon-separated schedule family")
    verdict_parser.add_argument("--min-scale", type=int, help="Smallest scale that must verify")
    common(verdict_parser, with_seed=False)

    witness_parser = subparsers.add_parser("witness", help="Build a T-transform chain from p to q")
    witness_parser.add_argument("--p", help="Comma-separated source vector")
    witness_parser.add_argument("--q", help="Comma-separated target vector")
    witness_parser.add_argument("--random", type=int, help="Draw a random majorized pair of this length")
    witness_parser.add_argument("--seed", type=int, default=0, help="Seed for --random")
    witness_parser.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 0

    try:
        if args.command == "run":
            run_scenario(
                args.scenario,
                out=args.out,
                seed=args.seed,
                convention=args.convention,
                scales=parse_scales(args.scales) if args.scales else None,
                quiet=args.quiet,
            )
            return 0
        if args.command == "sweep":
            return sweep_entropy(args)
        if args.command == "verdict":
            return verdict_command(args)
        return witness_command(args)
    except (ValidationFailure, ValidationError, yaml.YAMLError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except ComputationFailure as e:
        print(f"Computation failed: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
