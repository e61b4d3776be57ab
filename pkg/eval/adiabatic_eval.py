#!/usr/bin/env python3
"""
Adiabatic Accessibility Evaluation Suite
Acceptance checks for counting, witnesses and verdicts
"""

import argparse
from pathlib import Path
import sys
sys.path.append(str(Path(__file__).parent.parent))

from eval.accessibility_eval import run_accessibility_eval
from eval.convergence_eval import run_convergence_eval
from eval.scoring import run_scoring
from eval.utils import timestamp_dir
from eval.witness_eval import run_witness_eval


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Adiabatic Accessibility Evaluation Suite")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    default_dir = f"eval/runs/{timestamp_dir()}"
    for name, help_text in [
        ("convergence", "Entropy convergence, upper/lower estimates and the delta0 schedule"),
        ("witness", "Flat majorization, T-transform witnesses and the difference identity"),
        ("accessibility", "Impossibility bound, delta' construction and verdicts"),
        ("all", "Run every evaluation and score it"),
    ]:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--output-dir", default=default_dir, help="Output directory for results")
        if name in ("witness", "accessibility", "all"):
            sub.add_argument("--seed", type=int, default=0, help="Seed for random pairs")

    scoring_parser = subparsers.add_parser("score", help="Run scoring and generate report")
    scoring_parser.add_argument("--results-dir", required=True, help="Directory containing evaluation results")
    scoring_parser.add_argument("--config", default="eval/scoring.yaml", help="Path to scoring configuration file")

    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 0

    if hasattr(args, 'output_dir'):
        Path(args.output_dir).mkdir(parents=True, exist_ok=True)

    if args.command == "convergence":
        run_convergence_eval(args.output_dir)
    elif args.command == "witness":
        run_witness_eval(args.output_dir, seed=args.seed)
    elif args.command == "accessibility":
        run_accessibility_eval(args.output_dir, seed=args.seed)
    elif args.command == "score":
        results = run_scoring(
            results_dir=args.results_dir,
            config_file=args.config,
            output_file=f"{args.results_dir}/final_scoring_results.json"
        )
        return 0 if results["status"] == "PASS" else 1
    elif args.command == "all":
        print("Running all evaluations...")
        print("\n1. Convergence Evaluation")
        run_convergence_eval(args.output_dir)
        print("\n2. Witness Evaluation")
        run_witness_eval(args.output_dir, seed=args.seed)
        print("\n3. Accessibility Evaluation")
        run_accessibility_eval(args.output_dir, seed=args.seed)
        print("\n4. Scoring and Final Report")
        results = run_scoring(
            results_dir=args.output_dir,
            config_file=str(Path(__file__).parent / "scoring.yaml"),
            output_file=f"{args.output_dir}/final_scoring_results.json"
        )
        print("\n✅ All evaluations completed!")
        return 0 if results["status"] == "PASS" else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
