"""
Command-Line Front End
======================

Usage:
    python -m entropy_bounds entropy --dist P.json --loss log
    python -m entropy_bounds bounds --p P.json --q Q.json --loss zero-one --family tv --family chi2
    python -m entropy_bounds bernoulli-grid --density 99 --out grid.csv
    python -m entropy_bounds experiment --config erm.json --seed 0 --out results/erm

Reports go to stdout (JSON or JSON lines); logs go to stderr.
Exit codes: 0 success, 1 internal self-check failure, 2 usage or input
error, 3 numeric non-convergence.
"""

import argparse
import json
import logging
import sys
import traceback
import uuid
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from pydantic import ValidationError

from entropy_bounds.bounds.baselines import baseline_bounds
from entropy_bounds.bounds.comparison import bernoulli_comparison_grid
from entropy_bounds.bounds.continuity import (
    BASELINE_TARGET_BY_KIND,
    BOUND_FAMILIES,
    entropy_difference_report,
    evaluate_bounds,
    gaussian_variance_kl_bound,
)
from entropy_bounds.core.config import settings
from entropy_bounds.core.exceptions import EntropyBoundsException, ValidationException
from entropy_bounds.core.logging import setup_logging
from entropy_bounds.distributions.discrete import DiscreteDist
from entropy_bounds.divergence.transport import wasserstein1_discrete
from entropy_bounds.entropy.generalized import generalized_entropy
from entropy_bounds.experiments.config import EXPERIMENT_NAMES, parse_experiment_config
from entropy_bounds.experiments.export import FLOAT_FORMAT, write_results
from entropy_bounds.experiments.registry import run_experiment
from entropy_bounds.experiments.runner import TrialRunner
from entropy_bounds.losses.metrics import default_metric
from entropy_bounds.schemas import EntropyOutput, parse_distribution, parse_loss

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
INTERNAL_ERROR = 1


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ValidationException(f"File not found: {path}") from exc


def _loss_argument(value: str):
    """A kind name or a path to a loss document."""
    return parse_loss(_read_json(value) if value.endswith(".json") or Path(value).is_file() else value)


def _emit(payload: Any) -> None:
    sys.stdout.write(payload if isinstance(payload, str) else json.dumps(payload, allow_nan=True))
    sys.stdout.write("\n")


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_entropy(args: argparse.Namespace) -> int:
    P = parse_distribution(_read_json(args.dist))
    result = generalized_entropy(P, _loss_argument(args.loss))
    _emit(EntropyOutput.from_result(result, P).model_dump_json())
    return 0


def cmd_bounds(args: argparse.Namespace) -> int:
    P = parse_distribution(_read_json(args.p))
    Q = parse_distribution(_read_json(args.q))
    spec = _loss_argument(args.loss)
    metric = _read_json(args.metric) if args.metric else None

    if isinstance(P, DiscreteDist) and isinstance(Q, DiscreteDist):
        reports = evaluate_bounds(P, Q, spec, families=args.family or None, metric=metric)
        if args.plan_out:
            d = default_metric(P, spec) if metric is None else metric
            plan = wasserstein1_discrete(P, Q, d)
            plan.records().to_csv(args.plan_out, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    else:
        # scalar densities: the Gaussian variance bound and the density baselines
        reports = [entropy_difference_report(P, Q, spec)]
        if spec.kind == "quadratic":
            reports.append(gaussian_variance_kl_bound(P, Q))
        if not args.family or "baseline" in args.family:
            reports.extend(baseline_bounds(P, Q, BASELINE_TARGET_BY_KIND.get(spec.kind), args.c1, args.c2))

    for report in reports:
        _emit(report.to_json())
    return 0


def cmd_bernoulli_grid(args: argparse.Namespace) -> int:
    frame = bernoulli_comparison_grid(args.density)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(args.out, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info("wrote %d grid rows to %s", len(frame), args.out)
    else:
        sys.stdout.write(frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"))
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    data = _read_json(args.config)
    name = data.get("experiment") if isinstance(data, dict) else None
    if name not in EXPERIMENT_NAMES:
        raise ValidationException(f"Unknown experiment {name!r}", details={"valid": list(EXPERIMENT_NAMES)})
    config = parse_experiment_config(data).overridden(seed=args.seed, trials=args.trials, epsilon=args.epsilon)
    result = run_experiment(config, TrialRunner(max_workers=args.workers))
    out_dir = Path(args.out or f"results/{name}")
    manifest = write_results(result, config, out_dir)
    _emit({"experiment": name, "out": str(out_dir), "files": manifest.files})
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "entropy": cmd_entropy,
    "bounds": cmd_bounds,
    "bernoulli-grid": cmd_bernoulli_grid,
    "experiment": cmd_experiment,
}


# =============================================================================
# PARSER AND ERROR MAPPING
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entropy_bounds", description="Generalized entropy and its continuity bounds")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="Generalized entropy and optimal action of one distribution")
    p.add_argument("--dist", required=True, help="Distribution JSON file")
    p.add_argument("--loss", required=True, help="Loss kind or loss JSON file")

    p = sub.add_parser("bounds", help="Every applicable entropy-difference bound for a pair")
    p.add_argument("--p", required=True, help="Distribution JSON file for P")
    p.add_argument("--q", required=True, help="Distribution JSON file for Q")
    p.add_argument("--loss", required=True, help="Loss kind or loss JSON file")
    p.add_argument("--family", action="append", choices=BOUND_FAMILIES, help="Restrict to a bound family (repeatable)")
    p.add_argument("--metric", help="JSON metric matrix for the Wasserstein bound")
    p.add_argument("--plan-out", dest="plan_out", help="CSV path for the optimal transport plan")
    p.add_argument("--c1", type=float, help="Regularity constant c1 for the W2 baseline")
    p.add_argument("--c2", type=float, help="Regularity constant c2 for the W2 baseline")

    p = sub.add_parser("bernoulli-grid", help="Log-loss TV bound against the coupling baseline on Bernoulli pairs")
    p.add_argument("--density", type=int, default=99)
    p.add_argument("--out", help="CSV path (stdout when omitted)")

    p = sub.add_parser("experiment", help="Run a configured experiment and write its records")
    p.add_argument("--config", required=True, help="Experiment config JSON file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--workers", type=int, default=None, help="Trial thread pool size")
    p.add_argument("--out", help="Output directory (default results/<experiment>)")
    return parser


def _report_error(message: str, details: Optional[Dict[str, Any]], run_id: str) -> None:
    sys.stderr.write(json.dumps({"error": message, "details": details or {}, "run_id": run_id}, default=str) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and map failures to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging("DEBUG" if args.verbose else settings.LOG_LEVEL)
    run_id = str(uuid.uuid4())

    try:
        return COMMANDS[args.command](args)
    except EntropyBoundsException as exc:
        logger.warning("%s: %s", type(exc).__name__, exc.message)
        _report_error(exc.message, exc.details, run_id)
        return exc.exit_code
    except ValidationError as exc:
        _report_error("Invalid input document", {"errors": exc.errors(include_url=False)}, run_id)
        return USAGE_ERROR
    except json.JSONDecodeError as exc:
        _report_error(f"Malformed JSON: {exc.msg}", {"line": exc.lineno, "column": exc.colno}, run_id)
        return USAGE_ERROR
    except Exception as exc:
        logger.error("Unhandled exception: %s\n%s", exc, traceback.format_exc())
        _report_error("Internal error", {"type": type(exc).__name__}, run_id)
        return INTERNAL_ERROR
