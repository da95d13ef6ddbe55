"""Command-line front end: every computation as a CSV/JSON emitting subcommand.

Examples::

    postselect optimal-angle --theta 0:pi/2:91 --lambda 0:0.5:51
    postselect tradeoff --theta pi/8,pi/4,3*pi/8 --steps 51 --format json
    postselect simulate --theta pi/8 --lambda 0.3 --trials 1000000 --seed 7

Numeric arguments accept plain numbers or arithmetic in ``pi`` (``3*pi/8``).
Sweeps are written ``min:max:steps`` (inclusive), or ``min:max`` to use
``--steps``; a comma list gives explicit values. Angles are radians unless
``--degrees`` is passed; output is always radians.

Exit codes: 0 success, 1 I/O failure, 2 usage or domain error,
3 simulation disagrees with the analytic risk (|z| > 4).

CSV columns per subcommand (fixed order):

    risk-surface    theta,lambda,phi,risk,is_optimal_phi
    optimal-angle   theta,lambda,phi_star,branch
    probabilities   theta,lambda,p_correct,p_error,p_reject,p_accept
    tradeoff        theta,lambda,p_reject,p_error
    regions         theta,lambda,phi,decision_e0,decision_e1,decision_e2          (zero-one)
                    theta,lambda_e,lambda_r,phi,decision_e0,decision_e1,decision_e2 (error-reject)
    simulate        theta,lambda_e,lambda_r,phi,trials,seed,empirical_risk,std_error,
                    analytic_risk,z,freq_correct,freq_error,freq_reject
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .decision import LossMatrix
from .errors import DomainError, UnreachableError
from .risk import (
    analytic_risk,
    decision_region_map,
    generalized_risk,
    grid_search_generalized_angle,
    is_helstrom_branch,
    optimal_angle,
)
from .simulate import Z_FLAG, GameConfig, simulate_game, z_score
from .tradeoff import outcome_probabilities, tradeoff_curve

SCHEMA_VERSION = 1
DEFAULT_STEPS = 51

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_VALIDATION = 0, 1, 2, 3

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def parse_number(text: str) -> float:
    """Evaluate a number or a small arithmetic expression in ``pi``."""

    def ev(node: ast.AST) -> float:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            value = ev(node.operand)
            return -value if isinstance(node.op, ast.USub) else value
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"not a number: {text!r}")

    try:
        value = ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


@dataclass(frozen=True)
class SweepSpec:
    """Inclusive, evenly spaced sweep of one axis."""

    axis: str
    min: float
    max: float
    steps: int

    def __post_init__(self) -> None:
        if self.steps < 2:
            raise ValueError(f"{self.axis}: a sweep needs at least 2 steps")
        if not self.min < self.max:
            raise ValueError(f"{self.axis}: sweep needs min < max")

    def values(self) -> list[float]:
        # dividing last keeps grid points like 0.3 = 15/50 correctly rounded
        n = self.steps - 1
        return [self.min + (self.max - self.min) * k / n for k in range(self.steps)]


def parse_axis(axis: str, text: str, default_steps: int) -> list[float]:
    """Turn ``a``, ``a,b,c``, ``a:b`` or ``a:b:n`` into a list of values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"{axis}: sweep must be min:max or min:max:steps")
        steps = int(parts[2]) if len(parts) == 3 else default_steps
        return SweepSpec(axis, parse_number(parts[0]), parse_number(parts[1]), steps).values()
    return [parse_number(p) for p in text.split(",") if p.strip()]


def _fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def render(
    fmt: str,
    command: str,
    params: dict[str, Any],
    columns: Sequence[str],
    rows: Sequence[Sequence[Any]],
) -> str:
    if fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        return "\n".join(lines) + "\n"
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": _jsonable(params),
        "columns": list(columns),
        "rows": [dict(zip(columns, _jsonable(list(row)))) for row in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def emit(text: str, destination: str | None) -> None:
    """Write to stdout, or atomically replace ``destination``."""
    if destination in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    target = Path(destination)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


@dataclass
class Emitted:
    """Result of a subcommand before rendering."""

    columns: list[str]
    rows: list[tuple]
    params: dict[str, Any]
    exit_code: int = EXIT_OK


def _angles(args, name: str, default: str | None = None) -> list[float]:
    text = getattr(args, name)
    if text is None:
        if default is None:
            raise ValueError(f"--{name} is required")
        return parse_axis(name, default, args.steps)
    values = parse_axis(name, text, args.steps)
    if args.degrees:
        values = [math.radians(v) for v in values]
    return values


def _costs(args, name: str, default: str | None = None) -> list[float]:
    text = getattr(args, name)
    if text is None:
        if default is None:
            raise ValueError(f"--{name.replace('_', '-')} is required")
        text = default
    return parse_axis(name, text, args.steps)


def _single(values: list[float], flag: str) -> float:
    if len(values) != 1:
        raise ValueError(f"{flag} takes a single value here")
    return values[0]


def cmd_risk_surface(args) -> Emitted:
    theta = _single(_angles(args, "theta"), "--theta")
    lambdas = _costs(args, "lambda_", "0:0.5")
    phis = np.array(_angles(args, "phi", "0:pi/2"))
    rows = []
    for lam in lambdas:
        risks = np.atleast_1d(analytic_risk(theta, lam, phis))
        star = optimal_angle(theta, lam)
        nearest = int(np.argmin(np.abs(phis - star)))
        for k, (phi, risk) in enumerate(zip(phis, risks)):
            rows.append((theta, lam, float(phi), float(risk), k == nearest))
    params = {"theta": theta, "lambda": lambdas, "phi": phis.tolist()}
    return Emitted(["theta", "lambda", "phi", "risk", "is_optimal_phi"], rows, params)


def cmd_optimal_angle(args) -> Emitted:
    thetas = _angles(args, "theta", "0:pi/2")
    lambdas = _costs(args, "lambda_", "0:0.5")
    rows = []
    for theta in thetas:
        for lam in lambdas:
            branch = "helstrom" if is_helstrom_branch(theta, lam) else "interior"
            rows.append((theta, lam, optimal_angle(theta, lam), branch))
    params = {"theta": thetas, "lambda": lambdas}
    return Emitted(["theta", "lambda", "phi_star", "branch"], rows, params)


def cmd_probabilities(args) -> Emitted:
    thetas = _angles(args, "theta", "0:pi/2")
    lambdas = _costs(args, "lambda_", "0:0.5")
    rows = []
    for theta in thetas:
        for lam in lambdas:
            p = outcome_probabilities(theta, lam)
            rows.append((theta, lam, p.p_correct, p.p_error, p.p_reject, p.p_accept))
    params = {"theta": thetas, "lambda": lambdas}
    columns = ["theta", "lambda", "p_correct", "p_error", "p_reject", "p_accept"]
    return Emitted(columns, rows, params)


def cmd_tradeoff(args) -> Emitted:
    thetas = _angles(args, "theta", "pi/8")
    lambdas = SweepSpec("lambda", 0.0, 0.5, args.steps).values()
    rows = []
    for theta in thetas:
        curve = tradeoff_curve(theta, lambdas)
        for lam, pr, pe in zip(curve.lambdas, curve.p_reject, curve.p_error):
            rows.append((theta, float(lam), float(pr), float(pe)))
    params = {"theta": thetas, "lambda_steps": args.steps}
    return Emitted(["theta", "lambda", "p_reject", "p_error"], rows, params)


def cmd_regions(args) -> Emitted:
    theta = _single(_angles(args, "theta", "pi/8"), "--theta")
    phis = _angles(args, "phi", "0:pi/2")
    if args.family == "zero-one":
        costs = _costs(args, "lambda_", "0:0.5")
        lambda_r = None
        region = decision_region_map(theta, phis, costs, "zero-one")
        columns = ["theta", "lambda", "phi", "decision_e0", "decision_e1", "decision_e2"]
        params = {"theta": theta, "family": "zero-one", "lambda": costs, "phi": phis}
    else:
        lambda_r = _single(_costs(args, "lambda_r", "1"), "--lambda-r")
        costs = _costs(args, "lambda_e", "0:5")
        region = decision_region_map(theta, phis, costs, "error-reject", lambda_r)
        columns = [
            "theta", "lambda_e", "lambda_r", "phi", "decision_e0", "decision_e1", "decision_e2",
        ]
        params = {
            "theta": theta, "family": "error-reject", "lambda_e": costs,
            "lambda_r": lambda_r, "phi": phis,
        }
    rows = []
    for k, cost in enumerate(region.costs):
        for l, phi in enumerate(region.phis):
            lead = (theta, float(cost)) if lambda_r is None else (theta, float(cost), lambda_r)
            rows.append((*lead, float(phi), *region.decisions[k, l].tolist()))
    return Emitted(columns, rows, params)


def cmd_simulate(args) -> Emitted:
    theta = _single(_angles(args, "theta"), "--theta")
    if args.lambda_ is not None:
        if args.lambda_e is not None or args.lambda_r is not None:
            raise ValueError("give either --lambda or --lambda-e/--lambda-r, not both")
        lam = _single(_costs(args, "lambda_"), "--lambda")
        lambda_e, lambda_r = 1.0, lam
        loss = LossMatrix.zero_one_reject(lam)
    else:
        if args.lambda_e is None or args.lambda_r is None:
            raise ValueError("--lambda, or both --lambda-e and --lambda-r, are required")
        lambda_e = _single(_costs(args, "lambda_e"), "--lambda-e")
        lambda_r = _single(_costs(args, "lambda_r"), "--lambda-r")
        lam = None
        loss = LossMatrix.error_reject(lambda_e, lambda_r)

    if args.phi in (None, "optimal"):
        if lam is not None:
            if lam > 1:
                raise DomainError("reject cost lambda must lie in [0, 1]")
            phi = optimal_angle(theta, lam)
        else:
            phi = grid_search_generalized_angle(theta, lambda_e, lambda_r)
    else:
        phi = _single(_angles(args, "phi"), "--phi")

    if lam is not None:
        expected = analytic_risk(theta, lam, phi)
    else:
        expected = generalized_risk(theta, lambda_e, lambda_r, phi)
    config = GameConfig.optimal(theta, loss, phi, args.trials, args.seed)
    report = simulate_game(config, workers=args.workers)
    z = z_score(report.empirical_risk, expected, report.std_error)

    columns = [
        "theta", "lambda_e", "lambda_r", "phi", "trials", "seed", "empirical_risk",
        "std_error", "analytic_risk", "z", "freq_correct", "freq_error", "freq_reject",
    ]
    row = (
        theta, lambda_e, lambda_r, phi, report.trials, report.seed, report.empirical_risk,
        report.std_error, expected, z, report.freq_correct, report.freq_error,
        report.freq_reject,
    )
    params = {
        "theta": theta, "lambda_e": lambda_e, "lambda_r": lambda_r, "phi": phi,
        "trials": args.trials, "seed": args.seed, "rule": [list(c) for c in config.rule.choices],
        "counts": [list(c) for c in report.counts],
    }
    code = EXIT_VALIDATION if abs(z) > Z_FLAG else EXIT_OK
    return Emitted(columns, [row], params, code)


COMMANDS = {
    "risk-surface": (cmd_risk_surface, "risk over (lambda, phi) at fixed theta"),
    "optimal-angle": (cmd_optimal_angle, "optimal measurement angle over (theta, lambda)"),
    "probabilities": (cmd_probabilities, "correct/error/reject/accept probabilities"),
    "tradeoff": (cmd_tradeoff, "error-reject tradeoff curves"),
    "regions": (cmd_regions, "optimal decision per outcome over (cost, phi)"),
    "simulate": (cmd_simulate, "Monte Carlo check of the analytic risk"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theta", help="state angle: value, list, or sweep min:max[:steps]")
    common.add_argument("--lambda", dest="lambda_", help="reject cost (0-1-lambda loss)")
    common.add_argument("--lambda-e", dest="lambda_e", help="error cost (error-reject loss)")
    common.add_argument("--lambda-r", dest="lambda_r", help="reject cost (error-reject loss)")
    common.add_argument("--phi", help="measurement angle; 'optimal' for simulate")
    common.add_argument("--steps", type=int, default=DEFAULT_STEPS,
                        help=f"points per sweep given as min:max (default {DEFAULT_STEPS})")
    common.add_argument("--degrees", action="store_true", help="read theta and phi in degrees")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="output file (default: stdout)")

    parser = argparse.ArgumentParser(
        prog="postselect",
        description="Binary state discrimination with a costed reject option.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "regions":
            p.add_argument("--family", choices=("zero-one", "error-reject"), default="zero-one")
        if name == "simulate":
            p.add_argument("--trials", type=int, default=1_000_000)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler, _ = COMMANDS[args.command]
    try:
        if args.steps < 2:
            raise ValueError("--steps must be at least 2")
        result = handler(args)
        text = render(args.format, args.command, result.params, result.columns, result.rows)
    except (ValueError, DomainError, UnreachableError) as exc:
        print(f"postselect {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        emit(text, args.output)
    except OSError as exc:
        print(f"postselect {args.command}: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
