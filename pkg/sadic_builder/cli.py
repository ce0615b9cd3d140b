"""Batch front-end: construct, complexity and verify subcommands.

Exit codes: 0 when everything passes, 1 for usage, input or I/O problems,
2 when a construction fails, a verification assertion does not hold, or
p(n) is only a lower bound because the factor sets did not stabilize.
"""
import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from .config import ConfigLoader, SadicConfig
from .construct import MAIN1, TOEPLITZ, ConstructionResult, VerificationReport, construct, verify_construction
from .errors import SadicError
from .language import complexity_profile
from .morphisms import DirectiveSequence
from .serialization import (
    diagram_from_json,
    directive_from_json,
    load_json,
    profile_csv,
    result_from_json,
    result_to_json,
    toeplitz_csv,
    verification_to_json,
    write_json,
    write_text,
)
from .targets import ComplexityTarget, parse_target

logger = logging.getLogger("sadic-builder")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

# Directive files with a repeat rule and no depth grow until <tau_[0,k)> >= 2N, plus EXTRA_LEVELS.
EXTRA_LEVELS = 2
MAX_DIRECTIVE_DEPTH = 64


@dataclass
class JobSpec:
    """Effective parameters of one invocation (config file, environment, then flags)."""
    command: str
    mode: Optional[str] = None
    diagram: Optional[str] = None
    directive: Optional[str] = None
    result: Optional[str] = None
    target: Optional[str] = None
    depth: Optional[int] = 4
    n_max: int = 1000
    scan_limit: int = 1_000_000
    telescope_horizon: int = 64
    seed: int = 0
    out: Optional[str] = None
    recognizability_window: int = 4
    random_samples: int = 8
    random_length: int = 8
    max_hole_density: str = "1/4"
    max_explicit_image: int = 4096

    def validate(self):
        for name in ("depth", "n_max", "scan_limit", "telescope_horizon"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise SadicError(f"{name} must be at least 1, got {value}")
        if self.seed < 0:
            raise SadicError(f"seed must be nonnegative, got {self.seed}")


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Path to config file (default: config.json in current directory)")
    common.add_argument("--debug", action="store_true", help="Enable debug logging")
    common.add_argument("--N", dest="n_max", type=int, help="Verification horizon: p(n) is computed for n <= N")
    common.add_argument("--seed", type=int, help="Seed for sampled recognizability words")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--target", help="Complexity target: n^<rational>, n*log2(n)^<int> or @table.csv")

    parser = _Parser(prog="sadic-builder", description="Build and verify low-complexity S-adic subshifts")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    construct_parser = commands.add_parser("construct", parents=[common], help="Run a construction pipeline")
    construct_parser.add_argument("--mode", choices=[MAIN1, TOEPLITZ], required=True)
    construct_parser.add_argument("--diagram", required=True, help="Diagram JSON")
    construct_parser.add_argument("--depth", type=int, help="Number of constructed levels")
    construct_parser.add_argument("--scan-limit", dest="scan_limit", type=int, help="Largest t tried by the threshold scan")
    construct_parser.add_argument("--no-verify", dest="no_verify", action="store_true", help="Skip brute-force verification")

    complexity_parser = commands.add_parser("complexity", parents=[common], help="Tabulate p(n) of a directive sequence")
    source = complexity_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--directive", help="Directive sequence JSON")
    source.add_argument("--result", help="Construction result JSON")
    complexity_parser.add_argument("--depth", type=int, help="Expand repeat rules to this depth")

    verify_parser = commands.add_parser("verify", parents=[common], help="Verify a stored construction result")
    verify_parser.add_argument("--result", required=True, help="Construction result JSON")
    return parser


def job_from_args(args: argparse.Namespace, config: SadicConfig) -> JobSpec:
    job = JobSpec(
        command=args.command,
        depth=config.pipeline.depth,
        n_max=config.verification.horizon,
        scan_limit=config.pipeline.scan_limit,
        telescope_horizon=config.pipeline.telescope_horizon,
        seed=config.verification.seed,
        recognizability_window=config.verification.recognizability_window,
        random_samples=config.verification.random_samples,
        random_length=config.verification.random_length,
        max_hole_density=config.verification.max_hole_density,
        max_explicit_image=config.output.max_explicit_image,
    )
    if job.command == "complexity":
        job.depth = None
    for name in ("mode", "diagram", "directive", "result", "target", "out", "depth", "n_max", "scan_limit", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(job, name, value)
    job.validate()
    return job


def _out_path(job: JobSpec, name: str) -> Optional[Path]:
    if job.out is None:
        return None
    directory = Path(job.out)
    directory.mkdir(parents=True, exist_ok=True)
    return directory / name


def _target(expression: str) -> ComplexityTarget:
    return parse_target(expression, Path(os.getcwd()))


def load_directive(path: str, depth: Optional[int], n_max: int) -> DirectiveSequence:
    """Directive JSON or construction result JSON.

    Without an explicit depth a repeat rule is expanded until the shortest
    image of tau_[0,k) reaches 2N, then EXTRA_LEVELS more.
    """
    data = load_json(path)
    if isinstance(data, dict) and "mode" in data:
        res = result_from_json(data)
        if res.directive is None:
            raise SadicError(f"{path} holds a FAILED construction without morphisms")
        return res.directive if depth is None else res.directive.truncate(depth)
    if depth is not None or not (isinstance(data, dict) and data.get("repeat")) or data.get("depth"):
        return directive_from_json(data, depth)
    k = len(data.get("morphisms") or []) + 1
    while k <= MAX_DIRECTIVE_DEPTH:
        ds = directive_from_json(data, k)
        if ds.min_norm(0, k) >= 2 * n_max:
            return directive_from_json(data, min(k + EXTRA_LEVELS, MAX_DIRECTIVE_DEPTH))
        k += 1
    logger.warning(f"Images stay shorter than 2N={2 * n_max} up to depth {MAX_DIRECTIVE_DEPTH}")
    return directive_from_json(data, MAX_DIRECTIVE_DEPTH)


def print_verification(report: VerificationReport):
    print(f"\nVerification: {report.status}")
    if report.profile is not None:
        print(f"  p(n) computed for n <= {report.profile.n_max} (factors stable at level {report.profile.level})")
    if report.bounds:
        regimes = ", ".join(sorted({row.regime for row in report.bounds}))
        print(f"  Complexity bound checked for {len(report.bounds)} values of n (regimes {regimes})")
    for decade, key in report.decade_maxima:
        print(f"  decade {decade}: max p(n)/p_n key {float(key):.6g}")
    if report.toeplitz is not None:
        print(f"  Toeplitz window {report.toeplitz.window}: {len(report.toeplitz.unverified)} positions without a period")
    if report.boshernitzan is not None:
        print(f"  Ergodic measures: at most {report.boshernitzan.measure_bound}")
    for note in report.notes:
        print(f"  note: {note}")
    for failure in report.failures:
        print(f"  FAIL: {failure}")


def _verify_and_write(job: JobSpec, res: ConstructionResult, target: ComplexityTarget) -> VerificationReport:
    report = verify_construction(
        res,
        target,
        n_max=job.n_max,
        recognizability_window=job.recognizability_window,
        random_samples=job.random_samples,
        random_length=job.random_length,
        seed=job.seed,
        max_hole_density=Fraction(job.max_hole_density),
    )
    print_verification(report)
    path = _out_path(job, "verification.json")
    if path is not None:
        write_json(path, verification_to_json(report))
        if report.profile is not None:
            write_text(_out_path(job, "complexity.csv"), profile_csv(report.profile, target, res.directive))
        if report.toeplitz is not None:
            write_text(_out_path(job, "toeplitz.csv"), toeplitz_csv(report.toeplitz))
    return report


def cmd_construct(job: JobSpec, verify: bool = True) -> int:
    if not job.target:
        print("Error: construct needs --target")
        return EXIT_USAGE
    try:
        target = _target(job.target)
        diagram = diagram_from_json(load_json(job.diagram))
    except (SadicError, OSError, json.JSONDecodeError) as e:
        logger.error(f"Cannot load construction inputs: {str(e)}")
        print(f"Error: {str(e)}")
        return EXIT_USAGE

    res = construct(job.mode, diagram, target, job.depth, job.scan_limit, job.telescope_horizon)
    print(f"\nConstruction ({job.mode}, target {target}, depth {job.depth}): {res.status()}")
    for level in res.levels:
        params = ", ".join(f"{k}={v}" for k, v in vars(level).items() if v is not None and k != "level")
        print(f"  level {level.level}: {params}")
    if res.periods:
        print(f"  periods: {', '.join(str(p) for p in res.periods)}")
    for diagnostic in res.advisories():
        print(f"  advisory: {diagnostic.where()}: {diagnostic.condition} ({diagnostic.value})")

    try:
        path = _out_path(job, "result.json")
        if path is not None:
            write_json(path, result_to_json(res, job.max_explicit_image))
    except OSError as e:
        logger.error(f"Cannot write results: {str(e)}")
        return EXIT_USAGE

    if res.failed:
        failure = res.first_failure()
        where = f"{failure.where()}: " if failure and failure.level >= 0 else ""
        condition = failure.condition if failure else "construction"
        print(f"  FAILED at {where}{condition}: {res.error or failure.value}")
        return EXIT_FAILED
    if not verify:
        return EXIT_OK
    try:
        report = _verify_and_write(job, res, target)
    except OSError as e:
        logger.error(f"Cannot write verification output: {str(e)}")
        return EXIT_USAGE
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_complexity(job: JobSpec) -> int:
    try:
        ds = load_directive(job.directive or job.result, job.depth, job.n_max)
        target = _target(job.target) if job.target else None
        profile = complexity_profile(ds, job.n_max)
    except (SadicError, OSError, json.JSONDecodeError) as e:
        logger.error(f"Cannot compute complexity: {str(e)}")
        print(f"Error: {str(e)}")
        return EXIT_USAGE
    status = EXIT_OK
    if profile.partial:
        logger.error(f"p(n) for n <= {job.n_max} is only a lower bound: factors did not stabilize at depth {ds.depth}")
        status = EXIT_FAILED

    text = profile_csv(profile, target, ds)
    path = _out_path(job, "complexity.csv")
    if path is None:
        sys.stdout.write(text)
        return status
    try:
        write_text(path, text)
    except OSError as e:
        logger.error(f"Cannot write {path}: {str(e)}")
        return EXIT_USAGE
    return status


def cmd_verify(job: JobSpec) -> int:
    try:
        res = result_from_json(load_json(job.result))
        target = _target(job.target or res.target)
    except (SadicError, OSError, json.JSONDecodeError) as e:
        logger.error(f"Cannot load result {job.result}: {str(e)}")
        print(f"Error: {str(e)}")
        return EXIT_USAGE
    if res.failed:
        print(f"Result {job.result} records a FAILED construction; nothing to verify")
        return EXIT_FAILED
    try:
        report = _verify_and_write(job, res, target)
    except OSError as e:
        logger.error(f"Cannot write verification output: {str(e)}")
        return EXIT_USAGE
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments and run one job."""
    logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(name)s - %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        from dotenv import find_dotenv, load_dotenv
        load_dotenv(find_dotenv(usecwd=True))
    except ImportError:
        logger.warning("dotenv not installed. Environment variables will not be loaded from .env file.")

    config = ConfigLoader.load_config(args.config)
    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.setLevel(logging.DEBUG)
    elif config.log_level:
        level = logging.getLevelName(config.log_level)
        if isinstance(level, int):
            logger.setLevel(level)
        else:
            logger.warning(f"Unknown log level {config.log_level!r}")

    try:
        job = job_from_args(args, config)
    except SadicError as e:
        logger.error(str(e))
        print(f"Error: {str(e)}")
        return EXIT_USAGE
    logger.debug(f"Job: {job}")

    if job.command == "construct":
        return cmd_construct(job, verify=not args.no_verify)
    if job.command == "complexity":
        return cmd_complexity(job)
    return cmd_verify(job)
