"""
ContextLab: command-line entry point

Usage:
    contextlab validate behavior.json
    contextlab decide --theory ks|cbd2|strict behavior.json [--max-vars N] [--dump-lp lp.tsv]
    contextlab transform --spec spec.json behavior.json -o out.json
    contextlab verify-consistification behavior.json
    contextlab check-principle --principle nestedness --spec spec.json --theory cbd2 behavior.json
    contextlab search --config search.json
    contextlab numlab --nmax 100
    contextlab serve --port 8000

Machine output is JSON on stdout; logs and diagnostics go to stderr.
Exit codes: 0 ok, 1 falsifier detected, 2 search exhausted without the
expected violation, 64 malformed input, 65 input outside a theory's domain.
"""
import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .config import LOG_FORMAT, PRINCIPLE_FAMILIES, THEORIES, settings
from .core import check_nondisturbance, enumerate_joint_outcomes, format_outcome_key, validate_behavior
from .deciders import get_criterion, get_decider, verify_verdict
from .errors import ContextlabError, FalsifierError, FormatError
from .lp import dump_tsv
from .models import (
    SearchConfigModel,
    behavior_from_json,
    behavior_to_json,
    dump_behavior,
    dump_json,
    read_json,
    spec_from_json,
)
from .numlab import numlab_report
from .principles import (
    SearchConfig,
    check_principle,
    commutation_report,
    reverify_report,
    search_counterexamples,
    verify_consistification_properties,
)
from .transforms import apply_transform

logger = logging.getLogger("contextlab")

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_EXHAUSTED = 2


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit 64 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise FormatError(f"{self.prog}: {message}")


def emit(data: dict):
    sys.stdout.write(dump_json(data))


def _load_behavior(args, validate: Optional[bool] = None):
    """Load the behavior argument; its hash is kept on args for error output."""
    if validate is None:
        validate = not args.no_validate
    raw, digest = read_json(args.behavior)
    args.input_sha256 = digest
    return behavior_from_json(raw, validate=validate), digest


# =============================================================================
# Commands
# =============================================================================

def cmd_validate(args) -> int:
    b, digest = _load_behavior(args, validate=False)
    problems = validate_behavior(b)
    data = {"input_sha256": digest, "valid": not problems, "problems": problems}
    if not problems:
        witness = check_nondisturbance(b)
        data["nondisturbing"] = witness is None
        data["binary"] = b.is_binary()
        if witness is not None:
            data["disturbance"] = witness.to_json()
    emit(data)
    return EXIT_OK if not problems else FormatError.exit_code


def cmd_decide(args) -> int:
    b, digest = _load_behavior(args)
    verdict = get_decider(args.theory, max_vars=args.max_vars)(b)

    problems = verify_verdict(verdict)
    if problems:
        raise FalsifierError(f"verdict failed its re-check: {'; '.join(problems)}")

    if args.dump_lp and verdict.problem is not None:
        columns = [format_outcome_key(t) for t in enumerate_joint_outcomes(verdict.variables)]
        dump_tsv(verdict.problem, args.dump_lp, columns)

    data = {"input_sha256": digest, **verdict.to_json()}
    if verdict.problem is not None:
        data["lp"] = {
            "variables": verdict.problem.num_vars,
            "constraints": verdict.problem.num_constraints,
        }
    emit(data)
    return EXIT_OK


def cmd_transform(args) -> int:
    b, digest = _load_behavior(args)
    spec_data, spec_digest = read_json(args.spec)
    spec = spec_from_json(spec_data, b.scenario)
    result = apply_transform(b, spec)
    logger.info(f"Applied {spec.kind} to {args.behavior}")

    if args.output is None:
        emit({
            "input_sha256": digest,
            "spec_sha256": spec_digest,
            "kind": spec.kind,
            "behavior": behavior_to_json(result),
        })
        return EXIT_OK

    output_digest = dump_behavior(result, args.output)
    emit({
        "input_sha256": digest,
        "spec_sha256": spec_digest,
        "kind": spec.kind,
        "output": str(args.output),
        "output_sha256": output_digest,
    })
    return EXIT_OK


def cmd_verify_consistification(args) -> int:
    b, digest = _load_behavior(args)
    report = verify_consistification_properties(b, get_criterion(args.criterion), max_vars=args.max_vars)
    emit({"input_sha256": digest, **report.to_json()})
    if not report.ok:
        logger.error("Consistification properties failed; this falsifies the construction")
        return EXIT_FALSIFIED
    return EXIT_OK


def cmd_check_principle(args) -> int:
    b, digest = _load_behavior(args)
    spec_data, spec_digest = read_json(args.spec)
    spec = spec_from_json(spec_data, b.scenario)
    report = check_principle(
        args.theory, b, spec, behavior_id=str(args.behavior), principle=args.principle, max_vars=args.max_vars
    )
    data = report.to_json()
    problems = reverify_report(data, max_vars=args.max_vars)
    if problems:
        raise FalsifierError(f"report failed re-verification: {'; '.join(problems)}")

    data = {"input_sha256": digest, "spec_sha256": spec_digest, **data}
    if args.commutation:
        data["commutation"] = commutation_report(b, spec).to_json()
    emit(data)
    if report.violated and args.theory != "cbd2":
        logger.error(f"{args.theory} violates {report.principle}; no such violation should exist")
        return EXIT_FALSIFIED
    return EXIT_OK


def cmd_search(args) -> int:
    data, digest = read_json(args.config)
    args.input_sha256 = digest
    try:
        model = SearchConfigModel.model_validate(data)
    except ValueError as e:
        raise FormatError(f"malformed search config: {e}")
    updates = {}
    if args.budget is not None:
        updates["budget"] = args.budget
    if args.workers is not None:
        updates["workers"] = args.workers
    if updates:
        model = model.model_copy(update=updates)
    cfg = SearchConfig.from_model(model)

    result = search_counterexamples(cfg)
    sys.stdout.write(result.to_json_lines(config_sha256=digest))

    if result.violations and not cfg.expects_violation:
        logger.error(f"{cfg.theory} produced {len(result.violations)} violations; expected none")
        return EXIT_FALSIFIED
    if result.exhausted:
        logger.warning("Budget exhausted without the expected violation; rerun with a larger budget")
        return EXIT_EXHAUSTED
    return EXIT_OK


def cmd_numlab(args) -> int:
    emit(numlab_report(args.nmax))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("contextlab.main:app", host=args.host, port=args.port)
    return EXIT_OK


# =============================================================================
# Parser
# =============================================================================

def _add_behavior_args(p: argparse.ArgumentParser):
    p.add_argument("behavior", help="Behavior JSON file")
    p.add_argument("--no-validate", action="store_true", help="Skip normalization checks on load")
    p.add_argument("--max-vars", type=int, default=None, help=f"LP size guard (default {settings.MAX_LP_VARS})")


def build_parser() -> CliParser:
    parser = CliParser(prog="contextlab", description="Exact contextuality deciders and principle checks")
    parser.add_argument("--version", action="version", version=f"contextlab {__version__}")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level for stderr")
    subparsers = parser.add_subparsers(dest="command", parser_class=CliParser)

    p = subparsers.add_parser("validate", help="Check a behavior file against every invariant")
    p.add_argument("behavior", help="Behavior JSON file")
    p.set_defaults(func=cmd_validate)

    p = subparsers.add_parser("decide", help="Decide contextuality under a theory")
    _add_behavior_args(p)
    p.add_argument("--theory", required=True, choices=sorted(THEORIES))
    p.add_argument("--dump-lp", default=None, help="Write the LP as TSV to this path")
    p.set_defaults(func=cmd_decide)

    p = subparsers.add_parser("transform", help="Apply a transform spec")
    _add_behavior_args(p)
    p.add_argument("--spec", required=True, help="Transform spec JSON file")
    p.add_argument("--output", "-o", default=None, help="Output behavior path (default: stdout)")
    p.set_defaults(func=cmd_transform)

    p = subparsers.add_parser("verify-consistification", help="Check the three consistification properties")
    _add_behavior_args(p)
    p.add_argument("--criterion", default="multimaximal")
    p.set_defaults(func=cmd_verify_consistification)

    p = subparsers.add_parser("check-principle", help="Check one monotonicity principle instance")
    _add_behavior_args(p)
    p.add_argument("--principle", required=True, choices=sorted(PRINCIPLE_FAMILIES))
    p.add_argument("--spec", required=True, help="Transform spec JSON file")
    p.add_argument("--theory", required=True, choices=sorted(THEORIES))
    p.add_argument("--commutation", action="store_true", help="Also compare with the lifted transform")
    p.set_defaults(func=cmd_check_principle)

    p = subparsers.add_parser("search", help="Seeded search for principle violations")
    p.add_argument("--config", required=True, help="Search config JSON file")
    p.add_argument("--budget", type=int, default=None, help="Override the config's sample budget")
    p.add_argument("--workers", type=int, default=None, help="Parallel workers (output is unchanged)")
    p.set_defaults(func=cmd_search)

    p = subparsers.add_parser("numlab", help="Number-theoretic illustration")
    p.add_argument("--nmax", type=int, default=100)
    p.set_defaults(func=cmd_numlab)

    p = subparsers.add_parser("serve", help="Run the HTTP service")
    p.add_argument("--host", default=settings.HOST)
    p.add_argument("--port", type=int, default=settings.PORT)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except FormatError as e:
        sys.stderr.write(f"{e}\n")
        return e.exit_code

    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format=LOG_FORMAT,
    )
    if args.command is None:
        parser.print_help(sys.stderr)
        return FormatError.exit_code

    try:
        return args.func(args)
    except ContextlabError as e:
        logger.error(str(e))
        detail = e.detail()
        if getattr(args, "input_sha256", None):
            detail["input_sha256"] = args.input_sha256
        emit(detail)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
