import argparse
import logging
import sys
from typing import Dict, List, Optional, TextIO

from audit_engine import ClaimAudit, format_finding
from config import Config
from errors import HomLieError, InputError, PreconditionError
from exact_linalg import format_vector
from expression_parser import parse_binding
from extensions import build_extension_bracket, validate_extension_triple
from graded_calculus import cohomology_dims, delta_rho, differential_d, key_indices, key_labels, restrict_host
from hom_nambu import validate_hom_algebra, validate_hom_leibniz
from models import CommandDocument, Report
from problem_loader import LoadedProblem, load_problem
from representations import (
    GeneralizedRep,
    Representation,
    generalized_semidirect,
    semidirect,
    validate_generalized_rep,
    validate_representation,
)

# Configure logging first
logging.basicConfig(level=Config.LOG_LEVEL, format=Config.LOG_FORMAT)
logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_VIOLATIONS = 1
EXIT_INPUT_ERROR = 2


class CommandResult:
    """Collects what a command prints and what --json emits."""

    def __init__(self, command: str, inputs: List[str], bindings: Dict[str, str]):
        self.document = CommandDocument(command=command, inputs=inputs, bindings=bindings)
        self.lines: List[str] = []
        self.exit_code = EXIT_PASS

    def add_report(self, report: Report) -> None:
        self.document.findings.append(report.model_dump())
        self.lines.append(format_report(report))
        if not report.passed:
            self.exit_code = EXIT_VIOLATIONS
            self.document.status = "fail"

    def say(self, text: str) -> None:
        self.lines.append(text)


def format_report(report: Report, limit: Optional[int] = None) -> str:
    limit = Config.MAX_VIOLATIONS_SHOWN if limit is None else limit
    head = f"{report.subject}: {report.status.upper()} ({report.checked} checks, {len(report.violations)} violations)"
    lines = [head]
    for violation in report.violations[:limit]:
        lines.append(f"  {violation.describe()}")
    hidden = len(report.violations) - limit
    if hidden > 0:
        lines.append(f"  ... {hidden} more")
    return "\n".join(lines)


# -------------------------------------------------------------------------
# Helpers
# -------------------------------------------------------------------------
def _genrep(loaded: LoadedProblem) -> GeneralizedRep:
    rep = loaded.representation
    if rep is None:
        raise InputError(f"A {loaded.kind} file carries no representation")
    if isinstance(rep, Representation):
        return GeneralizedRep.from_representation(rep)
    return rep


def _rep(loaded: LoadedProblem) -> Representation:
    rep = loaded.representation
    if rep is None:
        raise InputError(f"A {loaded.kind} file carries no representation")
    if isinstance(rep, GeneralizedRep):
        if rep.nu:
            raise InputError("The file defines nu; use the generalized commands for it")
        return rep.representation
    return rep


def _describe_algebra(result: CommandResult, loaded_algebra, n: Optional[int] = None) -> None:
    result.say(f"alpha = {loaded_algebra.alpha!r}")
    for (i, j, k), value in loaded_algebra.bracket.items():
        labels = ", ".join(_label(x, n) for x in (i, j, k))
        result.say(f"[{labels}] = ({', '.join(format_vector(value))})")


def _label(index: int, n: Optional[int]) -> str:
    if n is not None and index >= n:
        return f"v{index - n + 1}"
    return f"e{index + 1}"


# -------------------------------------------------------------------------
# Commands
# -------------------------------------------------------------------------
def cmd_check_algebra(args, loaded: LoadedProblem, result: CommandResult) -> None:
    result.add_report(validate_hom_algebra(loaded.algebra))
    if args.leibniz:
        result.add_report(validate_hom_leibniz(loaded.algebra))
    result.document.dims["n"] = loaded.algebra.dim


def cmd_check_rep(args, loaded: LoadedProblem, result: CommandResult) -> None:
    r = _rep(loaded)
    result.add_report(validate_representation(loaded.algebra, r))
    result.document.dims.update(n=r.algebra_dim, m=r.carrier_dim)


def cmd_check_genrep(args, loaded: LoadedProblem, result: CommandResult) -> None:
    g = _genrep(loaded)
    result.add_report(validate_generalized_rep(loaded.algebra, g))
    result.document.dims.update(n=g.algebra_dim, m=g.carrier_dim)


def cmd_twist(args, loaded: LoadedProblem, result: CommandResult) -> None:
    """Load with the file's CONSTRUCTION twist applied and validate the output."""
    if loaded.construction != "twist":
        raise InputError("The file declares no CONSTRUCTION twist")
    n = loaded.algebra.dim
    _describe_algebra(result, loaded.algebra)
    result.document.dims["n"] = n
    if loaded.representation is None:
        result.add_report(validate_hom_algebra(loaded.algebra))
        return
    g = _genrep(loaded)
    result.say(f"A = {g.endo!r}")
    for (i, j), matrix in g.rho.items():
        result.say(f"rho(e{i + 1}, e{j + 1}) = {matrix!r}")
    for i, table in g.nu.items():
        for (p, q), value in table.items():
            result.say(f"nu(e{i + 1})(v{p + 1}, v{q + 1}) = ({', '.join(format_vector(value))})")
    result.document.dims["m"] = g.carrier_dim
    if isinstance(loaded.representation, Representation):
        result.add_report(validate_representation(loaded.algebra, loaded.representation))
    else:
        result.add_report(validate_generalized_rep(loaded.algebra, g))


def cmd_semidirect(args, loaded: LoadedProblem, result: CommandResult) -> None:
    r = _rep(loaded)
    product = semidirect(loaded.algebra, r)
    _describe_algebra(result, product, r.algebra_dim)
    result.add_report(validate_hom_algebra(product))
    result.document.dims.update(n=r.algebra_dim, m=r.carrier_dim)


def cmd_gensemidirect(args, loaded: LoadedProblem, result: CommandResult) -> None:
    g = _genrep(loaded)
    product = generalized_semidirect(loaded.algebra, g)
    _describe_algebra(result, product, g.algebra_dim)
    result.add_report(validate_hom_algebra(product))
    result.document.dims.update(n=g.algebra_dim, m=g.carrier_dim)


def cmd_d_apply(args, loaded: LoadedProblem, result: CommandResult) -> None:
    if loaded.cochain is None:
        raise InputError("d-apply needs a KIND cochain file")
    g = _genrep(loaded)
    n = loaded.algebra.dim
    phi = loaded.cochain
    if args.flavor == "ordinary":
        if any(i >= n for key in phi.nonzero_keys() for i in key_indices(key)):
            raise InputError("The ordinary coboundary needs a cochain on algebra labels only")
        image = delta_rho(loaded.algebra, g, restrict_host(phi, n))
        labels_dim = None
    else:
        image = differential_d(loaded.algebra, g, phi)
        labels_dim = n
    for key, value in image.items():
        result.say(f"({', '.join(key_labels(key, labels_dim))}) -> ({', '.join(format_vector(value))})")
    result.say("cocycle: yes" if image.is_zero() else f"cocycle: no ({len(image.nonzero_keys())} nonzero entries)")
    result.document.dims.update(n=n, m=g.carrier_dim, degree=image.degree + 1, nonzero=len(image.nonzero_keys()))


def cmd_cohomology(args, loaded: LoadedProblem, result: CommandResult) -> None:
    g = _genrep(loaded)
    ordinary = args.flavor == "ordinary"
    z, b, h = cohomology_dims(loaded.algebra, g, args.degree, ordinary)
    result.say(f"degree {args.degree} ({args.flavor}): dim Z = {z}, dim B = {b}, dim H = {h}")
    result.document.dims.update(degree=args.degree, Z=z, B=b, H=h)


def cmd_check_extension(args, loaded: LoadedProblem, result: CommandResult) -> None:
    if loaded.extension is None:
        raise InputError("check-extension needs a KIND extension file")
    e = loaded.extension
    result.add_report(validate_extension_triple(e))
    total = build_extension_bracket(e)
    bracket_report = validate_hom_algebra(total)
    bracket_report.subject = "extension-bracket"
    result.add_report(bracket_report)
    result.document.dims.update(n=e.base.dim, m=e.fiber_dim)


COMMANDS = {
    "check-algebra": cmd_check_algebra,
    "check-rep": cmd_check_rep,
    "check-genrep": cmd_check_genrep,
    "twist": cmd_twist,
    "semidirect": cmd_semidirect,
    "gensemidirect": cmd_gensemidirect,
    "d-apply": cmd_d_apply,
    "cohomology": cmd_cohomology,
    "check-extension": cmd_check_extension,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bind", action="append", default=[], metavar="NAME=VALUE", help="override a file parameter (repeatable)")
    common.add_argument("--json", action="store_true", help="emit a structured document instead of text")
    common.add_argument("--verbose", action="store_true", help="log at INFO level")

    parser = argparse.ArgumentParser(prog="hom3lie", description="Exact checks for multiplicative 3-Hom-Lie algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    algebra = sub.add_parser("check-algebra", parents=[common], help="multiplicativity and Hom-Filippov-Jacobi")
    algebra.add_argument("file")
    algebra.add_argument("--leibniz", action="store_true", help="also check the Hom-Leibniz algebra on fundamental objects")
    for name, text in (
        ("check-rep", "representation identities"),
        ("check-genrep", "generalized representation identities"),
        ("twist", "apply the file's CONSTRUCTION twist"),
        ("semidirect", "semidirect product with a representation"),
        ("gensemidirect", "semidirect product with a generalized representation"),
        ("check-extension", "abelian extension identities"),
    ):
        sub.add_parser(name, parents=[common], help=text).add_argument("file")
    d_apply = sub.add_parser("d-apply", parents=[common], help="apply the coboundary to a cochain file")
    d_apply.add_argument("file")
    d_apply.add_argument("--flavor", choices=("ordinary", "generalized"), default="generalized")
    cohomology = sub.add_parser("cohomology", parents=[common], help="dimensions of cocycles, coboundaries and cohomology")
    cohomology.add_argument("file")
    cohomology.add_argument("--degree", type=int, required=True)
    cohomology.add_argument("--flavor", choices=("ordinary", "generalized"), default="generalized")
    audit = sub.add_parser("audit-paper", parents=[common], help="recompute the worked examples and report discrepancies")
    audit.add_argument("--fixtures", default=None, help="fixtures directory")
    audit.add_argument("--claims", default=None, help="claims file")
    return parser


def _emit(result: CommandResult, as_json: bool, out: TextIO) -> None:
    if as_json:
        out.write(result.document.model_dump_json(indent=2) + "\n")
    else:
        out.write("\n".join(result.lines) + "\n")


def _run_audit(args, out: TextIO) -> int:
    findings = ClaimAudit(fixtures_dir=args.fixtures, claims_path=args.claims).run()
    result = CommandResult("audit-paper", [], {})
    for finding in findings:
        result.document.findings.append(finding.model_dump())
        result.say(format_finding(finding))
    confirmed = sum(f.status == "CONFIRMED" for f in findings)
    result.say(f"{len(findings)} claims: {confirmed} confirmed, {len(findings) - confirmed} discrepant")
    result.document.dims.update(claims=len(findings), confirmed=confirmed)
    _emit(result, args.json, out)
    return EXIT_PASS


def run_command(argv: List[str], out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """Run one CLI command; returns 0 on pass, 1 on violations, 2 on input errors."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT_ERROR if exc.code else EXIT_PASS
    if args.verbose:
        logging.getLogger().setLevel(logging.INFO)

    try:
        bindings = {}
        for assignment in args.bind:
            bindings.update(parse_binding(assignment))
        if args.command == "audit-paper":
            return _run_audit(args, out)
        loaded = load_problem(args.file, bindings)
        result = CommandResult(args.command, [args.file], {k: str(v) for k, v in loaded.bindings.items()})
        COMMANDS[args.command](args, loaded, result)
        _emit(result, args.json, out)
        return result.exit_code
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR
    except PreconditionError as exc:
        err.write(f"precondition failed: {exc}\n")
        if exc.report is not None:
            err.write(format_report(exc.report) + "\n")
            if args.json:
                document = CommandDocument(command=args.command, inputs=[getattr(args, "file", "")], findings=[exc.report.model_dump()], status="fail")
                out.write(document.model_dump_json(indent=2) + "\n")
        return EXIT_VIOLATIONS
    except HomLieError as exc:
        logger.error(f"Command '{args.command}' failed: {exc}", exc_info=True)
        err.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
