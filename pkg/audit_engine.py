import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from config import Config
from errors import InputError, LoadError, NonzeroConditionError, PreconditionError
from exact_linalg import Matrix, basis_vector, format_vector, mat_apply, zero_vector
from expression_parser import parse_binding
from graded_calculus import differential_d, key_labels
from hom_nambu import HomAlgebra, check_morphism, validate_filippov
from models import Finding, Report, Violation
from problem_loader import LoadedProblem, ProblemFile, instantiate, read_problem
from representations import GeneralizedRep, intertwining_report, validate_generalized_rep

STATUSES = ("CONFIRMED", "DISCREPANT")


@dataclass(frozen=True)
class ClaimSpec:
    """One line of the claims file."""

    claim: str
    expected: str
    fixed: Dict[str, Fraction] = field(default_factory=dict)
    description: str = ""
    line: int = 0


@dataclass(frozen=True)
class ClaimCheck:
    """How a claim is recomputed: fixture file, check name and optional table key."""

    fixture: str
    check: str
    key: Optional[Tuple[str, ...]] = None
    requires_valid: bool = False


CLAIM_CHECKS: Dict[str, ClaimCheck] = {
    "fixA-twisted-bracket": ClaimCheck("fix_a.3hl", "printed_bracket", ("e1", "e2", "e3")),
    "fixA-rho-e1e2-v2": ClaimCheck("fix_a.genrep", "printed_rho", ("e1", "e2", "v2")),
    "fixA-rho-e1e3-v2": ClaimCheck("fix_a.genrep", "printed_rho", ("e1", "e3", "v2")),
    "fixA-rho-e2e3-v1": ClaimCheck("fix_a.genrep", "printed_rho", ("e2", "e3", "v1")),
    "fixA-rho-e2e3-v2": ClaimCheck("fix_a.genrep", "printed_rho", ("e2", "e3", "v2")),
    "fixA-nu-e2": ClaimCheck("fix_a.genrep", "printed_nu", ("e2", "v1", "v2")),
    "fixA-nu-e3": ClaimCheck("fix_a.genrep", "printed_nu", ("e3", "v1", "v2")),
    "fixA-genrep-valid": ClaimCheck("fix_a.genrep", "genrep_valid"),
    "fixA-intertwining": ClaimCheck("fix_a.genrep", "intertwining"),
    "fixB-filippov": ClaimCheck("fix_b.3hl", "filippov"),
    "fixB-genrep-valid": ClaimCheck("fix_b.genrep", "genrep_valid"),
    "fixB-alpha-morphism": ClaimCheck("fix_b.genrep", "alpha_morphism"),
    "fixB-twisted-bracket": ClaimCheck("fix_b.genrep", "printed_bracket"),
    "fixB-nu-e4": ClaimCheck("fix_b.genrep", "printed_nu", ("e4", "v1", "v2")),
    "fixC-genrep-valid": ClaimCheck("fix_c.genrep", "genrep_valid"),
    "fixC-cocycle-c1": ClaimCheck("fix_c.genrep", "cocycle", requires_valid=True),
    "fixC-cocycle-c2": ClaimCheck("fix_c.genrep", "cocycle", requires_valid=True),
    "fixC-cocycle-c3": ClaimCheck("fix_c.genrep", "cocycle", requires_valid=True),
    "fixC-cocycle-c2-general": ClaimCheck("fix_c.genrep", "cocycle", requires_valid=True),
}


def load_claims(path: str) -> List[ClaimSpec]:
    """Parse 'claim-id | EXPECTED | fixed-bindings | description' lines."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise LoadError(f"Cannot read claims file {path}: {exc}") from exc
    claims = []
    for line_no, raw in enumerate(lines, start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        fields = [part.strip() for part in content.split("|")]
        if len(fields) != 4:
            raise LoadError(f"{os.path.basename(path)}, line {line_no}: expected 4 '|'-separated fields, got {len(fields)}")
        claim, expected, fixed_text, description = fields
        if expected not in STATUSES:
            raise LoadError(f"{os.path.basename(path)}, line {line_no}: expectation must be CONFIRMED or DISCREPANT")
        fixed: Dict[str, Fraction] = {}
        for assignment in filter(None, (part.strip() for part in fixed_text.split(","))):
            fixed.update(parse_binding(assignment))
        claims.append(ClaimSpec(claim, expected, fixed, description, line_no))
    return claims


class ClaimAudit:
    """
    Recomputes the claims of the shipped worked examples on a grid of rational
    instantiations and reports each as CONFIRMED or DISCREPANT, with the
    violated identity and basis witness of the first failing instantiation.
    """

    def __init__(
        self,
        fixtures_dir: Optional[str] = None,
        claims_path: Optional[str] = None,
        sample_values: Optional[Sequence[Fraction]] = None,
        max_samples: Optional[int] = None,
    ):
        self.fixtures_dir = fixtures_dir or Config.FIXTURES_DIR
        self.claims_path = claims_path or Config.claims_path()
        self.sample_values = list(sample_values) if sample_values is not None else Config.audit_sample_values()
        self.max_samples = max_samples if max_samples is not None else Config.AUDIT_MAX_SAMPLES
        self.logger = logging.getLogger(__name__)
        self._problems: Dict[str, ProblemFile] = {}
        self._checks: Dict[str, Callable[[ProblemFile, LoadedProblem, ClaimCheck], Report]] = {
            "printed_bracket": self._check_printed_bracket,
            "printed_rho": self._check_printed_rho,
            "printed_nu": self._check_printed_nu,
            "genrep_valid": self._check_genrep_valid,
            "intertwining": self._check_intertwining,
            "filippov": self._check_filippov,
            "alpha_morphism": self._check_alpha_morphism,
            "cocycle": self._check_cocycle,
        }

    # -------------------------------------------------------------------------
    # Public API
    # -------------------------------------------------------------------------
    def run(self) -> List[Finding]:
        claims = load_claims(self.claims_path)
        findings = [self.audit_claim(claim) for claim in claims]
        mismatched = [f.claim for f in findings if not f.matches_expectation]
        if mismatched:
            self.logger.warning("Audit outcome differs from the recorded expectation for: %s", ", ".join(mismatched))
        self.logger.info("Audit finished: %d claims, %d discrepant", len(findings), sum(f.status == "DISCREPANT" for f in findings))
        return findings

    def audit_claim(self, claim: ClaimSpec) -> Finding:
        spec = CLAIM_CHECKS.get(claim.claim)
        if spec is None:
            raise LoadError(f"Claims file line {claim.line}: unknown claim '{claim.claim}'")
        problem = self._problem(spec.fixture)
        check = self._checks[spec.check]

        samples = failures = skipped = 0
        first_failure: Optional[Tuple[Violation, Dict[str, Fraction]]] = None
        for bindings in self.sample_points(problem, claim.fixed):
            if samples >= self.max_samples:
                break
            try:
                loaded = instantiate(problem, bindings, construct=False)
            except NonzeroConditionError:
                skipped += 1
                continue
            if spec.requires_valid and not self._original_validity(problem, loaded).passed:
                skipped += 1
                continue
            samples += 1
            report = check(problem, loaded, spec)
            if not report.passed:
                failures += 1
                if first_failure is None:
                    first_failure = (report.violations[0], bindings)

        finding = Finding(
            claim=claim.claim,
            source=spec.fixture,
            description=claim.description,
            expected=claim.expected,
            status="CONFIRMED",
            bindings=_format_bindings(claim.fixed),
            samples=samples,
        )
        if samples == 0:
            finding.status = "DISCREPANT"
            finding.detail = f"no admissible instantiation among the sampled points ({skipped} skipped)"
        elif first_failure is not None:
            violation, bindings = first_failure
            finding.status = "DISCREPANT"
            finding.identity = violation.identity
            finding.witness = list(violation.witness)
            finding.bindings = _format_bindings(bindings)
            finding.detail = f"fails at {failures} of {samples} sampled instantiations; first: {violation.describe()}"
        else:
            finding.detail = f"holds at {samples} sampled instantiations"
        if skipped:
            finding.detail += f"; {skipped} inadmissible instantiations skipped"
        self.logger.info("%s: %s (%s)", claim.claim, finding.status, finding.detail)
        return finding

    def sample_points(self, problem: ProblemFile, fixed: Dict[str, Fraction]) -> Iterator[Dict[str, Fraction]]:
        """Grid points over the unfixed parameters, lowest total index first."""
        free = [name for name in problem.param_names() if name not in fixed]
        nonzero = set(problem.nonzero_params())
        axes = []
        for name in free:
            values = [v for v in self.sample_values if not (v == 0 and name in nonzero)]
            axes.append(values)
        if any(not values for values in axes):
            return
        index_grid = product(*(range(len(values)) for values in axes))
        for indices in sorted(index_grid, key=lambda idx: (sum(idx), idx)):
            point = dict(fixed)
            point.update({name: axes[p][i] for p, (name, i) in enumerate(zip(free, indices))})
            yield point

    # -------------------------------------------------------------------------
    # Internal helpers
    # -------------------------------------------------------------------------
    def _problem(self, fixture: str) -> ProblemFile:
        if fixture not in self._problems:
            self._problems[fixture] = read_problem(os.path.join(self.fixtures_dir, fixture))
        return self._problems[fixture]

    @staticmethod
    def _untwisted(problem: ProblemFile, loaded: LoadedProblem) -> Tuple[HomAlgebra, Optional[GeneralizedRep]]:
        """Data before a CONSTRUCTION twist; the file's own structure otherwise."""
        g = loaded.representation
        if problem.construction != "twist":
            return loaded.algebra, g
        base = HomAlgebra.untwisted(loaded.algebra.bracket)
        if g is None:
            return base, None
        return base, GeneralizedRep(g.algebra_dim, g.carrier_dim, dict(g.rho), Matrix.identity(g.carrier_dim), dict(g.nu))

    def _original_validity(self, problem: ProblemFile, loaded: LoadedProblem) -> Report:
        base, g = self._untwisted(problem, loaded)
        return validate_generalized_rep(base, g)

    @staticmethod
    def _compare_printed(table: str, printed: Dict[Tuple[str, ...], Tuple], key: Optional[Tuple[str, ...]], compute) -> Report:
        report = Report(subject=table)
        if key is not None and key not in printed:
            raise InputError(f"Printed table {table} has no entry {' '.join(key)}")
        keys = [key] if key is not None else list(printed)
        for labels in keys:
            computed = compute(labels)
            report.checked += 1
            if tuple(printed[labels]) != tuple(computed):
                report.add(table.replace("_", "-"), labels, format_vector(printed[labels]), format_vector(computed))
        return report

    # -------------------------------------------------------------------------
    # Checks (each returns a Report; the claim holds at a point iff it passes)
    # -------------------------------------------------------------------------
    def _check_printed_bracket(self, problem: ProblemFile, loaded: LoadedProblem, spec: ClaimCheck) -> Report:
        """Printed twisted bracket against alpha∘[·,·,·]."""
        a = loaded.algebra

        def compute(labels):
            i, j, k = (_index(label) for label in labels)
            return mat_apply(a.alpha, a.basis_bracket(i, j, k))

        return self._compare_printed("printed_bracket", loaded.printed.get("printed_bracket", {}), spec.key, compute)

    def _check_printed_rho(self, problem: ProblemFile, loaded: LoadedProblem, spec: ClaimCheck) -> Report:
        """Printed twisted rho against A∘rho."""
        a, g = loaded.algebra, loaded.representation

        def compute(labels):
            i, j, k = (_index(label) for label in labels)
            e_i, e_j = basis_vector(a.dim, i), basis_vector(a.dim, j)
            return mat_apply(g.endo, g.act(e_i, e_j, basis_vector(g.carrier_dim, k)))

        return self._compare_printed("printed_rho", loaded.printed.get("printed_rho", {}), spec.key, compute)

    def _check_printed_nu(self, problem: ProblemFile, loaded: LoadedProblem, spec: ClaimCheck) -> Report:
        """Printed twisted nu against A∘nu."""
        g = loaded.representation

        def compute(labels):
            i, p, q = (_index(label) for label in labels)
            m = g.carrier_dim
            return mat_apply(g.endo, g.nu_of(basis_vector(g.algebra_dim, i), basis_vector(m, p), basis_vector(m, q)))

        return self._compare_printed("printed_nu", loaded.printed.get("printed_nu", {}), spec.key, compute)

    def _check_genrep_valid(self, problem: ProblemFile, loaded: LoadedProblem, spec: ClaimCheck) -> Report:
        return self._original_validity(problem, loaded)

    def _check_intertwining(self, problem: ProblemFile, loaded: LoadedProblem, spec: ClaimCheck) -> Report:
        base, g = self._untwisted(problem, loaded)
        return intertwining_report(base, g, loaded.algebra.alpha, loaded.representation.endo, "intertwine")

    def _check_filippov(self, problem: ProblemFile, loaded: LoadedProblem, spec: ClaimCheck) -> Report:
        return validate_filippov(loaded.algebra.bracket)

    def _check_alpha_morphism(self, problem: ProblemFile, loaded: LoadedProblem, spec: ClaimCheck) -> Report:
        return check_morphism(loaded.algebra.bracket, loaded.algebra.alpha)

    def _check_cocycle(self, problem: ProblemFile, loaded: LoadedProblem, spec: ClaimCheck) -> Report:
        """The printed cochain is compatible and d(phi) = 0."""
        if loaded.printed_cochain is None:
            raise InputError(f"{spec.fixture} has no printed_phi table")
        a, g, phi = loaded.algebra, loaded.representation, loaded.printed_cochain
        try:
            image = differential_d(a, g, phi)
        except PreconditionError as exc:
            if exc.report is not None:
                return exc.report
            raise
        report = Report(subject="cocycle", checked=1)
        for key, value in image.items():
            report.add("cocycle", key_labels(key, a.dim), format_vector(value), format_vector(zero_vector(len(value))))
        return report


def _index(label: str) -> int:
    return int(label[1:]) - 1


def _format_bindings(bindings: Dict[str, Fraction]) -> Dict[str, str]:
    return {name: str(value) for name, value in bindings.items()}


def format_finding(finding: Finding) -> str:
    line = f"{finding.claim}: {finding.status}"
    if not finding.matches_expectation:
        line += f" (expected {finding.expected})"
    if finding.identity:
        line += f" [{finding.identity} at ({', '.join(finding.witness)})]"
    if finding.bindings:
        line += " with " + ", ".join(f"{k}={v}" for k, v in finding.bindings.items())
    return f"{line}\n    {finding.detail}"
