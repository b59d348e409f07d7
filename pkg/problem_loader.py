"""Line-oriented problem files.

    # FIX-A
    KIND algebra
    DIM 3
    PARAMS
    lambda = 3
    NONZERO
    lambda
    CONSTRUCTION twist
    TABLE bracket
    e1 e2 e3 : 1, 0, 0
    TABLE alpha
    e1 : lambda, 0, 0

Headers: KIND, DIM n [m], PARAMS, NONZERO, CONSTRUCTION twist, DEGREE k and
TABLE <name>. Rows are ``labels : expr, expr, ...``; labels are e1.. for the
algebra and v1.. for the carrier. An absent alpha/endo table means the
identity; inside a present one, missing columns are zero.

Parameters are instantiated here: nothing downstream ever sees an expression.
"""
import logging
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from errors import (
    DimensionMismatchError,
    EvaluationError,
    LoadError,
    NonzeroConditionError,
    ParseError,
    UnboundParameterError,
)
from exact_linalg import Matrix, SkewTensor3, Vector, canonical_pair, permutation_sign, vec_neg, zero_vector
from expression_parser import ScalarExpr, parse_scalar_expr
from extensions import ExtensionData
from graded_calculus import DenseCochain, skew_cochain
from hom_nambu import HomAlgebra, twist_algebra
from representations import GeneralizedRep, Representation, twist_generalized_rep, twist_representation

logger = logging.getLogger(__name__)

KINDS = ("algebra", "representation", "genrep", "cochain", "extension")
CONSTRUCTIONS = ("twist",)
HEADERS = ("KIND", "DIM", "PARAMS", "NONZERO", "CONSTRUCTION", "DEGREE", "TABLE")

# table name -> (label pattern, value space); pattern None means 2(k-1)+1 labels over g⊕V
TABLES: Dict[str, Tuple[Optional[str], str]] = {
    "bracket": ("eee", "n"),
    "alpha": ("e", "n"),
    "rho": ("eev", "m"),
    "nu": ("evv", "m"),
    "endo": ("v", "m"),
    "omega": ("eee", "m"),
    "phi": (None, "m"),
    "printed_bracket": ("eee", "n"),
    "printed_rho": ("eev", "m"),
    "printed_nu": ("evv", "m"),
    "printed_phi": (None, "m"),
}

_LABEL = re.compile(r"^([ev])([1-9][0-9]*)$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass
class TableRow:
    labels: Tuple[str, ...]
    values: List[ScalarExpr]
    line: int = 0
    offset: int = 0


@dataclass
class ProblemFile:
    kind: str
    dims: Tuple[int, ...]
    params: List[Tuple[str, Optional[ScalarExpr]]] = field(default_factory=list)
    nonzero: List[ScalarExpr] = field(default_factory=list)
    construction: Optional[str] = None
    degree: Optional[int] = None
    tables: Dict[str, List[TableRow]] = field(default_factory=dict)
    source: str = "<string>"

    @property
    def algebra_dim(self) -> int:
        return self.dims[0]

    @property
    def carrier_dim(self) -> Optional[int]:
        return self.dims[1] if len(self.dims) > 1 else None

    def param_names(self) -> List[str]:
        return [name for name, _ in self.params]

    def nonzero_params(self) -> List[str]:
        """Parameters that occur in some NONZERO expression."""
        names = set()
        for expr in self.nonzero:
            names |= expr.identifiers()
        return [name for name in self.param_names() if name in names]


@dataclass
class LoadedProblem:
    """A fully instantiated problem: exact rationals only."""

    kind: str
    bindings: Dict[str, Fraction]
    algebra: HomAlgebra
    representation: Optional[Union[Representation, GeneralizedRep]] = None
    cochain: Optional[DenseCochain] = None
    extension: Optional[ExtensionData] = None
    printed: Dict[str, Dict[Tuple[str, ...], Vector]] = field(default_factory=dict)
    printed_cochain: Optional[DenseCochain] = None
    construction: Optional[str] = None


# -------------------------------------------------------------------------
# Parsing
# -------------------------------------------------------------------------
def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def _byte_len(text: str) -> int:
    return len(text.encode("utf-8"))


def _parse_expr_at(text: str, line_no: int, base_offset: int) -> ScalarExpr:
    try:
        return parse_scalar_expr(text)
    except ParseError as exc:
        raise ParseError(f"Bad expression {text.strip()!r}", base_offset + exc.offset, line_no) from exc


def _parse_int(token: str, what: str, line_no: int, offset: int) -> int:
    if not token.isdigit():
        raise ParseError(f"{what} must be a non-negative integer, got {token!r}", offset, line_no)
    return int(token)


def _parse_row(content: str, line_no: int, line_offset: int) -> TableRow:
    head, sep, tail = content.partition(":")
    if not sep:
        raise ParseError("Table row needs 'labels : values'", line_offset, line_no)
    labels = tuple(head.split())
    if not labels:
        raise ParseError("Table row has no labels", line_offset, line_no)
    for label in labels:
        if not _LABEL.match(label):
            raise ParseError(f"Bad basis label {label!r}", line_offset + _byte_len(head[: head.index(label)]), line_no)
    values = []
    position = _byte_len(head) + 1
    for piece in tail.split(","):
        values.append(_parse_expr_at(piece, line_no, line_offset + position))
        position += _byte_len(piece) + 1
    return TableRow(labels, values, line_no, line_offset)


def parse_problem(text: str, source: str = "<string>") -> ProblemFile:
    """Parse problem-file text; structure errors raise ParseError with line and byte offset."""
    kind: Optional[str] = None
    dims: Optional[Tuple[int, ...]] = None
    params: List[Tuple[str, Optional[ScalarExpr]]] = []
    nonzero: List[ScalarExpr] = []
    construction: Optional[str] = None
    degree: Optional[int] = None
    tables: Dict[str, List[TableRow]] = {}
    section: Optional[str] = None
    table: Optional[str] = None

    offset = 0
    for line_no, raw in enumerate(text.splitlines(keepends=True), start=1):
        line_offset = offset
        offset += _byte_len(raw)
        content = _strip_comment(raw).rstrip("\r\n")
        if not content.strip():
            continue
        tokens = content.split()
        keyword = tokens[0]
        if keyword in HEADERS:
            section, table = keyword, None
            arguments = tokens[1:]
            if keyword == "KIND":
                if len(arguments) != 1 or arguments[0] not in KINDS:
                    raise ParseError(f"KIND must be one of {', '.join(KINDS)}", line_offset, line_no)
                kind = arguments[0]
            elif keyword == "DIM":
                if len(arguments) not in (1, 2):
                    raise ParseError("DIM takes one or two integers", line_offset, line_no)
                dims = tuple(_parse_int(token, "DIM", line_no, line_offset) for token in arguments)
            elif keyword == "CONSTRUCTION":
                if len(arguments) != 1 or arguments[0] not in CONSTRUCTIONS:
                    raise ParseError(f"CONSTRUCTION must be one of {', '.join(CONSTRUCTIONS)}", line_offset, line_no)
                construction = arguments[0]
            elif keyword == "DEGREE":
                if len(arguments) != 1:
                    raise ParseError("DEGREE takes one integer", line_offset, line_no)
                degree = _parse_int(arguments[0], "DEGREE", line_no, line_offset)
                if degree < 1:
                    raise ParseError("DEGREE must be at least 1", line_offset, line_no)
            elif keyword == "TABLE":
                if len(arguments) != 1 or arguments[0] not in TABLES:
                    raise ParseError(f"Unknown table {' '.join(arguments)!r}", line_offset, line_no)
                table = arguments[0]
                if table in tables:
                    raise ParseError(f"Table {table!r} declared twice", line_offset, line_no)
                tables[table] = []
            elif arguments:
                raise ParseError(f"{keyword} takes no arguments", line_offset, line_no)
            continue

        if section == "PARAMS":
            name, sep, expr_text = content.partition("=")
            name = name.strip()
            if not _NAME.match(name):
                raise ParseError(f"Bad parameter name {name!r}", line_offset, line_no)
            if name in (existing for existing, _ in params):
                raise ParseError(f"Parameter {name!r} declared twice", line_offset, line_no)
            expr = _parse_expr_at(expr_text, line_no, line_offset + _byte_len(content[: content.index("=") + 1])) if sep else None
            params.append((name, expr))
        elif section == "NONZERO":
            nonzero.append(_parse_expr_at(content, line_no, line_offset))
        elif section == "TABLE" and table is not None:
            tables[table].append(_parse_row(content, line_no, line_offset))
        else:
            raise ParseError(f"Unexpected line outside any section: {content.strip()!r}", line_offset, line_no)

    if kind is None:
        raise ParseError("Missing KIND header", 0)
    if dims is None:
        raise ParseError("Missing DIM header", 0)
    problem = ProblemFile(kind, dims, params, nonzero, construction, degree, tables, source)
    logger.debug("parse_problem: %s kind=%s dims=%s params=%s tables=%s", source, kind, dims, problem.param_names(), list(tables))
    return problem


# -------------------------------------------------------------------------
# Instantiation
# -------------------------------------------------------------------------
def resolve_bindings(problem: ProblemFile, overrides: Optional[Mapping[str, Fraction]] = None) -> Dict[str, Fraction]:
    """Evaluate PARAMS in order (overrides win) and check the NONZERO list."""
    overrides = dict(overrides or {})
    declared = problem.param_names()
    unknown = sorted(set(overrides) - set(declared))
    if unknown:
        raise LoadError(f"{problem.source}: unknown parameter(s) {', '.join(unknown)}")
    env: Dict[str, Fraction] = {}
    for name, expr in problem.params:
        if name in overrides:
            env[name] = Fraction(overrides[name])
            continue
        if expr is None:
            raise UnboundParameterError(f"{problem.source}: parameter '{name}' has no value; bind it with --bind {name}=...")
        missing = sorted(expr.identifiers() - env.keys())
        if missing:
            raise UnboundParameterError(f"{problem.source}: parameter '{name}' refers to unbound {', '.join(missing)}")
        env[name] = expr.evaluate(env)
    for expr in problem.nonzero:
        missing = sorted(expr.identifiers() - env.keys())
        if missing:
            raise UnboundParameterError(f"{problem.source}: NONZERO condition {expr} uses undeclared {', '.join(missing)}")
        if expr.evaluate(env) == 0:
            raise NonzeroConditionError(f"{problem.source}: NONZERO condition {expr} evaluates to 0")
    return env


class _TableReader:
    """Evaluates table rows against resolved bindings and the file's dimensions."""

    def __init__(self, problem: ProblemFile, env: Mapping[str, Fraction]):
        self.problem = problem
        self.env = env
        self.n = problem.algebra_dim
        self.m = problem.carrier_dim

    def _fail(self, row: TableRow, message: str):
        return DimensionMismatchError(f"{self.problem.source}, line {row.line}: {message}")

    def _evaluate(self, row: TableRow, length: int) -> Vector:
        if len(row.values) != length:
            raise self._fail(row, f"expected {length} values, got {len(row.values)}")
        result = []
        for expr in row.values:
            missing = sorted(expr.identifiers() - self.env.keys())
            if missing:
                raise UnboundParameterError(f"{self.problem.source}, line {row.line}: undeclared identifier(s) {', '.join(missing)}")
            try:
                result.append(expr.evaluate(self.env))
            except EvaluationError as exc:
                raise EvaluationError(f"{self.problem.source}, line {row.line}: {exc}") from exc
        return tuple(result)

    def _value_dim(self, space: str, row: TableRow) -> int:
        if space == "n":
            return self.n
        if self.m is None:
            raise self._fail(row, "carrier dimension missing from DIM")
        return self.m

    def _indices(self, row: TableRow, pattern: Optional[str]) -> Tuple[int, ...]:
        """0-based indices; v-labels are offset by n when the pattern spans g⊕V."""
        if pattern is not None and len(row.labels) != len(pattern):
            raise ParseError(f"Expected {len(pattern)} labels, got {len(row.labels)}", row.offset, row.line)
        indices = []
        for position, label in enumerate(row.labels):
            letter, number = _LABEL.match(label).groups()
            index = int(number) - 1
            if pattern is not None and letter != pattern[position]:
                raise ParseError(f"Label {label!r} where a {pattern[position]}-label is expected", row.offset, row.line)
            if letter == "e":
                if index >= self.n:
                    raise self._fail(row, f"label {label} exceeds algebra dimension {self.n}")
                indices.append(index)
            else:
                if self.m is None or index >= self.m:
                    raise self._fail(row, f"label {label} exceeds carrier dimension {self.m}")
                indices.append(index if pattern is not None else self.n + index)
        return tuple(indices)

    def rows(self, name: str):
        pattern, space = TABLES[name]
        for row in self.problem.tables.get(name, []):
            yield row, self._indices(row, pattern), self._evaluate(row, self._value_dim(space, row))

    def has(self, name: str) -> bool:
        return name in self.problem.tables

    def skew3(self, name: str, value_dim: int) -> SkewTensor3:
        cells = {}
        for row, key, value in self.rows(name):
            if key in cells:
                raise LoadError(f"{self.problem.source}, line {row.line}: duplicate entry {' '.join(row.labels)}")
            cells[key] = value
        return SkewTensor3(self.n, cells, value_dim)

    def columns(self, name: str, size: int) -> Matrix:
        if not self.has(name):
            return Matrix.identity(size)
        columns = [zero_vector(size) for _ in range(size)]
        seen = set()
        for row, (j,), value in self.rows(name):
            if j in seen:
                raise LoadError(f"{self.problem.source}, line {row.line}: column {row.labels[0]} given twice")
            seen.add(j)
            columns[j] = value
        return Matrix.from_columns(columns, rows=size)

    def rho(self) -> Dict[Tuple[int, int], Matrix]:
        columns: Dict[Tuple[int, int], List[Vector]] = {}
        seen = set()
        for row, (i, j, k), value in self.rows("rho"):
            sign, pair = canonical_pair(i, j)
            if sign == 0:
                raise self._fail(row, "rho needs two distinct algebra labels")
            if (pair, k) in seen:
                raise LoadError(f"{self.problem.source}, line {row.line}: duplicate entry {' '.join(row.labels)}")
            seen.add((pair, k))
            table = columns.setdefault(pair, [zero_vector(self.m) for _ in range(self.m)])
            table[k] = value if sign > 0 else vec_neg(value)
        return {pair: Matrix.from_columns(cols, rows=self.m) for pair, cols in columns.items()}

    def nu(self) -> Dict[int, Dict[Tuple[int, int], Vector]]:
        nu: Dict[int, Dict[Tuple[int, int], Vector]] = {}
        for row, (i, a, b), value in self.rows("nu"):
            entries = nu.setdefault(i, {})
            if (a, b) in entries or (b, a) in entries:
                raise LoadError(f"{self.problem.source}, line {row.line}: duplicate entry {' '.join(row.labels)}")
            entries[a, b] = value
        return nu

    def cochain(self, name: str, degree: int) -> DenseCochain:
        space = self.n + self.m
        expected = 2 * (degree - 1) + 1
        entries = {}
        for row, key, value in self.rows(name):
            if len(key) != expected:
                raise self._fail(row, f"degree {degree} cochain entries need {expected} labels")
            if key in entries:
                raise LoadError(f"{self.problem.source}, line {row.line}: duplicate entry {' '.join(row.labels)}")
            if degree == 2 and permutation_sign(key) == 0:
                raise self._fail(row, "degree 2 cochains are skew; labels must be distinct")
            entries[key] = value
        if degree == 2:
            return skew_cochain(space, self.m, entries)
        values = {}
        for key, value in entries.items():
            pairs = tuple((key[2 * p], key[2 * p + 1]) for p in range(degree - 1))
            values[pairs, key[-1]] = value
        return DenseCochain(space, degree - 1, self.m, values)

    def printed(self) -> Dict[str, Dict[Tuple[str, ...], Vector]]:
        result = {}
        for name in TABLES:
            if name.startswith("printed_") and self.has(name):
                result[name] = {row.labels: value for row, _, value in self.rows(name)}
        return result


def instantiate(problem: ProblemFile, overrides: Optional[Mapping[str, Fraction]] = None, construct: bool = True) -> LoadedProblem:
    """Bind parameters and build the kernel value the file describes.

    With construct=False a CONSTRUCTION header is ignored: the algebra carries
    the file's bracket and alpha, the representation the file's endo.

    Raises:
        LoadError: unknown override, unbound parameter, NONZERO violation, shape mismatch
        PreconditionError: the requested construction is not applicable
    """
    env = resolve_bindings(problem, overrides)
    reader = _TableReader(problem, env)
    n, m = problem.algebra_dim, problem.carrier_dim
    kind = problem.kind
    if kind != "algebra" and m is None:
        raise DimensionMismatchError(f"{problem.source}: KIND {kind} needs DIM n m")
    if kind == "cochain" and problem.degree is None:
        raise LoadError(f"{problem.source}: KIND cochain needs a DEGREE header")
    twist = construct and problem.construction == "twist"
    if twist and kind == "extension":
        raise LoadError(f"{problem.source}: CONSTRUCTION twist is not available for extension files")

    bracket = reader.skew3("bracket", n)
    alpha = reader.columns("alpha", n)
    loaded = LoadedProblem(kind, env, HomAlgebra(bracket, alpha), printed=reader.printed())
    if reader.has("printed_phi"):
        if m is None:
            raise DimensionMismatchError(f"{problem.source}: printed_phi needs DIM n m")
        loaded.printed_cochain = reader.cochain("printed_phi", problem.degree or 2)

    if twist:
        loaded.construction = problem.construction

    if kind == "algebra":
        if twist:
            loaded.algebra = twist_algebra(bracket, alpha)
    elif kind == "representation":
        rep = Representation(n, m, reader.rho(), reader.columns("endo", m))
        if twist:
            loaded.algebra = twist_algebra(bracket, alpha)
            rep = twist_representation(bracket, rep, alpha)
        loaded.representation = rep
    else:
        endo = reader.columns("endo", m)
        rho, nu = reader.rho(), reader.nu()
        if twist:
            plain = GeneralizedRep(n, m, rho, Matrix.identity(m), nu)
            loaded.algebra, loaded.representation = twist_generalized_rep(HomAlgebra.untwisted(bracket), plain, alpha, endo)
        else:
            loaded.representation = GeneralizedRep(n, m, rho, endo, nu)
        if kind == "cochain":
            loaded.cochain = reader.cochain("phi", problem.degree)
        elif kind == "extension":
            loaded.extension = ExtensionData(loaded.algebra, loaded.representation, reader.skew3("omega", m))
    logger.info("instantiate: %s kind=%s bindings=%s", problem.source, kind, {k: str(v) for k, v in env.items()})
    return loaded


def load_problem(path: str, bindings: Optional[Mapping[str, Fraction]] = None, construct: bool = True) -> LoadedProblem:
    return instantiate(read_problem(path), bindings, construct)


def read_problem(path: str) -> ProblemFile:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise LoadError(f"Cannot read problem file {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise LoadError(f"Problem file {path} is not valid UTF-8: {exc}") from exc
    return parse_problem(text, source=os.path.basename(path))


# -------------------------------------------------------------------------
# Pretty printer
# -------------------------------------------------------------------------
def format_problem(problem: ProblemFile) -> str:
    lines = [f"KIND {problem.kind}", "DIM " + " ".join(str(d) for d in problem.dims)]
    if problem.params:
        lines.append("PARAMS")
        for name, expr in problem.params:
            lines.append(name if expr is None else f"{name} = {expr}")
    if problem.nonzero:
        lines.append("NONZERO")
        lines.extend(str(expr) for expr in problem.nonzero)
    if problem.construction:
        lines.append(f"CONSTRUCTION {problem.construction}")
    if problem.degree is not None:
        lines.append(f"DEGREE {problem.degree}")
    for name, rows in problem.tables.items():
        lines.append(f"TABLE {name}")
        for row in rows:
            lines.append(f"{' '.join(row.labels)} : {', '.join(str(v) for v in row.values)}")
    return "\n".join(lines) + "\n"
