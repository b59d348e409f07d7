"""3-Hom-Lie algebras: the algebra value, its validators, twisting, the
fundamental-object (Leibniz) bracket and the adjoint representation."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

from errors import InputError, PreconditionError
from exact_linalg import (
    ZERO,
    Matrix,
    SkewTensor3,
    Vector,
    canonical_pair,
    canonical_pairs,
    format_vector,
    mat_apply,
    skew_lookup,
    to_scalar,
    vec_add,
)
from models import Report

logger = logging.getLogger(__name__)


def basis_label(index: int, algebra_dim: Optional[int] = None) -> str:
    """e1.. for algebra indices; v1.. for indices past algebra_dim (on g⊕V)."""
    if algebra_dim is not None and index >= algebra_dim:
        return f"v{index - algebra_dim + 1}"
    return f"e{index + 1}"


def carrier_label(index: int) -> str:
    return f"v{index + 1}"


@dataclass(frozen=True)
class HomAlgebra:
    """Bracket structure constants plus the twist map α (validity is a Report, not an invariant)."""

    bracket: SkewTensor3
    alpha: Matrix

    def __post_init__(self):
        if self.bracket.value_dim != self.bracket.dim:
            raise InputError(f"Bracket values have length {self.bracket.value_dim}, expected {self.bracket.dim}")
        if self.alpha.shape != (self.bracket.dim, self.bracket.dim):
            raise InputError(f"Twist map has shape {self.alpha.shape}, expected {self.bracket.dim}x{self.bracket.dim}")

    @classmethod
    def untwisted(cls, bracket: SkewTensor3) -> "HomAlgebra":
        return cls(bracket, Matrix.identity(bracket.dim))

    @property
    def dim(self) -> int:
        return self.bracket.dim

    def product(self, u: Vector, v: Vector, w: Vector) -> Vector:
        return self.bracket.evaluate(u, v, w)

    def basis_bracket(self, i: int, j: int, k: int) -> Vector:
        return skew_lookup(self.bracket, i, j, k)

    def alpha_image(self, i: int) -> Vector:
        return self.alpha.column(i)


# -------------------------------------------------------------------------
# Fundamental objects
# -------------------------------------------------------------------------
class FundamentalObject:
    """An element of ∧²g stored on the s<t basis."""

    __slots__ = ("dim", "_components")

    def __init__(self, dim: int, components: Optional[Dict[Tuple[int, int], object]] = None):
        self.dim = dim
        stored: Dict[Tuple[int, int], Fraction] = {}
        for (s, t), coefficient in (components or {}).items():
            if not (0 <= s < dim and 0 <= t < dim):
                raise InputError(f"Pair ({s}, {t}) out of range for dimension {dim}")
            sign, key = canonical_pair(s, t)
            if sign == 0:
                continue
            stored[key] = stored.get(key, ZERO) + sign * to_scalar(coefficient)
        self._components = {key: c for key, c in stored.items() if c}

    @classmethod
    def basis(cls, dim: int, s: int, t: int) -> "FundamentalObject":
        return cls(dim, {(s, t): 1})

    @classmethod
    def wedge(cls, x: Sequence[Fraction], y: Sequence[Fraction]) -> "FundamentalObject":
        if len(x) != len(y):
            raise InputError("Wedge of vectors of different lengths")
        dim = len(x)
        return cls(dim, {(s, t): x[s] * y[t] - x[t] * y[s] for s, t in combinations(range(dim), 2)})

    @property
    def components(self) -> Dict[Tuple[int, int], Fraction]:
        return dict(self._components)

    def items(self):
        return sorted(self._components.items())

    def coefficient(self, s: int, t: int) -> Fraction:
        sign, key = canonical_pair(s, t)
        return sign * self._components.get(key, ZERO)

    def is_zero(self) -> bool:
        return not self._components

    def map(self, alpha: Matrix) -> "FundamentalObject":
        """ᾱ(x∧y) = αx∧αy, extended linearly."""
        total = FundamentalObject(self.dim)
        for (s, t), c in self._components.items():
            total = total + FundamentalObject.wedge(alpha.column(s), alpha.column(t)).scale(c)
        return total

    def scale(self, c) -> "FundamentalObject":
        c = to_scalar(c)
        return FundamentalObject(self.dim, {key: c * v for key, v in self._components.items()})

    def __add__(self, other: "FundamentalObject") -> "FundamentalObject":
        if self.dim != other.dim:
            raise InputError("Adding fundamental objects of different dimensions")
        merged = dict(self._components)
        for key, c in other._components.items():
            merged[key] = merged.get(key, ZERO) + c
        return FundamentalObject(self.dim, merged)

    def __sub__(self, other: "FundamentalObject") -> "FundamentalObject":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FundamentalObject):
            return NotImplemented
        return self.dim == other.dim and self._components == other._components

    def __hash__(self) -> int:
        return hash((self.dim, tuple(sorted(self._components.items()))))

    def __repr__(self) -> str:
        if not self._components:
            return "0"
        terms = [f"{c}*e{s + 1}^e{t + 1}" for (s, t), c in sorted(self._components.items())]
        return " + ".join(terms)


def fundamental_bracket(a: HomAlgebra, X: FundamentalObject, Y: FundamentalObject) -> FundamentalObject:
    """[X,Y]_L = [x1,x2,y1]∧α(y2) + α(y1)∧[x1,x2,y2], bilinear over components."""
    if X.dim != a.dim or Y.dim != a.dim:
        raise InputError(f"Fundamental objects of dimension {X.dim}/{Y.dim} on a {a.dim}-dimensional algebra")
    total = FundamentalObject(a.dim)
    for ((s, t), c), ((u, w), d) in product(X.items(), Y.items()):
        first = FundamentalObject.wedge(a.basis_bracket(s, t, u), a.alpha_image(w))
        second = FundamentalObject.wedge(a.alpha_image(u), a.basis_bracket(s, t, w))
        total = total + (first + second).scale(c * d)
    return total


# -------------------------------------------------------------------------
# Validators
# -------------------------------------------------------------------------
def _labels(indices: Sequence[int]) -> List[str]:
    return [basis_label(i) for i in indices]


def _check_alpha_morphism(a: HomAlgebra, report: Report, label: str) -> None:
    n = a.dim
    for i, j, k in combinations(range(n), 3):
        left = mat_apply(a.alpha, a.basis_bracket(i, j, k))
        right = a.product(a.alpha_image(i), a.alpha_image(j), a.alpha_image(k))
        report.checked += 1
        if left != right:
            report.add(label, _labels((i, j, k)), format_vector(left), format_vector(right))


def _check_filippov_jacobi(bracket: SkewTensor3, alpha: Matrix, report: Report, label: str) -> None:
    """[αu,αv,[x,y,z]] = [[u,v,x],αy,αz] + [αx,[u,v,y],αz] + [αx,αy,[u,v,z]]."""
    n = bracket.dim
    columns = [alpha.column(i) for i in range(n)]
    if bracket.is_zero():
        report.checked += len(list(combinations(range(n), 2))) * len(list(combinations(range(n), 3)))
        return
    for u, v in combinations(range(n), 2):
        for x, y, z in combinations(range(n), 3):
            left = bracket.evaluate(columns[u], columns[v], skew_lookup(bracket, x, y, z))
            right = vec_add(
                vec_add(
                    bracket.evaluate(skew_lookup(bracket, u, v, x), columns[y], columns[z]),
                    bracket.evaluate(columns[x], skew_lookup(bracket, u, v, y), columns[z]),
                ),
                bracket.evaluate(columns[x], columns[y], skew_lookup(bracket, u, v, z)),
            )
            report.checked += 1
            if left != right:
                report.add(label, _labels((u, v, x, y, z)), format_vector(left), format_vector(right))


def validate_filippov(bracket: SkewTensor3) -> Report:
    """Filippov-Jacobi identity over all u<v, x<y<z."""
    report = Report(subject="filippov")
    _check_filippov_jacobi(bracket, Matrix.identity(bracket.dim), report, "FJ")
    logger.info("validate_filippov: n=%d, %d checks, %d violations", bracket.dim, report.checked, len(report.violations))
    return report


def validate_hom_algebra(a: HomAlgebra) -> Report:
    """Multiplicativity of α plus the Hom-Filippov-Jacobi identity."""
    report = Report(subject="hom-algebra")
    _check_alpha_morphism(a, report, "alpha-morphism")
    _check_filippov_jacobi(a.bracket, a.alpha, report, "HomFJ")
    logger.info("validate_hom_algebra: n=%d, %d checks, %d violations", a.dim, report.checked, len(report.violations))
    return report


def check_morphism(bracket: SkewTensor3, beta: Matrix, label: str = "alpha-morphism") -> Report:
    """β[x,y,z] = [βx,βy,βz] on all basis triples of one bracket."""
    report = Report(subject="morphism")
    _check_alpha_morphism(HomAlgebra(bracket, beta), report, label)
    return report


def twist_algebra(bracket: SkewTensor3, alpha: Matrix) -> HomAlgebra:
    """Twist a 3-Lie algebra along a morphism α: bracket_α = α∘bracket.

    Raises:
        PreconditionError: bracket fails Filippov-Jacobi, or α is not a morphism
    """
    if alpha.shape != (bracket.dim, bracket.dim):
        raise InputError(f"Twist map has shape {alpha.shape}, expected {bracket.dim}x{bracket.dim}")
    filippov = validate_filippov(bracket)
    if not filippov.passed:
        logger.warning("twist_algebra: bracket fails Filippov-Jacobi at %s", filippov.violations[0].witness)
        raise PreconditionError("Bracket is not a 3-Lie bracket", filippov)
    morphism = check_morphism(bracket, alpha)
    if not morphism.passed:
        witness = ", ".join(morphism.violations[0].witness)
        logger.warning("twist_algebra: alpha is not a morphism at (%s)", witness)
        raise PreconditionError(f"Twist map is not an algebra morphism at ({witness})", morphism)
    return HomAlgebra(bracket.map_values(alpha), alpha)


def validate_hom_leibniz(a: HomAlgebra) -> Report:
    """Hom-Leibniz structure on ∧²g: multiplicativity of ᾱ and the left Leibniz identity."""
    report = Report(subject="hom-leibniz")
    basis = [FundamentalObject.basis(a.dim, s, t) for s, t in canonical_pairs(a.dim)]
    twisted = [X.map(a.alpha) for X in basis]
    brackets = {}
    for (p, X), (q, Y) in product(enumerate(basis), repeat=2):
        brackets[p, q] = fundamental_bracket(a, X, Y)

    def witness(*objects: FundamentalObject) -> List[str]:
        return [repr(X) for X in objects]

    for (p, X), (q, Y) in product(enumerate(basis), repeat=2):
        left = brackets[p, q].map(a.alpha)
        right = fundamental_bracket(a, twisted[p], twisted[q])
        report.checked += 1
        if left != right:
            report.add("Leibniz-alpha-morphism", witness(X, Y), [repr(left)], [repr(right)])
    for (p, X), (q, Y), (r, Z) in product(enumerate(basis), repeat=3):
        left = fundamental_bracket(a, twisted[p], brackets[q, r])
        right = fundamental_bracket(a, brackets[p, q], twisted[r]) + fundamental_bracket(a, twisted[q], brackets[p, r])
        report.checked += 1
        if left != right:
            report.add("HomLeibniz", witness(X, Y, Z), [repr(left)], [repr(right)])
    return report


def adjoint_rep(a: HomAlgebra):
    """ad(x1,x2)(y) = [x1,x2,y] on the carrier g, with endomorphism α."""
    from representations import Representation

    report = validate_hom_algebra(a)
    if not report.passed:
        raise PreconditionError("Adjoint representation needs a valid 3-Hom-Lie algebra", report)
    n = a.dim
    rho = {}
    for i, j in combinations(range(n), 2):
        rho[i, j] = Matrix.from_columns([a.basis_bracket(i, j, k) for k in range(n)], rows=n)
    return Representation(algebra_dim=n, carrier_dim=n, rho=rho, endo=a.alpha)

