"""Ordinary and generalized representations of 3-Hom-Lie algebras.

Conventions: ρ is stored per canonical basis pair (i<j) as an m×m matrix,
ν per generator i as a table (a<b) -> ν(e_i)(v_a, v_b). On g⊕V the
g-block comes first, so every canonical triple has the shape
(g,g,g), (g,g,V), (g,V,V) or (V,V,V).
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

from errors import InputError, PreconditionError
from exact_linalg import (
    ZERO,
    Matrix,
    SkewTensor3,
    Vector,
    basis_vector,
    canonical_pair,
    format_vector,
    mat_apply,
    vec_accumulate,
    vec_add,
    vec_is_zero,
    vec_neg,
    vec_sub,
    vector,
    zero_vector,
)
from hom_nambu import HomAlgebra, basis_label, carrier_label, check_morphism, validate_hom_algebra
from models import Report

logger = logging.getLogger(__name__)

PairKey = Tuple[int, int]
RhoTable = Dict[PairKey, Matrix]
NuTable = Dict[int, Dict[PairKey, Vector]]


def _normalize_rho(algebra_dim: int, carrier_dim: int, rho: RhoTable) -> RhoTable:
    stored: RhoTable = {}
    for (i, j), matrix in rho.items():
        if not (0 <= i < algebra_dim and 0 <= j < algebra_dim):
            raise InputError(f"rho pair ({i}, {j}) out of range for dimension {algebra_dim}")
        if matrix.shape != (carrier_dim, carrier_dim):
            raise InputError(f"rho({i}, {j}) has shape {matrix.shape}, expected {carrier_dim}x{carrier_dim}")
        sign, key = canonical_pair(i, j)
        if sign == 0:
            if not matrix.is_zero():
                raise InputError(f"rho at repeated pair ({i}, {i}) must vanish")
            continue
        signed = matrix if sign > 0 else -matrix
        if key in stored and stored[key] != signed:
            raise InputError(f"Conflicting rho entries for pair {key}")
        stored[key] = signed
    return {key: m for key, m in sorted(stored.items()) if not m.is_zero()}


def _normalize_nu(algebra_dim: int, carrier_dim: int, nu: NuTable) -> NuTable:
    stored: NuTable = {}
    for i, table in nu.items():
        if not 0 <= i < algebra_dim:
            raise InputError(f"nu generator {i} out of range for dimension {algebra_dim}")
        for (a, b), value in table.items():
            if not (0 <= a < carrier_dim and 0 <= b < carrier_dim):
                raise InputError(f"nu pair ({a}, {b}) out of range for carrier dimension {carrier_dim}")
            value = vector(value)
            if len(value) != carrier_dim:
                raise InputError(f"nu({i})({a}, {b}) has length {len(value)}, expected {carrier_dim}")
            sign, key = canonical_pair(a, b)
            if sign == 0:
                if not vec_is_zero(value):
                    raise InputError(f"nu({i}) at repeated pair ({a}, {a}) must vanish")
                continue
            signed = value if sign > 0 else vec_neg(value)
            entries = stored.setdefault(i, {})
            if key in entries and entries[key] != signed:
                raise InputError(f"Conflicting nu entries for generator {i}, pair {key}")
            entries[key] = signed
    cleaned: NuTable = {}
    for i, table in sorted(stored.items()):
        kept = {key: v for key, v in sorted(table.items()) if not vec_is_zero(v)}
        if kept:
            cleaned[i] = kept
    return cleaned


class _RhoActions:
    """ρ evaluation shared by both representation flavors."""

    algebra_dim: int
    carrier_dim: int
    rho: RhoTable
    endo: Matrix

    def rho_basis(self, i: int, j: int) -> Matrix:
        sign, key = canonical_pair(i, j)
        matrix = self.rho.get(key)
        if sign == 0 or matrix is None:
            return Matrix.zeros(self.carrier_dim, self.carrier_dim)
        return matrix if sign > 0 else -matrix

    def rho_of(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Matrix:
        total = Matrix.zeros(self.carrier_dim, self.carrier_dim)
        for (i, j), matrix in self.rho.items():
            c = x[i] * y[j] - x[j] * y[i]
            if c:
                total = total + matrix.scale(c)
        return total

    def act(self, x: Sequence[Fraction], y: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
        """ρ(x,y)v for arbitrary vectors."""
        total = [ZERO] * self.carrier_dim
        for (i, j), matrix in self.rho.items():
            c = x[i] * y[j] - x[j] * y[i]
            if c:
                vec_accumulate(total, c, mat_apply(matrix, v))
        return tuple(total)

    def _check_endo(self) -> None:
        if self.endo.shape != (self.carrier_dim, self.carrier_dim):
            raise InputError(f"Endomorphism has shape {self.endo.shape}, expected {self.carrier_dim}x{self.carrier_dim}")


@dataclass(frozen=True)
class Representation(_RhoActions):
    """(V, ρ, A): ρ on canonical pairs, A the endomorphism of V."""

    algebra_dim: int
    carrier_dim: int
    rho: RhoTable
    endo: Matrix

    def __post_init__(self):
        object.__setattr__(self, "rho", _normalize_rho(self.algebra_dim, self.carrier_dim, self.rho))
        self._check_endo()


@dataclass(frozen=True)
class GeneralizedRep(_RhoActions):
    """(V, ρ, ν, A) with ν(e_i) a skew bilinear map on V."""

    algebra_dim: int
    carrier_dim: int
    rho: RhoTable
    endo: Matrix
    nu: NuTable = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rho", _normalize_rho(self.algebra_dim, self.carrier_dim, self.rho))
        object.__setattr__(self, "nu", _normalize_nu(self.algebra_dim, self.carrier_dim, self.nu))
        self._check_endo()

    @classmethod
    def from_representation(cls, r: Representation) -> "GeneralizedRep":
        return cls(r.algebra_dim, r.carrier_dim, dict(r.rho), r.endo, {})

    @property
    def representation(self) -> Representation:
        return Representation(self.algebra_dim, self.carrier_dim, dict(self.rho), self.endo)

    def nu_basis(self, i: int, a: int, b: int) -> Vector:
        sign, key = canonical_pair(a, b)
        value = self.nu.get(i, {}).get(key)
        if sign == 0 or value is None:
            return zero_vector(self.carrier_dim)
        return value if sign > 0 else vec_neg(value)

    def nu_of(self, x: Sequence[Fraction], u: Sequence[Fraction], w: Sequence[Fraction]) -> Vector:
        """ν(x)(u, w) for arbitrary vectors."""
        total = [ZERO] * self.carrier_dim
        for i, table in self.nu.items():
            if not x[i]:
                continue
            for (a, b), value in table.items():
                c = x[i] * (u[a] * w[b] - u[b] * w[a])
                if c:
                    vec_accumulate(total, c, value)
        return tuple(total)


@dataclass(frozen=True)
class EquivalenceWitness:
    """T: V1 -> V2 intertwining two generalized representations."""

    t: Matrix


# -------------------------------------------------------------------------
# Identity families
# -------------------------------------------------------------------------
class _IdentityContext:
    """Basis data for evaluating representation identities on canonical tuples.

    ``omega`` (a V-valued SkewTensor3) is only present for extension data; the
    families below reduce to the representation identities when it is absent.
    """

    def __init__(self, a: HomAlgebra, rep: _RhoActions, omega: Optional[SkewTensor3] = None):
        if rep.algebra_dim != a.dim:
            raise InputError(f"Representation of a {rep.algebra_dim}-dimensional algebra checked against dimension {a.dim}")
        self.a = a
        self.rep = rep
        self.n = a.dim
        self.m = rep.carrier_dim
        self.omega = omega
        self.e = [basis_vector(self.n, i) for i in range(self.n)]
        self.v = [basis_vector(self.m, k) for k in range(self.m)]
        self.al = [a.alpha_image(i) for i in range(self.n)]
        self.Av = [mat_apply(rep.endo, self.v[k]) for k in range(self.m)]
        self.has_nu = isinstance(rep, GeneralizedRep) and bool(rep.nu)

    def br(self, i: int, j: int, k: int) -> Vector:
        return self.a.basis_bracket(i, j, k)

    def rho(self, x: Vector, y: Vector, w: Vector) -> Vector:
        return self.rep.act(x, y, w)

    def nu(self, x: Vector, u: Vector, w: Vector) -> Vector:
        if not self.has_nu:
            return zero_vector(self.m)
        return self.rep.nu_of(x, u, w)

    def om(self, i: int, j: int, k: int) -> Vector:
        if self.omega is None:
            return zero_vector(self.m)
        return self.omega.lookup(i, j, k)

    def om_vec(self, x: Vector, y: Vector, z: Vector) -> Vector:
        if self.omega is None:
            return zero_vector(self.m)
        return self.omega.evaluate(x, y, z)

    def A(self, w: Vector) -> Vector:
        return mat_apply(self.rep.endo, w)

    def label(self, kinds: str, indices: Sequence[int]) -> List[str]:
        return [basis_label(i) if kind == "g" else carrier_label(i) for kind, i in zip(kinds, indices)]

    def record(self, report: Report, identity: str, kinds: str, indices: Sequence[int], left: Vector, right: Vector) -> None:
        report.checked += 1
        if left != right:
            report.add(identity, self.label(kinds, indices), format_vector(left), format_vector(right))


def _check_compat_rho(ctx: _IdentityContext, report: Report, label: str) -> None:
    """A∘ρ(x1,x2) = ρ(αx1,αx2)∘A."""
    for (i, j), k in product(combinations(range(ctx.n), 2), range(ctx.m)):
        left = ctx.A(ctx.rho(ctx.e[i], ctx.e[j], ctx.v[k]))
        right = ctx.rho(ctx.al[i], ctx.al[j], ctx.Av[k])
        ctx.record(report, label, "ggv", (i, j, k), left, right)


def _check_compat_nu(ctx: _IdentityContext, report: Report, label: str) -> None:
    """A∘ν(x) = ν(αx)∘(A⊗A)."""
    for i, (a, b) in product(range(ctx.n), combinations(range(ctx.m), 2)):
        left = ctx.A(ctx.nu(ctx.e[i], ctx.v[a], ctx.v[b]))
        right = ctx.nu(ctx.al[i], ctx.Av[a], ctx.Av[b])
        ctx.record(report, label, "gvv", (i, a, b), left, right)


def _check_compat_omega(ctx: _IdentityContext, report: Report, label: str) -> None:
    """A∘ω(x,y,z) = ω(αx,αy,αz)."""
    for i, j, k in combinations(range(ctx.n), 3):
        left = ctx.A(ctx.om(i, j, k))
        right = ctx.om_vec(ctx.al[i], ctx.al[j], ctx.al[k])
        ctx.record(report, label, "ggg", (i, j, k), left, right)


def _check_pair_pair(ctx: _IdentityContext, report: Report, label: str) -> None:
    """ρ(αx1,αx2)ρ(x3,x4) − ρ(αx3,αx4)ρ(x1,x2) = (ρ([x1,x2,x3],αx4) − ρ([x1,x2,x4],αx3))A,
    plus ν(αx4)(A·, ω(x1,x2,x3)) − ν(αx3)(A·, ω(x1,x2,x4)) on extension data."""
    e, al = ctx.e, ctx.al
    for (x1, x2), (x3, x4), k in product(combinations(range(ctx.n), 2), combinations(range(ctx.n), 2), range(ctx.m)):
        v, Av = ctx.v[k], ctx.Av[k]
        left = vec_sub(
            ctx.rho(al[x1], al[x2], ctx.rho(e[x3], e[x4], v)),
            ctx.rho(al[x3], al[x4], ctx.rho(e[x1], e[x2], v)),
        )
        right = vec_sub(
            ctx.rho(ctx.br(x1, x2, x3), al[x4], Av),
            ctx.rho(ctx.br(x1, x2, x4), al[x3], Av),
        )
        if ctx.omega is not None:
            right = vec_add(right, ctx.nu(al[x4], Av, ctx.om(x1, x2, x3)))
            right = vec_sub(right, ctx.nu(al[x3], Av, ctx.om(x1, x2, x4)))
        ctx.record(report, label, "ggggv", (x1, x2, x3, x4, k), left, right)


def _check_bracket_pair(ctx: _IdentityContext, report: Report, label: str) -> None:
    """ρ([x1,x2,x3],αx4)A = ρ(αx2,αx3)ρ(x1,x4) + ρ(αx3,αx1)ρ(x2,x4) + ρ(αx1,αx2)ρ(x3,x4),
    with ν(αx4)(A·, ω(x1,x2,x3)) added on the left for extension data."""
    e, al = ctx.e, ctx.al
    for (x1, x2, x3), x4, k in product(combinations(range(ctx.n), 3), range(ctx.n), range(ctx.m)):
        v, Av = ctx.v[k], ctx.Av[k]
        left = ctx.rho(ctx.br(x1, x2, x3), al[x4], Av)
        if ctx.omega is not None:
            left = vec_add(left, ctx.nu(al[x4], Av, ctx.om(x1, x2, x3)))
        right = vec_add(
            vec_add(
                ctx.rho(al[x2], al[x3], ctx.rho(e[x1], e[x4], v)),
                ctx.rho(al[x3], al[x1], ctx.rho(e[x2], e[x4], v)),
            ),
            ctx.rho(al[x1], al[x2], ctx.rho(e[x3], e[x4], v)),
        )
        ctx.record(report, label, "ggggv", (x1, x2, x3, x4, k), left, right)


def _check_eq3(ctx: _IdentityContext, report: Report, label: str) -> None:
    """ρ(αx1,αx2)ν(x3)(v1,v2) = ν([x1,x2,x3])(Av1,Av2) + ν(αx3)(ρ(x1,x2)v1,Av2) + ν(αx3)(Av1,ρ(x1,x2)v2)."""
    e, al = ctx.e, ctx.al
    for (x1, x2), x3, (a, b) in product(combinations(range(ctx.n), 2), range(ctx.n), combinations(range(ctx.m), 2)):
        v1, v2 = ctx.v[a], ctx.v[b]
        left = ctx.rho(al[x1], al[x2], ctx.nu(e[x3], v1, v2))
        right = vec_add(
            vec_add(
                ctx.nu(ctx.br(x1, x2, x3), ctx.Av[a], ctx.Av[b]),
                ctx.nu(al[x3], ctx.rho(e[x1], e[x2], v1), ctx.Av[b]),
            ),
            ctx.nu(al[x3], ctx.Av[a], ctx.rho(e[x1], e[x2], v2)),
        )
        ctx.record(report, label, "gggvv", (x1, x2, x3, a, b), left, right)


def _check_eq3_cyclic(ctx: _IdentityContext, report: Report, label: str) -> None:
    """ν([x1,x2,x3])(Av1,Av2) = ρ(αx2,αx3)ν(x1)(v1,v2) + ρ(αx3,αx1)ν(x2)(v1,v2) + ρ(αx1,αx2)ν(x3)(v1,v2)."""
    e, al = ctx.e, ctx.al
    for (x1, x2, x3), (a, b) in product(combinations(range(ctx.n), 3), combinations(range(ctx.m), 2)):
        v1, v2 = ctx.v[a], ctx.v[b]
        left = ctx.nu(ctx.br(x1, x2, x3), ctx.Av[a], ctx.Av[b])
        right = vec_add(
            vec_add(
                ctx.rho(al[x2], al[x3], ctx.nu(e[x1], v1, v2)),
                ctx.rho(al[x3], al[x1], ctx.nu(e[x2], v1, v2)),
            ),
            ctx.rho(al[x1], al[x2], ctx.nu(e[x3], v1, v2)),
        )
        ctx.record(report, label, "gggvv", (x1, x2, x3, a, b), left, right)


def _check_eq4(ctx: _IdentityContext, report: Report, label: str) -> None:
    """ν(αx1)(Av1,ρ(x2,x3)v2) = ν(αx3)(Av2,ρ(x2,x1)v1) + ν(αx2)(ρ(x3,x1)v1,Av2) + ρ(αx2,αx3)ν(x1)(v1,v2)."""
    e, al = ctx.e, ctx.al
    for x1, (x2, x3), a, b in product(range(ctx.n), combinations(range(ctx.n), 2), range(ctx.m), range(ctx.m)):
        v1, v2 = ctx.v[a], ctx.v[b]
        left = ctx.nu(al[x1], ctx.Av[a], ctx.rho(e[x2], e[x3], v2))
        right = vec_add(
            vec_add(
                ctx.nu(al[x3], ctx.Av[b], ctx.rho(e[x2], e[x1], v1)),
                ctx.nu(al[x2], ctx.rho(e[x3], e[x1], v1), ctx.Av[b]),
            ),
            ctx.rho(al[x2], al[x3], ctx.nu(e[x1], v1, v2)),
        )
        ctx.record(report, label, "gvggv", (x1, a, x2, x3, b), left, right)


def _check_eq5(ctx: _IdentityContext, report: Report, label: str) -> None:
    """ν(αx1)(Av1,ν(x2)(v2,v3)) = ν(αx2)(ν(x1)(v1,v2),Av3) + ν(αx2)(Av2,ν(x1)(v1,v3))."""
    e, al = ctx.e, ctx.al
    for x1, x2, a, (b, c) in product(range(ctx.n), range(ctx.n), range(ctx.m), combinations(range(ctx.m), 2)):
        v1, v2, v3 = ctx.v[a], ctx.v[b], ctx.v[c]
        left = ctx.nu(al[x1], ctx.Av[a], ctx.nu(e[x2], v2, v3))
        right = vec_add(
            ctx.nu(al[x2], ctx.nu(e[x1], v1, v2), ctx.Av[c]),
            ctx.nu(al[x2], ctx.Av[b], ctx.nu(e[x1], v1, v3)),
        )
        ctx.record(report, label, "gvvvg", (x1, a, b, c, x2), left, right)


def _check_eq6(ctx: _IdentityContext, report: Report, label: str) -> None:
    """ν(αx1)(ν(x2)(v1,v2),Av3) = ν(αx2)(ν(x1)(v1,v2),Av3)."""
    e, al = ctx.e, ctx.al
    for (x1, x2), (a, b), c in product(combinations(range(ctx.n), 2), combinations(range(ctx.m), 2), range(ctx.m)):
        v1, v2 = ctx.v[a], ctx.v[b]
        left = ctx.nu(al[x1], ctx.nu(e[x2], v1, v2), ctx.Av[c])
        right = ctx.nu(al[x2], ctx.nu(e[x1], v1, v2), ctx.Av[c])
        ctx.record(report, label, "vvggv", (a, b, x1, x2, c), left, right)


def _check_base(a: HomAlgebra, report: Report) -> None:
    base = validate_hom_algebra(a)
    report.checked += base.checked
    for violation in base.violations:
        report.violations.append(violation.model_copy(update={"identity": f"base-{violation.identity}"}))


# -------------------------------------------------------------------------
# Validators
# -------------------------------------------------------------------------
def validate_representation(a: HomAlgebra, r: Representation) -> Report:
    """Compatibility with A and the two quadratic identities."""
    ctx = _IdentityContext(a, r)
    report = Report(subject="representation")
    _check_base(a, report)
    _check_compat_rho(ctx, report, "Def2.2-Eq(5)")
    _check_pair_pair(ctx, report, "Def2.2-Eq(6)")
    _check_bracket_pair(ctx, report, "Def2.2-Eq(7)")
    logger.info("validate_representation: n=%d, m=%d, %d checks, %d violations", ctx.n, ctx.m, report.checked, len(report.violations))
    return report


def validate_generalized_rep(a: HomAlgebra, g: GeneralizedRep) -> Report:
    """Every identity family of a generalized representation, labelled GenRep-*."""
    ctx = _IdentityContext(a, g)
    report = Report(subject="generalized-representation")
    _check_base(a, report)
    _check_compat_rho(ctx, report, "GenRep-compat-rho")
    _check_compat_nu(ctx, report, "GenRep-compat-nu")
    _check_pair_pair(ctx, report, "GenRep-eq1")
    _check_bracket_pair(ctx, report, "GenRep-eq2")
    _check_eq3(ctx, report, "GenRep-eq3")
    _check_eq3_cyclic(ctx, report, "GenRep-eq3-cyclic")
    _check_eq4(ctx, report, "GenRep-eq4")
    _check_eq5(ctx, report, "GenRep-eq5")
    _check_eq6(ctx, report, "GenRep-eq6")
    logger.info("validate_generalized_rep: n=%d, m=%d, %d checks, %d violations", ctx.n, ctx.m, report.checked, len(report.violations))
    return report


def validate_extension_families(a: HomAlgebra, g: GeneralizedRep, omega: SkewTensor3) -> Report:
    """Identity families of (ρ, ν, ω, A) data; used by the extensions module."""
    ctx = _IdentityContext(a, g, omega)
    report = Report(subject="extension-triple")
    _check_base(a, report)
    _check_compat_rho(ctx, report, "ext-compat-rho")
    _check_compat_nu(ctx, report, "ext-compat-nu")
    _check_compat_omega(ctx, report, "ext-compat-omega")
    _check_cocycle_omega(ctx, report, "t1")
    _check_bracket_pair(ctx, report, "t2")
    _check_pair_pair(ctx, report, "t3")
    _check_eq3(ctx, report, "GenRep-eq3")
    _check_eq3_cyclic(ctx, report, "GenRep-eq3-cyclic")
    _check_eq4(ctx, report, "GenRep-eq4")
    _check_eq5(ctx, report, "GenRep-eq5")
    _check_eq6(ctx, report, "GenRep-eq6")
    return report


def _check_cocycle_omega(ctx: _IdentityContext, report: Report, label: str) -> None:
    """V-part of the Hom-Filippov-Jacobi identity on five algebra arguments."""
    al = ctx.al
    for (x1, x2), (x3, x4, x5) in product(combinations(range(ctx.n), 2), combinations(range(ctx.n), 3)):
        left = vec_add(
            ctx.rho(al[x1], al[x2], ctx.om(x3, x4, x5)),
            ctx.om_vec(al[x1], al[x2], ctx.br(x3, x4, x5)),
        )
        terms = [
            ctx.rho(al[x4], al[x5], ctx.om(x1, x2, x3)),
            ctx.om_vec(ctx.br(x1, x2, x3), al[x4], al[x5]),
            ctx.rho(al[x5], al[x3], ctx.om(x1, x2, x4)),
            ctx.om_vec(al[x3], ctx.br(x1, x2, x4), al[x5]),
            ctx.rho(al[x3], al[x4], ctx.om(x1, x2, x5)),
            ctx.om_vec(al[x3], al[x4], ctx.br(x1, x2, x5)),
        ]
        right = zero_vector(ctx.m)
        for term in terms:
            right = vec_add(right, term)
        ctx.record(report, label, "ggggg", (x1, x2, x3, x4, x5), left, right)


# -------------------------------------------------------------------------
# Constructions
# -------------------------------------------------------------------------
def _semidirect_bracket(a: HomAlgebra, rep: _RhoActions, omega: Optional[SkewTensor3] = None) -> SkewTensor3:
    n, m = a.dim, rep.carrier_dim
    if rep.algebra_dim != n:
        raise InputError(f"Representation of a {rep.algebra_dim}-dimensional algebra used with dimension {n}")
    cells = {}
    for (i, j, k), value in a.bracket.items():
        fiber = omega.lookup(i, j, k) if omega is not None else zero_vector(m)
        cells[i, j, k] = tuple(value) + tuple(fiber)
    if omega is not None:
        for (i, j, k), fiber in omega.items():
            if (i, j, k) not in cells:
                cells[i, j, k] = zero_vector(n) + tuple(fiber)
    for (i, j), matrix in rep.rho.items():
        for k in range(m):
            cells[i, j, n + k] = zero_vector(n) + matrix.column(k)
    if isinstance(rep, GeneralizedRep):
        for i, table in rep.nu.items():
            for (p, q), value in table.items():
                cells[i, n + p, n + q] = zero_vector(n) + tuple(value)
    return SkewTensor3(n + m, cells)


def semidirect(a: HomAlgebra, r: Representation) -> HomAlgebra:
    """g⊕V with [x+u,y+v,z+w] = [x,y,z] + ρ(x,y)w + ρ(y,z)u + ρ(z,x)v, twist α⊕A."""
    return HomAlgebra(_semidirect_bracket(a, r), a.alpha.direct_sum(r.endo))


def generalized_semidirect(a: HomAlgebra, g: GeneralizedRep) -> HomAlgebra:
    """Semidirect bracket plus ν(x)(v∧w) + ν(y)(w∧u) + ν(z)(u∧v), twist α⊕A."""
    return HomAlgebra(_semidirect_bracket(a, g), a.alpha.direct_sum(g.endo))


def extension_algebra(a: HomAlgebra, g: GeneralizedRep, omega: SkewTensor3) -> HomAlgebra:
    """Generalized semidirect bracket with ω added to the V-part of [x,y,z]."""
    if omega.dim != a.dim or omega.value_dim != g.carrier_dim:
        raise InputError(f"omega has shape ({omega.dim}, {omega.value_dim}), expected ({a.dim}, {g.carrier_dim})")
    return HomAlgebra(_semidirect_bracket(a, g, omega), a.alpha.direct_sum(g.endo))


def intertwining_report(a: HomAlgebra, g: GeneralizedRep, beta: Matrix, b: Matrix, prefix: str) -> Report:
    """B∘ρ(x,y) = ρ(βx,βy)∘B, B∘ν(x) = ν(βx)∘(B⊗B) on basis tuples."""
    n, m = a.dim, g.carrier_dim
    report = Report(subject="intertwining")
    e = [basis_vector(n, i) for i in range(n)]
    v = [basis_vector(m, k) for k in range(m)]
    be = [beta.column(i) for i in range(n)]
    bv = [b.column(k) for k in range(m)]
    for (i, j), k in product(combinations(range(n), 2), range(m)):
        left = mat_apply(b, g.act(e[i], e[j], v[k]))
        right = g.act(be[i], be[j], bv[k])
        report.checked += 1
        if left != right:
            report.add(f"{prefix}-rho", [basis_label(i), basis_label(j), carrier_label(k)], format_vector(left), format_vector(right))
    for i, (p, q) in product(range(n), combinations(range(m), 2)):
        left = mat_apply(b, g.nu_of(e[i], v[p], v[q]))
        right = g.nu_of(be[i], bv[p], bv[q])
        report.checked += 1
        if left != right:
            report.add(f"{prefix}-nu", [basis_label(i), carrier_label(p), carrier_label(q)], format_vector(left), format_vector(right))
    return report


def twist_representation(bracket: SkewTensor3, r: Representation, alpha: Matrix) -> Representation:
    """ρ̃ = A∘ρ with endomorphism A for the twisted algebra α∘bracket.

    r must be a representation of the untwisted 3-Lie algebra and A must
    intertwine ρ with ρ(α·,α·).
    """
    from hom_nambu import twist_algebra

    twist_algebra(bracket, alpha)
    base = HomAlgebra.untwisted(bracket)
    plain = Representation(r.algebra_dim, r.carrier_dim, dict(r.rho), Matrix.identity(r.carrier_dim))
    validity = validate_representation(base, plain)
    if not validity.passed:
        raise PreconditionError("Input is not a representation of the 3-Lie algebra", validity)
    intertwining = intertwining_report(base, GeneralizedRep.from_representation(r), alpha, r.endo, "intertwine")
    if not intertwining.passed:
        first = intertwining.violations[0]
        logger.warning("twist_representation: %s", first.describe())
        raise PreconditionError(f"Intertwining fails at ({', '.join(first.witness)})", intertwining)
    rho = {key: r.endo @ matrix for key, matrix in r.rho.items()}
    return Representation(r.algebra_dim, r.carrier_dim, rho, r.endo)


def twist_generalized_rep(a: HomAlgebra, g: GeneralizedRep, beta: Matrix, b: Matrix) -> Tuple[HomAlgebra, GeneralizedRep]:
    """Twist (ρ, ν, A) along an algebra morphism β and B: returns the algebra
    ([·,·,·]∘β^⊗3, β∘α) paired with (B∘ρ, B∘ν, B∘A).

    Raises:
        PreconditionError: with a Report naming every failed condition
    """
    n, m = a.dim, g.carrier_dim
    if beta.shape != (n, n) or b.shape != (m, m):
        raise InputError(f"Twist maps have shapes {beta.shape}/{b.shape}, expected {n}x{n} and {m}x{m}")
    report = Report(subject="twist-preconditions")
    validity = validate_generalized_rep(a, g)
    report.checked += validity.checked
    for violation in validity.violations:
        report.violations.append(violation.model_copy(update={"identity": f"input-{violation.identity}"}))
    report.merge(check_morphism(a.bracket, beta, "beta-morphism"))
    report.checked += 1
    if beta @ a.alpha != a.alpha @ beta:
        report.add("beta-commutes-alpha", [], [repr(beta @ a.alpha)], [repr(a.alpha @ beta)])
    report.merge(intertwining_report(a, g, beta, b, "intertwine"))
    report.checked += 1
    if b @ g.endo != g.endo @ b:
        report.add("intertwine-endo", [], [repr(b @ g.endo)], [repr(g.endo @ b)])
    if not report.passed:
        first = report.violations[0]
        logger.warning("twist_generalized_rep: %d failed conditions, first %s", len(report.violations), first.describe())
        raise PreconditionError(f"Twist preconditions fail: {', '.join(report.identities())}", report)

    cells = {}
    columns = [beta.column(i) for i in range(n)]
    for i, j, k in combinations(range(n), 3):
        cells[i, j, k] = a.bracket.evaluate(columns[i], columns[j], columns[k])
    algebra = HomAlgebra(SkewTensor3(n, cells), beta @ a.alpha)
    rho = {key: b @ matrix for key, matrix in g.rho.items()}
    nu = {i: {key: mat_apply(b, value) for key, value in table.items()} for i, table in g.nu.items()}
    return algebra, GeneralizedRep(n, m, rho, b @ g.endo, nu)


def conjugate_genrep(g: GeneralizedRep, t: Matrix) -> GeneralizedRep:
    """Transport (ρ, ν, A) along an invertible T: V -> V'."""
    t_inv = t.inverse()
    m2 = t.rows
    rho = {key: t @ matrix @ t_inv for key, matrix in g.rho.items()}
    columns = [t_inv.column(k) for k in range(m2)]
    nu = {}
    for i in g.nu:
        e_i = basis_vector(g.algebra_dim, i)
        nu[i] = {(p, q): mat_apply(t, g.nu_of(e_i, columns[p], columns[q])) for p, q in combinations(range(m2), 2)}
    return GeneralizedRep(g.algebra_dim, m2, rho, t @ g.endo @ t_inv, nu)


def equivalent_genreps(g1: GeneralizedRep, g2: GeneralizedRep, w: EquivalenceWitness) -> Report:
    """T∘ρ1 = ρ2∘T, T∘ν1(x) = ν2(x)∘(T⊗T), T∘A1 = A2∘T on basis tuples."""
    t = w.t
    if g1.algebra_dim != g2.algebra_dim:
        raise InputError("Generalized representations of different algebras")
    if t.shape != (g2.carrier_dim, g1.carrier_dim):
        raise InputError(f"Witness has shape {t.shape}, expected {g2.carrier_dim}x{g1.carrier_dim}")
    if not t.is_invertible():
        raise InputError("Equivalence witness is singular")
    n, m = g1.algebra_dim, g1.carrier_dim
    e = [basis_vector(n, i) for i in range(n)]
    v = [basis_vector(m, k) for k in range(m)]
    tv = [t.column(k) for k in range(m)]
    report = Report(subject="equivalence")
    for (i, j), k in product(combinations(range(n), 2), range(m)):
        left = mat_apply(t, g1.act(e[i], e[j], v[k]))
        right = g2.act(e[i], e[j], tv[k])
        report.checked += 1
        if left != right:
            report.add("equiv-rho", [basis_label(i), basis_label(j), carrier_label(k)], format_vector(left), format_vector(right))
    for i, (p, q) in product(range(n), combinations(range(m), 2)):
        left = mat_apply(t, g1.nu_of(e[i], v[p], v[q]))
        right = g2.nu_of(e[i], tv[p], tv[q])
        report.checked += 1
        if left != right:
            report.add("equiv-nu", [basis_label(i), carrier_label(p), carrier_label(q)], format_vector(left), format_vector(right))
    for k in range(m):
        left = mat_apply(t, mat_apply(g1.endo, v[k]))
        right = mat_apply(g2.endo, tv[k])
        report.checked += 1
        if left != right:
            report.add("equiv-endo", [carrier_label(k)], format_vector(left), format_vector(right))
    return report
