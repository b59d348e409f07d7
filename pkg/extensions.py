"""Abelian extensions of 3-Hom-Lie algebras on ĝ = g⊕V coordinates.

The fiber V always occupies the last m coordinates of ĝ; inclusion and
projection of an extension built here are the block maps [0; I] and [I 0].
"""
import logging
from dataclasses import dataclass
from itertools import combinations

from errors import InputError, PreconditionError
from exact_linalg import Matrix, SkewTensor3, basis_vector, format_vector, mat_apply
from hom_nambu import HomAlgebra, basis_label, carrier_label
from models import Report
from representations import GeneralizedRep, extension_algebra, validate_extension_families

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtensionData:
    """(ρ, ν, A) on V together with the V-valued 3-form ω on the base."""

    base: HomAlgebra
    genrep: GeneralizedRep
    omega: SkewTensor3

    def __post_init__(self):
        n, m = self.base.dim, self.genrep.carrier_dim
        if self.genrep.algebra_dim != n:
            raise InputError(f"Generalized representation of a {self.genrep.algebra_dim}-dimensional algebra over dimension {n}")
        if self.omega.dim != n or self.omega.value_dim != m:
            raise InputError(f"omega has shape ({self.omega.dim}, {self.omega.value_dim}), expected ({n}, {m})")

    @property
    def fiber_dim(self) -> int:
        return self.genrep.carrier_dim


@dataclass(frozen=True)
class SectionWitness:
    """σ: g -> ĝ, p: ĝ -> g and i: V -> ĝ as matrices."""

    sigma: Matrix
    projection: Matrix
    inclusion: Matrix

    @property
    def base_dim(self) -> int:
        return self.sigma.cols

    @property
    def fiber_dim(self) -> int:
        return self.inclusion.cols

    def basis_change(self) -> Matrix:
        """[σ | i]: g⊕V coordinates -> ĝ."""
        columns = [self.sigma.column(j) for j in range(self.sigma.cols)]
        columns += [self.inclusion.column(k) for k in range(self.inclusion.cols)]
        return Matrix.from_columns(columns, rows=self.sigma.rows)

    @classmethod
    def standard(cls, base_dim: int, fiber_dim: int) -> "SectionWitness":
        total = base_dim + fiber_dim
        identity = Matrix.identity(total)
        return cls(
            sigma=identity.submatrix(0, total, 0, base_dim),
            projection=identity.submatrix(0, base_dim, 0, total),
            inclusion=identity.submatrix(0, total, base_dim, total),
        )


@dataclass(frozen=True)
class ExtensionMorphism:
    """φ: ĝ1 -> ĝ2 between extensions of the same base of dimension base_dim."""

    phi: Matrix
    base_dim: int


# -------------------------------------------------------------------------
# Public API
# -------------------------------------------------------------------------
def validate_extension_triple(e: ExtensionData) -> Report:
    """Every identity family of (ρ, ν, ω, A): compatibility, t1–t3 and the ω-free families."""
    report = validate_extension_families(e.base, e.genrep, e.omega)
    logger.info(
        "validate_extension_triple: n=%d, m=%d, %d checks, %d violations",
        e.base.dim,
        e.fiber_dim,
        report.checked,
        len(report.violations),
    )
    return report


def build_extension_bracket(e: ExtensionData) -> HomAlgebra:
    """[x1+v1, x2+v2, x3+v3] = [x1,x2,x3] + ρ/ν terms + ω(x1,x2,x3), twisted by α⊕A."""
    return extension_algebra(e.base, e.genrep, e.omega)


def split_extension_data(ext: HomAlgebra, w: SectionWitness) -> ExtensionData:
    """Read (g, ρ, ν, ω, A) off an abelian extension through a section.

    Raises:
        InputError: a section/diagram condition fails (label names it)
        PreconditionError: the fiber is not an abelian ideal (abelian-fiber, ideal-fiber)
    """
    n, m = w.base_dim, w.fiber_dim
    total = ext.dim
    if w.sigma.shape != (total, n) or w.projection.shape != (n, total) or w.inclusion.shape != (total, m):
        raise InputError(
            f"Section witness shapes {w.sigma.shape}/{w.projection.shape}/{w.inclusion.shape} do not fit dimension {total}"
        )
    if n + m != total:
        raise InputError(f"Base ({n}) plus fiber ({m}) does not add up to the extension dimension {total}")
    change = w.basis_change()
    if not change.is_invertible():
        raise InputError("section-complement: [sigma | inclusion] is singular")
    if w.projection @ w.sigma != Matrix.identity(n):
        raise InputError("section-splitting: projection∘sigma is not the identity")
    if not (w.projection @ w.inclusion).is_zero():
        raise InputError("diagram-exactness: projection∘inclusion is not zero")
    if not (w.projection @ ext.alpha @ w.inclusion).is_zero():
        raise InputError("fiber-twist: the twist map does not preserve the fiber")
    alpha = w.projection @ ext.alpha @ w.sigma
    if w.sigma @ alpha != ext.alpha @ w.sigma:
        raise InputError("section-twist: sigma∘alpha differs from the twist of the extension∘sigma")

    inverse = change.inverse()
    sections = [w.sigma.column(i) for i in range(n)]
    fiber = [w.inclusion.column(k) for k in range(m)]

    def split(y):
        coordinates = mat_apply(inverse, y)
        return coordinates[:n], coordinates[n:]

    mixed = {}
    for i, j in combinations(range(n), 2):
        for k in range(m):
            mixed[i, j, k] = split(ext.product(sections[i], sections[j], fiber[k]))
    crossed = {}
    for i in range(n):
        for a, b in combinations(range(m), 2):
            crossed[i, a, b] = split(ext.product(sections[i], fiber[a], fiber[b]))

    ideal = Report(subject="abelian-ideal")
    for a, b, c in combinations(range(m), 3):
        value = ext.product(fiber[a], fiber[b], fiber[c])
        ideal.checked += 1
        if any(value):
            ideal.add("abelian-fiber", [carrier_label(a), carrier_label(b), carrier_label(c)], format_vector(value), ["0"] * total)
    for (i, j, k), (base_part, _) in mixed.items():
        ideal.checked += 1
        if any(base_part):
            ideal.add("ideal-fiber", [basis_label(i), basis_label(j), carrier_label(k)], format_vector(base_part), ["0"] * n)
    for (i, a, b), (base_part, _) in crossed.items():
        ideal.checked += 1
        if any(base_part):
            ideal.add("ideal-fiber", [basis_label(i), carrier_label(a), carrier_label(b)], format_vector(base_part), ["0"] * n)
    if not ideal.passed:
        logger.warning("split_extension_data: %s", ideal.violations[0].describe())
        raise PreconditionError("The fiber is not an abelian ideal", ideal)

    bracket_cells, omega_cells = {}, {}
    for i, j, k in combinations(range(n), 3):
        base_part, fiber_part = split(ext.product(sections[i], sections[j], sections[k]))
        bracket_cells[i, j, k] = base_part
        omega_cells[i, j, k] = fiber_part
    rho = {}
    for i, j in combinations(range(n), 2):
        rho[i, j] = Matrix.from_columns([mixed[i, j, k][1] for k in range(m)], rows=m)
    nu = {i: {(a, b): crossed[i, a, b][1] for a, b in combinations(range(m), 2)} for i in range(n)}
    endo = Matrix.from_columns([split(mat_apply(ext.alpha, fiber[k]))[1] for k in range(m)], rows=m)
    base = HomAlgebra(SkewTensor3(n, bracket_cells), alpha)
    return ExtensionData(base, GeneralizedRep(n, m, rho, endo, nu), SkewTensor3(n, omega_cells, m))


def check_extension_equivalence(e1: HomAlgebra, e2: HomAlgebra, m: ExtensionMorphism) -> Report:
    """φ is a 3-Hom-Lie morphism with φ∘i1 = i2 and p2∘φ = p1."""
    n = m.base_dim
    phi = m.phi
    if e1.dim != e2.dim or phi.shape != (e2.dim, e1.dim):
        raise InputError(f"Morphism of shape {phi.shape} between extensions of dimension {e1.dim} and {e2.dim}")
    if not 0 <= n <= e1.dim:
        raise InputError(f"Base dimension {n} out of range for extensions of dimension {e1.dim}")
    total = e1.dim
    report = Report(subject="extension-equivalence")
    images = [phi.column(i) for i in range(total)]

    def label(*indices):
        return [basis_label(i, n) for i in indices]

    for i, j, k in combinations(range(total), 3):
        left = mat_apply(phi, e1.basis_bracket(i, j, k))
        right = e2.product(images[i], images[j], images[k])
        report.checked += 1
        if left != right:
            report.add("morphism-bracket", label(i, j, k), format_vector(left), format_vector(right))
    for i in range(total):
        left = mat_apply(phi, e1.alpha_image(i))
        right = mat_apply(e2.alpha, images[i])
        report.checked += 1
        if left != right:
            report.add("morphism-twist", label(i), format_vector(left), format_vector(right))
    for i in range(n, total):
        report.checked += 1
        expected = basis_vector(total, i)
        if images[i] != expected:
            report.add("diagram-inclusion", label(i), format_vector(images[i]), format_vector(expected))
    for i in range(total):
        left = images[i][:n]
        right = basis_vector(total, i)[:n]
        report.checked += 1
        if left != right:
            report.add("diagram-projection", label(i), format_vector(left), format_vector(right))
    logger.info("check_extension_equivalence: %d checks, %d violations", report.checked, len(report.violations))
    return report
