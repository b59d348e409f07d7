"""Cochains, the graded bracket, both coboundary operators and the cocycle solver.

A dense cochain of degree p is a table keyed by ``(pairs, u)`` where
``pairs`` is a tuple of p canonical index pairs (s<t) and ``u`` is the final
index; values are coefficient vectors in the target space. The public
cohomology API takes the cohomological degree k = p + 1.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from config import Config
from errors import InputError, PreconditionError
from exact_linalg import (
    ONE,
    ZERO,
    Matrix,
    SkewTensor3,
    Vector,
    basis_vector,
    canonical_pair,
    canonical_pairs,
    format_vector,
    mat_apply,
    nullspace,
    rank,
    vec_accumulate,
    vec_add,
    vec_is_zero,
    vec_neg,
    vector,
    zero_vector,
)
from hom_nambu import HomAlgebra, basis_label
from models import Report
from representations import GeneralizedRep, Representation

logger = logging.getLogger(__name__)

PairKey = Tuple[int, int]
CochainKey = Tuple[Tuple[PairKey, ...], int]
WedgeElement = Dict[PairKey, Fraction]
AnyRep = Union[Representation, GeneralizedRep]


# -------------------------------------------------------------------------
# ∧² elements as sparse dicts
# -------------------------------------------------------------------------
def wedge(x: Sequence[Fraction], y: Sequence[Fraction]) -> WedgeElement:
    """x∧y on the s<t basis."""
    total: WedgeElement = {}
    for s, a in enumerate(x):
        if not a:
            continue
        for t, b in enumerate(y):
            if not b or s == t:
                continue
            sign, key = canonical_pair(s, t)
            total[key] = total.get(key, ZERO) + sign * a * b
    return {key: c for key, c in total.items() if c}


def wedge_add(first: WedgeElement, second: WedgeElement) -> WedgeElement:
    total = dict(first)
    for key, c in second.items():
        total[key] = total.get(key, ZERO) + c
    return {key: c for key, c in total.items() if c}


def all_keys(space_dim: int, degree: int) -> List[CochainKey]:
    """Every canonical key of a degree-p cochain on a space_dim-dimensional host."""
    return [(pairs, u) for pairs in product(canonical_pairs(space_dim), repeat=degree) for u in range(space_dim)]


def key_indices(key: CochainKey) -> Tuple[int, ...]:
    pairs, u = key
    return tuple(i for pair in pairs for i in pair) + (u,)


def key_labels(key: CochainKey, algebra_dim: Optional[int] = None) -> List[str]:
    pairs, u = key
    labels = [f"{basis_label(s, algebra_dim)}^{basis_label(t, algebra_dim)}" for s, t in pairs]
    return labels + [basis_label(u, algebra_dim)]


# -------------------------------------------------------------------------
# Dense cochains
# -------------------------------------------------------------------------
class DenseCochain:
    """Multilinear table on (∧²h)^{⊗p} ⊗ h with values in a target space."""

    __slots__ = ("space_dim", "degree", "target_dim", "_values")

    def __init__(self, space_dim: int, degree: int, target_dim: int, values: Optional[Dict] = None):
        if space_dim < 0 or degree < 0 or target_dim < 0:
            raise InputError("Cochain dimensions and degree must be non-negative")
        self.space_dim = space_dim
        self.degree = degree
        self.target_dim = target_dim
        stored: Dict[CochainKey, Vector] = {}
        for (pairs, u), value in (values or {}).items():
            pairs = tuple(pairs)
            if len(pairs) != degree:
                raise InputError(f"Key {pairs} has {len(pairs)} pairs, expected {degree}")
            value = vector(value)
            if len(value) != target_dim:
                raise InputError(f"Value at {pairs, u} has length {len(value)}, expected {target_dim}")
            if not 0 <= u < space_dim:
                raise InputError(f"Final index {u} out of range for dimension {space_dim}")
            sign = 1
            canonical = []
            for s, t in pairs:
                if not (0 <= s < space_dim and 0 <= t < space_dim):
                    raise InputError(f"Pair ({s}, {t}) out of range for dimension {space_dim}")
                pair_sign, pair_key = canonical_pair(s, t)
                sign *= pair_sign
                canonical.append(pair_key)
            if sign == 0:
                if not vec_is_zero(value):
                    raise InputError(f"Nonzero value at repeated pair in key {pairs}")
                continue
            key = (tuple(canonical), u)
            signed = value if sign > 0 else vec_neg(value)
            if key in stored and stored[key] != signed:
                raise InputError(f"Conflicting values for key {key}")
            stored[key] = signed
        self._values = {key: v for key, v in stored.items() if not vec_is_zero(v)}

    @classmethod
    def _trusted(cls, space_dim: int, degree: int, target_dim: int, values: Dict[CochainKey, Vector]) -> "DenseCochain":
        for pairs, _ in values:
            if len(pairs) != degree or any(len(pair) != 2 for pair in pairs):
                raise InputError(f"Key {pairs!r} does not fit a degree-{degree} cochain")
        cochain = cls.__new__(cls)
        cochain.space_dim = space_dim
        cochain.degree = degree
        cochain.target_dim = target_dim
        cochain._values = {key: v for key, v in values.items() if not vec_is_zero(v)}
        return cochain

    @classmethod
    def zero(cls, space_dim: int, degree: int, target_dim: int) -> "DenseCochain":
        return cls._trusted(space_dim, degree, target_dim, {})

    @property
    def values(self) -> Dict[CochainKey, Vector]:
        return dict(self._values)

    def items(self):
        return sorted(self._values.items())

    def value(self, pairs: Sequence[PairKey], u: int) -> Vector:
        """Sign-extended lookup on basis arguments."""
        sign = 1
        canonical = []
        for s, t in pairs:
            pair_sign, key = canonical_pair(s, t)
            sign *= pair_sign
            canonical.append(key)
        stored = self._values.get((tuple(canonical), u)) if sign else None
        if stored is None:
            return zero_vector(self.target_dim)
        return stored if sign > 0 else vec_neg(stored)

    def evaluate(self, args: Sequence[WedgeElement], x: Sequence[Fraction]) -> Vector:
        """Multilinear evaluation at ∧² arguments (sparse dicts) and a final vector."""
        if len(args) != self.degree:
            raise InputError(f"Cochain of degree {self.degree} evaluated on {len(args)} arguments")
        total = [ZERO] * self.target_dim
        finals = [(u, c) for u, c in enumerate(x) if c]
        if not finals or not self._values or any(not arg for arg in args):
            return tuple(total)
        for combination in product(*(list(arg.items()) for arg in args)):
            coefficient = ONE
            for _, c in combination:
                coefficient *= c
            pairs = tuple(pair for pair, _ in combination)
            for u, c in finals:
                stored = self._values.get((pairs, u))
                if stored is not None:
                    vec_accumulate(total, coefficient * c, stored)
        return tuple(total)

    def is_zero(self) -> bool:
        return not self._values

    def nonzero_keys(self) -> List[CochainKey]:
        return sorted(self._values)

    def _check_same_shape(self, other: "DenseCochain") -> None:
        if (self.space_dim, self.degree, self.target_dim) != (other.space_dim, other.degree, other.target_dim):
            raise InputError(
                f"Cochain shapes differ: {(self.space_dim, self.degree, self.target_dim)} vs "
                f"{(other.space_dim, other.degree, other.target_dim)}"
            )

    def __add__(self, other: "DenseCochain") -> "DenseCochain":
        self._check_same_shape(other)
        merged = {key: list(v) for key, v in self._values.items()}
        for key, v in other._values.items():
            vec_accumulate(merged.setdefault(key, [ZERO] * self.target_dim), ONE, v)
        return DenseCochain._trusted(self.space_dim, self.degree, self.target_dim, {k: tuple(v) for k, v in merged.items()})

    def __sub__(self, other: "DenseCochain") -> "DenseCochain":
        return self + other.scale(-1)

    def scale(self, c) -> "DenseCochain":
        c = Fraction(c)
        return DenseCochain._trusted(
            self.space_dim, self.degree, self.target_dim, {key: tuple(c * a for a in v) for key, v in self._values.items()}
        )

    def map_target(self, m: Matrix) -> "DenseCochain":
        """Compose every value with m."""
        if m.cols != self.target_dim:
            raise InputError(f"Cannot apply {m.shape} matrix to values of length {self.target_dim}")
        return DenseCochain._trusted(
            self.space_dim, self.degree, m.rows, {key: mat_apply(m, v) for key, v in self._values.items()}
        )

    def restrict(self, keep: Callable[[CochainKey], bool]) -> "DenseCochain":
        return DenseCochain._trusted(
            self.space_dim, self.degree, self.target_dim, {key: v for key, v in self._values.items() if keep(key)}
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseCochain):
            return NotImplemented
        return (self.space_dim, self.degree, self.target_dim, self._values) == (
            other.space_dim,
            other.degree,
            other.target_dim,
            other._values,
        )

    def __hash__(self) -> int:
        return hash((self.space_dim, self.degree, self.target_dim, tuple(sorted(self._values.items()))))

    def __repr__(self) -> str:
        return (
            f"DenseCochain(space_dim={self.space_dim}, degree={self.degree}, "
            f"target_dim={self.target_dim}, nonzero={len(self._values)})"
        )


def embed_target(phi: DenseCochain, offset: int, total_dim: int) -> DenseCochain:
    """Shift the values into components offset.. of a total_dim target (zero elsewhere)."""
    if offset + phi.target_dim > total_dim:
        raise InputError(f"Cannot embed a {phi.target_dim}-dimensional target at offset {offset} in {total_dim}")
    pad_after = total_dim - offset - phi.target_dim
    values = {key: zero_vector(offset) + v + zero_vector(pad_after) for key, v in phi.values.items()}
    return DenseCochain._trusted(phi.space_dim, phi.degree, total_dim, values)


def project_target(phi: DenseCochain, start: int, stop: int) -> DenseCochain:
    if not 0 <= start <= stop <= phi.target_dim:
        raise InputError(f"Projection [{start}, {stop}) out of range for target {phi.target_dim}")
    values = {key: v[start:stop] for key, v in phi.values.items()}
    return DenseCochain._trusted(phi.space_dim, phi.degree, stop - start, values)


def extend_host(phi: DenseCochain, space_dim: int) -> DenseCochain:
    """Regard a cochain on g as one on g⊕V supported on the first phi.space_dim indices."""
    if space_dim < phi.space_dim:
        raise InputError(f"Cannot extend a cochain on dimension {phi.space_dim} to {space_dim}")
    return DenseCochain._trusted(space_dim, phi.degree, phi.target_dim, phi.values)


def restrict_host(phi: DenseCochain, space_dim: int) -> DenseCochain:
    """Keep the keys whose indices all lie below space_dim."""
    values = {key: v for key, v in phi.values.items() if max(key_indices(key)) < space_dim}
    return DenseCochain._trusted(space_dim, phi.degree, phi.target_dim, values)


def _in_fiber(key: CochainKey, algebra_dim: int) -> bool:
    return all(i >= algebra_dim for i in key_indices(key))


def skew_cochain(space_dim: int, target_dim: int, cells: Dict[Tuple[int, int, int], Sequence]) -> DenseCochain:
    """Degree-1 cochain extended fully skew from values on i<j<k."""
    table = SkewTensor3(space_dim, cells, target_dim)
    values: Dict[CochainKey, Vector] = {}
    for (i, j, k), value in table.items():
        values[((i, j),), k] = value
        values[((i, k),), j] = vec_neg(value)
        values[((j, k),), i] = value
    return DenseCochain._trusted(space_dim, 1, target_dim, values)


# -------------------------------------------------------------------------
# Compatibility with the twist maps
# -------------------------------------------------------------------------
@dataclass(frozen=True)
class CompatibilityConstraint:
    """A∘φ(X1..Xp, x) = φ(αX1..αXp, αx) for α = twist_on_source, A = twist_on_target."""

    twist_on_source: Matrix
    twist_on_target: Matrix

    def __post_init__(self):
        if not self.twist_on_source.is_square() or not self.twist_on_target.is_square():
            raise InputError("Compatibility twists must be square")

    def _check_shape(self, phi: DenseCochain) -> None:
        if self.twist_on_source.rows != phi.space_dim or self.twist_on_target.rows != phi.target_dim:
            raise InputError(
                f"Constraint of shape ({self.twist_on_source.rows}, {self.twist_on_target.rows}) "
                f"applied to cochain of shape ({phi.space_dim}, {phi.target_dim})"
            )

    def residual(self, phi: DenseCochain) -> DenseCochain:
        self._check_shape(phi)
        alpha, endo = self.twist_on_source, self.twist_on_target
        images = [alpha.column(u) for u in range(phi.space_dim)]
        pair_images = {pair: wedge(images[pair[0]], images[pair[1]]) for pair in canonical_pairs(phi.space_dim)}
        values = {}
        for key in all_keys(phi.space_dim, phi.degree):
            pairs, u = key
            left = mat_apply(endo, phi.value(pairs, u))
            right = phi.evaluate([pair_images[pair] for pair in pairs], images[u])
            if left != right:
                values[key] = tuple(a - b for a, b in zip(left, right))
        return DenseCochain._trusted(phi.space_dim, phi.degree, phi.target_dim, values)

    def check(self, phi: DenseCochain, algebra_dim: Optional[int] = None) -> Report:
        self._check_shape(phi)
        report = Report(subject="compatibility")
        report.checked = len(all_keys(phi.space_dim, phi.degree))
        alpha, endo = self.twist_on_source, self.twist_on_target
        images = [alpha.column(u) for u in range(phi.space_dim)]
        for key, _ in self.residual(phi).items():
            pairs, u = key
            left = mat_apply(endo, phi.value(pairs, u))
            right = phi.evaluate([wedge(images[s], images[t]) for s, t in pairs], images[u])
            report.add("compatibility", key_labels(key, algebra_dim), format_vector(left), format_vector(right))
        return report


def _require(report: Report, operation: str) -> None:
    if not report.passed:
        first = report.violations[0]
        logger.warning("%s: %d violations, first %s", operation, len(report.violations), first.describe())
        raise PreconditionError(f"{operation}: {first.identity} fails at ({', '.join(first.witness)})", report)


# -------------------------------------------------------------------------
# Structure cochains
# -------------------------------------------------------------------------
def structure_cochain(a: HomAlgebra) -> DenseCochain:
    """π as a degree-1 cochain on g valued in g."""
    n = a.dim
    values = {(((s, t),), u): a.basis_bracket(s, t, u) for (s, t) in canonical_pairs(n) for u in range(n)}
    return DenseCochain._trusted(n, 1, n, values)


def lift_structure(a: HomAlgebra, g: AnyRep) -> DenseCochain:
    """π + ρ̄ + ν̄ as one degree-1 cochain on h = g⊕V valued in h.

    On canonical keys: (x,y|w) -> ρ(x,y)w, (x,w|y) -> −ρ(x,y)w,
    (x,v|w) and (v,w|x) -> ν(x)(v,w); keys with three V slots vanish.
    """
    n, m = a.dim, g.carrier_dim
    if g.algebra_dim != n:
        raise InputError(f"Representation of a {g.algebra_dim}-dimensional algebra lifted over dimension {n}")
    nu = g.nu_of if isinstance(g, GeneralizedRep) else None
    e = [basis_vector(n, i) for i in range(n)]
    v = [basis_vector(m, k) for k in range(m)]
    pad_g = zero_vector(n)
    values: Dict[CochainKey, Vector] = {}
    for (s, t), u in product(canonical_pairs(n + m), range(n + m)):
        if t < n and u < n:
            value = tuple(a.basis_bracket(s, t, u)) + zero_vector(m)
        elif t < n:
            value = pad_g + g.act(e[s], e[t], v[u - n])
        elif s < n and u < n:
            value = pad_g + vec_neg(g.act(e[s], e[u], v[t - n]))
        elif s < n and nu is not None:
            value = pad_g + nu(e[s], v[t - n], v[u - n])
        elif u < n and nu is not None:
            value = pad_g + nu(e[u], v[s - n], v[t - n])
        else:
            continue
        values[((s, t),), u] = value
    return DenseCochain._trusted(n + m, 1, n + m, values)


# -------------------------------------------------------------------------
# Graded bracket
# -------------------------------------------------------------------------
def _shuffle_sign(chosen: Sequence[int], rest: Sequence[int]) -> Fraction:
    inversions = sum(1 for j in chosen for i in rest if j > i)
    return -ONE if inversions % 2 else ONE


def graded_compose(phi: DenseCochain, psi: DenseCochain, alpha_h: Matrix) -> DenseCochain:
    """φ∘ψ: ψ (degree p) inserted into φ (degree q), giving degree p+q.

    For each J ⊂ {1..p+q} with |J| = p, signed by the shuffle (J, I):
    ψ(X_J, ·)•X_t replaces slot t of α^p X_I for every t ∈ I above max J, and
    ψ(X_J, x) fills the final slot. Here ψ(X_J, ·)•(x∧y) = ψ(X_J, x)∧α^p y +
    α^p x∧ψ(X_J, y).
    """
    if phi.space_dim != psi.space_dim:
        raise InputError(f"Cochains live on hosts of dimension {phi.space_dim} and {psi.space_dim}")
    if psi.target_dim != psi.space_dim:
        raise InputError(f"Inner cochain must be valued in the host, got target dimension {psi.target_dim}")
    space = phi.space_dim
    if alpha_h.shape != (space, space):
        raise InputError(f"Twist has shape {alpha_h.shape}, expected {space}x{space}")
    p, q = psi.degree, phi.degree
    total_degree = p + q
    twist = alpha_h.power(p)
    images = [twist.column(u) for u in range(space)]
    pair_images = {pair: wedge(images[pair[0]], images[pair[1]]) for pair in canonical_pairs(space)}
    bullets: Dict[Tuple[Tuple[PairKey, ...], PairKey], WedgeElement] = {}

    def bullet(inner: Tuple[PairKey, ...], pair: PairKey) -> WedgeElement:
        cached = bullets.get((inner, pair))
        if cached is None:
            s, t = pair
            cached = wedge_add(wedge(psi.value(inner, s), images[t]), wedge(images[s], psi.value(inner, t)))
            bullets[inner, pair] = cached
        return cached

    splits = []
    for chosen in combinations(range(total_degree), p):
        rest = tuple(i for i in range(total_degree) if i not in chosen)
        splits.append((chosen, rest, _shuffle_sign(chosen, rest), chosen[-1] if chosen else -1))

    values: Dict[CochainKey, Vector] = {}
    for pairs, u in all_keys(space, total_degree):
        total = [ZERO] * phi.target_dim
        for chosen, rest, sign, top in splits:
            inner = tuple(pairs[j] for j in chosen)
            surviving = [pair_images[pairs[i]] for i in rest]
            for position, t in enumerate(rest):
                if t > top:
                    args = list(surviving)
                    args[position] = bullet(inner, pairs[t])
                    vec_accumulate(total, sign, phi.evaluate(args, images[u]))
            vec_accumulate(total, sign, phi.evaluate(surviving, psi.value(inner, u)))
        if not vec_is_zero(total):
            values[pairs, u] = tuple(total)
    logger.debug("graded_compose: degrees %d∘%d on dimension %d, %d nonzero keys", q, p, space, len(values))
    return DenseCochain._trusted(space, total_degree, phi.target_dim, values)


def graded_bracket(phi: DenseCochain, psi: DenseCochain, alpha_h: Matrix) -> DenseCochain:
    """[φ,ψ] = (−1)^{pq} φ∘ψ − ψ∘φ."""
    p, q = psi.degree, phi.degree
    sign = -1 if (p * q) % 2 else 1
    return graded_compose(phi, psi, alpha_h).scale(sign) - graded_compose(psi, phi, alpha_h)


def is_canonical(s: DenseCochain, alpha_h: Matrix, algebra_dim: Optional[int] = None) -> Report:
    """[s,s] = 0 together with α-compatibility of s."""
    if s.degree != 1 or s.target_dim != s.space_dim:
        raise InputError("A canonical structure is a degree-1 cochain valued in its host")
    report = Report(subject="canonical-structure")
    square = graded_bracket(s, s, alpha_h)
    report.checked += len(all_keys(s.space_dim, 2))
    for key, value in square.items():
        report.add("bracket-square", key_labels(key, algebra_dim), format_vector(value), format_vector(zero_vector(s.target_dim)))
    compatibility = CompatibilityConstraint(alpha_h, alpha_h).check(s, algebra_dim)
    report.checked += compatibility.checked
    for violation in compatibility.violations:
        report.violations.append(violation.model_copy(update={"identity": "alpha-compatibility"}))
    logger.info("is_canonical: dimension %d, %d violations", s.space_dim, len(report.violations))
    return report


# -------------------------------------------------------------------------
# Coboundary operators
# -------------------------------------------------------------------------
def _delta_rho(a: HomAlgebra, r: AnyRep, phi: DenseCochain) -> DenseCochain:
    n, m = a.dim, r.carrier_dim
    d = phi.degree
    count = d + 1
    e = [basis_vector(n, i) for i in range(n)]
    al = [a.alpha_image(i) for i in range(n)]
    twist = a.alpha.power(d)
    ald = [twist.column(i) for i in range(n)]
    alpha_pairs = {pair: wedge(al[pair[0]], al[pair[1]]) for pair in canonical_pairs(n)}
    plain_pairs = {pair: {pair: ONE} for pair in canonical_pairs(n)}

    def leibniz(first: PairKey, second: PairKey) -> WedgeElement:
        (x1, y1), (x2, y2) = first, second
        return wedge_add(wedge(a.basis_bracket(x1, y1, x2), al[y2]), wedge(al[x2], a.basis_bracket(x1, y1, y2)))

    values: Dict[CochainKey, Vector] = {}
    for pairs, z in all_keys(n, count):
        total = [ZERO] * m
        for j, k in combinations(range(count), 2):
            args = [alpha_pairs[pairs[i]] if i != k else leibniz(pairs[j], pairs[k]) for i in range(count) if i != j]
            vec_accumulate(total, -ONE if j % 2 == 0 else ONE, phi.evaluate(args, al[z]))
        for j in range(count):
            sign = -ONE if j % 2 == 0 else ONE
            args = [alpha_pairs[pairs[i]] for i in range(count) if i != j]
            x, y = pairs[j]
            vec_accumulate(total, sign, phi.evaluate(args, a.basis_bracket(x, y, z)))
            rest = [plain_pairs[pairs[i]] for i in range(count) if i != j]
            vec_accumulate(total, -sign, r.act(ald[x], ald[y], phi.evaluate(rest, e[z])))
        head = [plain_pairs[pair] for pair in pairs[:-1]]
        x, y = pairs[-1]
        last = vec_add(
            r.act(ald[y], ald[z], phi.evaluate(head, e[x])),
            r.act(ald[z], ald[x], phi.evaluate(head, e[y])),
        )
        vec_accumulate(total, ONE if count % 2 == 1 else -ONE, last)
        if not vec_is_zero(total):
            values[pairs, z] = tuple(total)
    return DenseCochain._trusted(n, count, m, values)


def delta_rho(a: HomAlgebra, r: AnyRep, phi: DenseCochain) -> DenseCochain:
    """Coboundary of a g-cochain with values in the representation (ρ, A).

    (δφ)(X1..XP, z) = Σ_{j<k} (−1)^j φ(αX1..X̂j..[Xj,Xk]_L..αXP, αz)
                    + Σ_j (−1)^j φ(αX1..X̂j..αXP, [xj,yj,z])
                    + Σ_j (−1)^{j+1} ρ(α^d xj, α^d yj) φ(X1..X̂j..XP, z)
                    + (−1)^{P+1} (ρ(α^d yP, α^d z) φ(X1..X_{P−1}, xP)
                                  + ρ(α^d z, α^d xP) φ(X1..X_{P−1}, yP))
    with d = deg φ and P = d + 1.

    Raises:
        PreconditionError: φ is not compatible with (α, A)
    """
    n, m = a.dim, r.carrier_dim
    if r.algebra_dim != n or phi.space_dim != n or phi.target_dim != m:
        raise InputError(
            f"Cochain of shape ({phi.space_dim}, {phi.target_dim}) with a representation of shape ({r.algebra_dim}, {m}) over dimension {n}"
        )
    _require(CompatibilityConstraint(a.alpha, r.endo).check(phi), "delta_rho")
    return _delta_rho(a, r, phi)


def _differential(a: HomAlgebra, g: AnyRep, phi: DenseCochain, lifted: Optional[DenseCochain] = None) -> DenseCochain:
    n, m = a.dim, g.carrier_dim
    lifted = lifted if lifted is not None else lift_structure(a, g)
    alpha_h = a.alpha.direct_sum(g.endo)
    embedded = embed_target(phi, n, n + m)
    return project_target(graded_bracket(lifted, embedded, alpha_h), n, n + m)


def _coerce_fiber_valued(a: HomAlgebra, g: AnyRep, phi: DenseCochain) -> DenseCochain:
    n, m = a.dim, g.carrier_dim
    if phi.space_dim != n + m:
        raise InputError(f"Cochain lives on dimension {phi.space_dim}, expected {n + m}")
    if phi.target_dim == m:
        return phi
    if phi.target_dim == n + m:
        if any(not vec_is_zero(v[:n]) for _, v in phi.items()):
            raise InputError("Cochain has a nonzero algebra component; d acts on V-valued cochains")
        return project_target(phi, n, n + m)
    raise InputError(f"Cochain target has dimension {phi.target_dim}, expected {m}")


def check_cochain_support(phi: DenseCochain, algebra_dim: int) -> Report:
    """C̃ membership: every key with all slots in V carries zero."""
    report = Report(subject="cochain-support")
    report.checked = len(phi.values)
    for key, value in phi.items():
        if _in_fiber(key, algebra_dim):
            report.add("fiber-support", key_labels(key, algebra_dim), format_vector(value), format_vector(zero_vector(len(value))))
    return report


def differential_d(a: HomAlgebra, g: AnyRep, phi: DenseCochain) -> DenseCochain:
    """d(φ) = [π+ρ̄+ν̄, φ] projected to V, for φ on g⊕V valued in V.

    Raises:
        PreconditionError: φ is not supported off V-only keys, or not compatible with (α⊕A, A)
    """
    phi = _coerce_fiber_valued(a, g, phi)
    n = a.dim
    _require(check_cochain_support(phi, n), "differential_d")
    _require(CompatibilityConstraint(a.alpha.direct_sum(g.endo), g.endo).check(phi, n), "differential_d")
    return _differential(a, g, phi)


# -------------------------------------------------------------------------
# Component form of 2-cochains
# -------------------------------------------------------------------------
def _normalize_pair_table(table: Dict[Tuple[int, int, int], Sequence], pair_dim: int, other_dim: int, carrier_dim: int, name: str):
    stored: Dict[Tuple[int, int, int], Vector] = {}
    for (s, t, w), value in table.items():
        if not (0 <= s < pair_dim and 0 <= t < pair_dim and 0 <= w < other_dim):
            raise InputError(f"{name} key {(s, t, w)} out of range")
        value = vector(value)
        if len(value) != carrier_dim:
            raise InputError(f"{name} value at {(s, t, w)} has length {len(value)}, expected {carrier_dim}")
        sign, (s, t) = canonical_pair(s, t)
        if sign == 0:
            if not vec_is_zero(value):
                raise InputError(f"{name} must vanish on a repeated pair")
            continue
        signed = value if sign > 0 else vec_neg(value)
        if (s, t, w) in stored and stored[s, t, w] != signed:
            raise InputError(f"Conflicting {name} values at {(s, t, w)}")
        stored[s, t, w] = signed
    return {key: v for key, v in sorted(stored.items()) if not vec_is_zero(v)}


@dataclass(frozen=True)
class ComponentCochain2:
    """φ1 on ∧²V∧g keyed (a, b, x); φ2 on ∧²g∧V keyed (x, y, v); φ3 on ∧³g."""

    algebra_dim: int
    carrier_dim: int
    phi1: Dict[Tuple[int, int, int], Vector] = field(default_factory=dict)
    phi2: Dict[Tuple[int, int, int], Vector] = field(default_factory=dict)
    phi3: Optional[SkewTensor3] = None

    def __post_init__(self):
        n, m = self.algebra_dim, self.carrier_dim
        object.__setattr__(self, "phi1", _normalize_pair_table(self.phi1, m, n, m, "phi1"))
        object.__setattr__(self, "phi2", _normalize_pair_table(self.phi2, n, m, m, "phi2"))
        phi3 = self.phi3 if self.phi3 is not None else SkewTensor3.zero(n, m)
        if phi3.dim != n or phi3.value_dim != m:
            raise InputError(f"phi3 has shape ({phi3.dim}, {phi3.value_dim}), expected ({n}, {m})")
        object.__setattr__(self, "phi3", phi3)


def components_to_dense(c: ComponentCochain2) -> DenseCochain:
    n, m = c.algebra_dim, c.carrier_dim
    cells: Dict[Tuple[int, int, int], Vector] = dict(c.phi3.items())
    for (x, y, v), value in c.phi2.items():
        cells[x, y, n + v] = value
    for (p, q, x), value in c.phi1.items():
        cells[x, n + p, n + q] = value
    return skew_cochain(n + m, m, cells)


def dense_to_components(phi: DenseCochain, algebra_dim: int) -> ComponentCochain2:
    """Read the three blocks off the sorted keys; V-only keys are dropped."""
    n = algebra_dim
    m = phi.target_dim
    if phi.degree != 1 or phi.space_dim < n:
        raise InputError("Component form needs a degree-1 cochain on g⊕V")
    phi1, phi2, phi3 = {}, {}, {}
    for i, j, k in combinations(range(phi.space_dim), 3):
        value = phi.value(((i, j),), k)
        if vec_is_zero(value):
            continue
        if k < n:
            phi3[i, j, k] = value
        elif j < n:
            phi2[i, j, k - n] = value
        elif i < n:
            phi1[j - n, k - n, i] = value
    return ComponentCochain2(n, phi.space_dim - n, phi1, phi2, SkewTensor3(n, phi3, m))


# -------------------------------------------------------------------------
# Cocycles and cohomology
# -------------------------------------------------------------------------
def _coordinate_basis(space_dim: int, degree: int, target_dim: int, algebra_dim: Optional[int]) -> List[DenseCochain]:
    """Elementary cochains spanning the coordinate space; degree 1 is fully skew."""
    if degree == 0:
        keys = [((), u) for u in range(space_dim)]
    elif degree == 1:
        triples = list(combinations(range(space_dim), 3))
        if algebra_dim is not None:
            triples = [t for t in triples if min(t) < algebra_dim]
        return [
            skew_cochain(space_dim, target_dim, {triple: basis_vector(target_dim, c)})
            for triple in triples
            for c in range(target_dim)
        ]
    else:
        keys = all_keys(space_dim, degree)
    if algebra_dim is not None:
        keys = [key for key in keys if not _in_fiber(key, algebra_dim)]
    return [
        DenseCochain._trusted(space_dim, degree, target_dim, {key: basis_vector(target_dim, c)})
        for key in keys
        for c in range(target_dim)
    ]


def coefficient_matrix(cochains: Sequence[DenseCochain]) -> Matrix:
    """Columns are the flattened cochains over the union of their nonzero coordinates."""
    rows = sorted({(key, c) for phi in cochains for key, v in phi.values.items() for c, a in enumerate(v) if a})
    index = {row: r for r, row in enumerate(rows)}
    table = [[ZERO] * len(cochains) for _ in rows]
    for j, phi in enumerate(cochains):
        for key, v in phi.values.items():
            for c, a in enumerate(v):
                if a:
                    table[index[key, c]][j] = a
    return Matrix(table, cols=len(cochains))


def linear_combination(basis: Sequence[DenseCochain], coefficients: Sequence[Fraction], shape: Tuple[int, int, int]) -> DenseCochain:
    space_dim, degree, target_dim = shape
    merged: Dict[CochainKey, List[Fraction]] = {}
    for c, phi in zip(coefficients, basis):
        if not c:
            continue
        for key, v in phi.values.items():
            vec_accumulate(merged.setdefault(key, [ZERO] * target_dim), c, v)
    return DenseCochain._trusted(space_dim, degree, target_dim, {key: tuple(v) for key, v in merged.items()})


def in_span(phi: DenseCochain, basis: Sequence[DenseCochain]) -> bool:
    return rank(coefficient_matrix(list(basis) + [phi])) == rank(coefficient_matrix(list(basis)))


def _setting(a: HomAlgebra, g: AnyRep, ordinary: bool):
    n, m = a.dim, g.carrier_dim
    if g.algebra_dim != n:
        raise InputError(f"Representation of a {g.algebra_dim}-dimensional algebra used over dimension {n}")
    if ordinary:
        constraint = CompatibilityConstraint(a.alpha, g.endo)
        return n, None, constraint, lambda phi: _delta_rho(a, g, phi)
    lifted = lift_structure(a, g)
    constraint = CompatibilityConstraint(a.alpha.direct_sum(g.endo), g.endo)
    return n + m, n, constraint, lambda phi: _differential(a, g, phi, lifted)


def compatible_basis(a: HomAlgebra, g: AnyRep, k: int, ordinary: bool = False) -> List[DenseCochain]:
    """Basis of the compatible k-cochains (C̃ for the generalized flavor)."""
    space_dim, algebra_dim, constraint, _ = _setting(a, g, ordinary)
    coordinates = _coordinate_basis(space_dim, k - 1, g.carrier_dim, algebra_dim)
    residuals = coefficient_matrix([constraint.residual(phi) for phi in coordinates])
    kernel = nullspace(residuals)
    shape = (space_dim, k - 1, g.carrier_dim)
    return [linear_combination(coordinates, coefficients, shape) for coefficients in kernel]


def _check_degree(k: int, limit: int, flavor: str) -> None:
    if not 1 <= k <= limit:
        raise InputError(f"Unsupported {flavor} cohomological degree {k}; supported 1..{limit}")


def cocycle_space(a: HomAlgebra, g: AnyRep, k: int, ordinary: bool = False) -> List[DenseCochain]:
    """Kernel basis of d (or δ_ρ when ordinary) on compatible k-cochains."""
    if ordinary:
        _check_degree(k, Config.MAX_ORDINARY_DEGREE, "ordinary")
    else:
        _check_degree(k, Config.MAX_GENERALIZED_COCYCLE_DEGREE, "generalized")
    space_dim, _, _, operator = _setting(a, g, ordinary)
    basis = compatible_basis(a, g, k, ordinary)
    images = coefficient_matrix([operator(phi) for phi in basis])
    kernel = nullspace(images)
    shape = (space_dim, k - 1, g.carrier_dim)
    cocycles = [linear_combination(basis, coefficients, shape) for coefficients in kernel]
    logger.info("cocycle_space: k=%d, %d compatible cochains, %d cocycles", k, len(basis), len(cocycles))
    return cocycles


def cohomology_dims(a: HomAlgebra, g: AnyRep, k: int, ordinary: bool = False) -> Tuple[int, int, int]:
    """(dim Z, dim B, dim H) in cohomological degree k.

    Raises:
        PreconditionError: the coboundaries outnumber the cocycles (d∘d ≠ 0 on this data)
    """
    limit = Config.MAX_ORDINARY_DEGREE if ordinary else Config.MAX_GENERALIZED_DEGREE
    _check_degree(k, limit, "ordinary" if ordinary else "generalized")
    cocycles = len(cocycle_space(a, g, k, ordinary))
    if k == 1:
        coboundaries = 0
    else:
        _, _, _, operator = _setting(a, g, ordinary)
        coboundaries = rank(coefficient_matrix([operator(phi) for phi in compatible_basis(a, g, k - 1, ordinary)]))
    if coboundaries > cocycles:
        logger.warning("cohomology_dims: dim B=%d exceeds dim Z=%d at k=%d", coboundaries, cocycles, k)
        raise PreconditionError(f"Coboundaries ({coboundaries}) exceed cocycles ({cocycles}); the data is not a valid representation")
    logger.info("cohomology_dims: k=%d, Z=%d, B=%d, H=%d", k, cocycles, coboundaries, cocycles - coboundaries)
    return cocycles, coboundaries, cocycles - coboundaries
