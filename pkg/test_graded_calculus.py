from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from config import Config
from conftest import FIX_C_VALID, fixture_file, random_fraction
from errors import InputError, PreconditionError
from exact_linalg import Matrix, SkewTensor3, basis_vector, vec_add, vec_sub, zero_vector
from graded_calculus import (
    ComponentCochain2,
    CompatibilityConstraint,
    DenseCochain,
    all_keys,
    check_cochain_support,
    cocycle_space,
    cohomology_dims,
    compatible_basis,
    components_to_dense,
    delta_rho,
    dense_to_components,
    differential_d,
    embed_target,
    extend_host,
    graded_bracket,
    graded_compose,
    in_span,
    is_canonical,
    key_indices,
    lift_structure,
    project_target,
    skew_cochain,
    structure_cochain,
    wedge,
)
from hom_nambu import HomAlgebra, adjoint_rep, twist_algebra, validate_hom_algebra
from problem_loader import load_problem
from representations import generalized_semidirect, validate_generalized_rep

FIX_A_BRACKET = SkewTensor3(3, {(0, 1, 2): (1, 0, 0)})

entries = st.integers(-3, 3)


def random_cochain(rng, space_dim, degree, target_dim, density=0.5):
    values = {}
    for key in all_keys(space_dim, degree):
        if rng.random() < density:
            values[key] = [random_fraction(rng) for _ in range(target_dim)]
    return DenseCochain(space_dim, degree, target_dim, values)


def random_skew_cochain(rng, algebra_dim, carrier_dim):
    """Fully skew 2-cochain on g⊕V valued in V, zero on V-only triples."""
    cells = {}
    for triple in combinations(range(algebra_dim + carrier_dim), 3):
        if min(triple) < algebra_dim:
            cells[triple] = [random_fraction(rng) for _ in range(carrier_dim)]
    return skew_cochain(algebra_dim + carrier_dim, carrier_dim, cells)


def random_combination(rng, basis, shape):
    total = DenseCochain.zero(*shape)
    for phi in basis:
        total = total + phi.scale(random_fraction(rng))
    return total


def bracket_differential(a, g, phi):
    """[π+ρ̄+ν̄, φ] projected to V, with no precondition checks."""
    n, m = a.dim, g.carrier_dim
    alpha_h = a.alpha.direct_sum(g.endo)
    return project_target(graded_bracket(lift_structure(a, g), embed_target(phi, n, n + m), alpha_h), n, n + m)


def cochain_from_rows(rows):
    return DenseCochain(3, 0, 3, {((), u): row for u, row in enumerate(rows)})


def random_hom_algebra(rng, kind):
    """kind 0: [e1,e2,e3] = c e1 under diag(d1, d2, 1/d2), always valid; kind 1: the
    same twist sheared so α e1 leaves the line of e1; kind 2: random 4-dimensional data."""
    if kind == 2:
        cells = {
            triple: [random_fraction(rng) for _ in range(4)] for triple in combinations(range(4), 3) if rng.random() < 0.5
        }
        alpha = Matrix([[random_fraction(rng) for _ in range(4)] for _ in range(4)])
        return HomAlgebra(SkewTensor3(4, cells), alpha)
    c, d1, d2 = (random_fraction(rng, 1, 4) for _ in range(3))
    rows = [[d1, 0, 0], [kind, d2, 0], [0, 0, 1 / d2]]
    return HomAlgebra(SkewTensor3(3, {(0, 1, 2): (c, 0, 0)}), Matrix(rows))


class TestDenseCochain:
    def test_keys_are_canonicalized(self):
        phi = DenseCochain(3, 1, 1, {(((1, 0),), 2): (1,)})
        assert phi.value(((0, 1),), 2) == (-1,)
        assert phi.value(((1, 0),), 2) == (1,)
        assert phi.value(((1, 1),), 2) == (0,)
        assert phi.nonzero_keys() == [(((0, 1),), 2)]

    def test_invalid_entries(self):
        with pytest.raises(InputError):
            DenseCochain(3, 1, 1, {(((0, 0),), 2): (1,)})
        with pytest.raises(InputError):
            DenseCochain(3, 1, 1, {(((0, 1),), 3): (1,)})
        with pytest.raises(InputError):
            DenseCochain(3, 1, 2, {(((0, 1),), 2): (1,)})

    def test_skew_cochain(self):
        phi = skew_cochain(3, 1, {(0, 1, 2): (1,)})
        assert phi.value(((0, 1),), 2) == (1,)
        assert phi.value(((0, 2),), 1) == (-1,)
        assert phi.value(((1, 2),), 0) == (1,)
        assert phi.evaluate([wedge(basis_vector(3, 2), basis_vector(3, 0))], basis_vector(3, 1)) == (1,)
        assert all(len(pairs) == 1 for pairs, _ in phi.nonzero_keys())

    def test_structure_cochain_keys(self):
        pi = structure_cochain(HomAlgebra.untwisted(FIX_A_BRACKET))
        assert pi.value(((0, 1),), 2) == (1, 0, 0)
        assert pi.value(((1, 2),), 0) == (1, 0, 0)
        assert pi.value(((2, 0),), 1) == (1, 0, 0)
        assert pi.value(((0, 2),), 1) == (-1, 0, 0)
        assert sorted(pi.nonzero_keys()) == [(((0, 1),), 2), (((0, 2),), 1), (((1, 2),), 0)]
        assert check_cochain_support(pi, 3).passed

    def test_arithmetic(self, rng):
        phi = random_cochain(rng, 3, 1, 2)
        psi = random_cochain(rng, 3, 1, 2)
        assert (phi + psi) - psi == phi
        assert (phi - phi).is_zero()
        assert phi.scale(2) == phi + phi

    def test_target_maps(self, rng):
        phi = random_cochain(rng, 3, 1, 2)
        embedded = embed_target(phi, 3, 5)
        assert embedded.target_dim == 5
        assert project_target(embedded, 3, 5) == phi
        assert extend_host(phi, 5).value(((0, 1),), 2) == phi.value(((0, 1),), 2)


class TestCompatibility:
    def test_shipped_cochain_is_compatible(self):
        loaded = load_problem(fixture_file("fix_abelian.cochain"))
        a, g = loaded.algebra, loaded.representation
        constraint = CompatibilityConstraint(a.alpha.direct_sum(g.endo), g.endo)
        assert constraint.check(loaded.cochain, a.dim).passed
        assert constraint.residual(loaded.cochain).is_zero()

    def test_incompatible_cochain(self, abelian):
        a, g = abelian.algebra, abelian.representation
        # φ(e1, v1, v2) = v2: A v2 = v2 but φ(αe1, Av1, Av2) = 3 v2
        phi = skew_cochain(4, 2, {(0, 2, 3): (0, 1)})
        report = CompatibilityConstraint(a.alpha.direct_sum(g.endo), g.endo).check(phi, a.dim)
        assert report.identities() == ["compatibility"]
        assert report.first().witness[:2] == ["e1^v1", "v2"]
        with pytest.raises(PreconditionError):
            differential_d(a, g, phi)

    def test_fiber_support(self, abelian):
        a, g = abelian.algebra, abelian.representation
        phi = DenseCochain(4, 1, 2, {(((2, 3),), 2): (1, 0)})
        report = check_cochain_support(phi, a.dim)
        assert report.identities() == ["fiber-support"]
        with pytest.raises(PreconditionError) as exc:
            differential_d(a, g, phi)
        assert exc.value.report.identities() == ["fiber-support"]


class TestGradedBracket:
    @given(
        f=st.lists(st.lists(entries, min_size=3, max_size=3), min_size=3, max_size=3),
        h=st.lists(st.lists(entries, min_size=3, max_size=3), min_size=3, max_size=3),
    )
    def test_degree_zero_bracket_is_the_commutator(self, f, h):
        phi, psi = cochain_from_rows(f), cochain_from_rows(h)
        composed = Matrix.from_columns(f) @ Matrix.from_columns(h)
        expected = cochain_from_rows([composed.column(u) for u in range(3)])
        assert graded_compose(phi, psi, Matrix.identity(3)) == expected
        assert graded_bracket(phi, psi, Matrix.identity(3)) == graded_bracket(psi, phi, Matrix.identity(3)).scale(-1)

    def test_graded_skew_symmetry(self, rng):
        identity = Matrix.identity(3)
        for p, q in ((0, 1), (1, 1)):
            phi = random_cochain(rng, 3, p, 3)
            psi = random_cochain(rng, 3, q, 3)
            sign = -1 if (p * q) % 2 else 1
            assert graded_bracket(phi, psi, identity) == graded_bracket(psi, phi, identity).scale(-sign)

    def test_jacobi_with_degree_zero_entries(self, rng):
        identity = Matrix.identity(3)
        for _ in range(3):
            f = random_cochain(rng, 3, 0, 3, density=0.7)
            h = random_cochain(rng, 3, 0, 3, density=0.7)
            phi = random_cochain(rng, 3, 1, 3)

            def br(x, y):
                return graded_bracket(x, y, identity)

            total = br(br(f, h), phi) + br(br(h, phi), f) + br(br(phi, f), h)
            assert total.is_zero()

    def test_graded_jacobi(self, rng):
        identity = Matrix.identity(3)

        def br(x, y):
            return graded_bracket(x, y, identity)

        degrees = [(p, q, r) for p in range(3) for q in range(3) for r in range(3) if p + q + r <= 3]
        for trial in range(max(50, Config.RANDOM_TRIALS)):
            p, q, r = degrees[trial % len(degrees)]
            phi, psi, chi = (random_cochain(rng, 3, d, 3) for d in (p, q, r))
            total = (
                br(br(phi, psi), chi).scale((-1) ** (p * r))
                + br(br(psi, chi), phi).scale((-1) ** (q * p))
                + br(br(chi, phi), psi).scale((-1) ** (r * q))
            )
            assert total.is_zero(), (p, q, r)

    def test_structure_of_a_valid_algebra_is_canonical(self):
        a = twist_algebra(FIX_A_BRACKET, Matrix.diagonal([3, 2, "1/2"]))
        assert is_canonical(structure_cochain(a), a.alpha).passed

    def test_non_multiplicative_twist_is_not_canonical(self):
        # α e1 = e1 but [αe1, αe2, αe3] = 2 e1
        a = HomAlgebra(FIX_A_BRACKET, Matrix.diagonal([1, 2, 1]))
        assert not validate_hom_algebra(a).passed
        report = is_canonical(structure_cochain(a), a.alpha)
        assert not report.passed
        assert "alpha-compatibility" in report.identities()

    def test_filippov_failure_shows_in_the_square(self):
        a = HomAlgebra.untwisted(SkewTensor3(4, {(0, 1, 2): (1, 0, 0, 0), (0, 1, 3): (0, 1, 0, 0)}))
        assert not validate_hom_algebra(a).passed
        s = structure_cochain(a)
        assert not graded_compose(s, s, a.alpha).is_zero()
        assert is_canonical(s, a.alpha).identities() == ["bracket-square"]

    def test_structure_is_canonical_iff_valid(self, rng):
        outcomes = set()
        for trial in range(Config.RANDOM_TRIALS):
            a = random_hom_algebra(rng, trial % 3)
            expected = validate_hom_algebra(a).passed
            assert is_canonical(structure_cochain(a), a.alpha).passed is expected
            outcomes.add(expected)
        assert outcomes == {True, False}

    def test_lift_is_the_semidirect_structure(self, fix_c_valid, fix_c_invalid, abelian):
        for loaded in (fix_c_valid, fix_c_invalid, abelian):
            a, g = loaded.algebra, loaded.representation
            assert lift_structure(a, g) == structure_cochain(generalized_semidirect(a, g))

    def test_three_validity_routes_agree(self, rng):
        outcomes = set()
        for trial in range(Config.RANDOM_TRIALS):
            bindings = {name: int(rng.choice([1, 2, -1])) for name in ("a1", "a2", "s")}
            if trial % 2:
                bindings.update(a3=bindings["a1"] + 1, r1=int(rng.integers(0, 2)), r2=int(rng.integers(0, 2)))
            else:
                bindings.update(a3=bindings["a1"], r1=0, r2=0)
            loaded = load_problem(fixture_file("fix_c.genrep"), bindings)
            a, g = loaded.algebra, loaded.representation
            expected = validate_generalized_rep(a, g).passed
            assert validate_hom_algebra(generalized_semidirect(a, g)).passed is expected
            assert is_canonical(lift_structure(a, g), a.alpha.direct_sum(g.endo), a.dim).passed is expected
            outcomes.add(expected)
        assert outcomes == {True, False}

    def test_lift_is_canonical_iff_valid(self, fix_c_valid, fix_c_invalid):
        for loaded, expected in ((fix_c_valid, True), (fix_c_invalid, False)):
            a, g = loaded.algebra, loaded.representation
            report = is_canonical(lift_structure(a, g), a.alpha.direct_sum(g.endo), a.dim)
            assert report.passed is expected


class TestDifferential:
    def test_matches_the_explicit_formula(self, rng, fix_c_valid):
        a, g = fix_c_valid.algebra, fix_c_valid.representation
        n, m = a.dim, g.carrier_dim
        total = n + m
        alpha_h = a.alpha.direct_sum(g.endo)
        s = lift_structure(a, g)
        phi = random_skew_cochain(rng, n, m)
        image = bracket_differential(a, g, phi)
        al = [alpha_h.column(i) for i in range(total)]
        e = [basis_vector(total, i) for i in range(total)]

        def S(x, y, z):
            return s.evaluate([wedge(x, y)], z)

        def P(x, y, z):
            return zero_vector(n) + phi.evaluate([wedge(x, y)], z)

        for (pairs, f) in all_keys(total, 2):
            (i, j), (k, l) = pairs
            terms = [
                S(al[i], al[j], P(e[k], e[l], e[f])),
                P(al[i], al[j], S(e[k], e[l], e[f])),
            ]
            negative = [
                S(P(e[i], e[j], e[k]), al[l], al[f]),
                S(al[k], P(e[i], e[j], e[l]), al[f]),
                S(al[k], al[l], P(e[i], e[j], e[f])),
                P(S(e[i], e[j], e[k]), al[l], al[f]),
                P(al[k], S(e[i], e[j], e[l]), al[f]),
                P(al[k], al[l], S(e[i], e[j], e[f])),
            ]
            expected = zero_vector(total)
            for term in terms:
                expected = vec_add(expected, term)
            for term in negative:
                expected = vec_sub(expected, term)
            assert image.value(pairs, f) == expected[n:]

    def test_top_component_display(self, rng, fix_c_valid):
        a, g = fix_c_valid.algebra, fix_c_valid.representation
        n, m = a.dim, g.carrier_dim
        phi3 = SkewTensor3(n, {(0, 1, 2): [random_fraction(rng) for _ in range(m)]}, m)
        image = bracket_differential(a, g, components_to_dense(ComponentCochain2(n, m, phi3=phi3)))
        e = [basis_vector(n, i) for i in range(n)]
        al = [a.alpha_image(i) for i in range(n)]
        for (x1, x2), (x3, x4) in [((0, 1), (2, 0)), ((0, 1), (1, 2)), ((1, 2), (0, 2))]:
            for v in range(m):
                Av = g.endo.column(v)
                expected = vec_add(
                    g.nu_of(al[x4], phi3.lookup(x1, x2, x3), Av),
                    g.nu_of(al[x3], Av, phi3.lookup(x1, x2, x4)),
                )
                assert image.value(((x1, x2), (x3, x4)), n + v) == expected

    def test_d_squared_vanishes(self, rng, fix_c_valid, abelian):
        for loaded in (fix_c_valid, abelian):
            a, g = loaded.algebra, loaded.representation
            shape = (a.dim + g.carrier_dim, 0, g.carrier_dim)
            basis = compatible_basis(a, g, 1)
            for _ in range(Config.RANDOM_TRIALS):
                phi = random_combination(rng, basis, shape)
                once = differential_d(a, g, phi)
                assert check_cochain_support(once, a.dim).passed
                assert differential_d(a, g, once).is_zero()

    def test_d_preserves_compatibility(self, rng, fix_c_valid):
        a, g = fix_c_valid.algebra, fix_c_valid.representation
        shape = (a.dim + g.carrier_dim, 1, g.carrier_dim)
        phi = random_combination(rng, compatible_basis(a, g, 2), shape)
        image = differential_d(a, g, phi)
        constraint = CompatibilityConstraint(a.alpha.direct_sum(g.endo), g.endo)
        assert constraint.check(image, a.dim).passed

    def test_ordinary_coboundary_in_degree_one(self, rng, fix_c_valid):
        a, g = fix_c_valid.algebra, fix_c_valid.representation
        n, m = a.dim, g.carrier_dim
        phi = random_combination(rng, compatible_basis(a, g, 1, ordinary=True), (n, 0, m))
        image = delta_rho(a, g, phi)
        e = [basis_vector(n, i) for i in range(n)]
        f = [phi.value((), u) for u in range(n)]
        for x1, x2, x3 in [(0, 1, 2), (1, 2, 0), (0, 2, 1), (2, 2, 0)]:
            expected = vec_add(
                vec_add(g.act(e[x1], e[x2], f[x3]), g.act(e[x2], e[x3], f[x1])),
                vec_sub(g.act(e[x3], e[x1], f[x2]), phi.evaluate([], a.basis_bracket(x1, x2, x3))),
            )
            assert image.value(((x1, x2),), x3) == expected

    def test_forgets_to_the_ordinary_coboundary(self, rng, fix_c_valid):
        a, g = fix_c_valid.algebra, fix_c_valid.representation
        n, m = a.dim, g.carrier_dim
        basis = compatible_basis(a, g, 2, ordinary=True)
        phi = random_combination(rng, basis, (n, 1, m))
        image = differential_d(a, g, extend_host(phi, n + m))
        on_algebra = image.restrict(lambda key: max(key_indices(key)) < n)
        assert on_algebra == extend_host(delta_rho(a, g, phi), n + m)

    def test_adjoint_coboundary_is_the_bracket_with_the_structure(self):
        a = twist_algebra(FIX_A_BRACKET, Matrix.diagonal([3, 2, "1/2"]))
        ad = adjoint_rep(a)
        for phi in compatible_basis(a, ad, 2, ordinary=True):
            assert delta_rho(a, ad, phi) == graded_bracket(structure_cochain(a), phi, a.alpha)


class TestComponents:
    def test_round_trip(self, rng):
        n, m = 3, 2
        phi = random_skew_cochain(rng, n, m)
        components = dense_to_components(phi, n)
        assert components_to_dense(components) == phi

    def test_blocks(self):
        c = ComponentCochain2(
            2,
            2,
            phi1={(1, 0, 0): (1, 0)},
            phi2={(0, 1, 1): (0, 1)},
        )
        assert c.phi1 == {(0, 1, 0): (-1, 0)}
        dense = components_to_dense(c)
        assert dense.value(((0, 2),), 3) == (-1, 0)
        assert dense.value(((0, 1),), 3) == (0, 1)


class TestCohomology:
    def listed_cochain(self, c1, c2, c3):
        bindings = dict(FIX_C_VALID, c1=c1, c2=c2, c3=c3)
        return load_problem(fixture_file("fix_c.genrep"), bindings).printed_cochain

    def test_fix_c_cocycles(self, fix_c_valid):
        a, g = fix_c_valid.algebra, fix_c_valid.representation
        cocycles = cocycle_space(a, g, 2)
        for phi in cocycles:
            assert differential_d(a, g, phi).is_zero()
        assert in_span(self.listed_cochain(0, 1, 0), cocycles)
        # c1 is not compatible for a2 != a1, c3 is compatible but not closed
        assert not in_span(self.listed_cochain(1, 0, 0), cocycles)
        assert not in_span(self.listed_cochain(0, 0, 1), cocycles)

    def test_dimensions(self, fix_c_valid):
        a, g = fix_c_valid.algebra, fix_c_valid.representation
        z, b, h = cohomology_dims(a, g, 2)
        assert z == len(cocycle_space(a, g, 2))
        assert h == z - b >= 0
        z1, b1, h1 = cohomology_dims(a, g, 1)
        assert b1 == 0 and h1 == z1

    def test_ordinary_dimensions(self):
        a = twist_algebra(FIX_A_BRACKET, Matrix.diagonal([3, 1, 1]))
        ad = adjoint_rep(a)
        for k in (1, 2):
            z, b, h = cohomology_dims(a, ad, k, ordinary=True)
            assert h == z - b >= 0

    @pytest.mark.parametrize("k", [0, 3])
    def test_unsupported_degree(self, fix_c_valid, k):
        with pytest.raises(InputError):
            cohomology_dims(fix_c_valid.algebra, fix_c_valid.representation, k)

    def test_cocycle_degree_limits(self, fix_c_valid):
        a, g = fix_c_valid.algebra, fix_c_valid.representation
        with pytest.raises(InputError, match="generalized"):
            cocycle_space(a, g, Config.MAX_GENERALIZED_COCYCLE_DEGREE + 1)
        with pytest.raises(InputError, match="ordinary"):
            cocycle_space(a, g, Config.MAX_ORDINARY_DEGREE + 1, ordinary=True)
