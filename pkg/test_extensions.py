import pytest

from config import Config
from conftest import fixture_file, random_fraction
from errors import InputError, PreconditionError
from exact_linalg import Matrix, SkewTensor3
from extensions import (
    ExtensionData,
    ExtensionMorphism,
    SectionWitness,
    build_extension_bracket,
    check_extension_equivalence,
    split_extension_data,
    validate_extension_triple,
)
from hom_nambu import HomAlgebra, validate_hom_algebra
from problem_loader import load_problem


@pytest.fixture(scope="module")
def fix_a_extension():
    return load_problem(fixture_file("fix_a.ext")).extension


class TestExtensionData:
    def test_shapes(self, fix_a_extension):
        e = fix_a_extension
        with pytest.raises(InputError):
            ExtensionData(e.base, e.genrep, SkewTensor3(3, {}, 3))

    def test_valid_triple(self, fix_a_extension):
        report = validate_extension_triple(fix_a_extension)
        assert report.passed
        assert report.checked > 0

    def test_extension_bracket(self, fix_a_extension):
        ext = build_extension_bracket(fix_a_extension)
        assert ext.dim == 5
        assert ext.alpha == Matrix.identity(5)
        # [e2, e3, v1] = rho(e2, e3) v1 = v1
        assert ext.basis_bracket(1, 2, 3) == (0, 0, 0, 1, 0)
        # [e2, v1, v2] = nu(e2)(v1, v2) = s v1
        assert ext.basis_bracket(1, 3, 4) == (0, 0, 0, 1, 0)
        assert validate_hom_algebra(ext).passed

    def test_triple_is_valid_iff_the_bracket_is(self, rng):
        for _ in range(Config.RANDOM_TRIALS):
            bindings = {name: int(rng.integers(0, 3)) for name in ("r1", "r2", "s")}
            e = load_problem(fixture_file("fix_a.ext"), bindings).extension
            omega = SkewTensor3(3, {(0, 1, 2): [random_fraction(rng), random_fraction(rng)]}, 2)
            data = ExtensionData(e.base, e.genrep, omega)
            expected = validate_extension_triple(data).passed
            assert validate_hom_algebra(build_extension_bracket(data)).passed is expected

    def test_omega_lands_in_the_fiber(self):
        e = load_problem(fixture_file("fix_a.ext"), {"w": 1}).extension
        ext = build_extension_bracket(e)
        assert ext.basis_bracket(0, 1, 2) == (1, 0, 0, 1, 0)


class TestSplitting:
    @pytest.mark.parametrize("w", [0, 1, 3])
    def test_split_recovers_the_data(self, w):
        e = load_problem(fixture_file("fix_a.ext"), {"w": w}).extension
        split = split_extension_data(build_extension_bracket(e), SectionWitness.standard(3, 2))
        assert split.base == e.base
        assert split.genrep == e.genrep
        assert split.omega == e.omega

    def test_standard_witness(self):
        w = SectionWitness.standard(2, 1)
        assert w.sigma == Matrix.from_columns([[1, 0, 0], [0, 1, 0]])
        assert w.projection == Matrix([[1, 0, 0], [0, 1, 0]])
        assert w.inclusion == Matrix.from_columns([[0, 0, 1]])
        assert w.basis_change().is_identity()

    def test_fiber_must_be_abelian(self):
        # n = 1, fiber <e2, e3, e4> with [e2, e3, e4] = e1
        ext = HomAlgebra.untwisted(SkewTensor3(4, {(1, 2, 3): (1, 0, 0, 0)}))
        with pytest.raises(PreconditionError) as exc:
            split_extension_data(ext, SectionWitness.standard(1, 3))
        assert exc.value.report.identities() == ["abelian-fiber"]

    def test_fiber_must_be_an_ideal(self):
        # fiber <e3> with [e1, e2, e3] = e1 leaves the fiber
        ext = HomAlgebra.untwisted(SkewTensor3(3, {(0, 1, 2): (1, 0, 0)}))
        with pytest.raises(PreconditionError) as exc:
            split_extension_data(ext, SectionWitness.standard(2, 1))
        report = exc.value.report
        assert report.identities() == ["ideal-fiber"]
        assert report.first().witness == ["e1", "e2", "v1"]
        assert report.first().left == ["1", "0"]

    def test_sheared_section(self, fix_a_extension):
        ext = build_extension_bracket(fix_a_extension)
        standard = SectionWitness.standard(3, 2)
        # sigma(e1) = e1 + v1
        sigma = Matrix.from_columns([[1, 0, 0, 1, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0]])
        witness = SectionWitness(sigma, standard.projection, standard.inclusion)
        split = split_extension_data(ext, witness)
        # [e1 + v1, e2, v2] = rho(e1, e2) v2 - nu(e2)(v1, v2) = v1 - s v1
        assert split.genrep.act((1, 0, 0), (0, 1, 0), (0, 1)) == (0, 0)
        assert split.base == fix_a_extension.base
        assert validate_extension_triple(split).passed
        rebuilt = build_extension_bracket(split)
        assert validate_hom_algebra(rebuilt).passed
        assert check_extension_equivalence(rebuilt, ext, ExtensionMorphism(witness.basis_change(), 3)).passed

    def test_bad_witnesses(self, fix_a_extension):
        ext = build_extension_bracket(fix_a_extension)
        standard = SectionWitness.standard(3, 2)
        with pytest.raises(InputError, match="section-splitting"):
            split_extension_data(ext, SectionWitness(standard.sigma, standard.projection.scale(2), standard.inclusion))
        with pytest.raises(InputError):
            split_extension_data(ext, SectionWitness.standard(2, 2))
        with pytest.raises(InputError, match="section-complement"):
            split_extension_data(ext, SectionWitness(standard.sigma, standard.projection, standard.sigma.submatrix(0, 5, 0, 2)))


class TestEquivalence:
    def test_identity_is_an_equivalence(self, fix_a_extension):
        ext = build_extension_bracket(fix_a_extension)
        report = check_extension_equivalence(ext, ext, ExtensionMorphism(Matrix.identity(5), 3))
        assert report.passed

    def test_rescaled_fiber_breaks_the_diagram(self, fix_a_extension):
        ext = build_extension_bracket(fix_a_extension)
        report = check_extension_equivalence(ext, ext, ExtensionMorphism(Matrix.diagonal([1, 1, 1, 2, 1]), 3))
        assert "diagram-inclusion" in report.identities()
        assert report.first("diagram-inclusion").witness == ["v1"]

    def test_shape_errors(self, fix_a_extension):
        ext = build_extension_bracket(fix_a_extension)
        with pytest.raises(InputError):
            check_extension_equivalence(ext, ext, ExtensionMorphism(Matrix.identity(4), 3))
        with pytest.raises(InputError):
            check_extension_equivalence(ext, ext, ExtensionMorphism(Matrix.identity(5), 6))
