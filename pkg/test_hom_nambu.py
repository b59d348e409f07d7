from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import InputError, PreconditionError
from exact_linalg import Matrix, SkewTensor3, vector
from hom_nambu import (
    FundamentalObject,
    HomAlgebra,
    adjoint_rep,
    check_morphism,
    fundamental_bracket,
    twist_algebra,
    validate_filippov,
    validate_hom_algebra,
    validate_hom_leibniz,
)
from representations import validate_representation

nonzero = st.integers(-5, 5).filter(lambda x: x != 0)

# [e1,e2,e3] = e1
FIX_A_BRACKET = SkewTensor3(3, {(0, 1, 2): (1, 0, 0)})
# [e1,e2,e4] = e3, [e1,e3,e4] = e2, [e2,e3,e4] = e1
FIX_B_BRACKET = SkewTensor3(
    4,
    {
        (0, 1, 3): (0, 0, 1, 0),
        (0, 2, 3): (0, 1, 0, 0),
        (1, 2, 3): (1, 0, 0, 0),
    },
)
# [e1,e2,e3] = e1, [e1,e2,e4] = e2; Filippov-Jacobi fails at (e1,e2 | e1,e3,e4)
NOT_FILIPPOV = SkewTensor3(4, {(0, 1, 2): (1, 0, 0, 0), (0, 1, 3): (0, 1, 0, 0)})


class TestHomAlgebra:
    def test_shape_checks(self):
        with pytest.raises(InputError):
            HomAlgebra(FIX_A_BRACKET, Matrix.identity(2))
        with pytest.raises(InputError):
            HomAlgebra(SkewTensor3(3, {(0, 1, 2): (1,)}, value_dim=1), Matrix.identity(3))

    def test_untwisted_product(self):
        a = HomAlgebra.untwisted(FIX_A_BRACKET)
        assert a.alpha.is_identity()
        assert a.product(vector([1, 0, 0]), vector([0, 1, 0]), vector([0, 0, 2])) == (2, 0, 0)
        assert a.basis_bracket(2, 1, 0) == (-1, 0, 0)

    @given(c=st.lists(st.integers(-5, 5), min_size=3, max_size=3))
    def test_every_three_dimensional_bracket_is_filippov(self, c):
        bracket = SkewTensor3(3, {(0, 1, 2): c})
        assert validate_filippov(bracket).passed
        assert validate_hom_algebra(HomAlgebra.untwisted(bracket)).passed

    def test_four_dimensional_examples(self):
        assert validate_filippov(FIX_B_BRACKET).passed
        report = validate_filippov(NOT_FILIPPOV)
        assert not report.passed
        assert report.identities() == ["FJ"]


class TestTwist:
    @given(lam=nonzero, mu=nonzero)
    def test_twist_along_a_morphism(self, lam, mu):
        alpha = Matrix.diagonal([lam, mu, Fraction(1, mu)])
        a = twist_algebra(FIX_A_BRACKET, alpha)
        assert a.basis_bracket(0, 1, 2) == (lam, 0, 0)
        assert validate_hom_algebra(a).passed

    def test_alpha_not_a_morphism(self):
        alpha = Matrix.diagonal([2, 2, 2, "-1/2"])
        with pytest.raises(PreconditionError) as exc:
            twist_algebra(FIX_B_BRACKET, alpha)
        first = exc.value.report.first()
        assert first.identity == "alpha-morphism"
        assert first.witness == ["e1", "e2", "e4"]
        assert first.left == ["0", "0", "2", "0"]
        assert first.right == ["0", "0", "-2", "0"]

    def test_bracket_not_filippov(self):
        with pytest.raises(PreconditionError) as exc:
            twist_algebra(NOT_FILIPPOV, Matrix.identity(4))
        assert exc.value.report.identities() == ["FJ"]

    def test_check_morphism_label(self):
        report = check_morphism(FIX_B_BRACKET, Matrix.diagonal([1, 1, 1, -1]), "beta-morphism")
        assert report.identities() == ["beta-morphism"]
        assert check_morphism(FIX_B_BRACKET, Matrix.identity(4)).passed


class TestFundamentalObjects:
    @given(x=st.lists(st.integers(-4, 4), min_size=3, max_size=3), y=st.lists(st.integers(-4, 4), min_size=3, max_size=3))
    def test_wedge_is_skew(self, x, y):
        X = FundamentalObject.wedge(vector(x), vector(y))
        Y = FundamentalObject.wedge(vector(y), vector(x))
        assert X == Y.scale(-1)
        assert FundamentalObject.wedge(vector(x), vector(x)).is_zero()

    def test_basis_orientation(self):
        assert FundamentalObject.basis(3, 1, 0) == FundamentalObject.basis(3, 0, 1).scale(-1)
        assert FundamentalObject.basis(3, 1, 0).coefficient(0, 1) == -1

    def test_fundamental_bracket(self):
        a = HomAlgebra.untwisted(FIX_A_BRACKET)
        X = FundamentalObject.basis(3, 1, 2)
        Y = FundamentalObject.basis(3, 0, 1)
        # [e2,e3,e1] ∧ e2 + e1 ∧ [e2,e3,e2] = e1 ∧ e2
        assert fundamental_bracket(a, X, Y) == FundamentalObject.basis(3, 0, 1)

    def test_hom_leibniz_of_twisted_algebra(self):
        a = twist_algebra(FIX_A_BRACKET, Matrix.diagonal([3, 2, "1/2"]))
        assert validate_hom_leibniz(a).passed


class TestAdjoint:
    def test_adjoint_of_twisted_algebra(self):
        a = twist_algebra(FIX_A_BRACKET, Matrix.diagonal([3, 1, 1]))
        ad = adjoint_rep(a)
        assert ad.endo == a.alpha
        assert ad.rho_basis(1, 2).column(0) == (3, 0, 0)
        assert validate_representation(a, ad).passed

    def test_adjoint_needs_valid_algebra(self):
        with pytest.raises(PreconditionError):
            adjoint_rep(HomAlgebra.untwisted(NOT_FILIPPOV))
