from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import EvaluationError, ParseError
from expression_parser import evaluate_expr, parse_binding, parse_scalar_expr


class TestExpressionParser:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("1 + 2*3", 7),
            ("(1 + 2) * 3", 9),
            ("2 - 3 - 4", -5),
            ("8/4/2", 1),
            ("3/4", Fraction(3, 4)),
            ("-2*-3", 6),
            ("--2", 2),
            ("-(1 - 4)/6", Fraction(1, 2)),
        ],
    )
    def test_precedence_and_associativity(self, text, expected):
        assert evaluate_expr(text) == expected

    def test_identifiers_resolve_at_evaluation(self):
        expr = parse_scalar_expr("a*b + a")
        assert expr.identifiers() == frozenset({"a", "b"})
        assert expr.evaluate({"a": Fraction(2), "b": Fraction(1, 2)}) == 3

    def test_unbound_identifier(self):
        with pytest.raises(EvaluationError):
            evaluate_expr("lambda + 1")

    def test_division_by_zero(self):
        with pytest.raises(EvaluationError):
            evaluate_expr("1/(2 - 2)")

    @pytest.mark.parametrize("text", ["", "1 +", "(1 + 2", "2 ** 3", "1.5"])
    def test_syntax_errors(self, text):
        with pytest.raises(ParseError) as exc:
            parse_scalar_expr(text)
        assert 0 <= exc.value.offset <= len(text.encode("utf-8"))

    @given(a=st.integers(-50, 50), b=st.integers(-50, 50))
    def test_integer_arithmetic(self, a, b):
        assert evaluate_expr(f"{a} + {b}") == a + b
        assert evaluate_expr(f"({a}) * ({b})") == a * b
        assert evaluate_expr(f"{a} - {b}") == a - b

    @given(a=st.integers(-20, 20), b=st.integers(1, 20), c=st.integers(-20, 20))
    def test_printed_form_parses_back(self, a, b, c):
        expr = parse_scalar_expr(f"{a}/{b} - x*{c}")
        bindings = {"x": Fraction(3, 7)}
        assert parse_scalar_expr(str(expr)).evaluate(bindings) == expr.evaluate(bindings)


class TestBindings:
    def test_constant_binding(self):
        assert parse_binding("r2=0") == {"r2": Fraction(0)}
        assert parse_binding(" lambda = 3/4 ") == {"lambda": Fraction(3, 4)}
        assert parse_binding("a1=-2") == {"a1": Fraction(-2)}

    def test_binding_must_be_constant(self):
        with pytest.raises(EvaluationError):
            parse_binding("a=b")

    @pytest.mark.parametrize("text", ["x", "=3", "3x=1", "a-b=2"])
    def test_malformed_bindings(self, text):
        with pytest.raises(ParseError):
            parse_binding(text)
