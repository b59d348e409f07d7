"""Rational scalar expressions used by problem files and --bind overrides.

Grammar (usual precedence, left associative):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | primary
    primary := INTEGER | IDENTIFIER | '(' expr ')'

A literal like 3/4 is the quotient of two integers. Identifiers are resolved
only at evaluation time.
"""
import logging
import operator
from fractions import Fraction
from typing import Dict, FrozenSet, Mapping

from pyparsing import Forward, Literal, ParseException, Word, ZeroOrMore, alphanums, alphas, nums

from errors import EvaluationError, ParseError

logger = logging.getLogger(__name__)


class ScalarExpr:
    """Base of the expression tree."""

    def evaluate(self, bindings: Mapping[str, Fraction]) -> Fraction:
        raise NotImplementedError

    def identifiers(self) -> FrozenSet[str]:
        return frozenset()


class Number(ScalarExpr):
    def __init__(self, s, loc, toks):
        self.value = int(toks[0])

    def evaluate(self, bindings):
        return Fraction(self.value)

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return "Number({})".format(self.value)


class Variable(ScalarExpr):
    def __init__(self, s, loc, toks):
        self.name = toks[0]

    def evaluate(self, bindings):
        if self.name not in bindings:
            raise EvaluationError(f"Unbound identifier '{self.name}'")
        return Fraction(bindings[self.name])

    def identifiers(self):
        return frozenset([self.name])

    def __str__(self):
        return self.name

    def __repr__(self):
        return "Variable({})".format(self.name)


class Negation(ScalarExpr):
    def __init__(self, s, loc, toks):
        self.operand = toks[1]

    def evaluate(self, bindings):
        return -self.operand.evaluate(bindings)

    def identifiers(self):
        return self.operand.identifiers()

    def __str__(self):
        return "(-{})".format(self.operand)

    def __repr__(self):
        return "Negation({!r})".format(self.operand)


class Operator(ScalarExpr):
    _FUNCTIONS = {
        "+": operator.add,
        "-": operator.sub,
        "*": operator.mul,
        "/": operator.truediv,
    }

    def __init__(self, op, lhs, rhs):
        self.op = op
        self.lhs = lhs
        self.rhs = rhs

    def evaluate(self, bindings):
        left = self.lhs.evaluate(bindings)
        right = self.rhs.evaluate(bindings)
        if self.op == "/" and right == 0:
            raise EvaluationError(f"Division by zero in {self}")
        return self._FUNCTIONS[self.op](left, right)

    def identifiers(self):
        return self.lhs.identifiers() | self.rhs.identifiers()

    def __str__(self):
        return "({} {} {})".format(self.lhs, self.op, self.rhs)

    def __repr__(self):
        return "Operator({}, {!r}, {!r})".format(self.op, self.lhs, self.rhs)


def _fold_left(s, loc, toks):
    result = toks[0]
    for i in range(1, len(toks), 2):
        result = Operator(toks[i], result, toks[i + 1])
    return result


def make_grammar():
    plus = Literal("+")
    minus = Literal("-")
    mul = Literal("*")
    div = Literal("/")

    lparent = Literal("(").suppress()
    rparent = Literal(")").suppress()

    ident = Word(alphas + "_", alphanums + "_").set_parse_action(Variable)
    int_number = Word(nums).set_parse_action(Number)

    expr = Forward()
    unary_expr = Forward()
    primary_expr = int_number | ident | (lparent + expr + rparent)
    unary_expr <<= (minus + unary_expr).set_parse_action(Negation) | primary_expr
    mult_expr = (unary_expr + ZeroOrMore((mul | div) + unary_expr)).set_parse_action(_fold_left)
    add_expr = (mult_expr + ZeroOrMore((plus | minus) + mult_expr)).set_parse_action(_fold_left)
    expr <<= add_expr
    return expr


_GRAMMAR = make_grammar()


def parse_scalar_expr(text: str) -> ScalarExpr:
    """Parse one expression; syntax errors carry the byte offset of the failure."""
    try:
        return _GRAMMAR.parse_string(text, parse_all=True)[0]
    except ParseException as exc:
        offset = len(text[: exc.loc].encode("utf-8"))
        logger.debug("parse_scalar_expr failed on %r at %d: %s", text, offset, exc.msg)
        raise ParseError(f"Cannot parse expression {text!r}: {exc.msg}", offset) from exc


def evaluate_expr(text: str, bindings: Mapping[str, Fraction] = None) -> Fraction:
    return parse_scalar_expr(text).evaluate(bindings or {})


def parse_binding(assignment: str) -> Dict[str, Fraction]:
    """'name=expr' as used by --bind; the right side may not reference identifiers."""
    name, sep, value = assignment.partition("=")
    name = name.strip()
    if not sep or not name:
        raise ParseError(f"Binding {assignment!r} is not of the form name=value", 0)
    if not (name[0].isalpha() or name[0] == "_") or not all(ch.isalnum() or ch == "_" for ch in name):
        raise ParseError(f"Invalid parameter name {name!r}", 0)
    expr = parse_scalar_expr(value)
    if expr.identifiers():
        raise EvaluationError(f"Binding for '{name}' must be a constant, got {value.strip()!r}")
    return {name: expr.evaluate({})}
