import math

import pytest
from hypothesis import given, settings

from tests.conftest import expression_trees
from tools.errors import ExprNameError, ExprSyntaxError, ExprVariableError
from tools.expr import (
    BinOp,
    Call,
    Const,
    Neg,
    Num,
    Var,
    evaluate,
    field,
    free_variables,
    parse,
    parse_in,
    to_text,
)
from tools.jet import Jet2


def test_angle_expression_structure():
    assert parse("2*atan(exp(-x))") == BinOp("*", Num(2.0), Call("atan", Call("exp", Neg(Var("x")))))


def test_precedence():
    assert parse("x + y*x") == BinOp("+", Var("x"), BinOp("*", Var("y"), Var("x")))
    assert parse("x - y - 1") == BinOp("-", BinOp("-", Var("x"), Var("y")), Num(1.0))


def test_power_binds_tighter_than_unary_minus():
    assert parse("-x^2") == Neg(BinOp("^", Var("x"), Num(2.0)))
    assert parse("2^-x") == BinOp("^", Num(2.0), Neg(Var("x")))
    assert parse("x^y^2") == BinOp("^", Var("x"), BinOp("^", Var("y"), Num(2.0)))


def test_constants_and_scientific_literals():
    assert parse("pi") == Const("pi")
    assert evaluate(parse("e^1"), 0.0) == pytest.approx(math.e)
    assert parse("1.5e-3") == Num(1.5e-3)


@pytest.mark.parametrize(
    "src, error, offset",
    [
        ("sin(x", ExprSyntaxError, 5),
        ("", ExprSyntaxError, 0),
        ("x +", ExprSyntaxError, 3),
        ("x * * y", ExprSyntaxError, 4),
        ("(x + 1", ExprSyntaxError, 6),
        ("x + 1)", ExprSyntaxError, 5),
        ("2 $ x", ExprSyntaxError, 2),
        ("sin x", ExprSyntaxError, 4),
        ("x y", ExprSyntaxError, 2),
        ("foo(x)", ExprNameError, 0),
        ("x + z", ExprNameError, 4),
        ("x^", ExprSyntaxError, 2),
    ],
)
def test_malformed_inputs_report_offsets(src, error, offset):
    with pytest.raises(error) as err:
        parse(src)
    assert err.value.offset == offset


def test_syntax_error_names_expected_token():
    with pytest.raises(ExprSyntaxError) as err:
        parse("sin(x")
    assert err.value.expected == frozenset({")"})


def test_unknown_identifier_keeps_name():
    with pytest.raises(ExprNameError) as err:
        parse("2*theta")
    assert err.value.name == "theta"


def test_variable_restriction():
    assert free_variables(parse("x*sin(y) + pi")) == {"x", "y"}
    with pytest.raises(ExprVariableError):
        parse_in("x + y", {"x"})
    assert parse_in("x^2", {"x"}) == parse("x^2")


def test_field_binds_expression():
    f = field(parse("x*y"))
    j = f(Jet2.var_x(2.0), Jet2.var_y(3.0))
    assert (j.val, j.dx, j.dy) == (6.0, 3.0, 2.0)


trees = expression_trees()


@settings(max_examples=300)
@given(trees)
def test_print_parse_round_trip(tree):
    text = to_text(tree)
    assert parse(text) == tree
    assert to_text(parse(text)) == text
