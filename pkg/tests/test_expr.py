import warnings

import numpy as np
import pandas as pd
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx, mark, raises

import magint
from magint.errors import (
    DenominatorGuardError,
    ExprSyntaxError,
    NonlinearAtomError,
    NormalFormError,
    UnboundSymbolError,
)
from magint.expr import U1, U2, is_zero, normal_form, parse_expr, print_expr

x, y, z = sympy.symbols("x y z")
a1, a2, eps, delta = sympy.symbols("alpha1 alpha2 eps delta")


def test_parse_polynomial():
    assert parse_expr("x^2 + 3*y - z/2") == x**2 + 3 * y - z / 2


def test_decimals_are_exact():
    assert parse_expr("0.1") == sympy.Rational(1, 10)
    assert parse_expr("beta2*1.5") == sympy.Rational(3, 2) * sympy.Symbol("beta2")


def test_power_is_right_associative():
    assert parse_expr("2^3^2") == 512


def test_unary_minus_binds_looser_than_power():
    assert parse_expr("-x^2") == -(x**2)


def test_pi_and_half_integer_powers():
    assert parse_expr("2*pi") == 2 * sympy.pi
    assert parse_expr("(x^2 + 1)^(3/2)") == (x**2 + 1) ** sympy.Rational(3, 2)


@mark.parametrize("text", ["x + * y", "(x + 1", "x^(1/3)", "foo(x)", "sin(x, y)", "1/0", "U1"])
def test_syntax_errors(text):
    with raises(ExprSyntaxError) as info:
        parse_expr(text)
    assert 0 <= info.value.offset <= len(text.encode("utf-8"))
    assert info.value.text == text


def test_syntax_error_is_value_error():
    with raises(ValueError):
        parse_expr("x +")


def test_declared_functions():
    f = sympy.Function("f")
    functions = {"f": ("x", "y")}
    assert parse_expr("f", functions=functions) == f(x, y)
    assert parse_expr("f(z, 1)", functions=functions) == f(z, 1)
    with raises(ExprSyntaxError):
        parse_expr("f(x)", functions=functions)


def test_derivative_operator():
    assert parse_expr("D(x^3*y, x, y)") == 3 * x**2
    f = sympy.Function("f")(x)
    assert parse_expr("D(f, x)", functions={"f": ("x",)}) == sympy.Derivative(f, x)


def test_argument_lists():
    assert parse_expr("D(x^2*y^3, x, y, y)") == 12 * x * y
    assert parse_expr("U1(z, 0, 1, -1)") == U1(z, 0, 1, -1)


def test_grammar_builds_without_deprecations():
    with warnings.catch_warnings():
        warnings.simplefilter("error", DeprecationWarning)
        magint.expr.grammar.make_grammar()


def test_names_are_spliced():
    e = parse_expr("D(rho2, x)", names={"rho2": x**2 + y**2})
    assert e == 2 * x


@mark.parametrize("text", ["sin(x*y)", "cos(x^2)", "exp(x + y)"])
def test_nonlinear_atom_arguments(text):
    with raises(NonlinearAtomError):
        parse_expr(text)


def test_branch_atom_short_form():
    assert parse_expr("U1(delta*z)") == U1(delta * z, a1, a2, eps)
    bound = parse_expr("U2(z)", names={"eps": sympy.Integer(-1)})
    assert bound == U2(z, a1, a2, -1)


def test_branch_atom_values_at_zero():
    assert parse_expr("U1(0)") == a2
    assert parse_expr("U2(0)") == -eps * a1
    assert parse_expr("U1(z, 0, 0, eps)") == 0


def test_branch_atom_derivatives():
    u1 = U1(delta * z, a1, a2, eps)
    u2 = U2(delta * z, a1, a2, eps)
    assert magint.expr.differentiate(u1, "z") == -delta * u2
    assert magint.expr.differentiate(u2, z) == -delta * eps * u1


def test_expand_atoms():
    u1 = U1(z, a1, a2, -1)
    u2 = U2(z, a1, a2, 1)
    assert magint.expr.expand_atoms(u1) == a2 * sympy.cos(z) - a1 * sympy.sin(z)
    assert magint.expr.expand_atoms(u2) == -a2 * sympy.sinh(z) - a1 * sympy.cosh(z)
    assert magint.expr.expand_atoms(U1(z, a1, a2, eps)) == U1(z, a1, a2, eps)


@mark.parametrize(
    "text",
    [
        "sin(x)^2 + cos(x)^2 - 1",
        "cosh(y)^2 - sinh(y)^2 - 1",
        "sin(2*x) - 2*sin(x)*cos(x)",
        "cosh(2*z) - cosh(z)^2 - sinh(z)^2",
        "exp(2*x) - exp(x)^2",
        "exp(x)*exp(-x) - 1",
        "(x^2 - 1)/(x - 1) - x - 1",
        "eps^2 - 1",
        "U2(z)^2 - eps*U1(z)^2 - alpha1^2 + eps*alpha2^2",
        "sqrt(x^2 + 1)^3 - (x^2 + 1)*sqrt(x^2 + 1)",
        "D(U1(delta*z), z)/delta + U2(delta*z)",
    ],
)
def test_identities_normalize_to_zero(text):
    assert is_zero(parse_expr(text))


@mark.parametrize("text", ["sin(x) - cos(x)", "x - y", "U1(z)", "exp(x) - 1", "eps - 1"])
def test_non_identities(text):
    assert not is_zero(parse_expr(text))


def test_normal_form_rejects_floats():
    with raises(NormalFormError):
        normal_form(sympy.Float(0.5) * x)


def test_normal_form_zero_denominator():
    with raises(NormalFormError):
        normal_form(sympy.Pow(x - x, -1, evaluate=False))


polynomials = st.lists(st.integers(-5, 5), min_size=1, max_size=6).map(
    lambda cs: sum((c * x ** (k % 3) * y ** (k // 3) for k, c in enumerate(cs)), sympy.S.Zero)
)


@settings(max_examples=25, deadline=None)
@given(polynomials, polynomials)
def test_normal_form_is_canonical_for_products(p, q):
    product = sympy.Mul(p, q, evaluate=False)
    assert normal_form(product) == sympy.expand(p * q)


@settings(max_examples=25, deadline=None)
@given(polynomials, polynomials)
def test_normal_form_cancels_common_factors(p, q):
    if q == 0:
        q = sympy.Integer(1)
    assert normal_form(p * q / q) == p
    assert normal_form(p * (x**2 + 1) / (q * (x**2 + 1))) == p / q


def test_print_round_trip():
    e = parse_expr("x^2*U1(delta*z) - sqrt(x^2 + y^2)/3 + D(f, x)", functions={"f": ("x", "y")})
    text = print_expr(e)
    assert "^" in text and "**" not in text
    assert parse_expr(text, functions={"f": ("x", "y")}) == e


def test_substitute():
    assert magint.expr.substitute(x * y, {"x": "2"}) == 2 * y
    assert magint.expr.substitute(x + y, {x: y, y: x}) == x + y
    with raises(NormalFormError):
        magint.expr.substitute(1 / x, {x: 0})
    with raises(NormalFormError):
        magint.expr.substitute(x, {x: 0.5})


def test_eval_batch_frame_and_mapping():
    e = parse_expr("x*y + 1")
    df = pd.DataFrame({"x": [1.0, 2.0, 3.0], "y": [0.5, 0.5, -1.0]})
    assert magint.expr.eval_batch(e, df) == approx([1.5, 2.0, -2.0])
    assert magint.expr.eval_batch(e, {"x": [1.0, 2.0], "y": 2.0}) == approx([3.0, 5.0])
    assert magint.expr.eval_batch(sympy.Integer(3), df) == approx([3.0, 3.0, 3.0])


def test_eval_batch_guard():
    e = parse_expr("1/x")
    with raises(DenominatorGuardError) as info:
        magint.expr.eval_batch(e, {"x": [1.0, 1e-9]})
    assert info.value.factor == x
    assert magint.expr.eval_batch(e, {"x": [1.0, 1e-9]}, guard=0.0)[0] == approx(1.0)


def test_eval_numeric_unbound():
    with raises(UnboundSymbolError):
        magint.expr.eval_numeric(x + y, {"x": 1.0})
    with raises(KeyError):
        magint.expr.eval_numeric(x + y, {"y": 1.0})


@mark.parametrize("branch", [-1, 1])
def test_eval_branch_atoms_matches_expansion(branch):
    u = U1(delta * z, a1, a2, branch) + 2 * U2(delta * z, a1, a2, branch)
    env = {"delta": 0.7, "z": 1.3, "alpha1": 0.4, "alpha2": -1.1}
    expected = float(magint.expr.expand_atoms(u).subs(env))
    assert magint.expr.eval_numeric(u, env) == approx(expected, rel=1e-12)


def test_eval_symbolic_branch():
    u = U1(z, a1, a2, eps)
    env = {"z": [0.5, 0.5], "alpha1": 1.0, "alpha2": 2.0, "eps": [-1.0, 1.0]}
    values = magint.expr.eval_batch(u, env)
    assert values == approx([2 * np.cos(0.5) - np.sin(0.5), np.sinh(0.5) + 2 * np.cosh(0.5)])
