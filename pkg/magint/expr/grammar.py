"""Infix expression grammar and its printer. See ``docs/grammar.md``."""
import logging

import pyparsing as pp
import sympy
from sympy.printing.str import StrPrinter

from magint.errors import ExprSyntaxError
from magint.expr import atoms

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

UNARY_FUNCTIONS = {
    "sin": sympy.sin,
    "cos": sympy.cos,
    "sinh": sympy.sinh,
    "cosh": sympy.cosh,
    "exp": sympy.exp,
    "sqrt": sympy.sqrt,
}
RESERVED = frozenset(UNARY_FUNCTIONS) | {"U1", "U2", "D", "pi"}


class Number(object):
    def __init__(self, s, loc, toks):
        self.text = toks[0]
        self.loc = loc


class Name(object):
    def __init__(self, s, loc, toks):
        self.name = toks[0]
        self.loc = loc


class Call(object):
    def __init__(self, s, loc, toks):
        self.name = toks[0]
        self.args = list(toks[1])
        self.loc = loc


class Operation(object):
    def __init__(self, s, loc, toks):
        group = toks[0]
        self.operands = list(group[0::2])
        self.operators = list(group[1::2])
        self.loc = loc


class Negation(object):
    def __init__(self, s, loc, toks):
        group = toks[0]
        self.sign = group[0]
        self.operand = group[1]
        self.loc = loc


def make_grammar():
    ident = pp.Word(pp.alphas + "_", pp.alphanums + "_")
    number = pp.Regex(r"\d+\.\d+|\d+").set_parse_action(Number)
    lparen = pp.Suppress("(")
    rparen = pp.Suppress(")")

    expr = pp.Forward()
    arguments = pp.Group(pp.Opt(pp.DelimitedList(expr)))
    call = (ident + lparen + arguments + rparen).set_parse_action(Call)
    name = ident.copy().set_parse_action(Name)
    operand = call | number | name

    expr <<= pp.infix_notation(
        operand,
        [
            ("^", 2, pp.OpAssoc.RIGHT, Operation),
            (pp.one_of("+ -"), 1, pp.OpAssoc.RIGHT, Negation),
            (pp.one_of("* /"), 2, pp.OpAssoc.LEFT, Operation),
            (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT, Operation),
        ],
    )
    return expr


GRAMMAR = make_grammar()


def _byte_offset(text, loc):
    return len(text[:loc].encode("utf-8"))


class _Builder(object):

    """Turns a parse tree into a sympy expression."""

    def __init__(self, text, functions, names=None):
        self.text = text
        self.names = dict(names or {})
        self.functions = {
            name: tuple(sympy.Symbol(a) if isinstance(a, str) else a for a in args)
            for name, args in (functions or {}).items()
        }

    def error(self, message, loc):
        return ExprSyntaxError(message, self.text, _byte_offset(self.text, loc))

    def build(self, node):
        if isinstance(node, Number):
            return sympy.Rational(node.text)
        if isinstance(node, Name):
            return self.build_name(node)
        if isinstance(node, Call):
            return self.build_call(node)
        if isinstance(node, Negation):
            operand = self.build(node.operand)
            return -operand if node.sign == "-" else operand
        if isinstance(node, Operation):
            return self.build_operation(node)
        raise self.error(f"unexpected token {node!r}", 0)

    def build_name(self, node):
        name = node.name
        if name == "pi":
            return sympy.pi
        if name in self.names:
            return self.names[name]
        if name in self.functions:
            return sympy.Function(name)(*self.functions[name])
        if name in RESERVED:
            raise self.error(f"{name} must be called with arguments", node.loc)
        return sympy.Symbol(name)

    def build_call(self, node):
        name = node.name
        args = [self.build(a) for a in node.args]
        if name in UNARY_FUNCTIONS:
            if len(args) != 1:
                raise self.error(f"{name} takes exactly one argument", node.loc)
            return UNARY_FUNCTIONS[name](args[0])
        if name in ("U1", "U2"):
            if len(args) == 1:
                args = [args[0]] + [
                    self.names.get(str(s), s) for s in (atoms.ALPHA1, atoms.ALPHA2, atoms.EPS)
                ]
            try:
                return atoms.branch_atom(name, args)
            except ValueError as exc:
                raise self.error(str(exc), node.loc)
        if name == "D":
            if len(args) < 2 or not all(isinstance(v, sympy.Symbol) for v in args[1:]):
                raise self.error("D takes an expression followed by symbols", node.loc)
            return sympy.diff(args[0], *args[1:])
        if name in self.functions:
            if len(args) != len(self.functions[name]):
                raise self.error(
                    f"{name} declared with {len(self.functions[name])} arguments, "
                    f"called with {len(args)}",
                    node.loc,
                )
            return sympy.Function(name)(*args)
        raise self.error(f"unknown function {name}", node.loc)

    def build_operation(self, node):
        operands = [self.build(o) for o in node.operands]
        operators = node.operators
        if operators[0] == "^":
            result = operands[-1]
            for base in reversed(operands[:-1]):
                result = self.power(base, result, node.loc)
            return result
        result = operands[0]
        for op, operand in zip(operators, operands[1:]):
            if op == "+":
                result = result + operand
            elif op == "-":
                result = result - operand
            elif op == "*":
                result = result * operand
            else:
                if operand.is_zero:
                    raise self.error("division by zero", node.loc)
                result = result / operand
        return result

    def power(self, base, exponent, loc):
        if not exponent.is_Rational or exponent.q not in (1, 2):
            raise self.error(f"exponent {exponent} is not an integer or half-integer", loc)
        if base.is_zero and exponent.is_negative:
            raise self.error("division by zero", loc)
        return sympy.Pow(base, exponent)


def parse_expr(text, functions=None, names=None):
    """Parses an expression in the documented grammar.

    :param text: the expression string.
    :param functions: optional mapping from unknown-function names to their
        argument names, e.g. ``{"s11": ("x", "y", "z")}``. A bare declared name
        stands for the function applied to its declared arguments.
    :param names: optional mapping from names to expressions spliced in
        while parsing, so that `D` differentiates the aliased expression.
    :returns: a sympy expression.
    :raises ExprSyntaxError: on malformed input, with the byte offset.
    :raises NonlinearAtomError: if an atom argument is not linear in a single
        coordinate.
    """
    try:
        tree = GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseException as exc:
        raise ExprSyntaxError(
            f"invalid expression: {exc.msg}", text, _byte_offset(text, exc.loc)
        ) from None
    e = _Builder(text, functions, names).build(tree[0])
    if e.has(sympy.zoo, sympy.nan):
        raise ExprSyntaxError("division by zero", text, 0)
    atoms.check_atoms(e)
    return e


class ExprPrinter(StrPrinter):

    """StrPrinter emitting ``^`` for powers and ``D(...)`` for derivatives."""

    def _print_Pow(self, expr, rational=False):
        return super()._print_Pow(expr, rational).replace("**", "^")

    def _print_Exp1(self, expr):
        return "exp(1)"

    def _print_Derivative(self, expr):
        variables = []
        for v, count in expr.variable_count:
            variables.extend([self._print(v)] * int(count))
        return "D({}, {})".format(self._print(expr.expr), ", ".join(variables))


def print_expr(e):
    return ExprPrinter().doprint(sympy.sympify(e))
