"""Quadratic integrals in the enveloping algebra of e(3) and their
determining equations.

An integral reads::

    X = sum_{i<=j} alpha_ij l_i l_j + sum_{i,j} beta_ij p_i l_j
        + sum_{i<=j} gamma_ij p_i p_j + sum_j s^j p_j + m

with kinetic momenta throughout.
"""
import logging

import sympy

import magint
from magint.errors import ChartMismatchError, ConstraintError

logger = logging.getLogger(__name__)

PAIRS = ("11", "22", "33", "12", "13", "23")
FULL_PAIRS = tuple(f"{i}{j}" for i in "123" for j in "123")

CLASSES = {
    "elliptic_cylindrical": "X1 = l3^2 + a*l3*p3 + b*p1^2 + c*p1*p3 + d*p2*p3, X2 = p3^2",
    "spheroidal": "X1 = l1^2 + l2^2 + l3^2 + a*l3*p3 + b*p3^2, X2 = l3^2",
    "circular_parabolic": "X1 = l3^2, X2 = l1*p2 - l2*p1 + a*l3*p3",
    "no_coordinate": "X1 = l3^2 + a*p3^2, X2 = l3*p3 + b*p3^2",
}


class IntegralSpec(object):

    """Constants and functions of a quadratic integral."""

    _immutable = True

    def __init__(self, alpha=None, beta=None, gamma=None, s=None, m=0, gauge=None,
                 chart="cartesian", label=""):
        self.chart = magint.forms.chart(chart)
        self.alpha = {k: sympy.sympify(v) for k, v in (alpha or {}).items()}
        self.beta = {k: sympy.sympify(v) for k, v in (beta or {}).items()}
        self.gamma = {k: sympy.sympify(v) for k, v in (gamma or {}).items()}
        for name, table, allowed in (
            ("alpha", self.alpha, PAIRS),
            ("beta", self.beta, FULL_PAIRS),
            ("gamma", self.gamma, PAIRS),
        ):
            unknown = set(table) - set(allowed)
            if unknown:
                raise ValueError(f"unknown {name} entries: {sorted(unknown)}")
        self.s = tuple(sympy.sympify(v) for v in (s or (0, 0, 0)))
        self.m = sympy.sympify(m)
        self.gauge = gauge
        self.label = label
        if gauge is not None and gauge.chart != self.chart:
            raise ChartMismatchError(f"gauge chart {gauge.chart.name} != {self.chart.name}")

    def __repr__(self):
        return "IntegralSpec({!r})".format(self.label or "unnamed")

    def leading(self):
        """The leading-order (degree 2) part as a covariant Observable."""
        g = magint.bracket.generators(self.chart, covariant=True, gauge=self.gauge)
        X = magint.bracket.Observable({}, self.chart, True, self.gauge)
        for k, v in self.alpha.items():
            X = X + g["l" + k[0]] * g["l" + k[1]] * v
        for k, v in self.beta.items():
            X = X + g["p" + k[0]] * g["l" + k[1]] * v
        for k, v in self.gamma.items():
            X = X + g["p" + k[0]] * g["p" + k[1]] * v
        return X

    def with_functions(self, s, m, gauge=None):
        return IntegralSpec(
            self.alpha, self.beta, self.gamma, s, m,
            gauge if gauge is not None else self.gauge, self.chart, self.label,
        )

    def subs(self, bindings):
        sub = magint.expr.substitute

        def table(t):
            return {k: sub(v, bindings) for k, v in t.items()}

        gauge = self.gauge.subs(bindings) if self.gauge is not None else None
        return IntegralSpec(
            table(self.alpha), table(self.beta), table(self.gamma),
            [sub(v, bindings) for v in self.s], sub(self.m, bindings),
            gauge, self.chart, self.label,
        )

    def to_dict(self):
        p = magint.expr.print_expr
        return {
            "label": self.label,
            "alpha": {k: p(v) for k, v in sorted(self.alpha.items())},
            "beta": {k: p(v) for k, v in sorted(self.beta.items())},
            "gamma": {k: p(v) for k, v in sorted(self.gamma.items())},
            "s": [p(v) for v in self.s],
            "m": p(self.m),
        }


def build_observable(spec, presentation="canonical"):
    """Assembles the integral of `spec`.

    :param presentation: "covariant" keeps kinetic momenta; "canonical"
        expands them with the attached gauge (zero gauge if none).
    """
    X = spec.leading()
    for j, sj in enumerate(spec.s):
        if sj != 0:
            X = X + magint.bracket.Observable.momentum(j, spec.chart, True, spec.gauge) * sj
    X = X + spec.m
    if presentation == "covariant":
        return X
    if presentation != "canonical":
        raise ValueError(f"unknown presentation {presentation}")
    gauge = spec.gauge if spec.gauge is not None else magint.forms.OneForm.zero(spec.chart)
    return X.canonical(gauge)


def _require(name, value, test, message):
    value = sympy.sympify(value)
    if value.is_number and not test(value):
        raise ConstraintError(f"{name} = {value}: {message}")


def _check_class(class_id, consts):
    a, b, c, d = (consts.get(k, 0) for k in "abcd")
    if class_id == "elliptic_cylindrical":
        _require("b", b, lambda v: v != 0, "b must be nonzero")
        _require("c", c, lambda v: v >= 0, "c must be non-negative")
        _require("d", d, lambda v: v >= 0, "d must be non-negative")
        acd = [sympy.sympify(v) for v in (a, c, d)]
        if all(v.is_number and v == 0 for v in acd):
            raise ConstraintError("a, c, d must not all vanish")
    elif class_id == "spheroidal":
        _require("a", a, lambda v: v != 0, "a must be nonzero")
        _require("b", b, lambda v: v != 0, "b must be nonzero")
    elif class_id == "circular_parabolic":
        _require("a", a, lambda v: v > 0, "a must be positive")


def leading_order(class_id, chart="cartesian", check=True, **consts):
    """IntegralSpecs (s = 0, m = 0) of the two integrals of a leading-order class.

    :param class_id: one of ``CLASSES``.
    :param consts: the class constants a, b, c, d; missing ones are symbols.
    """
    if class_id not in CLASSES:
        raise KeyError(f"unknown leading-order class {class_id}")
    values = {k: sympy.sympify(consts.get(k, sympy.Symbol(k))) for k in "abcd"}
    if check:
        _check_class(class_id, values)
    a, b, c, d = (values[k] for k in "abcd")
    if class_id == "elliptic_cylindrical":
        X1 = dict(alpha={"33": 1}, beta={"33": a}, gamma={"11": b, "13": c, "23": d})
        X2 = dict(gamma={"33": 1})
    elif class_id == "spheroidal":
        X1 = dict(alpha={"11": 1, "22": 1, "33": 1}, beta={"33": a}, gamma={"33": b})
        X2 = dict(alpha={"33": 1})
    elif class_id == "circular_parabolic":
        X1 = dict(alpha={"33": 1})
        X2 = dict(beta={"21": 1, "12": -1, "33": a})
    else:
        X1 = dict(alpha={"33": 1}, gamma={"33": a})
        X2 = dict(beta={"33": 1}, gamma={"33": b})
    return (
        IntegralSpec(chart=chart, label="X1", **X1),
        IntegralSpec(chart=chart, label="X2", **X2),
    )


def unknown_function(name, chart="cartesian"):
    return sympy.Function(name)(*magint.forms.chart(chart).coords)


def generic_field(chart="cartesian"):
    """The unknown two-form and potential ``W``."""
    c = magint.forms.chart(chart)
    B = magint.forms.TwoForm([unknown_function(n, c) for n in c.field_names], c)
    return B, unknown_function("W", c)


def generic_integrals(class_id, chart="cartesian", **consts):
    """Leading-order specs with unknown ``s_k^j`` (named ``s<k><j>``) and ``m<k>``."""
    c = magint.forms.chart(chart)
    specs = leading_order(class_id, c, **consts)
    result = []
    for k, spec in enumerate(specs, start=1):
        s = [unknown_function(f"s{k}{j}", c) for j in (1, 2, 3)]
        result.append(spec.with_functions(s, unknown_function(f"m{k}", c)))
    return tuple(result)


@magint.decorators.memoize
def detgen(class_id, chart="cartesian", **consts):
    """The 30 determining equations of a leading-order class, generic field.

    :returns: three DetEqSets for {H, X1}, {H, X2} and {X1, X2}.
    """
    c = magint.forms.chart(chart)
    B, W = generic_field(c)
    H = magint.bracket.hamiltonian(W, c)
    X1, X2 = (build_observable(s, "covariant") for s in generic_integrals(class_id, c, **consts))
    logger.info("generating determining equations for %s in the %s chart", class_id, c.name)
    return (
        magint.bracket.determining_equations(H, X1, B, provenance="{H,X1}"),
        magint.bracket.determining_equations(H, X2, B, provenance="{H,X2}"),
        magint.bracket.determining_equations(X1, X2, B, provenance="{X1,X2}"),
    )
