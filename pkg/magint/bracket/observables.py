import itertools
import logging

import sympy

import magint
from magint.errors import ChartMismatchError, GaugeError

logger = logging.getLogger(__name__)

ZERO_MONOMIAL = (0, 0, 0)


def _unit(j):
    return tuple(1 if i == j else 0 for i in range(3))


def _add_monomials(m1, m2):
    return tuple(a + b for a, b in zip(m1, m2))


class Observable(object):

    """A polynomial in the three momenta with expression coefficients.

    Terms are stored as a dict from momentum exponent triples ``(i, j, k)`` to
    sympy expressions in the coordinates and parameters. In the covariant
    presentation the momenta stand for the kinetic momenta ``p_j + A_j``;
    the attached gauge converts to canonical momenta.
    """

    _immutable = True

    def __init__(self, terms=None, chart="cartesian", covariant=False, gauge=None):
        self.chart = magint.forms.chart(chart)
        self.covariant = covariant
        self.gauge = gauge
        if gauge is not None and gauge.chart != self.chart:
            raise ChartMismatchError(f"gauge chart {gauge.chart.name} != {self.chart.name}")
        self.terms = {}
        for monom, coeff in (terms or {}).items():
            coeff = sympy.sympify(coeff)
            if coeff != 0:
                self.terms[tuple(monom)] = coeff

    # construction

    @classmethod
    def constant(cls, value, chart="cartesian", covariant=False, gauge=None):
        return cls({ZERO_MONOMIAL: value}, chart, covariant, gauge)

    @classmethod
    def momentum(cls, j, chart="cartesian", covariant=False, gauge=None):
        return cls({_unit(j): 1}, chart, covariant, gauge)

    @classmethod
    def from_expr(cls, e, chart="cartesian", covariant=False, gauge=None):
        """Reads an expression polynomial in the chart's momentum symbols."""
        c = magint.forms.chart(chart)
        e = sympy.sympify(e)
        if not e.free_symbols & set(c.momenta):
            return cls.constant(e, c, covariant, gauge)
        poly = sympy.Poly(e, *c.momenta)
        return cls(dict(poly.terms()), c, covariant, gauge)

    def _like(self, terms):
        return Observable(terms, self.chart, self.covariant, self.gauge)

    def _check(self, other):
        if self.chart != other.chart:
            raise ChartMismatchError(f"charts differ: {self.chart.name} and {other.chart.name}")
        if self.covariant != other.covariant:
            raise GaugeError("cannot combine canonical and covariant observables")

    def _coerce(self, other):
        if isinstance(other, Observable):
            self._check(other)
            return other
        return self._like({ZERO_MONOMIAL: other})

    # algebra

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, sympy.S.Zero) + c
        return self._like(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._like({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        terms = {}
        for (m1, c1), (m2, c2) in itertools.product(self.terms.items(), other.terms.items()):
            m = _add_monomials(m1, m2)
            terms[m] = terms.get(m, sympy.S.Zero) + c1 * c2
        return self._like(terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        result = self._like({ZERO_MONOMIAL: 1})
        for _ in range(int(k)):
            result = result * self
        return result

    # inspection

    @property
    def degree(self):
        return max((sum(m) for m in self.terms), default=0)

    def coeff(self, monom):
        return self.terms.get(tuple(monom), sympy.S.Zero)

    def homogeneous(self, degree):
        return self._like({m: c for m, c in self.terms.items() if sum(m) == degree})

    def as_expr(self):
        p = self.chart.momenta
        return sum(
            (c * p[0] ** m[0] * p[1] ** m[1] * p[2] ** m[2] for m, c in self.terms.items()),
            sympy.S.Zero,
        )

    def __repr__(self):
        kind = "covariant" if self.covariant else "canonical"
        return "Observable({}, {!r}, {})".format(
            magint.expr.print_expr(self.as_expr()), self.chart.name, kind
        )

    def __eq__(self, other):
        if not isinstance(other, Observable):
            other = self._coerce(other)
        if self.chart != other.chart or self.covariant != other.covariant:
            return False
        monomials = set(self.terms) | set(other.terms)
        return all(magint.expr.is_zero(self.coeff(m) - other.coeff(m)) for m in monomials)

    __hash__ = None

    # calculus

    def diff_q(self, j):
        q = self.chart.coords[j]
        return self._like({m: magint.expr.differentiate(c, q) for m, c in self.terms.items()})

    def diff_p(self, j):
        terms = {}
        for m, c in self.terms.items():
            if m[j]:
                lowered = tuple(e - 1 if i == j else e for i, e in enumerate(m))
                terms[lowered] = c * m[j]
        return self._like(terms)

    def map_coefficients(self, fun):
        return self._like({m: fun(c) for m, c in self.terms.items()})

    def subs(self, bindings):
        gauge = self.gauge.subs(bindings) if self.gauge is not None else None
        terms = {m: magint.expr.substitute(c, bindings) for m, c in self.terms.items()}
        return Observable(terms, self.chart, self.covariant, gauge)

    def normalized(self):
        """Coefficients replaced by their normal forms; zero terms dropped."""
        return self.map_coefficients(lambda c: magint.expr.normal_form(c).as_expr())

    # presentations

    def canonical(self, gauge=None):
        """Rewrites kinetic momenta as ``p_j + A_j``."""
        if not self.covariant:
            return self
        gauge = gauge if gauge is not None else self.gauge
        if gauge is None:
            raise GaugeError("covariant observable has no gauge attached")
        return self._shift(gauge, 1, covariant=False)

    def to_covariant(self, gauge=None):
        """Rewrites canonical momenta as ``pi_j - A_j``."""
        if self.covariant:
            return self
        gauge = gauge if gauge is not None else self.gauge
        if gauge is None:
            raise GaugeError("canonical observable has no gauge attached")
        return self._shift(gauge, -1, covariant=True)

    def _shift(self, gauge, sign, covariant):
        shifted = [
            Observable({_unit(j): 1, ZERO_MONOMIAL: sign * gauge[j]}, self.chart) for j in range(3)
        ]
        result = Observable({}, self.chart)
        for m, c in self.terms.items():
            term = Observable.constant(c, self.chart)
            for j in range(3):
                if m[j]:
                    term = term * shifted[j] ** m[j]
            result = result + term
        return Observable(result.terms, self.chart, covariant, gauge)


def generators(chart="cartesian", covariant=True, gauge=None):
    """The e(3) generators ``p1, p2, p3, l1, l2, l3`` as degree-1 observables.

    In the cylindrical chart they are the cotangent lifts of the cartesian
    ones under x = r cos(phi), y = r sin(phi), z = Z.
    """
    c = magint.forms.chart(chart)

    def mom(j):
        return Observable.momentum(j, c, covariant, gauge)

    def const(v):
        return Observable.constant(v, c, covariant, gauge)

    if c.name == "cartesian":
        x, y, z = c.coords
        p1, p2, p3 = mom(0), mom(1), mom(2)
    else:
        r, phi, Z = c.coords
        pr, pphi, pZ = mom(0), mom(1), mom(2)
        cos, sin = sympy.cos(phi), sympy.sin(phi)
        p1 = const(cos) * pr - const(sin / r) * pphi
        p2 = const(sin) * pr + const(cos / r) * pphi
        p3 = pZ
        x, y, z = r * cos, r * sin, Z
    l1 = const(y) * p3 - const(z) * p2
    l2 = const(z) * p1 - const(x) * p3
    l3 = const(x) * p2 - const(y) * p1
    if c.name == "cylindrical":
        # exact simplifications of the lifted angular momenta
        l3 = pphi
    return {"p1": p1, "p2": p2, "p3": p3, "l1": l1, "l2": l2, "l3": l3}


def hamiltonian(W, chart="cartesian", gauge=None):
    """The covariant Hamiltonian ``1/2 * |p^A|^2 + W``."""
    c = magint.forms.chart(chart)
    H = Observable.constant(W, c, covariant=True, gauge=gauge)
    for j, g in enumerate(c.metric):
        H = H + Observable({tuple(2 if i == j else 0 for i in range(3)): g / 2}, c, True, gauge)
    return H
