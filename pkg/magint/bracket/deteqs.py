import json
import logging

import sympy

import magint
from magint.errors import BracketDegreeError

logger = logging.getLogger(__name__)

MONOMIALS = (
    (2, 0, 0),
    (1, 1, 0),
    (1, 0, 1),
    (0, 2, 0),
    (0, 1, 1),
    (0, 0, 2),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (0, 0, 0),
)


def monomial_tag(monom, chart="cartesian"):
    """``(1, 0, 1)`` -> ``"p1*p3"``, ``(2, 0, 0)`` -> ``"p1^2"``, ``(0, 0, 0)`` -> ``"1"``."""
    names = magint.forms.chart(chart).momenta
    factors = []
    for name, e in zip(names, monom):
        if e == 1:
            factors.append(str(name))
        elif e > 1:
            factors.append(f"{name}^{e}")
    return "*".join(factors) or "1"


class DetEqSet(object):

    """The ten momentum-monomial coefficients of a bracket, in fixed order."""

    _immutable = True

    def __init__(self, entries, provenance="", chart="cartesian"):
        self.chart = magint.forms.chart(chart)
        self.provenance = provenance
        self.entries = tuple((tuple(m), sympy.sympify(e)) for m, e in entries)
        if [m for m, _ in self.entries] != list(MONOMIALS):
            raise ValueError("determining equations must follow the documented monomial order")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, key):
        if isinstance(key, int):
            return self.entries[key][1]
        if isinstance(key, str):
            key = next(m for m in MONOMIALS if monomial_tag(m, self.chart) == key)
        return dict(self.entries)[tuple(key)]

    def __repr__(self):
        return "DetEqSet({!r}, {} equations)".format(self.provenance, len(self))

    @property
    def tags(self):
        return [monomial_tag(m, self.chart) for m in MONOMIALS]

    @property
    def residuals(self):
        return [e for _, e in self.entries]

    def nonzero(self):
        """Returns the (tag, residual) pairs whose normal form is not zero."""
        return [
            (monomial_tag(m, self.chart), e)
            for m, e in self.entries
            if not magint.expr.is_zero(e)
        ]

    @property
    def all_zero(self):
        return not self.nonzero()

    def subs(self, bindings):
        entries = [(m, magint.expr.substitute(e, bindings)) for m, e in self.entries]
        return DetEqSet(entries, self.provenance, self.chart)

    def to_text(self):
        lines = [f"# {self.provenance}"] if self.provenance else []
        for m, e in self.entries:
            lines.append(f"{monomial_tag(m, self.chart)}: {magint.expr.print_expr(e)} = 0")
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "provenance": self.provenance,
            "chart": self.chart.name,
            "equations": [
                {"monomial": monomial_tag(m, self.chart), "residual": magint.expr.print_expr(e)}
                for m, e in self.entries
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def determining_equations(F, G, B=None, provenance=""):
    """Collects the coefficients of 1, p_i and p_i p_j of {F, G}.

    :param B: a TwoForm; when given, the gauge-free covariant bracket is used
        on covariant observables, otherwise the canonical bracket.
    :raises BracketDegreeError: if a cubic coefficient does not vanish.
    """
    if B is not None:
        bracket = magint.bracket.covariant_bracket(F, G, B)
    else:
        bracket = magint.bracket.poisson_bracket(F, G)
    cubic = bracket.homogeneous(3)
    if cubic.terms:
        tags = ", ".join(monomial_tag(m, F.chart) for m in sorted(cubic.terms))
        raise BracketDegreeError(f"cubic terms survive in {provenance or 'bracket'}: {tags}")
    for m in bracket.terms:
        if sum(m) > 3:
            raise BracketDegreeError(f"degree {sum(m)} terms in {provenance or 'bracket'}")
    entries = [(m, bracket.coeff(m)) for m in MONOMIALS]
    logger.debug("generated determining equations %s", provenance)
    return DetEqSet(entries, provenance, F.chart)
