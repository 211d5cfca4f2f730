"""Canonical rational forms modulo the atom side relations.

An expression is mapped to a pair of polynomials (numerator, denominator) over
QQ in a set of generators: the free symbols, numeric constants such as pi,
one sin/cos (sinh/cosh) pair per primitive argument, one exponential per
primitive argument, the ``U1``/``U2`` atoms, square-root radicals and opaque
function applications. The numerator is then reduced with the side relations,
always rewriting in the same orientation:

    U2^2  -> eps*U1^2 + alpha1^2 - eps*alpha2^2
    eps^2 -> 1
    sin^2 -> 1 - cos^2
    sinh^2 -> cosh^2 - 1
    R^2   -> base                    (R = sqrt(base))

so that an expression is zero exactly when its reduced numerator is empty.
"""
import collections
import logging

import sympy
from sympy.core.function import AppliedUndef
from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyRing

import magint
from magint.errors import NormalFormError
from magint.expr import atoms

logger = logging.getLogger(__name__)

EPS = atoms.EPS
MAX_REDUCTION_ROUNDS = 200

_FAMILY = {
    sympy.sin: "trig",
    sympy.cos: "trig",
    sympy.sinh: "hyp",
    sympy.cosh: "hyp",
}


def _linear_terms(arg):
    """Splits an atom argument into (rational coefficient, rest) pairs."""
    terms = []
    for term in sympy.Add.make_args(sympy.expand(arg)):
        coeff, rest = term.as_coeff_Mul(rational=True)
        terms.append((sympy.Rational(coeff), rest))
    return terms


def _rational_gcd(values):
    num = 0
    den = 1
    for v in values:
        num = sympy.igcd(num, abs(v.p))
        den = sympy.ilcm(den, v.q)
    return sympy.Rational(num, den)


@magint.decorators.memoize
def _make_ring(symbols):
    return PolyRing(symbols, QQ, lex)


class _Generators(object):

    """First pass: records every generator an expression needs."""

    def __init__(self):
        self.symbols = set()
        self.constants = set()
        self.families = collections.defaultdict(set)
        self.branches = set()
        self.radicals = {}
        self.opaque = set()
        self._seen = set()

    def collect(self, e):
        if e in self._seen:
            return
        self._seen.add(e)
        if e.is_Rational:
            return
        if e.is_Float:
            raise NormalFormError(f"inexact coefficient {e}", factor=e)
        if e.is_Number or e is sympy.I:
            raise NormalFormError(f"unsupported number {e}", factor=e)
        if e.is_Symbol:
            self.symbols.add(e)
        elif e.is_NumberSymbol:
            self.constants.add(e)
        elif e.is_Add or e.is_Mul:
            for a in e.args:
                self.collect(a)
        elif e.is_Pow:
            base, exponent = e.args
            if exponent.is_Integer:
                self.collect(base)
            elif exponent.is_Rational and exponent.q == 2:
                self.radicals.setdefault(self.radical_key(base), base)
                self.collect(base)
            else:
                raise NormalFormError(f"unsupported power {e}", factor=e)
        elif isinstance(e, sympy.exp):
            for coeff, rest in _linear_terms(e.exp):
                self.families[("exp", rest)].add(coeff)
        elif type(e) in _FAMILY:
            for coeff, rest in _linear_terms(e.args[0]):
                self.families[(_FAMILY[type(e)], rest)].add(coeff)
        elif isinstance(e, atoms.BRANCH_ATOMS):
            self.branches.add(e.args)
            for a in e.args[1:]:
                self.collect(a)
        elif isinstance(e, (AppliedUndef, sympy.Derivative, sympy.Function, sympy.Subs)):
            self.opaque.add(e)
        else:
            raise NormalFormError(f"unsupported construct {e}", factor=e)

    @staticmethod
    def radical_key(base):
        return sympy.cancel(base)


class NormalForm(object):

    """Canonical (numerator, denominator) representative of an expression."""

    _immutable = True

    def __init__(self, numerator, denominator, values):
        self._num = numerator
        self._den = denominator
        self._values = values

    @property
    def is_zero(self):
        return not self._num

    @property
    def numerator(self):
        return self._num.as_expr().xreplace(self._values)

    @property
    def denominator(self):
        return self._den.as_expr().xreplace(self._values)

    def __len__(self):
        return len(self._num)

    def as_expr(self):
        if self.is_zero:
            return sympy.S.Zero
        return self.numerator / self.denominator

    def __eq__(self, other):
        if isinstance(other, NormalForm):
            other = other.as_expr()
        return normal_form(self.as_expr() - sympy.sympify(other)).is_zero

    __hash__ = None

    def __repr__(self):
        return "NormalForm({})".format(magint.expr.print_expr(self.as_expr()))


class _Converter(object):

    """Second pass: maps sympy expressions into the generator ring."""

    def __init__(self, gens):
        entries = []
        for s in gens.symbols:
            entries.append((0, str(s), s, ("direct", s)))
        for c in gens.constants:
            entries.append((1, str(c), c, ("direct", c)))

        self.primitive = {}
        for key, coeffs in gens.families.items():
            kind, rest = key
            g = _rational_gcd(coeffs)
            self.primitive[key] = g
            u = g * rest
            if kind == "trig":
                pair = (sympy.sin(u), sympy.cos(u))
            elif kind == "hyp":
                pair = (sympy.sinh(u), sympy.cosh(u))
            else:
                pair = (sympy.exp(u),)
            for j, value in enumerate(pair):
                entries.append((2, sympy.default_sort_key(value), value, ("family", key, j)))

        for args in gens.branches:
            for j, cls in enumerate(atoms.BRANCH_ATOMS):
                value = cls(*args)
                entries.append((3, sympy.default_sort_key(value), value, ("branch", args, j)))

        for key, base in gens.radicals.items():
            entries.append((4, sympy.default_sort_key(key), sympy.sqrt(base), ("radical", key)))

        for o in gens.opaque:
            entries.append((5, sympy.default_sort_key(o), o, ("direct", o)))

        entries.sort(key=lambda t: (t[0], t[1]))
        symbols = tuple(
            value if category == 0 else sympy.Symbol(f"_nf{i}")
            for i, (category, _, value, _) in enumerate(entries)
        )
        self.ring = _make_ring(symbols or (sympy.Symbol("_nf"),))
        self.values = {s: t[2] for s, t in zip(symbols, entries) if s != t[2]}

        self.direct = {}
        self.index = {}
        families = collections.defaultdict(dict)
        branches = collections.defaultdict(dict)
        self.radical_gens = {}
        for i, (gen, (_, _, value, role)) in enumerate(zip(self.ring.gens, entries)):
            self.index[gen] = i
            if role[0] == "direct":
                self.direct[role[1]] = gen
            elif role[0] == "family":
                families[role[1]][role[2]] = gen
            elif role[0] == "branch":
                branches[role[1]][role[2]] = gen
            else:
                self.radical_gens[role[1]] = gen
        self.family_gens = {k: tuple(v[j] for j in sorted(v)) for k, v in families.items()}
        self.branch_gens = {k: (v[0], v[1]) for k, v in branches.items()}

        self.one = self.ring.one
        self.zero = self.ring.zero
        self._cache = {}
        self._multiples = {}
        self.rules = []
        self._build_rules(gens)

    def _build_rules(self, gens):
        for args in sorted(gens.branches, key=sympy.default_sort_key):
            _, u2 = self.branch_gens[args]
            _, alpha1, alpha2, eps = args
            rhs = eps * atoms.U1(*args) ** 2 + alpha1**2 - eps * alpha2**2
            n, d = self.convert(rhs)
            self.rules.append((self.index[u2], n, d))
        if EPS in self.direct:
            self.rules.append((self.index[self.direct[EPS]], self.one, self.one))
        for key in sorted(self.family_gens, key=lambda k: (k[0], sympy.default_sort_key(k[1]))):
            kind = key[0]
            if kind == "trig":
                s, c = self.family_gens[key]
                self.rules.append((self.index[s], self.one - c**2, self.one))
            elif kind == "hyp":
                sh, ch = self.family_gens[key]
                self.rules.append((self.index[sh], ch**2 - self.one, self.one))
        for key in sorted(self.radical_gens, key=sympy.default_sort_key):
            n, d = self.convert(gens.radicals[key])
            self.rules.append((self.index[self.radical_gens[key]], n, d))

    # reduction

    def _reduce_rule(self, p, index, n, d):
        groups = collections.defaultdict(dict)
        top = 0
        for monom, coeff in p.iterterms():
            k = monom[index]
            half = k // 2
            top = max(top, half)
            reduced = monom[:index] + (k % 2,) + monom[index + 1:]
            bucket = groups[half]
            bucket[reduced] = bucket.get(reduced, QQ.zero) + coeff
        if top == 0:
            return p, self.one
        result = self.zero
        for half, terms in groups.items():
            poly = self.ring.from_dict(terms)
            factor = n**half
            if d != self.one and top > half:
                factor = factor * d ** (top - half)
            result += poly * factor
        multiplier = d**top if d != self.one else self.one
        return result, multiplier

    def reduce(self, p):
        """Reduces `p` with the side relations; returns (p', m) with p = p'/m."""
        multiplier = self.one
        for _ in range(MAX_REDUCTION_ROUNDS):
            changed = False
            for index, n, d in self.rules:
                if p and p.degree(index) >= 2:
                    p, m = self._reduce_rule(p, index, n, d)
                    if m != self.one:
                        multiplier = multiplier * m
                    changed = True
            if not changed:
                return p, multiplier
        raise NormalFormError("side-relation reduction did not terminate")

    def reduce_pair(self, num, den):
        if not self.rules:
            return num, den
        num, m1 = self.reduce(num)
        den, m2 = self.reduce(den)
        if m1 == self.one and m2 == self.one:
            return num, den
        return num * m2, den * m1

    # conversion

    def convert(self, e):
        try:
            return self._cache[e]
        except KeyError:
            pass
        result = self._convert(e)
        self._cache[e] = result
        return result

    def _convert(self, e):
        if e.is_Rational:
            return self.ring.ground_new(e), self.one
        if e in self.direct:
            return self.direct[e], self.one
        if e.is_Add:
            return self._add(e.args)
        if e.is_Mul:
            num, den = self.one, self.one
            for a in e.args:
                n, d = self.convert(a)
                num = num * n
                if d != self.one:
                    den = den * d
            return self.reduce_pair(num, den)
        if e.is_Pow:
            return self._pow(e)
        if isinstance(e, sympy.exp):
            return self._exp(e.exp)
        if type(e) in _FAMILY:
            return self._trig(type(e), e.args[0])
        if isinstance(e, atoms.BRANCH_ATOMS):
            u1, u2 = self.branch_gens[e.args]
            return (u1 if isinstance(e, atoms.U1) else u2), self.one
        raise NormalFormError(f"unsupported construct {e}", factor=e)

    def _add(self, args):
        num, den = self.zero, self.one
        for a in args:
            n, d = self.convert(a)
            if d == den:
                num = num + n
            elif d == self.one:
                num = num + n * den
            elif den == self.one:
                num = num * d + n
                den = d
            else:
                lcm = den.lcm(d)
                num = num * lcm.exquo(den) + n * lcm.exquo(d)
                den = lcm
        return num, den

    def _pow(self, e):
        base, exponent = e.args
        if exponent.is_Integer:
            n, d = self.convert(base)
            k = int(exponent)
            if k < 0:
                n, m = self.reduce(n)
                if not n:
                    raise NormalFormError(f"denominator {base} is identically zero", factor=base)
                n, d, k = d * m, n, -k
            return self.reduce_pair(n**k, d**k)
        r = self.radical_gens[_Generators.radical_key(base)]
        k = int(exponent * 2)
        if k < 0:
            return self.one, r ** (-k)
        return self.reduce_pair(r**k, self.one)

    def _multiple(self, kind, rest, coeff):
        """Returns the generator polynomials of f(coeff*rest) for the family."""
        key = (kind, rest, coeff)
        if key in self._multiples:
            return self._multiples[key]
        g = self.primitive[(kind, rest)]
        m = coeff / g
        if not m.is_Integer:
            raise NormalFormError(f"argument {coeff * rest} is not a multiple of {g * rest}")
        m = int(m)
        gens = self.family_gens[(kind, rest)]
        if kind == "exp":
            result = (gens[0] ** abs(m), m < 0)
        else:
            s1, c1 = gens
            s, c = self.zero, self.one
            for _ in range(abs(m)):
                if kind == "trig":
                    s, c = s * c1 + c * s1, c * c1 - s * s1
                else:
                    s, c = s * c1 + c * s1, c * c1 + s * s1
            if m < 0:
                s = -s
            result = (s, c)
        self._multiples[key] = result
        return result

    def _exp(self, arg):
        num, den = self.one, self.one
        for coeff, rest in _linear_terms(arg):
            power, inverse = self._multiple("exp", rest, coeff)
            if inverse:
                den = den * power
            else:
                num = num * power
        return num, den

    def _trig(self, func, arg):
        kind = _FAMILY[func]
        s, c = self.zero, self.one
        for coeff, rest in _linear_terms(arg):
            s2, c2 = self._multiple(kind, rest, coeff)
            if kind == "trig":
                s, c = s * c2 + c * s2, c * c2 - s * s2
            else:
                s, c = s * c2 + c * s2, c * c2 + s * s2
        value = s if func in (sympy.sin, sympy.sinh) else c
        return self.reduce_pair(value, self.one)


def normal_form(e):
    """Computes the canonical form of an expression.

    :param e: a sympy expression (or anything sympify accepts).
    :returns: a NormalForm; ``is_zero`` decides symbolic zero.
    :raises NormalFormError: for a denominator that is identically zero,
        floating-point coefficients or unsupported constructs.
    """
    e = sympy.sympify(e)
    gens = _Generators()
    gens.collect(e)
    conv = _Converter(gens)
    num, den = conv.convert(e)
    num, den = conv.reduce_pair(num, den)
    logger.debug(
        "normal form over %d generators with %d numerator terms", conv.ring.ngens, len(num)
    )
    if not num:
        return NormalForm(conv.zero, conv.one, conv.values)
    if not den:
        raise NormalFormError(f"denominator of {e} is identically zero")
    if not den.is_ground:
        _, num, den = num.cofactors(den)
    lc = den.LC
    if lc != QQ.one:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return NormalForm(num, den, conv.values)


def is_zero(e):
    return normal_form(e).is_zero
