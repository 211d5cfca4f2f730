"""Vector potentials, magnetic two-forms and gauges.

Components are coordinate components. A one-form ``A = A1 dq1 + A2 dq2 + A3 dq3``
has the two-form ``F = dA`` with ``F_ij = d_i A_j - d_j A_i``, stored as the
triple ``B = (F_23, F_31, F_12)``. In the cartesian chart this is the usual
magnetic field; in the cylindrical chart it gives ``B_r = F_phiZ``,
``B_phi = F_Zr`` and ``B_Z = F_rphi``.
"""
import logging

import sympy

import magint
from magint.errors import ChartMismatchError, GaugeError

logger = logging.getLogger(__name__)


class Chart(object, metaclass=magint.decorators.Cached):

    """A coordinate chart of Euclidean 3-space with conjugate momenta."""

    NAMES = {
        "cartesian": (("x", "y", "z"), ("p1", "p2", "p3"), ("B1", "B2", "B3")),
        "cylindrical": (("r", "phi", "Z"), ("p_r", "p_phi", "p_Z"), ("B_r", "B_phi", "B_Z")),
    }

    def __init__(self, name):
        if name not in self.NAMES:
            raise ChartMismatchError(f"unknown chart {name}")
        self.name = name
        coords, momenta, field = self.NAMES[name]
        self.coords = tuple(sympy.Symbol(c) for c in coords)
        self.momenta = tuple(sympy.Symbol(p) for p in momenta)
        self.field_names = field

    def __eq__(self, other):
        return isinstance(other, Chart) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return "Chart({!r})".format(self.name)

    @property
    def metric(self):
        """Diagonal inverse metric: H = 1/2 * sum(metric[i] * pi_i^2) + W."""
        if self.name == "cartesian":
            return (sympy.S.One, sympy.S.One, sympy.S.One)
        r = self.coords[0]
        return (sympy.S.One, 1 / r**2, sympy.S.One)


CARTESIAN = Chart("cartesian")
CYLINDRICAL = Chart("cylindrical")


def chart(name_or_chart):
    if isinstance(name_or_chart, Chart):
        return name_or_chart
    return Chart(name_or_chart)


def _check_momentum_free(components, c):
    for comp in components:
        if comp.free_symbols & set(c.momenta):
            raise ValueError(f"form component {comp} depends on momenta")


class OneForm(object):

    """A vector potential ``A`` in a chart."""

    _immutable = True

    def __init__(self, components, chart_name="cartesian"):
        self.chart = chart(chart_name)
        self.components = tuple(sympy.sympify(c) for c in components)
        if len(self.components) != 3:
            raise ValueError("a one-form needs 3 components")
        _check_momentum_free(self.components, self.chart)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other):
        return (
            isinstance(other, OneForm)
            and self.chart == other.chart
            and all(magint.expr.is_zero(a - b) for a, b in zip(self, other))
        )

    __hash__ = None

    def __repr__(self):
        comps = ", ".join(magint.expr.print_expr(c) for c in self)
        return "OneForm([{}], {!r})".format(comps, self.chart.name)

    def subs(self, bindings):
        return OneForm([magint.expr.substitute(c, bindings) for c in self], self.chart)

    @classmethod
    def zero(cls, chart_name="cartesian"):
        return cls([0, 0, 0], chart_name)


class TwoForm(object):

    """A magnetic two-form stored as ``(F_23, F_31, F_12)``."""

    _immutable = True

    def __init__(self, components, chart_name="cartesian"):
        self.chart = chart(chart_name)
        self.components = tuple(sympy.sympify(c) for c in components)
        if len(self.components) != 3:
            raise ValueError("a two-form needs 3 components")
        _check_momentum_free(self.components, self.chart)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other):
        return (
            isinstance(other, TwoForm)
            and self.chart == other.chart
            and all(magint.expr.is_zero(a - b) for a, b in zip(self, other))
        )

    __hash__ = None

    def __repr__(self):
        comps = ", ".join(magint.expr.print_expr(c) for c in self)
        return "TwoForm([{}], {!r})".format(comps, self.chart.name)

    def F(self, i, j):
        """Antisymmetric component F_ij, 0-based indices."""
        if i == j:
            return sympy.S.Zero
        k = 3 - i - j
        sign = 1 if (j - i) % 3 == 1 else -1
        return sign * self.components[k]

    def subs(self, bindings):
        return TwoForm([magint.expr.substitute(c, bindings) for c in self], self.chart)

    @property
    def is_polynomial(self):
        return all(c.is_polynomial(*self.chart.coords) for c in self)


def exterior_derivative(A):
    """B = dA: B1 = d2 A3 - d3 A2, B2 = d3 A1 - d1 A3, B3 = d1 A2 - d2 A1."""
    q = A.chart.coords
    d = magint.expr.differentiate
    return TwoForm(
        [
            d(A[2], q[1]) - d(A[1], q[2]),
            d(A[0], q[2]) - d(A[2], q[0]),
            d(A[1], q[0]) - d(A[0], q[1]),
        ],
        A.chart,
    )


def divergence(B):
    """d1 B1 + d2 B2 + d3 B3; zero exactly when the two-form is closed."""
    q = B.chart.coords
    return sum((magint.expr.differentiate(B[i], q[i]) for i in range(3)), sympy.S.Zero)


def gauge_shift(A, chi):
    """A + d(chi)."""
    q = A.chart.coords
    chi = sympy.sympify(chi)
    return OneForm([A[i] + magint.expr.differentiate(chi, q[i]) for i in range(3)], A.chart)


def _ray_integral(e, coords):
    """int_0^1 t * e(t q) dt for e polynomial in the coordinates."""
    t = sympy.Dummy("t")
    scaled = sympy.expand(e.xreplace({c: t * c for c in coords}) * t)
    if not scaled.is_polynomial(t):
        raise GaugeError(f"ray integrand {e} is not polynomial in the coordinates")
    poly = sympy.Poly(scaled, t)
    return sum(
        (coeff / (k + 1) for (k,), coeff in poly.terms()),
        sympy.S.Zero,
    )


def _ray_gauge(B):
    q = B.chart.coords
    A = []
    for i in range(3):
        A.append(sum((q[j] * _ray_integral(B.F(j, i), q) for j in range(3)), sympy.S.Zero))
    return OneForm(A, B.chart)


def _atom_antiderivative(atom, v):
    """Returns F with dF/dv = atom, for an atom linear in v."""
    arg = magint.expr.atoms.atom_argument(atom)
    lam = sympy.diff(arg, v)
    if lam.is_zero or lam.has(v):
        raise GaugeError(f"cannot integrate {atom} in {v}")
    if isinstance(atom, sympy.exp):
        return atom / lam
    if isinstance(atom, sympy.sin):
        return -sympy.cos(arg) / lam
    if isinstance(atom, sympy.cos):
        return sympy.sin(arg) / lam
    if isinstance(atom, sympy.sinh):
        return sympy.cosh(arg) / lam
    if isinstance(atom, sympy.cosh):
        return sympy.sinh(arg) / lam
    U1, U2 = magint.expr.U1, magint.expr.U2
    eps = atom.args[3]
    if isinstance(atom, U1):
        return -eps * U2(*atom.args) / lam
    if isinstance(atom, U2):
        return -U1(*atom.args) / lam
    raise GaugeError(f"no antiderivative for {atom}")


def _power_times_atom(k, atom, v):
    """Antiderivative of v^k * atom by repeated integration by parts."""
    F = _atom_antiderivative(atom, v)
    if k == 0:
        return F
    rest = sympy.expand(sympy.diff(v**k, v) * F)
    return v**k * F - _antiderivative(rest, v)


def _antiderivative(e, v):
    """Antiderivative in v of a sum of terms c * v^k * atom(v), atoms linear in v."""
    total = sympy.S.Zero
    for term in sympy.Add.make_args(sympy.expand(e)):
        if not term.has(v):
            total += term * v
            continue
        coeff, power, atom = sympy.S.One, 0, None
        for factor in sympy.Mul.make_args(term):
            if not factor.has(v):
                coeff *= factor
            elif factor == v:
                power += 1
            elif factor.is_Pow and factor.base == v and factor.exp.is_Integer and factor.exp > 0:
                power += int(factor.exp)
            elif magint.expr.atoms.is_atom(factor) and atom is None:
                atom = factor
            else:
                raise GaugeError(f"unsupported axial integrand {term}")
        if atom is None:
            total += coeff * v ** (power + 1) / (power + 1)
        else:
            total += coeff * _power_times_atom(power, atom, v)
    return total


def _axial_integral(e, v):
    """int_0^v e dv'."""
    F = _antiderivative(e, v)
    return F - F.xreplace({v: sympy.S.Zero})


def _axial_gauge(B, axis):
    q = B.chart.coords
    i, j = [k for k in range(3) if k != axis]
    v = q[axis]
    # A_axis = 0; the transverse part is fixed by the field on the v = 0 plane
    A = [sympy.S.Zero] * 3
    A[i] = _axial_integral(B.F(axis, i), v)
    A[j] = _axial_integral(B.F(axis, j), v)
    plane = _ray_integral(B.F(i, j).xreplace({v: sympy.S.Zero}), (q[i], q[j]))
    A[i] -= q[j] * plane
    A[j] += q[i] * plane
    return OneForm(A, B.chart)


def _split_atoms(B):
    """Splits B into its atom-free and atom-bearing terms; each part is closed
    whenever B is, since derivatives of atom terms keep their atoms."""
    plain, atomic = [], []
    for comp in B:
        terms = sympy.Add.make_args(sympy.expand(comp))
        bearing = [t for t in terms if magint.expr.atoms.atom_coordinates(t)]
        atomic.append(sympy.Add(*bearing))
        plain.append(sympy.expand(comp) - atomic[-1])
    return TwoForm(plain, B.chart), TwoForm(atomic, B.chart)


def poincare_gauge(B):
    """Reconstructs a vector potential with dA = B.

    Polynomial fields get the ray gauge ``A_i = sum_j q_j int_0^1 t F_ji(tq) dt``.
    Fields carrying atoms in one coordinate are split: the atom-free terms get
    the ray gauge and the atom terms the axial gauge along that coordinate.
    ``divergence`` is the plain coordinate sum, so the closure test needs no
    metric in either chart.

    :raises GaugeError: if B is not closed or has an unsupported shape.
    """
    if not magint.expr.is_zero(divergence(B)):
        raise GaugeError(f"field {B} is not closed")
    plain, atomic = _split_atoms(B)
    axes = set()
    for comp in atomic:
        axes |= magint.expr.atoms.atom_coordinates(comp)
    if len(axes) > 1:
        raise GaugeError(f"no closed-form gauge for {B}: atoms in {sorted(map(str, axes))}")
    # non-polynomial atom-free terms make _ray_integral raise
    A = _ray_gauge(plain)
    if axes:
        (v,) = axes
        if v not in B.chart.coords:
            raise ChartMismatchError(f"atom coordinate {v} is not a {B.chart.name} coordinate")
        axial = _axial_gauge(atomic, B.chart.coords.index(v))
        A = OneForm([A[i] + axial[i] for i in range(3)], B.chart)
    if exterior_derivative(A) != B:
        raise GaugeError(f"reconstructed gauge {A} does not reproduce {B}")
    logger.debug("reconstructed gauge %r", A)
    return A


def to_cylindrical(e):
    """Point transformation x = r cos(phi), y = r sin(phi), z = Z of a scalar."""
    x, y, z = CARTESIAN.coords
    r, phi, Z = CYLINDRICAL.coords
    return sympy.sympify(e).xreplace({x: r * sympy.cos(phi), y: r * sympy.sin(phi), z: Z})
