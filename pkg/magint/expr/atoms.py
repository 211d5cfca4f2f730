"""Transcendental atoms and the coordinate-linearity rule for their arguments.

``U1`` and ``U2`` are the sign-branch functions of the a = 0 elliptic system:
for ``eps = -1`` they are trigonometric, for ``eps = 1`` hyperbolic, and they
satisfy ``U1' = -U2``, ``U2' = -eps*U1``, ``U2^2 = eps*U1^2 + alpha1^2 - eps*alpha2^2``.
"""
import logging

import numpy as np
import sympy
from sympy.core.function import ArgumentIndexError

from magint.errors import NonlinearAtomError

logger = logging.getLogger(__name__)

COORDINATE_NAMES = ("x", "y", "z", "r", "phi", "Z")
COORDINATES = frozenset(sympy.Symbol(n) for n in COORDINATE_NAMES)

ALPHA1, ALPHA2, EPS = sympy.symbols("alpha1 alpha2 eps")

TRIG = (sympy.sin, sympy.cos)
HYPERBOLIC = (sympy.sinh, sympy.cosh)


class _BranchAtom(sympy.Function):

    nargs = 4

    @classmethod
    def _at_zero(cls, alpha1, alpha2, eps):
        raise NotImplementedError

    @classmethod
    def eval(cls, arg, alpha1, alpha2, eps):
        if alpha1.is_zero and alpha2.is_zero:
            return sympy.S.Zero
        if arg.is_zero:
            return cls._at_zero(alpha1, alpha2, eps)
        return None

    def _with_alphas(self, alpha1, alpha2):
        arg, _, _, eps = self.args
        return self.func(arg, alpha1, alpha2, eps)

    def _alpha_fdiff(self, argindex):
        # the atom is linear in (alpha1, alpha2)
        if argindex == 2:
            return self._with_alphas(sympy.S.One, sympy.S.Zero)
        if argindex == 3:
            return self._with_alphas(sympy.S.Zero, sympy.S.One)
        raise ArgumentIndexError(self, argindex)


class U1(_BranchAtom):
    """alpha2*cos(u) - alpha1*sin(u) for eps = -1, alpha1*sinh(u) + alpha2*cosh(u) for eps = 1."""

    @classmethod
    def _at_zero(cls, alpha1, alpha2, eps):
        return alpha2

    def fdiff(self, argindex=1):
        if argindex == 1:
            return -U2(*self.args)
        return self._alpha_fdiff(argindex)


class U2(_BranchAtom):
    """alpha2*sin(u) + alpha1*cos(u) for eps = -1, -alpha2*sinh(u) - alpha1*cosh(u) for eps = 1."""

    @classmethod
    def _at_zero(cls, alpha1, alpha2, eps):
        return -eps * alpha1

    def fdiff(self, argindex=1):
        if argindex == 1:
            return -self.args[3] * U1(*self.args)
        return self._alpha_fdiff(argindex)


BRANCH_ATOMS = (U1, U2)
ATOM_TYPES = TRIG + HYPERBOLIC + (sympy.exp,) + BRANCH_ATOMS


def branch_atom(name, args):
    """Builds ``U1``/``U2`` from the short form ``U(arg)`` or the long form
    ``U(arg, alpha1, alpha2, eps)``.
    """
    cls = {"U1": U1, "U2": U2}[name]
    if len(args) == 1:
        args = (args[0], ALPHA1, ALPHA2, EPS)
    if len(args) != 4:
        raise ValueError(f"{name} takes 1 or 4 arguments, got {len(args)}")
    return cls(*args)


def atom_argument(atom):
    """Returns the argument of an atom (the exponent of ``exp``)."""
    if isinstance(atom, sympy.exp):
        return atom.exp
    return atom.args[0]


def is_atom(e):
    return isinstance(e, ATOM_TYPES)


def argument_coordinate(arg):
    """Returns the coordinate an atom argument is linear in, or None for
    a coordinate-free argument.

    :raises NonlinearAtomError: if the argument involves more than one
        coordinate or is not affine in its coordinate.
    """
    coords = arg.free_symbols & COORDINATES
    if not coords:
        return None
    if len(coords) > 1:
        names = ", ".join(sorted(str(c) for c in coords))
        raise NonlinearAtomError(f"atom argument {arg} mixes coordinates {names}")
    (coord,) = coords
    if arg.diff(coord).has(coord):
        raise NonlinearAtomError(f"atom argument {arg} is not linear in {coord}")
    return coord


def check_atoms(e):
    """Validates every atom argument of `e`.

    :raises NonlinearAtomError: on the first offending atom.
    """
    for node in sympy.preorder_traversal(e):
        if is_atom(node):
            try:
                argument_coordinate(atom_argument(node))
            except NonlinearAtomError as exc:
                exc.atom = node
                raise
    return e


def atom_coordinates(e):
    """Returns the set of coordinates that atom arguments of `e` depend on."""
    coords = set()
    for node in sympy.preorder_traversal(e):
        if is_atom(node):
            coord = argument_coordinate(atom_argument(node))
            if coord is not None:
                coords.add(coord)
    return coords


def _expand_branch(atom):
    arg, alpha1, alpha2, eps = atom.args
    if eps == -1:
        if isinstance(atom, U1):
            return alpha2 * sympy.cos(arg) - alpha1 * sympy.sin(arg)
        return alpha2 * sympy.sin(arg) + alpha1 * sympy.cos(arg)
    if eps == 1:
        if isinstance(atom, U1):
            return alpha1 * sympy.sinh(arg) + alpha2 * sympy.cosh(arg)
        return -alpha2 * sympy.sinh(arg) - alpha1 * sympy.cosh(arg)
    return atom


def expand_atoms(e):
    """Rewrites ``U1``/``U2`` with a numeric branch (``eps`` = -1 or 1) into
    trigonometric or hyperbolic functions. Atoms with a symbolic branch are
    left alone.
    """
    return sympy.sympify(e).replace(lambda n: isinstance(n, BRANCH_ATOMS), _expand_branch)


def _u1_numeric(u, alpha1, alpha2, eps):
    with np.errstate(over="ignore", invalid="ignore"):
        return np.where(
            np.asarray(eps) < 0,
            alpha2 * np.cos(u) - alpha1 * np.sin(u),
            alpha1 * np.sinh(u) + alpha2 * np.cosh(u),
        )


def _u2_numeric(u, alpha1, alpha2, eps):
    with np.errstate(over="ignore", invalid="ignore"):
        return np.where(
            np.asarray(eps) < 0,
            alpha2 * np.sin(u) + alpha1 * np.cos(u),
            -alpha2 * np.sinh(u) - alpha1 * np.cosh(u),
        )


NUMERIC_ATOMS = {"U1": _u1_numeric, "U2": _u2_numeric}
