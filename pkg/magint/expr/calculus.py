import logging

import numpy as np
import pandas as pd
import sympy
from sympy.core.function import AppliedUndef

import magint
from magint.errors import DenominatorGuardError, NormalFormError, UnboundSymbolError
from magint.expr import atoms

logger = logging.getLogger(__name__)


def differentiate(e, v):
    """Exact partial derivative of `e` with respect to the symbol `v`;
    every other symbol is held constant.

    :param e: a sympy expression.
    :param v: a coordinate (or momentum) symbol, or its name.
    :returns: the derivative, unsimplified.
    """
    if isinstance(v, str):
        v = sympy.Symbol(v)
    if not isinstance(v, sympy.Symbol):
        raise TypeError(f"can only differentiate with respect to a symbol, got {v!r}")
    return sympy.diff(sympy.sympify(e), v)


def _as_symbol(k):
    return sympy.Symbol(k) if isinstance(k, str) else k


def substitute(e, bindings):
    """Simultaneous substitution of symbols by expressions.

    :param e: a sympy expression.
    :param bindings: mapping from symbols (or names) to expressions; values
        may be strings in the expression grammar, ints or sympy numbers.
    :returns: the substituted expression.
    :raises NormalFormError: if the substitution divides by zero.
    :raises NonlinearAtomError: if an atom argument stops being linear.
    """
    mapping = {}
    for k, v in bindings.items():
        if isinstance(v, str):
            v = magint.expr.parse_expr(v)
        elif isinstance(v, float):
            raise NormalFormError(f"inexact value {v} for {k}; use an exact rational", factor=v)
        mapping[_as_symbol(k)] = sympy.sympify(v)
    result = sympy.sympify(e).xreplace(mapping)
    if result.has(sympy.zoo, sympy.nan):
        raise NormalFormError(f"substitution {bindings} divides by zero in {e}")
    return atoms.check_atoms(result)


def _denominators(e):
    """Yields the bases of negative powers (and of radicals) in `e`."""
    seen = set()
    for node in sympy.preorder_traversal(e):
        if node.is_Pow and node.exp.is_negative and node.base not in seen:
            seen.add(node.base)
            yield node.base


@magint.decorators.memoize
def _compile(e, names):
    symbols = [sympy.Symbol(n) for n in names]
    return sympy.lambdify(symbols, e, modules=[atoms.NUMERIC_ATOMS, "numpy"])


def _free_names(e):
    unknown = sorted({str(f.func) for f in e.atoms(AppliedUndef)})
    if unknown:
        raise UnboundSymbolError(unknown)
    return tuple(sorted(str(s) for s in e.free_symbols))


def _columns(envs):
    if isinstance(envs, pd.DataFrame):
        return {str(c): envs[c].to_numpy(dtype=float) for c in envs.columns}, len(envs)
    cols = {str(k): np.atleast_1d(np.asarray(v, dtype=float)) for k, v in envs.items()}
    size = max((len(v) for v in cols.values()), default=1)
    return cols, size


def eval_batch(e, envs, guard=None):
    """Evaluates `e` over a table of environments.

    :param e: a sympy expression.
    :param envs: a DataFrame whose columns are symbol names, or a mapping of
        names to arrays (scalars broadcast).
    :param guard: minimum |denominator|; defaults to option
        ``denominator_guard``.
    :returns: a float ndarray with one value per row.
    :raises UnboundSymbolError: if a free symbol has no column.
    :raises DenominatorGuardError: if any denominator falls under the guard.
    """
    e = sympy.sympify(e)
    if guard is None:
        guard = magint.get_option("denominator_guard")
    cols, size = _columns(envs)
    names = _free_names(e)
    missing = [n for n in names if n not in cols]
    if missing:
        raise UnboundSymbolError(missing)
    args = [cols[n] for n in names]

    for factor in _denominators(e):
        fnames = tuple(sorted(str(s) for s in factor.free_symbols))
        values = np.abs(
            np.broadcast_to(_compile(factor, fnames)(*[cols[n] for n in fnames]), (size,))
        )
        worst = int(np.argmin(values))
        if values[worst] < guard:
            raise DenominatorGuardError(factor, float(values[worst]), guard)

    with np.errstate(all="ignore"):
        values = _compile(e, names)(*args)
    return np.array(np.broadcast_to(values, (size,)), dtype=float)


def eval_numeric(e, env, guard=None):
    """Evaluates `e` at one environment.

    :param e: a sympy expression.
    :param env: mapping from symbols or names to real numbers.
    :returns: a float.
    """
    env = {str(k): [float(v)] for k, v in env.items()}
    return float(eval_batch(e, env, guard=guard)[0])
