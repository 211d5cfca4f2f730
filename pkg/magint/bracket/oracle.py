"""Finite-difference estimate of the canonical Poisson bracket."""
import logging

import numpy as np
import pandas as pd

import magint

logger = logging.getLogger(__name__)


def _phase_names(chart):
    return [str(s) for s in chart.coords + chart.momenta]


def _stencil(pt, h):
    """The 12 points pt +/- h e_k, k over the 6 phase-space directions."""
    pt = np.asarray(pt, dtype=float)
    rows = []
    for k in range(6):
        for sign in (1.0, -1.0):
            row = pt.copy()
            row[k] += sign * h
            rows.append(row)
    return np.array(rows)


def _gradient(F, names, rows, env, h):
    table = pd.DataFrame(rows, columns=names)
    for k, v in (env or {}).items():
        table[str(k)] = float(v)
    values = magint.expr.eval_batch(F.as_expr(), table)
    return (values[0::2] - values[1::2]) / (2 * h)


def numeric_bracket_oracle(F, G, pt, h=None, env=None):
    """Central-difference estimate of {F, G} at a phase point.

    :param F, G: observables; covariant ones need an attached gauge.
    :param pt: (q1, q2, q3, p1, p2, p3) in canonical momenta.
    :param h: step, defaults to option ``fd_step``.
    :param env: numeric values of the parameters.
    :returns: a float.
    """
    h = h or magint.get_option("fd_step")
    F = F.canonical() if F.covariant else F
    G = G.canonical() if G.covariant else G
    names = _phase_names(F.chart)
    rows = _stencil(pt, h)
    dF = _gradient(F, names, rows, env, h)
    dG = _gradient(G, names, rows, env, h)
    return float(np.dot(dF[:3], dG[3:]) - np.dot(dF[3:], dG[:3]))


def convergence_ratio(F, G, pt, exact, h=1e-3, env=None):
    """Error ratio of the oracle under h -> h/2; close to 4 for O(h^2)."""
    e1 = abs(numeric_bracket_oracle(F, G, pt, h, env) - exact)
    e2 = abs(numeric_bracket_oracle(F, G, pt, h / 2, env) - exact)
    if e2 == 0.0:
        return float("inf")
    return e1 / e2
