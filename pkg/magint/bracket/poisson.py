import logging

import magint
from magint.errors import ChartMismatchError, GaugeError

logger = logging.getLogger(__name__)


def _canonical(F):
    if F.covariant:
        if F.gauge is None:
            raise GaugeError("poisson_bracket needs canonical observables or an attached gauge")
        return F.canonical()
    return F


def _bracket_terms(F, G):
    result = magint.bracket.Observable({}, F.chart, F.covariant)
    for j in range(3):
        result = result + F.diff_q(j) * G.diff_p(j) - F.diff_p(j) * G.diff_q(j)
    return result


def poisson_bracket(F, G, normalize=True):
    """Canonical Poisson bracket ``sum_j dF/dq_j dG/dp_j - dF/dp_j dG/dq_j``.

    Covariant observables with an attached gauge are converted first.

    :param normalize: replace every coefficient by its normal form.
    :returns: a canonical Observable.
    """
    if F.chart != G.chart:
        raise ChartMismatchError(f"charts differ: {F.chart.name} and {G.chart.name}")
    F, G = _canonical(F), _canonical(G)
    result = _bracket_terms(F, G)
    return result.normalized() if normalize else result


def covariant_bracket(F, G, B, normalize=True):
    """Bracket of observables written in kinetic momenta ``pi = p + A``.

    ``{f, g} = sum_j (df/dq_j dg/dpi_j - df/dpi_j dg/dq_j) - sum_ij F_ij df/dpi_i dg/dpi_j``
    with ``F = dA`` given by the two-form `B`; no gauge is needed.
    """
    if not (F.chart == G.chart == B.chart):
        raise ChartMismatchError("observables and field must share a chart")
    if not (F.covariant and G.covariant):
        raise GaugeError("covariant_bracket needs covariant observables")
    result = _bracket_terms(F, G)
    for i in range(3):
        for j in range(3):
            Fij = B.F(i, j)
            if Fij != 0:
                result = result - F.diff_p(i) * G.diff_p(j) * Fij
    result = magint.bracket.Observable(result.terms, F.chart, True, F.gauge)
    return result.normalized() if normalize else result
