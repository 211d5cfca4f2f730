import logging

import numpy as np
import sympy

import magint
from magint.errors import ConfigError, GaugeError, IntegrationError

logger = logging.getLogger(__name__)


def _lambdify(names, e):
    return sympy.lambdify(names, e, modules=[magint.expr.atoms.NUMERIC_ATOMS, "numpy"], cse=True)


class EquationsOfMotion(object):

    """Hamilton's equations of a numeric catalog system in its own gauge.

    The right-hand side ``(dH/dp, -dH/dq)`` and its Jacobian are derived
    symbolically from the canonical Hamiltonian and compiled once.

    :param system: a FieldSystem with every parameter fixed.
    :raises ConfigError: if a parameter is still symbolic.
    :raises GaugeError: if the system has no gauge.
    """

    def __init__(self, system):
        if not system.is_numeric:
            raise ConfigError(
                f"{system.id}: parameters {', '.join(system.symbols)} must be fixed to simulate"
            )
        if system.A is None:
            raise GaugeError(f"{system.id} has no gauge to simulate in")
        self.system = system
        self.chart = system.chart
        self.names = tuple(self.chart.coords) + tuple(self.chart.momenta)
        self.hamiltonian = system.hamiltonian().canonical().as_expr()

        q, p = self.chart.coords, self.chart.momenta
        rhs = [magint.expr.differentiate(self.hamiltonian, pj) for pj in p]
        rhs += [-magint.expr.differentiate(self.hamiltonian, qj) for qj in q]
        self.rhs = sympy.ImmutableMatrix(rhs)
        self._rhs = _lambdify(self.names, list(self.rhs))
        self._jac = _lambdify(self.names, self.rhs.jacobian(self.names))

        self._axis = None
        if system.exclusion is not None:
            center = [magint.utils.to_float(system.parse(c)) for c in system.exclusion["center"]]
            self._axis = np.array(center)
        self.rho_min = magint.get_option("rho_min")
        logger.debug("compiled equations of motion of %r", system)

    def __repr__(self):
        return "EquationsOfMotion({!r})".format(self.system)

    def check_state(self, t, y):
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at t = {t}", t=t, state=np.array(y))
        if self._axis is not None and np.hypot(*(y[:2] - self._axis)) < self.rho_min:
            raise IntegrationError(
                f"{self.system.id}: trajectory entered the excluded region at t = {t}",
                t=t,
                state=np.array(y),
            )

    def __call__(self, t, y):
        self.check_state(t, y)
        return np.array(self._rhs(*y), dtype=float)

    def jacobian(self, t, y):
        return np.array(self._jac(*y), dtype=float).reshape(6, 6)

    def initial_state(self, ic, kinetic=True):
        """Phase-space start vector from ``(q1, q2, q3, p1, p2, p3)``.

        :param kinetic: the momenta in `ic` are kinetic momenta ``p + A``;
            they are converted with ``p = pi - A(q0)``.
        """
        values = np.array([magint.utils.to_float(v) for v in ic], dtype=float)
        if values.shape != (6,):
            raise ConfigError(f"initial condition needs 6 values, got {len(values)}")
        if kinetic:
            env = dict(zip(map(str, self.chart.coords), values[:3]))
            A = [
                magint.expr.eval_numeric(a, env) if a.free_symbols else float(a)
                for a in self.system.A
            ]
            values[3:] -= A
        self.check_state(0.0, values)
        return values


def equations_of_motion(system):
    """The compiled vector field of `system`; see EquationsOfMotion."""
    return EquationsOfMotion(system)
