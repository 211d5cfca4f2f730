"""Time steppers for the compiled equations of motion.

Every stepper returns the states at the requested output times together with
a dict of statistics.
"""
import logging

import numpy as np
from scipy.integrate import DOP853, RK45

import magint
from magint.errors import ConfigError, IntegrationError

logger = logging.getLogger(__name__)

ADAPTIVE = {"rk45": RK45, "dop853": DOP853}
METHODS = ("rk45", "dop853", "implicit_midpoint")
MAX_NEWTON_ITERATIONS = 50


def output_times(t_end, dt):
    """``0, dt, 2 dt, ...`` up to and including `t_end`."""
    if not t_end > 0:
        raise ConfigError(f"t_end must be positive, got {t_end}")
    if not dt > 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    n = int(np.ceil(t_end / dt - 1e-9))
    times = np.arange(n + 1) * dt
    times[-1] = t_end
    return times


def adaptive(fun, y0, times, method="rk45", rtol=None, atol=None):
    """Drives a scipy embedded Runge-Kutta stepper step by step and samples
    its dense output at `times`.

    :raises IntegrationError: if the stepper fails (step size underflow).
    """
    rtol = magint.get_option("rtol") if rtol is None else rtol
    atol = magint.get_option("atol") if atol is None else atol
    if rtol <= 0 or atol <= 0:
        raise ConfigError("tolerances must be positive")
    solver = ADAPTIVE[method](fun, times[0], y0, times[-1], rtol=rtol, atol=atol)
    states = np.empty((len(times), len(y0)))
    states[0] = y0
    k = 1
    steps = rejected = 0
    while solver.status == "running":
        before = solver.nfev
        message = solver.step()
        steps += 1
        # every attempt costs n_stages evaluations; all but the last were rejected
        rejected += max((solver.nfev - before) // solver.n_stages - 1, 0)
        if solver.status == "failed":
            raise IntegrationError(
                f"{method} failed at t = {solver.t}: {message}", t=solver.t, state=solver.y
            )
        if k < len(times) and times[k] <= solver.t:
            dense = solver.dense_output()
            while k < len(times) and times[k] <= solver.t:
                states[k] = dense(times[k])
                k += 1
    stats = {
        "method": method,
        "steps": steps,
        "rejected": rejected,
        "nfev": solver.nfev,
        "rtol": rtol,
        "atol": atol,
    }
    logger.info("%s: %d steps, %d rejected, %d evaluations", method, steps, rejected, solver.nfev)
    return states, stats


def _midpoint_step(fun, jac, t, y, h, tol):
    y_new = y + h * fun(t, y)
    identity = np.eye(len(y))
    for iteration in range(1, MAX_NEWTON_ITERATIONS + 1):
        mid = (y + y_new) / 2
        residual = y_new - y - h * fun(t + h / 2, mid)
        J = identity - h / 2 * jac(t + h / 2, mid)
        delta = np.linalg.solve(J, residual)
        y_new = y_new - delta
        if np.linalg.norm(delta) <= tol * (1.0 + np.linalg.norm(y_new)):
            return y_new, iteration
    raise IntegrationError(f"Newton iteration did not converge at t = {t}", t=t, state=y)


def implicit_midpoint(fun, jac, y0, times, tol=1e-14):
    """Fixed-step implicit midpoint rule with one step per output interval.

    Each step solves ``y1 = y0 + h f((y0 + y1)/2)`` by Newton's method with
    the exact Jacobian.
    """
    states = np.empty((len(times), len(y0)))
    states[0] = y0
    newton = 0
    for k in range(len(times) - 1):
        h = times[k + 1] - times[k]
        states[k + 1], iterations = _midpoint_step(fun, jac, times[k], states[k], h, tol)
        newton += iterations
    stats = {"method": "implicit_midpoint", "steps": len(times) - 1, "newton": newton}
    logger.info("implicit_midpoint: %d steps, %d Newton iterations", len(times) - 1, newton)
    return states, stats


def run(eom, y0, times, method="rk45", rtol=None, atol=None):
    """Integrates `eom` from `y0` over `times` with `method`."""
    if method in ADAPTIVE:
        return adaptive(eom, y0, times, method, rtol, atol)
    if method == "implicit_midpoint":
        return implicit_midpoint(eom, eom.jacobian, y0, times)
    raise ConfigError(f"unknown method {method}; choose from {', '.join(METHODS)}")
