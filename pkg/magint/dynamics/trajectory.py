import logging

import numpy as np
import pandas as pd
import sympy

import magint
from magint.dynamics import integrators

logger = logging.getLogger(__name__)

ESCAPING = "ESCAPING"
CONFINED = "CONFINED"


class Trajectory(object):

    """Sampled solution of Hamilton's equations with the conserved quantities
    evaluated at every sample.

    States carry canonical momenta in the system's gauge. The conserved
    columns are ``H`` followed by the system's integral labels, all in their
    canonical form in the same gauge.
    """

    def __init__(self, system, times, states, stats, y0, options):
        self.system = system
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.stats = dict(stats)
        self.y0 = np.asarray(y0, dtype=float)
        self.options = dict(options)
        self._frame = None

    def __repr__(self):
        return "Trajectory({!r}, t_end={:g}, {} samples)".format(
            self.system.id, self.times[-1], len(self.times)
        )

    def __len__(self):
        return len(self.times)

    @property
    def phase_columns(self):
        chart = self.system.chart
        return [str(v) for v in chart.coords + chart.momenta]

    @property
    def conserved_columns(self):
        return ["H"] + [spec.label for spec in self.system.integrals]

    def to_frame(self):
        """DataFrame with columns ``t``, coordinates, momenta and the conserved
        quantities."""
        if self._frame is None:
            df = pd.DataFrame(self.states, columns=self.phase_columns)
            df.insert(0, "t", self.times)
            observables = self.system.observables("canonical")
            for label in self.conserved_columns:
                df[label] = magint.expr.eval_batch(observables[label].as_expr(), df)
            self._frame = df
        return self._frame.copy()

    def write_csv(self, path_or_buf):
        """Writes the frame with full double precision and LF line endings."""
        self.to_frame().to_csv(path_or_buf, index=False, float_format="%.17g", lineterminator="\n")

    def write_svg(self, path_or_buf):
        magint.dynamics.plots.write_svg(self, path_or_buf)

    def write_gnuplot(self, path_or_buf):
        magint.dynamics.plots.write_gnuplot(self, path_or_buf)

    def to_dict(self):
        return {
            "system": self.system.id,
            "params": {k: magint.expr.print_expr(v) for k, v in self.system.params.items()},
            "stats": self.stats,
            "options": self.options,
            "samples": self.to_frame().to_dict(orient="list"),
        }


def integrate(system, ic, t_end, method="rk45", rtol=None, atol=None, dt=None, kinetic=True):
    """Integrates the motion of a numeric catalog system.

    :param system: a FieldSystem with every parameter fixed.
    :param ic: ``(q1, q2, q3, p1, p2, p3)``; numbers or exact sympy values.
    :param t_end: final time.
    :param method: "rk45" (default), "dop853" or "implicit_midpoint".
    :param rtol: relative tolerance; option ``rtol`` by default.
    :param atol: absolute tolerance; option ``atol`` by default.
    :param dt: output spacing (and step of implicit_midpoint); option ``dt``.
    :param kinetic: the momenta in `ic` are kinetic momenta.
    :returns: a Trajectory.
    :raises IntegrationError: on step size underflow, a non-finite state or
        entry into the excluded region.
    """
    rtol = magint.get_option("rtol") if rtol is None else float(rtol)
    atol = magint.get_option("atol") if atol is None else float(atol)
    dt = magint.get_option("dt") if dt is None else float(dt)
    eom = magint.dynamics.equations_of_motion(system)
    y0 = eom.initial_state(ic, kinetic=kinetic)
    times = integrators.output_times(magint.utils.to_float(t_end), dt)
    logger.info("integrating %r to t = %g with %s", system, times[-1], method)
    states, stats = integrators.run(eom, y0, times, method, rtol, atol)
    options = {"method": method, "rtol": rtol, "atol": atol, "dt": dt}
    return Trajectory(system, times, states, stats, y0, options)


def simulate_preset(system_id, preset, t_end=None, **kwargs):
    """Integrates one of a system's presets; `t_end` overrides the preset
    time and `kwargs` override the preset's integrator options."""
    base = magint.catalog.build_system(system_id)
    params, ic, preset_t = base.preset(preset)
    options = dict(base.preset_options(preset), **kwargs)
    system = magint.catalog.build_system(system_id, params)
    return integrate(system, ic, preset_t if t_end is None else t_end, **options)


def conservation_report(traj, rerun=True):
    """Drift of every conserved quantity along `traj`.

    The drift is ``max |F(t) - F(0)| / max(1, |F(0)|)``. With `rerun`, the
    trajectory is integrated again at a tenth of the tolerances (half the
    step for implicit_midpoint) and the ratio of the drifts is reported.

    :returns: DataFrame with columns quantity, initial, drift, rerun_drift, ratio.
    """
    df = traj.to_frame()
    columns = traj.conserved_columns
    rerun_df = None
    if rerun:
        options = dict(traj.options)
        if options["method"] == "implicit_midpoint":
            options["dt"] /= 2
        else:
            options["rtol"] /= 10
            options["atol"] /= 10
        again = integrate(
            traj.system,
            traj.y0,
            traj.times[-1],
            method=options["method"],
            rtol=options["rtol"],
            atol=options["atol"],
            dt=options["dt"],
            kinetic=False,
        )
        rerun_df = again.to_frame()

    def drift(frame, column):
        initial = frame[column].iloc[0]
        return float(np.max(np.abs(frame[column] - initial)) / max(1.0, abs(initial)))

    rows = []
    for column in columns:
        d = drift(df, column)
        row = {"quantity": column, "initial": float(df[column].iloc[0]), "drift": d}
        if rerun_df is not None:
            r = drift(rerun_df, column)
            row["rerun_drift"] = r
            row["ratio"] = d / r if r > 0 else np.inf
        else:
            row["rerun_drift"] = np.nan
            row["ratio"] = np.nan
        rows.append(row)
    report = pd.DataFrame(rows, columns=["quantity", "initial", "drift", "rerun_drift", "ratio"])
    logger.info("conservation of %r:\n%s", traj, report)
    return report


def classify_z_extent(traj, escape_factor=None, window_fraction=None):
    """Observed z-range and an ESCAPING or CONFINED verdict.

    The window is the larger of the z-range over the first `window_fraction`
    of the samples and the system's natural z scale; the run is ESCAPING
    when ``max |z - z0|`` exceeds ``escape_factor`` windows.

    :returns: dict with z_min, z_max, z_range, window, bound and verdict.
    """
    escape_factor = magint.get_option("escape_factor") if escape_factor is None else escape_factor
    window_fraction = (
        magint.get_option("window_fraction") if window_fraction is None else window_fraction
    )
    z = str(traj.system.chart.coords[2])
    df = traj.to_frame()[["t", z]].rename(columns={z: "z"})
    z0 = df["z"].iloc[0]
    df = df.eval("dz = abs(z - @z0)", engine="numexpr")

    head = max(2, int(np.ceil(window_fraction * len(df))))
    early = df.iloc[:head]
    scale = magint.utils.to_float(traj.system.z_scale())
    window = max(float(early["z"].max() - early["z"].min()), scale)
    bound = escape_factor * window
    beyond = df.query("dz > @bound", engine="numexpr")
    verdict = ESCAPING if len(beyond) else CONFINED
    result = {
        "z_min": float(df["z"].min()),
        "z_max": float(df["z"].max()),
        "z_range": float(df["z"].max() - df["z"].min()),
        "window": window,
        "bound": bound,
        "escape_time": float(beyond["t"].iloc[0]) if len(beyond) else None,
        "verdict": verdict,
    }
    logger.info("%r: z in [%g, %g], %s", traj, result["z_min"], result["z_max"], verdict)
    return result


@magint.decorators.both_branches(include_branch=True)
def branch_extents(system_id, params, ic, t_end, eps=-1, **kwargs):
    """z-extent of one run per sign branch of `system_id`.

    Pass ``eps="both"`` to run the trigonometric and hyperbolic branches.

    :returns: DataFrame with one row of classify_z_extent output.
    """
    params = dict(params)
    params["eps"] = sympy.Integer(eps)
    system = magint.catalog.build_system(system_id, params)
    traj = integrate(system, ic, t_end, **kwargs)
    return pd.DataFrame([classify_z_extent(traj)])
