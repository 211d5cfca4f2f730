import copy
import io

import numpy as np
import sympy
from pytest import approx, fixture, mark, raises

import magint
from magint.catalog import build_system
from magint.dynamics import CONFINED, ESCAPING, integrate
from magint.errors import ConfigError, IntegrationError
from magint.expr import is_zero

LARMOR_FIELD = 2.0


@fixture(scope="module")
def larmor():
    params = {"b": 1, "beta1t": 2, "beta2": 0, "omega1": 0, "omega2": 0, "omega3": 0}
    return build_system("LIMIT_STANDARD", params)


@fixture(scope="module")
def free():
    return build_system("CLASS_III", {"bphi": 0, "w0": 0})


def test_output_times():
    assert magint.dynamics.integrators.output_times(1, 0.25) == approx([0, 0.25, 0.5, 0.75, 1])
    assert magint.dynamics.integrators.output_times(1, 0.3) == approx([0, 0.3, 0.6, 0.9, 1])
    with raises(ConfigError):
        magint.dynamics.integrators.output_times(0, 0.1)
    with raises(ConfigError):
        magint.dynamics.integrators.output_times(1, -0.1)


def test_free_motion(free):
    traj = integrate(free, (1, 0, 0, 0, 1, "1/2"), 2, dt=0.5)
    df = traj.to_frame()
    assert list(df["t"]) == approx([0, 0.5, 1, 1.5, 2])
    assert df["x"].to_numpy() == approx(np.ones(5), abs=1e-9)
    assert df["y"].to_numpy() == approx(df["t"].to_numpy(), abs=1e-9)
    assert df["z"].to_numpy() == approx(df["t"].to_numpy() / 2, abs=1e-9)
    assert df["H"].to_numpy() == approx(np.full(5, 0.625))
    assert df["LZ"].to_numpy() == approx(np.ones(5))


def test_symbolic_parameters_cannot_be_simulated():
    with raises(ConfigError):
        integrate(build_system("CLASS_III"), (1, 0, 0, 0, 1, 0), 1)


def test_unknown_method(free):
    with raises(ConfigError):
        integrate(free, (1, 0, 0, 0, 1, 0), 1, method="euler")


def test_start_inside_excluded_region(free):
    with raises(IntegrationError) as info:
        integrate(free, (0.0005, 0, 0, 0, 1, 0), 1)
    assert info.value.t == 0.0


def test_initial_condition_size(free):
    with raises(ConfigError):
        integrate(free, (1, 0, 0, 0, 1), 1)


def test_kinetic_momenta_are_converted(larmor):
    eom = magint.dynamics.equations_of_motion(larmor)
    # A = (-B y/2, B x/2, 0) in the ray gauge
    assert eom.initial_state((1, 0, 0, 0, 0, 0)) == approx([1, 0, 0, 0, -1, 0])
    assert eom.initial_state((1, 0, 0, 0, 0, 0), kinetic=False) == approx([1, 0, 0, 0, 0, 0])


def test_larmor_orbit(larmor):
    period = 2 * sympy.pi / LARMOR_FIELD
    traj = integrate(larmor, (0, 0, 0, 1, 0, 0), period, dt=0.05)
    df = traj.to_frame()
    radius = 1 / LARMOR_FIELD
    assert np.hypot(df["x"], df["y"] - radius).to_numpy() == approx(
        np.full(len(df), radius), abs=1e-7
    )
    assert df["x"].iloc[-1] == approx(0, abs=1e-7)
    assert df["y"].iloc[-1] == approx(0, abs=1e-7)
    assert df["z"].to_numpy() == approx(np.zeros(len(df)), abs=1e-12)
    assert traj.conserved_columns == ["H", "X1", "X2", "P3"]


@mark.parametrize("method", ["rk45", "dop853"])
def test_larmor_conservation(larmor, method):
    traj = integrate(larmor, (0, 0, 0, 1, 0, "1/2"), 5, method=method, dt=0.1)
    report = magint.dynamics.conservation_report(traj, rerun=False)
    assert list(report["quantity"]) == ["H", "X1", "X2", "P3"]
    assert (report["drift"] < 1e-8).all()
    assert report["ratio"].isna().all()


def _midpoint_error(system, dt):
    t = 1.0
    traj = integrate(system, (0, 0, 0, 1, 0, 0), t, method="implicit_midpoint", dt=dt)
    last = traj.to_frame().iloc[-1]
    B = LARMOR_FIELD
    exact = (np.sin(B * t) / B, (1 - np.cos(B * t)) / B)
    return np.hypot(last["x"] - exact[0], last["y"] - exact[1]), traj


def test_implicit_midpoint_is_second_order(larmor):
    coarse, traj = _midpoint_error(larmor, 0.1)
    fine, _ = _midpoint_error(larmor, 0.05)
    assert 3.5 < coarse / fine < 4.5
    # quadratic invariants are preserved by the midpoint rule
    H = traj.to_frame()["H"]
    assert np.max(np.abs(H - H.iloc[0])) < 1e-12
    assert traj.stats["steps"] == 10


def test_conservation_report_rerun(free):
    traj = integrate(free, (1, 0, 0, 0, 1, 1), 3, dt=0.1)
    report = magint.dynamics.conservation_report(traj)
    assert list(report.columns) == ["quantity", "initial", "drift", "rerun_drift", "ratio"]
    assert list(report["quantity"]) == ["H", "PZ", "LZ"]
    assert report.set_index("quantity").loc["PZ", "initial"] == approx(1)
    assert (report["drift"] < 1e-9).all()


def test_csv_is_reproducible(free):
    outputs = []
    for _ in range(2):
        buf = io.StringIO()
        integrate(free, (1, 0, 0, 0, 1, "1/2"), 1, dt=0.25).write_csv(buf)
        outputs.append(buf.getvalue())
    assert outputs[0] == outputs[1]
    lines = outputs[0].split("\n")
    assert lines[0] == "t,x,y,z,p1,p2,p3,H,PZ,LZ"
    assert lines[1].startswith("0,1,0,0,0,1,0.5,")
    assert "\r" not in outputs[0]
    assert len(lines) == 7 and lines[-1] == ""


def test_json_samples(free):
    d = integrate(free, (1, 0, 0, 0, 1, 0), 1, dt=0.5).to_dict()
    assert d["system"] == "CLASS_III"
    assert d["params"] == {"bphi": "0", "w0": "0"}
    assert d["samples"]["t"] == approx([0, 0.5, 1])
    assert d["options"]["method"] == "rk45"


def test_gnuplot_block(free):
    traj = integrate(free, (1, 0, 0, 0, 1, 0), 1, dt=0.5)
    block = magint.dynamics.plots.gnuplot_block(traj)
    assert block.startswith("# x y z\n1 0 0\n")
    assert block.endswith("\n\n")
    assert len(block.strip().split("\n")) == 4


def test_svg(free):
    traj = integrate(free, (1, 0, 0, 0, 1, 1), 1, dt=0.1)
    first, second = io.StringIO(), io.StringIO()
    traj.write_svg(first)
    traj.write_svg(second)
    assert "<svg" in first.getvalue()
    assert first.getvalue() == second.getvalue()


def test_classify_escaping(free):
    traj = integrate(free, (1, 0, 0, 0, 0, 1), 20, dt=0.1)
    result = magint.dynamics.classify_z_extent(traj)
    assert result["verdict"] == ESCAPING
    assert result["window"] == approx(1.0)
    assert result["bound"] == approx(10.0)
    assert 10.0 <= result["escape_time"] <= 10.2
    assert result["z_max"] == approx(20.0)


def test_classify_confined(free):
    traj = integrate(free, (1, 0, 0, 0, 1, 0), 20, dt=0.1)
    result = magint.dynamics.classify_z_extent(traj)
    assert result["verdict"] == CONFINED
    assert result["escape_time"] is None
    assert result["z_range"] == approx(0.0, abs=1e-12)


@mark.slow
def test_branch_extents():
    params, ic, _ = build_system("ELLIPTIC_A_ZERO").preset("confined")
    params = dict(params, alpha2=2)
    df = magint.dynamics.branch_extents("ELLIPTIC_A_ZERO", params, ic, 5, eps="both")
    assert list(df["branch"]) == [-1, 1]
    assert set(df["verdict"]) <= {ESCAPING, CONFINED}


def test_preset_options():
    system = build_system("ELLIPTIC_A_ZERO")
    for preset in ("escaping", "confined"):
        assert system.preset_options(preset) == {"method": "dop853", "kinetic": False}
    with raises(ConfigError):
        system.preset_options("sideways")
    with raises(ConfigError):
        build_system("CLASS_III").preset("escaping")


def test_simulate_preset_uses_preset_options():
    traj = magint.dynamics.simulate_preset("ELLIPTIC_A_ZERO", "confined", t_end=0.1)
    assert traj.options["method"] == "dop853"
    # canonical momenta are taken as given
    assert traj.states[0][3:] == approx([1, 0, 1])
    assert traj.states[0][:3] == approx([np.pi, -np.pi, np.pi / 2])
    traj = magint.dynamics.simulate_preset("ELLIPTIC_A_ZERO", "confined", t_end=0.1, method="rk45")
    assert traj.options["method"] == "rk45"


def test_elliptic_gauge_completes_the_square():
    X2 = magint.bracket.build_observable(
        build_system("ELLIPTIC_A_ZERO").integral("X2"), "canonical"
    )
    assert is_zero(X2.coeff((0, 0, 2)) - 1)
    assert is_zero(X2.coeff((0, 0, 1)))


@fixture(scope="module")
def elliptic():
    params, _, _ = build_system("ELLIPTIC_A_ZERO").preset("confined")
    return build_system("ELLIPTIC_A_ZERO", params)


PHASE_POINT = (0.3, -0.5, 0.7, 0.2, 0.4, -0.1)


def test_equations_of_motion_match_hamiltonian_differences(elliptic):
    eom = magint.dynamics.equations_of_motion(elliptic)
    names = [str(v) for v in eom.names]
    h = 1e-5

    def H(pt):
        return magint.expr.eval_numeric(eom.hamiltonian, dict(zip(names, pt)))

    grad = []
    for k in range(6):
        up, down = list(PHASE_POINT), list(PHASE_POINT)
        up[k] += h
        down[k] -= h
        grad.append((H(up) - H(down)) / (2 * h))
    expected = grad[3:] + [-g for g in grad[:3]]
    assert eom(0.0, np.array(PHASE_POINT)) == approx(expected, rel=1e-6, abs=1e-6)


@mark.slow
def test_trajectory_is_gauge_independent(elliptic):
    shifted = copy.copy(elliptic)
    x, y, z = elliptic.chart.coords
    shifted.A = magint.forms.gauge_shift(elliptic.A, x * y * z + x**2 - 3 * z)
    ic = (1, -1, "1/2", "1/2", 0, 1)
    runs = [
        integrate(s, ic, 5, method="dop853", rtol=1e-11, atol=1e-13, dt=0.5)
        for s in (elliptic, shifted)
    ]
    assert runs[0].states[:, :3] == approx(runs[1].states[:, :3], abs=1e-7)
    assert not runs[0].states[:, 3:] == approx(runs[1].states[:, 3:], abs=1e-3)


@mark.slow
def test_endpoints_agree_across_tolerances():
    ends = [
        magint.dynamics.simulate_preset(
            "ELLIPTIC_A_ZERO", "escaping", t_end=50, rtol=rtol, atol=rtol / 100
        ).states[-1]
        for rtol in (1e-10, 1e-11)
    ]
    assert ends[0] == approx(ends[1], rel=1e-7, abs=1e-7)


@mark.slow
def test_perturbed_potential_breaks_x1(elliptic):
    x = elliptic.chart.coords[0]
    perturbed = copy.copy(elliptic)
    perturbed.W = elliptic.W + x / 100
    ic = (1, -1, "1/2", "1/2", 0, 1)
    reports = [
        magint.dynamics.conservation_report(
            integrate(s, ic, 10, method="dop853", rtol=1e-11, atol=1e-13), rerun=False
        ).set_index("quantity")
        for s in (elliptic, perturbed)
    ]
    # H is still conserved; X1 no longer is
    assert reports[1].loc["H", "drift"] < 1e-8
    assert reports[0].loc["X1", "drift"] < 1e-8
    assert reports[1].loc["X1", "drift"] > 1e-5
    assert reports[1].loc["X1", "drift"] > 1000 * reports[0].loc["X1", "drift"]


def test_adaptive_counts_rejected_steps():
    def kick(t, y):
        return np.array([0.0 if t < 1 else 1000.0])

    states, stats = magint.dynamics.integrators.adaptive(kick, np.zeros(1), np.array([0.0, 2.0]))
    assert stats["rejected"] >= 1
    # two evaluations to start, six per RK45 attempt
    assert stats["nfev"] == 2 + 6 * (stats["steps"] + stats["rejected"])
    assert states[-1][0] == approx(1000.0, rel=1e-3)


def test_adaptive_counts_dop853_attempts():
    _, stats = magint.dynamics.integrators.adaptive(
        lambda t, y: -y, np.ones(1), np.array([0.0, 1.0]), method="dop853"
    )
    assert stats["nfev"] == 2 + 12 * (stats["steps"] + stats["rejected"])


@mark.slow
def test_preset_verdicts():
    results = {}
    for preset, verdict in (("escaping", ESCAPING), ("confined", CONFINED)):
        traj = magint.dynamics.simulate_preset("ELLIPTIC_A_ZERO", preset)
        results[preset] = magint.dynamics.classify_z_extent(traj)
        assert results[preset]["verdict"] == verdict
        report = magint.dynamics.conservation_report(traj, rerun=False)
        assert (report["drift"] < 1e-8).all()
    assert results["escaping"]["z_range"] >= 5 * results["confined"]["z_range"]
