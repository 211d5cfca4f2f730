import json

import pandas as pd
import sympy
from pytest import mark, raises

import magint
from magint.catalog import build_system, verify_system
from magint.errors import ConfigError, ConstraintError, NormalFormError, UnknownSystemError

x, y, a = sympy.symbols("x y a")


def test_list_systems():
    df = magint.catalog.list_systems()
    assert list(df.columns) == ["id", "chart", "title", "anchors", "params", "presets"]
    assert tuple(df["id"]) == magint.catalog.SYSTEM_IDS
    assert "ELLIPTIC_A_ZERO" in df["id"].values
    row = df.set_index("id").loc["CD_ZERO_LEADING"]
    assert row["chart"] == "cylindrical"
    assert df.set_index("id").loc["ELLIPTIC_A_ZERO", "presets"] == "confined,escaping"
    assert (df["anchors"] != "").all()
    assert build_system("CLASS_III").anchors == (
        "prolate or oblate spheroidal case: surviving system and its first-order integrals",
    )


def test_build_system_docstring_lists_systems():
    for system_id in magint.catalog.SYSTEM_IDS:
        assert system_id in build_system.__doc__


def test_unknown_system():
    with raises(UnknownSystemError) as info:
        build_system("NO_SUCH_ID")
    assert "unknown system" in str(info.value)
    with raises(KeyError):
        magint.catalog.descriptor("NO_SUCH_ID")


def test_unknown_parameter():
    with raises(ConfigError):
        build_system("CLASS_III", {"gamma": 1})


@mark.parametrize(
    "system_id, params",
    [
        ("ELLIPTIC_A_NONZERO", {"a": 0}),
        ("ELLIPTIC_A_ZERO", {"eps": 2}),
        ("ELLIPTIC_A_ZERO", {"alpha1": 1, "alpha2": 1, "eps": 1}),
        ("SPECIAL_FIRST_ORDER", {"a": "0"}),
    ],
)
def test_constraints(system_id, params):
    with raises(ConstraintError):
        build_system(system_id, params)


def test_partially_fixed_constraint_is_deferred():
    system = build_system("ELLIPTIC_A_ZERO", {"alpha1": 1, "alpha2": 1})
    assert "eps" in system.symbols


def test_systems_are_cached():
    assert build_system("CLASS_III") is build_system("CLASS_III")
    assert build_system("CLASS_III", {"bphi": 1}) is not build_system("CLASS_III")


def test_parameter_values_are_exact():
    system = build_system("CLASS_III", {"bphi": 0.1, "w0": "1/3"})
    assert system.params["bphi"] == sympy.Rational(1, 10)
    assert system.params["w0"] == sympy.Rational(1, 3)
    assert system.is_numeric
    assert build_system("CLASS_III", {"bphi": 2}).symbols == ["w0"]


def test_class_iii_structure():
    system = build_system("CLASS_III")
    bphi = sympy.Symbol("bphi")
    assert system.B == magint.forms.TwoForm([0, 0, bphi])
    assert [spec.label for spec in system.integrals] == ["PZ", "LZ"]
    assert magint.forms.exterior_derivative(system.A) == system.B
    assert set(system.observables()) == {"H", "PZ", "LZ"}


def test_derived_integrals_come_first():
    system = build_system("LIMIT_STANDARD")
    assert [spec.label for spec in system.integrals] == ["X1", "X2", "P3"]


def test_to_json():
    d = json.loads(build_system("CLASS_III", {"bphi": 2}).to_json())
    assert d["id"] == "CLASS_III"
    assert d["params"] == {"bphi": "2", "w0": "symbolic"}
    assert d["B"] == ["0", "0", "2"]


def test_presets():
    system = build_system("ELLIPTIC_A_ZERO")
    params, ic, t = system.preset("escaping")
    assert params["beta2"] == sympy.Rational(-1, 7)
    assert ic[0] == sympy.pi and ic[1] == -sympy.pi
    assert t == 150
    _, ic, t = system.preset("confined")
    assert ic[2] == sympy.pi / 2 and t == 50
    with raises(ConfigError):
        system.preset("fig3")


def test_z_scale():
    params, _, _ = build_system("ELLIPTIC_A_ZERO").preset("escaping")
    assert build_system("ELLIPTIC_A_ZERO", params).z_scale() == 2 * sympy.pi
    params = dict(params, eps=1, alpha2=2)
    assert build_system("ELLIPTIC_A_ZERO", params).z_scale() == 1
    assert build_system("CLASS_III").z_scale() == 1


def test_excluded_axis():
    system = build_system("CLASS_III")
    frame = pd.DataFrame({"x": [0.0, 1.0, 0.0005], "y": [0.0, 0.0, 0.0]})
    assert list(system.excluded(frame)) == [True, False, True]
    assert list(build_system("ELLIPTIC_A_NONZERO").excluded(frame)) == [False] * 3


def test_limit_part():
    limit_part = magint.catalog.systems.limit_part
    assert limit_part(2 + a * y + a**2 * x, a) == 2
    assert limit_part((x + a * y) ** 2, a) == x**2
    with raises(NormalFormError):
        limit_part(x / a + 1, a)


def test_class_iii_symbolic():
    report = verify_system("CLASS_III")
    assert report.passed
    text = report.to_text()
    assert text.startswith("CLASS_III (symbolic)\n")
    assert "  brackets: ok, 3/3 brackets zero\n" in text
    assert text.endswith("PASSED\n")


def test_class_iii_numeric():
    report = verify_system("CLASS_III", mode="numeric", seed=7, samples=200)
    assert report.passed
    assert report.mode == "numeric"
    frame = report.to_frame()
    assert frame["passed"].all()
    assert set(frame["claim"]) == {"closed", "gauge", "brackets"}


def test_numeric_is_reproducible():
    first = verify_system("CLASS_III", {"bphi": 3}, mode="numeric", seed=11, samples=100)
    second = verify_system("CLASS_III", {"bphi": 3}, mode="numeric", seed=11, samples=100)
    assert first.to_dict() == second.to_dict()


def test_fixed_parameters_are_reported():
    report = verify_system("CLASS_III", {"bphi": 2})
    assert report.params == {"bphi": "2"}
    assert report.passed


def test_unknown_mode():
    with raises(ConfigError):
        verify_system("CLASS_III", mode="exact")


def test_report_round_trip():
    report = verify_system("CLASS_III")
    again = magint.catalog.VerificationReport.from_dict(report.to_dict())
    assert again.to_text() == report.to_text()
    assert json.loads(report.to_json())["passed"] is True


def test_broken_claim_is_reported():
    system = build_system("CLASS_III", {"bphi": 1})
    verifier = magint.catalog.verify.SystemVerifier(system)
    system_claims = system.claims
    try:
        system.claims = system_claims + [{"kind": "nonsense"}]
        results = verifier.run()
    finally:
        system.claims = system_claims
    assert [r.passed for r in results] == [True, True, True, False]
    assert "unknown claim kind" in results[-1].summary()


@mark.slow
@mark.parametrize(
    "system_id",
    ["ELLIPTIC_A_NONZERO", "ELLIPTIC_A_ZERO", "LIMIT_STANDARD", "SPECIAL_FIRST_ORDER"],
)
def test_catalog_symbolic(system_id):
    report = verify_system(system_id)
    assert report.passed, report.to_text()


@mark.slow
def test_cd_zero_leading():
    report = verify_system("CD_ZERO_LEADING")
    assert report.passed, report.to_text()


@mark.slow
def test_elliptic_a_zero_numeric():
    report = verify_system("ELLIPTIC_A_ZERO", mode="numeric", seed=3, samples=200)
    assert report.passed, report.to_text()


@mark.slow
def test_erratum_is_confirmed():
    report = verify_system("SPECIAL_FIRST_ORDER")
    (erratum,) = [r for r in report.results if r.kind == "erratum"]
    assert erratum.passed
    assert len(erratum.checks) == 2


@mark.slow
def test_printed_integral_erratum():
    report = verify_system("ELLIPTIC_A_NONZERO")
    (erratum,) = [r for r in report.results if r.kind == "erratum"]
    assert erratum.passed, report.to_text()
    assert len(erratum.checks) == 1


@mark.slow
def test_printed_field_erratum():
    report = verify_system("CD_ZERO_LEADING")
    (erratum,) = [r for r in report.results if r.kind == "erratum"]
    assert erratum.passed, report.to_text()
    assert len(erratum.checks) == 3


def test_printed_integral_keeps_shipped_components():
    system = build_system("ELLIPTIC_A_NONZERO")
    (claim,) = [c for c in system.claims if c["kind"] == "erratum"]
    printed = magint.catalog.verify.SystemVerifier(system)._printed_integral(claim["integral"])
    shipped = system.integral("X1")
    assert printed.label == "X1_printed"
    assert printed.s[0] == shipped.s[0]
    assert printed.s[1] == shipped.s[1]
    assert printed.gamma == shipped.gamma
    a, beta1, c, d = sympy.symbols("a beta1 c d")
    difference = printed.s[2] - shipped.s[2] - (1 - a) * beta1 * (c * y - d * x)
    assert magint.expr.is_zero(difference)


def test_report_cache_tracks_catalog_content(tmp_path, monkeypatch):
    monkeypatch.setattr(magint.decorators.appdirs, "user_cache_dir", lambda *args: str(tmp_path))
    with magint.option_context(cache=True):
        verify_system("CLASS_III", {"bphi": 1})
        verify_system("CLASS_III", {"bphi": 1})
        assert len(list(tmp_path.iterdir())) == 1
        monkeypatch.setattr(magint.catalog.FieldSystem, "to_json", lambda self: "edited")
        verify_system("CLASS_III", {"bphi": 1})
        assert len(list(tmp_path.iterdir())) == 2


@mark.slow
def test_verify_all():
    reports = magint.catalog.verify_all(n_jobs=2)
    assert [r.system_id for r in reports] == list(magint.catalog.SYSTEM_IDS)
    assert all(r.passed for r in reports)
