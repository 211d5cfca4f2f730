"""Published intermediate results, checked by substituting solution families.

A fixture is one of three kinds:

printed
    Equations transcribed in the expression grammar. The ``family`` bodies
    replace the declared unknown functions and every equation must reduce to
    zero (or to its ``equals`` value, or have a vanishing ``coefficient``).
compare
    Printed determining equations compared with the ones this package
    generates for a leading-order class, under one overall sign per bracket.
    An equation marked ``negated`` is printed with the opposite sign of its
    set; one marked ``substitute`` has the family inserted on both sides.
generated
    A family substituted into the generated determining equations of the
    requested degrees; the family may come from a catalog system.
"""
import functools
import json
import logging
import os

import pandas as pd
import sympy
from sympy.core.function import AppliedUndef

import magint
from magint.errors import ConfigError, MagintError, NormalFormError, UnknownFixtureError

logger = logging.getLogger(__name__)

FIXTURES_FILENAME = os.path.join(
    os.path.dirname(os.path.realpath(__file__)), "data", "fixtures.json"
)

MAX_FAMILY_PASSES = 10


@functools.lru_cache(maxsize=None)
def _descriptors():
    with open(FIXTURES_FILENAME, "r", encoding="utf-8") as f:
        data = json.load(f)
    if data.get("version") != 1:
        raise ConfigError(f"unsupported fixture file version {data.get('version')}")
    return {d["id"]: d for d in data["fixtures"]}


def apply_family(e, family):
    """Replaces unknown-function applications by their family bodies.

    :param e: a sympy expression.
    :param family: mapping from function name to ``(args, body)``, where
        `body` is written in the symbols `args`.
    :returns: the substituted expression with derivatives evaluated.
    :raises NormalFormError: if the family keeps referring to itself.
    """
    for _ in range(MAX_FAMILY_PASSES):
        calls = [f for f in e.atoms(AppliedUndef) if f.func.__name__ in family]
        if not calls:
            return e.doit()
        mapping = {}
        for call in calls:
            args, body = family[call.func.__name__]
            mapping[call] = body.xreplace(dict(zip(args, call.args)))
        e = e.xreplace(mapping).doit()
    raise NormalFormError("solution family does not terminate")


def _residual_text(e):
    try:
        return magint.expr.print_expr(e)
    except Exception:
        return str(e)


class FixtureCheck(object):

    """Outcome of one fixture equation."""

    def __init__(self, label, passed, residual=None, error=None):
        self.label = label
        self.passed = passed
        self.residual = residual
        self.error = error

    def __repr__(self):
        return "FixtureCheck({!r}, passed={})".format(self.label, self.passed)

    def to_dict(self):
        return {
            "label": self.label,
            "passed": self.passed,
            "residual": _residual_text(self.residual) if self.residual is not None else None,
            "error": self.error,
        }


class FixtureReport(object):

    """All checks of a fixture."""

    def __init__(self, fixture_id, checks):
        self.fixture_id = fixture_id
        self.checks = list(checks)

    def __repr__(self):
        return "FixtureReport({!r}, {}/{} passed)".format(
            self.fixture_id, self.passed_count, len(self.checks)
        )

    @property
    def passed_count(self):
        return sum(1 for c in self.checks if c.passed)

    @property
    def passed(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    def to_frame(self):
        rows = [dict(c.to_dict(), fixture=self.fixture_id) for c in self.checks]
        return pd.DataFrame(rows, columns=["fixture", "label", "passed", "residual", "error"])

    def to_dict(self):
        return {
            "fixture": self.fixture_id,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_text(self):
        lines = []
        for c in self.checks:
            status = "ok" if c.passed else "FAIL"
            line = f"{self.fixture_id} {c.label}: {status}"
            if c.error:
                line += f" ({c.error})"
            elif not c.passed and c.residual is not None:
                line += f" residual {_residual_text(c.residual)}"
            lines.append(line)
        lines.append(f"{self.fixture_id}: {self.passed_count}/{len(self.checks)} equations hold")
        return "\n".join(lines) + "\n"


class LeadingOrderFixture(object, metaclass=magint.decorators.Cached):

    """A fixture from the packaged fixture file."""

    def __init__(self, fixture_id):
        try:
            desc = _descriptors()[fixture_id]
        except KeyError:
            raise UnknownFixtureError(fixture_id) from None
        self.id = fixture_id
        self.kind = desc["kind"]
        self.title = desc.get("title", "")
        self.description = desc.get("description", "")
        self.functions = {k: tuple(v) for k, v in desc.get("functions", {}).items()}
        self._desc = desc
        if self.kind not in ("printed", "compare", "generated"):
            raise ConfigError(f"fixture {fixture_id} has unknown kind {self.kind}")

        self.names = {}
        for name, text in desc.get("let", {}).items():
            self.names[name] = self.parse(text)
        logger.debug("loaded fixture %s", fixture_id)

    def __repr__(self):
        return "LeadingOrderFixture({!r})".format(self.id)

    def parse(self, text):
        return magint.expr.parse_expr(text, functions=self.functions, names=self.names)

    @property
    def chart(self):
        return magint.forms.chart(self._desc.get("chart", "cartesian"))

    def family(self):
        """The solution family as ``{name: (args, body)}``."""
        if "system" in self._desc:
            return self._system_family()
        result = {}
        for name, text in self._desc.get("family", {}).items():
            args = self.functions.get(name)
            if args is None:
                raise ConfigError(f"fixture {self.id}: family member {name} is not declared")
            result[name] = (tuple(sympy.Symbol(a) for a in args), self.parse(text))
        return result

    def _system_family(self):
        system = magint.catalog.build_system(self._desc["system"])
        if system.chart != self.chart:
            raise ConfigError(f"fixture {self.id}: chart differs from {system.id}")
        coords = system.chart.coords
        result = {name: (coords, comp) for name, comp in zip(system.chart.field_names, system.B)}
        result["W"] = (coords, system.W)
        for k, label in enumerate(("X1", "X2"), start=1):
            spec = system.integral(label)
            for j, sj in enumerate(spec.s, start=1):
                result[f"s{k}{j}"] = (coords, sj)
            result[f"m{k}"] = (coords, spec.m)
        return result

    def consts(self):
        return {k: magint.expr.parse_expr(v) for k, v in self._desc.get("consts", {}).items()}

    def check(self):
        """Runs every equation of the fixture.

        :returns: a FixtureReport.
        """
        logger.info("checking fixture %s (%s)", self.id, self.kind)
        if self.kind == "printed":
            checks = self._check_printed()
        elif self.kind == "compare":
            checks = self._check_compare()
        else:
            checks = self._check_generated()
        report = FixtureReport(self.id, checks)
        logger.info("%r", report)
        return report

    def _equations(self):
        for k, eq in enumerate(self._desc.get("equations", []), start=1):
            if isinstance(eq, str):
                eq = {"label": f"eq{k}", "expr": eq}
            yield eq

    def _guarded(self, label, fun):
        try:
            residual = fun()
            passed = magint.expr.is_zero(residual)
        except MagintError as exc:
            logger.warning("fixture %s %s: %s", self.id, label, exc)
            return FixtureCheck(label, False, error=str(exc))
        return FixtureCheck(label, passed, residual)

    def _check_printed(self):
        family = self.family()
        expand = bool(self._desc.get("expand_atoms", False))
        checks = []
        for eq in self._equations():

            def residual(eq=eq):
                e = apply_family(self.parse(eq["expr"]), family)
                if "equals" in eq:
                    e = e - apply_family(self.parse(eq["equals"]), family)
                if "coefficient" in eq:
                    var, power = eq["coefficient"]
                    e = sympy.expand(e).coeff(sympy.Symbol(var), int(power))
                return e

            checks.append(self._guarded(eq["label"], residual))
            if expand:
                checks.append(
                    self._guarded(
                        eq["label"] + " (expanded)",
                        lambda eq=eq: magint.expr.expand_atoms(residual(eq)),
                    )
                )
        return checks

    def _check_compare(self):
        sets = magint.bracket.detgen(self._desc["class"], self.chart.name, **self.consts())
        family = self.family()
        equations = list(self._equations())

        def sides(eq):
            printed = self.parse(eq["expr"])
            generated = sets[int(eq["set"])][eq["monomial"]]
            if eq.get("negated", False):
                generated = -generated
            if eq.get("substitute", False):
                printed = apply_family(printed, family)
                generated = apply_family(generated, family)
            return printed, generated

        signs = {}
        for index in sorted({int(eq["set"]) for eq in equations}):
            members = [eq for eq in equations if int(eq["set"]) == index]
            signs[index] = self._set_sign(members, sides)
            logger.debug("fixture %s: set %d compared with sign %+d", self.id, index, signs[index])

        checks = []
        for eq in equations:

            def residual(eq=eq):
                printed, generated = sides(eq)
                return printed - signs[int(eq["set"])] * generated

            checks.append(self._guarded(eq["label"], residual))
        return checks

    def _set_sign(self, members, sides):
        """The overall sign, +1 or -1, under which most equations of one set
        match; ties go to +1."""
        votes = {1: 0, -1: 0}
        for eq in members:
            try:
                printed, generated = sides(eq)
                for sign in votes:
                    if magint.expr.is_zero(printed - sign * generated):
                        votes[sign] += 1
            except MagintError:
                continue
        return 1 if votes[1] >= votes[-1] else -1

    def _check_generated(self):
        sets = magint.bracket.detgen(self._desc["class"], self.chart.name, **self.consts())
        degrees = set(self._desc.get("degrees", [0, 1, 2]))
        family = self.family()
        checks = []
        for deteqs in sets:
            for monom, e in deteqs:
                if sum(monom) not in degrees:
                    continue
                label = f"{deteqs.provenance} {magint.bracket.monomial_tag(monom, self.chart)}"
                checks.append(self._guarded(label, lambda e=e: apply_family(e, family)))
        return checks

    def to_dict(self):
        return {
            "id": self.id,
            "kind": self.kind,
            "title": self.title,
            "description": self.description,
        }


def load_fixture(fixture_id):
    return LeadingOrderFixture(fixture_id)


def check_fixture(fixture_id):
    """Checks the fixture `fixture_id` and returns its FixtureReport."""
    return load_fixture(fixture_id).check()


def list_fixtures():
    """Returns a DataFrame of the packaged fixtures: id, kind and title."""
    rows = [
        {"id": k, "kind": d["kind"], "title": d.get("title", "")}
        for k, d in _descriptors().items()
    ]
    return pd.DataFrame(rows, columns=["id", "kind", "title"])


FIXTURE_IDS = tuple(_descriptors())
