import functools
import json
import logging
import os

import numpy as np
import pandas as pd
import sympy

import magint
from magint.errors import (
    ConfigError,
    ConstraintError,
    GaugeError,
    NormalFormError,
    UnknownSystemError,
)

logger = logging.getLogger(__name__)

SYSTEMS_FILENAME = os.path.join(os.path.dirname(os.path.realpath(__file__)), "data", "systems.json")

CONSTRAINT_TESTS = {
    "nonzero": (lambda v: v != 0, "must be nonzero"),
    "positive": (lambda v: v > 0, "must be positive"),
    "nonnegative": (lambda v: v >= 0, "must be non-negative"),
    "sign": (lambda v: v in (-1, 1), "must be -1 or 1"),
}


@functools.lru_cache(maxsize=None)
def _descriptors():
    with open(SYSTEMS_FILENAME, "r", encoding="utf-8") as f:
        data = json.load(f)
    if data.get("version") != 1:
        raise ConfigError(f"unsupported system descriptor version {data.get('version')}")
    return {d["id"]: d for d in data["systems"]}


def descriptor(system_id):
    """The raw JSON descriptor of a catalog system."""
    try:
        return _descriptors()[system_id]
    except KeyError:
        raise UnknownSystemError(system_id) from None


def _to_exact(name, value):
    if isinstance(value, str):
        return magint.expr.parse_expr(value)
    if isinstance(value, bool):
        raise ConfigError(f"invalid value {value!r} for {name}")
    if isinstance(value, float):
        # decimal text of the float, so 0.1 becomes 1/10
        return sympy.Rational(repr(value))
    return sympy.sympify(value)


def _bind_params(desc, params):
    declared = desc["params"]
    unknown = sorted(set(params) - set(declared))
    if unknown:
        raise ConfigError(f"unknown parameters for {desc['id']}: {', '.join(unknown)}")
    values = {}
    for name, default in declared.items():
        value = params.get(name, default)
        if isinstance(value, str) and value == "symbolic":
            values[name] = sympy.Symbol(name)
        else:
            values[name] = _to_exact(name, value)
    return values


def _check_constraints(desc, values):
    for constraint in desc.get("constraints", []):
        test, message = CONSTRAINT_TESTS[constraint["test"]]
        if "param" in constraint:
            label = constraint["param"]
            value = values[label]
        else:
            label = constraint["expr"]
            value = magint.expr.parse_expr(constraint["expr"], names=values)
        if value.free_symbols:
            continue
        if not test(value):
            raise ConstraintError(f"{desc['id']}: {label} = {value} {message}")


def limit_part(e, v):
    """The ``v^0`` coefficient of an expression that is a Laurent polynomial in `v`.

    :raises NormalFormError: if a negative power of `v` survives.
    """
    parts = sympy.collect(sympy.expand(e), v, evaluate=False)
    result = sympy.S.Zero
    for key, coeff in parts.items():
        if key == 1:
            power = 0
        elif key == v:
            power = 1
        elif key.is_Pow and key.base == v and key.exp.is_Integer:
            power = int(key.exp)
        else:
            raise NormalFormError(f"{key} is not an integer power of {v}", factor=key)
        if power < 0 and not magint.expr.is_zero(coeff):
            raise NormalFormError(f"{v}^{power} survives in the {v} -> 0 limit", factor=coeff)
        if power == 0:
            result += coeff
    return result


class FieldSystem(object, metaclass=magint.decorators.Cached):

    """A catalog entry: field, potential, gauge, integrals and claims.

    Parameters left out of `params` stay symbolic; numeric values are exact
    (strings in the expression grammar, ints, rationals, or floats read by
    their decimal text).
    """

    _immutable = True

    def __init__(self, system_id, params=None):
        desc = descriptor(system_id)
        self.id = system_id
        self.title = desc.get("title", "")
        self.anchors = tuple(desc.get("anchors", ()))
        self.description = desc.get("description", "")
        self.chart = magint.forms.chart(desc["chart"])
        self.leading_only = bool(desc.get("leading_only", False))
        self.params = _bind_params(desc, dict(params or {}))
        _check_constraints(desc, self.params)
        self.claims = list(desc.get("claims", []))
        self.presets = dict(desc.get("presets", {}))
        self._desc = desc

        self.names = dict(self.params)
        for name, text in desc.get("let", {}).items():
            self.names[name] = self.parse(text)

        self.B = magint.forms.TwoForm([self.parse(c) for c in desc["B"]], self.chart)
        self.W = self.parse(desc["W"])
        self.A = self._gauge(desc.get("A"))

        integrals = []
        if "derived_from" in desc:
            integrals.extend(self._derived_integrals(desc["derived_from"]))
        integrals.extend(self.integral_spec(d) for d in desc.get("integrals", []))
        self.integrals = tuple(integrals)
        logger.debug("built %r", self)

    def __repr__(self):
        fixed = {k: v for k, v in self.params.items() if v != sympy.Symbol(k)}
        return "FieldSystem({!r}, {})".format(self.id, fixed)

    def parse(self, text, functions=None):
        """Parses `text` with this system's parameters and aliases bound."""
        return magint.expr.parse_expr(str(text), functions=functions, names=self.names)

    def _gauge(self, components):
        if components is not None:
            return magint.forms.OneForm([self.parse(c) for c in components], self.chart)
        if self.leading_only:
            return None
        try:
            return magint.forms.poincare_gauge(self.B)
        except GaugeError as exc:
            logger.warning("%s has no closed-form gauge: %s", self.id, exc)
            return None

    def integral_spec(self, d):
        """An IntegralSpec from a descriptor entry, in this system's gauge."""

        def table(key):
            return {k: self.parse(v) for k, v in d.get(key, {}).items()}

        return magint.bracket.IntegralSpec(
            alpha=table("alpha"),
            beta=table("beta"),
            gamma=table("gamma"),
            s=[self.parse(v) for v in d.get("s", ["0", "0", "0"])],
            m=self.parse(d.get("m", "0")),
            gauge=self.A,
            chart=self.chart,
            label=d.get("label", ""),
        )

    def _derived_integrals(self, spec):
        source = FieldSystem(spec["system"])
        v = sympy.Symbol(spec["limit"])
        bindings = {k: source.parse(val) for k, val in spec["bindings"].items()}
        own = {sympy.Symbol(k): val for k, val in self.params.items()}

        def part(e):
            return magint.expr.substitute(limit_part(e, v), own)

        derived = []
        for integral in source.integrals:
            sub = integral.subs(bindings)
            derived.append(
                magint.bracket.IntegralSpec(
                    alpha={k: part(e) for k, e in sub.alpha.items()},
                    beta={k: part(e) for k, e in sub.beta.items()},
                    gamma={k: part(e) for k, e in sub.gamma.items()},
                    s=[part(e) for e in sub.s],
                    m=part(sub.m),
                    gauge=self.A,
                    chart=self.chart,
                    label=integral.label,
                )
            )
        logger.info("derived %d integrals of %s from %s", len(derived), self.id, source.id)
        return derived

    @property
    def symbols(self):
        """The parameters that are still symbolic."""
        return sorted(k for k, v in self.params.items() if v.free_symbols)

    @property
    def is_numeric(self):
        return not self.symbols

    def integral(self, label):
        for spec in self.integrals:
            if spec.label == label:
                return spec
        raise KeyError(f"{self.id} has no integral {label}")

    def hamiltonian(self):
        """The covariant Hamiltonian, with the system's gauge attached."""
        return magint.bracket.hamiltonian(self.W, self.chart, gauge=self.A)

    def observables(self, presentation="covariant"):
        """Maps "H" and each integral label to its Observable."""
        H = self.hamiltonian()
        result = {"H": H if presentation == "covariant" else H.canonical()}
        for spec in self.integrals:
            result[spec.label] = magint.bracket.build_observable(spec, presentation)
        return result

    def z_scale(self):
        """The natural z scale: the z period when the system is periodic in z, else 1."""
        period = self._desc.get("z_period")
        if period is None:
            return sympy.S.One
        for name, value in period.get("when", {}).items():
            if self.params[name] != magint.expr.parse_expr(value):
                return sympy.S.One
        return self.parse(period["expr"])

    @property
    def exclusion(self):
        return self._desc.get("exclusion")

    def axis_distance(self, frame):
        """Distance of each row of `frame` to the excluded axis, or None."""
        excl = self.exclusion
        if excl is None:
            return None
        if excl["kind"] != "axis":
            raise ConfigError(f"unknown exclusion kind {excl['kind']}")
        x0, y0 = (magint.expr.eval_batch(self.parse(c), frame) for c in excl["center"])
        x, y = self.chart.coords[:2]
        return np.hypot(frame[str(x)].to_numpy() - x0, frame[str(y)].to_numpy() - y0)

    def excluded(self, frame, margin=None):
        """Boolean mask of rows closer to the excluded axis than `margin`
        (option ``rho_min`` by default)."""
        margin = magint.get_option("rho_min") if margin is None else margin
        rho = self.axis_distance(frame)
        if rho is None:
            return np.zeros(len(frame), dtype=bool)
        return rho < margin

    def preset(self, name):
        """Parameters, initial condition and end time of a preset."""
        p = self._preset(name)
        params = {k: magint.expr.parse_expr(v) for k, v in p["params"].items()}
        ic = [magint.expr.parse_expr(v) for v in p["ic"]]
        return params, ic, magint.expr.parse_expr(p["t"])

    def preset_options(self, name):
        """Keyword arguments for `integrate` bundled with a preset.

        ``kinetic`` is False when the preset gives canonical momenta in the
        system's gauge; the preset's ``integrator`` entries are passed through.
        """
        p = self._preset(name)
        momenta = p.get("momenta", "kinetic")
        if momenta not in ("kinetic", "canonical"):
            raise ConfigError(f"{self.id}: preset {name} has unknown momenta {momenta!r}")
        return dict(p.get("integrator", {}), kinetic=momenta == "kinetic")

    def _preset(self, name):
        try:
            return self.presets[name]
        except KeyError:
            raise ConfigError(
                f"{self.id} has no preset {name}; choose from {sorted(self.presets)}"
            ) from None

    def to_dict(self):
        p = magint.expr.print_expr
        return {
            "id": self.id,
            "chart": self.chart.name,
            "params": {
                k: ("symbolic" if v == sympy.Symbol(k) else p(v)) for k, v in self.params.items()
            },
            "B": [p(c) for c in self.B],
            "W": p(self.W),
            "A": [p(c) for c in self.A] if self.A is not None else None,
            "integrals": [spec.to_dict() for spec in self.integrals],
            "claims": self.claims,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def build_system(system_id, params=None):
    """ Docstring will be filled in by __init__.py """
    return FieldSystem(system_id, dict(params or {}))


def list_systems():
    """Returns a DataFrame of the catalog: id, chart, title, source anchors,
    parameters and presets."""
    rows = []
    for system_id, desc in _descriptors().items():
        rows.append(
            {
                "id": system_id,
                "chart": desc["chart"],
                "title": desc.get("title", ""),
                "anchors": "; ".join(desc.get("anchors", [])),
                "params": ",".join(desc["params"]),
                "presets": ",".join(sorted(desc.get("presets", {}))),
            }
        )
    return pd.DataFrame(rows, columns=["id", "chart", "title", "anchors", "params", "presets"])


SYSTEM_IDS = tuple(_descriptors())
