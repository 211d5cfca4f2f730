"""Checks of the claims attached to each catalog system.

Every claim is checked on its own; a failure in one never stops the others.
In symbolic mode residuals are reduced to normal form, in numeric mode the
unreduced residuals are evaluated at seeded random points and compared with
the size of their terms.
"""
import functools
import hashlib
import itertools
import json
import logging

import joblib
import numpy as np
import pandas as pd
import sympy

import magint
from magint.errors import ConfigError, MagintError

logger = logging.getLogger(__name__)

MODES = ("symbolic", "numeric")
# sampled values of nonzero parameters (and constraint expressions) stay this far from zero
NONZERO_MARGIN = 0.1
AXIS_MARGIN = 0.1


class ClaimResult(object):

    """Outcome of one claim: a list of ``(label, passed, detail)`` checks."""

    def __init__(self, kind, checks=None, error=None):
        self.kind = kind
        self.checks = list(checks or [])
        self.error = error

    def __repr__(self):
        return "ClaimResult({!r}, passed={})".format(self.kind, self.passed)

    @property
    def passed(self):
        return self.error is None and all(passed for _, passed, _ in self.checks)

    def summary(self):
        if self.error is not None:
            return f"error: {self.error}"
        good = sum(1 for _, passed, _ in self.checks if passed)
        if self.kind == "brackets":
            return f"{good}/{len(self.checks)} brackets zero"
        return f"{good}/{len(self.checks)} checks hold"

    def to_dict(self):
        return {
            "kind": self.kind,
            "passed": self.passed,
            "error": self.error,
            "checks": [
                {"label": label, "passed": passed, "detail": detail}
                for label, passed, detail in self.checks
            ],
        }

    @classmethod
    def from_dict(cls, d):
        checks = [(c["label"], c["passed"], c["detail"]) for c in d["checks"]]
        return cls(d["kind"], checks, d["error"])


class VerificationReport(object):

    """The claim results of one system under one set of parameters."""

    def __init__(self, system_id, params, mode, results):
        self.system_id = system_id
        self.params = dict(params)
        self.mode = mode
        self.results = list(results)

    def __repr__(self):
        return "VerificationReport({!r}, {}, passed={})".format(
            self.system_id, self.mode, self.passed
        )

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def to_frame(self):
        """One row per check: system, claim, label, passed, detail."""
        rows = []
        for r in self.results:
            if r.error is not None:
                rows.append([self.system_id, r.kind, "", False, r.error])
            for label, passed, detail in r.checks:
                rows.append([self.system_id, r.kind, label, passed, detail])
        return pd.DataFrame(rows, columns=["system", "claim", "label", "passed", "detail"])

    def to_dict(self):
        return {
            "system": self.system_id,
            "params": self.params,
            "mode": self.mode,
            "passed": self.passed,
            "claims": [r.to_dict() for r in self.results],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        results = [ClaimResult.from_dict(c) for c in d["claims"]]
        return cls(d["system"], d["params"], d["mode"], results)

    def to_text(self):
        lines = [f"{self.system_id} ({self.mode})"]
        for r in self.results:
            status = "ok" if r.passed else "FAIL"
            lines.append(f"  {r.kind}: {status}, {r.summary()}")
            for label, passed, detail in r.checks:
                if not passed:
                    lines.append(f"    {label}: {detail}")
        lines.append("PASSED" if self.passed else "FAILED")
        return "\n".join(lines) + "\n"


def _text(e):
    return magint.expr.print_expr(e)


def _bracket_pairs(observables):
    names = list(observables)
    pairs = [("H", name) for name in names if name != "H"]
    integrals = [name for name in names if name != "H"]
    pairs.extend(itertools.combinations(integrals, 2))
    return pairs


class _Sampler(object):

    """Seeded sample points for the numeric checks of one system."""

    def __init__(self, system, seed=None, samples=None, momenta=False):
        self.system = system
        desc = system._desc
        self.signs = [
            c["param"]
            for c in desc.get("constraints", [])
            if c["test"] == "sign" and c.get("param") in system.symbols
        ]
        self.nonzero = [
            c["param"]
            for c in desc.get("constraints", [])
            if c["test"] in ("nonzero", "positive") and c.get("param") in system.symbols
        ]
        self.positive = [
            c["param"]
            for c in desc.get("constraints", [])
            if c["test"] in ("positive", "nonnegative") and c.get("param") in system.symbols
        ]
        self.expressions = [
            system.parse(c["expr"])
            for c in desc.get("constraints", [])
            if "expr" in c and c["test"] == "nonzero"
        ]
        names = [str(q) for q in system.chart.coords] + list(system.symbols)
        if momenta:
            names += [str(p) for p in system.chart.momenta]
        self.frame = self._signed(
            magint.utils.sample_envs(names, n=samples, seed=seed, exclude=self._exclude)
        )

    def _signed(self, df):
        df = df.copy()
        for name in self.signs:
            df[name] = np.where(df[name] < 0, -1.0, 1.0)
        for name in self.positive:
            df[name] = np.abs(df[name])
        return df

    def _exclude(self, df):
        df = self._signed(df)
        mask = np.zeros(len(df), dtype=bool)
        for name in self.nonzero:
            mask |= np.abs(df[name].to_numpy()) < NONZERO_MARGIN
        for e in self.expressions:
            mask |= np.abs(magint.expr.eval_batch(e, df)) < NONZERO_MARGIN
        if self.system.exclusion is not None:
            mask |= self.system.excluded(df, margin=AXIS_MARGIN)
        return mask


def _scale(e, frame):
    terms = sympy.Add.make_args(e)
    return magint.expr.eval_batch(sum((sympy.Abs(t) for t in terms), sympy.S.Zero), frame)


def _numeric_zero(e, frame, tolerance):
    """Whether `e` vanishes at every row, relative to the size of its terms."""
    e = sympy.sympify(e)
    if e == 0:
        return True, "0"
    values = magint.expr.eval_batch(e, frame)
    bound = tolerance * (1.0 + _scale(e, frame))
    bad = ~(np.abs(values) <= bound)
    if bad.any():
        worst = int(np.argmax(np.abs(values) - bound))
        return False, (
            f"{int(bad.sum())} of {len(frame)} samples fail, "
            f"worst |residual| {abs(values[worst]):.3e}"
        )
    return True, f"max |residual| {np.max(np.abs(values)):.3e}"


def _symbolic_zero(e):
    if magint.expr.is_zero(e):
        return True, "0"
    return False, _text(magint.expr.normal_form(e).as_expr())


class SystemVerifier(object):

    """Runs the claims of a FieldSystem in one mode."""

    def __init__(self, system, mode="symbolic", seed=None, samples=None, tolerance=None):
        if mode not in MODES:
            raise ConfigError(f"unknown verification mode {mode}; choose from {MODES}")
        self.system = system
        self.mode = mode
        self.seed = seed
        self.samples = samples
        self.tolerance = magint.get_option("verify_tolerance") if tolerance is None else tolerance
        self._frames = {}

    def frame(self, momenta=False):
        if momenta not in self._frames:
            self._frames[momenta] = _Sampler(self.system, self.seed, self.samples, momenta).frame
        return self._frames[momenta]

    def zero(self, e, momenta=False):
        if self.mode == "numeric":
            return _numeric_zero(e, self.frame(momenta), self.tolerance)
        return _symbolic_zero(e)

    def run(self):
        results = []
        for claim in self.system.claims:
            kind = claim["kind"]
            check = getattr(self, "check_" + kind, None)
            if check is None:
                results.append(ClaimResult(kind, error=f"unknown claim kind {kind}"))
                continue
            logger.info("%s: checking %s claim (%s)", self.system.id, kind, self.mode)
            try:
                results.append(ClaimResult(kind, check(claim)))
            except (MagintError, KeyError) as exc:
                logger.warning("%s: %s claim failed with %s", self.system.id, kind, exc)
                results.append(ClaimResult(kind, error=str(exc)))
        return results

    # claims

    def check_closed(self, claim):
        passed, detail = self.zero(magint.forms.divergence(self.system.B))
        return [("div B", passed, detail)]

    def check_gauge(self, claim):
        system = self.system
        if system.A is None:
            return [("dA = B", False, "no gauge available")]
        dA = magint.forms.exterior_derivative(system.A)
        checks = []
        for name, a, b in zip(system.chart.field_names, dA, system.B):
            passed, detail = self.zero(a - b)
            checks.append((f"dA = B ({name})", passed, detail))
        for label, text in claim.get("canonical", {}).items():
            X = magint.bracket.build_observable(system.integral(label), "canonical")
            difference = X.as_expr() - system.parse(text)
            passed, detail = self.zero(difference, momenta=True)
            checks.append((f"{label} = {text}", passed, detail))
        return checks

    def _bracket_residuals(self, F, G, degrees):
        normalize = self.mode == "symbolic"
        bracket = magint.bracket.covariant_bracket(F, G, self.system.B, normalize=normalize)
        return {
            magint.bracket.monomial_tag(m, self.system.chart): c
            for m, c in bracket.terms.items()
            if degrees is None or sum(m) in degrees
        }

    def check_brackets(self, claim):
        degrees = claim.get("degrees")
        if degrees is None and self.system.leading_only:
            degrees = [2, 3]
        obs = self.system.observables("covariant")
        checks = []
        for f, g in _bracket_pairs(obs):
            residuals = self._bracket_residuals(obs[f], obs[g], degrees)
            failing = []
            for tag, c in residuals.items():
                passed, detail = self.zero(c)
                if not passed:
                    failing.append(f"{tag}: {detail}")
            checks.append((f"{{{f},{g}}}", not failing, "; ".join(failing) or "0"))
        return checks

    def check_limit(self, claim):
        bindings = {k: self.system.parse(v) for k, v in claim["bindings"].items()}
        checks = []
        for name, comp in zip(self.system.chart.field_names, self.system.B):
            passed, detail = _symbolic_zero(magint.expr.substitute(comp, bindings))
            checks.append((name, passed, detail))
        passed, detail = _symbolic_zero(magint.expr.substitute(self.system.W, bindings))
        checks.append(("W", passed, detail))
        return checks

    def check_leading_order(self, claim):
        bindings = {k: self.system.parse(v) for k, v in claim["bindings"].items()}
        spec = self.system.integral(claim["integral"]).subs(bindings)
        checks = []
        for table, entries in claim["expect"].items():
            actual = getattr(spec, table)
            for key, text in entries.items():
                value = actual.get(key, sympy.S.Zero)
                passed, detail = _symbolic_zero(value - self.system.parse(text))
                checks.append((f"{claim['integral']} {table}{key} = {text}", passed, detail))
        return checks

    def check_limit_system(self, claim):
        source = magint.catalog.build_system(claim["system"])
        bindings = {k: source.parse(v) for k, v in claim["bindings"].items()}
        v = sympy.Symbol(claim["limit"])
        own = {sympy.Symbol(k): val for k, val in self.system.params.items()}

        def limit(e):
            part = magint.catalog.systems.limit_part(magint.expr.substitute(e, bindings), v)
            return magint.expr.substitute(part, own)

        checks = []
        pairs = list(zip(self.system.chart.field_names, source.B, self.system.B))
        pairs.append(("W", source.W, self.system.W))
        for name, theirs, ours in pairs:
            passed, detail = _symbolic_zero(limit(theirs) - ours)
            checks.append((f"{name} from {source.id}", passed, detail))
        return checks

    def check_atom_relation(self, claim):
        relation = self.system.parse(claim["relation"])
        passed, detail = _symbolic_zero(relation)
        checks = [("symbolic branch", passed, detail)]
        eps = magint.expr.atoms.EPS
        for branch in claim.get("branches", []):
            e = magint.expr.expand_atoms(relation.xreplace({eps: sympy.Integer(branch)}))
            passed, detail = _symbolic_zero(e)
            checks.append((f"eps = {branch}", passed, detail))
        return checks

    def _printed_integral(self, d):
        if "from" not in d:
            return self.system.integral_spec(d)
        bases = [e for e in self.system._desc.get("integrals", []) if e["label"] == d["from"]]
        if not bases:
            raise KeyError(f"{self.system.id} has no integral {d['from']}")
        base = bases[0]
        merged = dict(base, **{k: v for k, v in d.items() if k not in ("from", "s")})
        if "s" in d:
            merged["s"] = [b if p is None else p for b, p in zip(base["s"], d["s"])]
        return self.system.integral_spec(merged)

    def _printed_field(self, components):
        chart = self.system.chart
        B = list(self.system.B)
        for name, text in components.items():
            B[chart.field_names.index(name)] = self.system.parse(text)
        return magint.forms.TwoForm(B, chart)

    def _tags(self, F, G, B, degrees):
        bracket = magint.bracket.covariant_bracket(F, G, B)
        return sorted(
            magint.bracket.monomial_tag(m, self.system.chart)
            for m in bracket.terms
            if degrees is None or sum(m) in degrees
        )

    def check_erratum(self, claim):
        """A printed expression that fails exactly where recorded.

        ``integral`` names a printed integral (``from`` copies a shipped one,
        ``null`` entries of ``s`` keep its components) bracketed with the
        observables in ``nonzero_with`` and ``commutes_with``. ``field``
        replaces shipped field components by printed ones; the keys are then
        pairs ``"F,G"`` of shipped observables.
        """
        system = self.system
        degrees = claim.get("degrees")
        obs = system.observables("covariant")
        if "field" in claim:
            B = self._printed_field(claim["field"])
            printed = "printed " + ",".join(sorted(claim["field"]))

            def pair(key):
                f, g = key.split(",")
                return obs[f], obs[g], f"{{{key}}} with {printed}"

        else:
            B = system.B
            spec = self._printed_integral(claim["integral"])
            X = magint.bracket.build_observable(spec, "covariant")

            def pair(key):
                return obs[key], X, f"{{{key},{spec.label}}}"

        checks = []
        for key, expected in claim.get("nonzero_with", {}).items():
            F, G, label = pair(key)
            tags = self._tags(F, G, B, degrees)
            checks.append(
                (
                    f"{label} nonzero at {','.join(sorted(expected))}",
                    tags == sorted(expected),
                    ",".join(tags) or "0",
                )
            )
        for key in claim.get("commutes_with", []):
            F, G, label = pair(key)
            tags = self._tags(F, G, B, degrees)
            checks.append((label, not tags, ",".join(tags) or "0"))
        return checks


def _params_text(system):
    return {
        k: magint.expr.print_expr(v)
        for k, v in sorted(system.params.items())
        if v != sympy.Symbol(k)
    }


@magint.decorators.cache
def _verify_cached(system_id, params, digest, mode, seed, samples, tolerance):
    # digest is an md5 of the system JSON; it only enters the cache key
    system = magint.catalog.build_system(system_id, params)
    verifier = SystemVerifier(system, mode, seed=seed, samples=samples, tolerance=tolerance)
    report = VerificationReport(system_id, params, mode, verifier.run())
    return report.to_dict()


def verify_system(system, params=None, mode="symbolic", seed=None, samples=None, tolerance=None):
    """Checks every claim of a catalog system.

    :param system: a FieldSystem or a system id.
    :param params: parameter values when `system` is an id.
    :param mode: "symbolic" or "numeric".
    :param seed: sampling seed for numeric mode; defaults to option ``seed``.
    :param samples: number of sample points; defaults to option ``samples``.
    :returns: a VerificationReport. Results are cached on disk per system,
        parameters, catalog content, mode, seed, sample count and tolerance.
    """
    if isinstance(system, str):
        system = magint.catalog.build_system(system, params)
    if mode not in MODES:
        raise ConfigError(f"unknown verification mode {mode}; choose from {MODES}")
    seed = magint.get_option("seed") if seed is None else int(seed)
    samples = magint.get_option("samples") if samples is None else int(samples)
    tolerance = magint.get_option("verify_tolerance") if tolerance is None else float(tolerance)
    digest = hashlib.md5(system.to_json().encode("utf-8")).hexdigest()
    result = _verify_cached(
        system.id, _params_text(system), digest, mode, seed, samples, tolerance
    )
    report = VerificationReport.from_dict(result)
    logger.info("%r", report)
    return report


def _verify_by_id(system_id, mode, options):
    # joblib workers start with default options
    with magint.option_context(**options):
        return verify_system(system_id, mode=mode).to_dict()


def verify_all(mode="symbolic", n_jobs=1):
    """Verifies every catalog system, in catalog order.

    :param n_jobs: worker processes, as for joblib.Parallel.
    :returns: a list of VerificationReports.
    """
    options = {k: magint.get_option(k) for k in ("cache", "seed", "samples", "verify_tolerance")}
    run = functools.partial(_verify_by_id, mode=mode, options=options)
    results = joblib.Parallel(n_jobs=n_jobs)(
        joblib.delayed(run)(system_id) for system_id in magint.catalog.SYSTEM_IDS
    )
    return [VerificationReport.from_dict(r) for r in results]
