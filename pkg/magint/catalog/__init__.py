from . import systems
from . import fixtures
from . import verify

from .systems import FieldSystem, SYSTEM_IDS, build_system, descriptor, list_systems
from .fixtures import (
    FIXTURE_IDS,
    FixtureReport,
    LeadingOrderFixture,
    check_fixture,
    list_fixtures,
    load_fixture,
)
from .verify import VerificationReport, verify_all, verify_system

# modules/variables to expose
__all__ = [
    "systems",
    "fixtures",
    "verify",
    "FieldSystem",
    "SYSTEM_IDS",
    "build_system",
    "descriptor",
    "list_systems",
    "FIXTURE_IDS",
    "FixtureReport",
    "LeadingOrderFixture",
    "check_fixture",
    "list_fixtures",
    "load_fixture",
    "VerificationReport",
    "verify_all",
    "verify_system",
]

# Fill in build_system docstring

DESCS = [systems.descriptor(system_id) for system_id in SYSTEM_IDS]

idStr = "\n".join("* {}: {} ({})".format(d["id"], d.get("title", ""), d["chart"]) for d in DESCS)
paramStr = "\n".join(
    "{}: {}".format(d["id"], ",".join('"{}"'.format(p) for p in d["params"])) for d in DESCS
)

systems.build_system.__doc__ = """
Builds a catalog system with some parameters fixed.

* Parameters left out stay symbolic.
* Values are exact: strings in the expression grammar, ints, sympy
numbers, or floats read by their decimal text.

Systems:
{}

Parameters per system:
{}

:param system_id: one of the ids above.
:param params: mapping from parameter name to value.
:returns: the FieldSystem
:rtype: FieldSystem
:raises UnknownSystemError: for an unknown id.
:raises ConfigError: for an unknown parameter.
:raises ConstraintError: if a fixed value violates a constraint.
""".format(
    idStr, paramStr
)

# clean up namespace
del DESCS, idStr, paramStr
