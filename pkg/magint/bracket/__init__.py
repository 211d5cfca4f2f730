from . import observables
from . import poisson
from . import deteqs
from . import oracle
from . import ansatz

from .observables import Observable, generators, hamiltonian
from .poisson import poisson_bracket, covariant_bracket
from .deteqs import DetEqSet, MONOMIALS, determining_equations, monomial_tag
from .oracle import numeric_bracket_oracle
from .ansatz import (
    CLASSES,
    IntegralSpec,
    build_observable,
    leading_order,
    generic_integrals,
    generic_field,
    detgen,
)

__all__ = [
    "observables",
    "poisson",
    "deteqs",
    "oracle",
    "ansatz",
    "Observable",
    "generators",
    "hamiltonian",
    "poisson_bracket",
    "covariant_bracket",
    "DetEqSet",
    "MONOMIALS",
    "determining_equations",
    "monomial_tag",
    "numeric_bracket_oracle",
    "CLASSES",
    "IntegralSpec",
    "build_observable",
    "leading_order",
    "generic_integrals",
    "generic_field",
    "detgen",
]
