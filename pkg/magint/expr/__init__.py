from . import atoms
from . import grammar
from . import normal
from . import calculus

from .atoms import U1, U2, COORDINATES, expand_atoms, check_atoms
from .grammar import parse_expr, print_expr
from .normal import NormalForm, normal_form, is_zero
from .calculus import differentiate, substitute, eval_numeric, eval_batch

__all__ = [
    "atoms",
    "grammar",
    "normal",
    "calculus",
    "U1",
    "U2",
    "COORDINATES",
    "expand_atoms",
    "check_atoms",
    "parse_expr",
    "print_expr",
    "NormalForm",
    "normal_form",
    "is_zero",
    "differentiate",
    "substitute",
    "eval_numeric",
    "eval_batch",
]
