# flake8: noqa

__version__ = "0.1.0"

from magint.options import get_option, set_option, option_context
from magint import errors, decorators, utils, expr, forms, bracket, catalog, dynamics

__all__ = [
    "errors",
    "decorators",
    "utils",
    "expr",
    "forms",
    "bracket",
    "catalog",
    "dynamics",
    "get_option",
    "set_option",
    "option_context",
]
