import logging

import numpy as np
import pandas as pd
import sympy

import magint
from magint.errors import ConfigError

logger = logging.getLogger(__name__)


def rng(seed=None):
    """Returns a numpy Generator seeded from `seed`, or option ``seed``."""
    if seed is None:
        seed = magint.get_option("seed")
    return np.random.default_rng(seed)


def sample_envs(names, n=None, seed=None, box=None, fixed=None, exclude=None):
    """Draws seeded random environments for numeric verification.

    :param names: symbol names to sample uniformly in [-box, box].
    :param n: number of rows; defaults to option ``samples``.
    :param seed: seed; defaults to option ``seed``.
    :param box: half-width; defaults to option ``sample_box``.
    :param fixed: mapping of names to constant values added as columns.
    :param exclude: optional callable taking the DataFrame and returning a
        boolean mask of rows to resample.
    :returns: DataFrame with one column per name.
    """
    n = n or magint.get_option("samples")
    box = box or magint.get_option("sample_box")
    gen = rng(seed)
    names = sorted({str(name) for name in names} - set(map(str, fixed or {})))
    df = pd.DataFrame(gen.uniform(-box, box, size=(n, len(names))), columns=names)
    for k, v in (fixed or {}).items():
        df[str(k)] = float(v)
    if exclude is not None:
        for _ in range(100):
            mask = np.asarray(exclude(df), dtype=bool)
            if not mask.any():
                break
            df.loc[mask, names] = gen.uniform(-box, box, size=(int(mask.sum()), len(names)))
        else:
            raise ConfigError("could not sample points outside the excluded region")
    return df


def parse_assignments(text):
    """Parses ``"k=v,k2=v2"`` into a dict of exact sympy values.

    Values are expressions in the expression grammar, so ``beta2=-1/7`` and
    ``c=2`` are exact.
    """
    result = {}
    if not text:
        return result
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise ConfigError(f'expected "name=value", got "{item.strip()}"')
        key, value = item.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f'missing name in "{item.strip()}"')
        result[key] = magint.expr.parse_expr(value.strip())
    return result


def parse_vector(text, size):
    """Parses a comma-separated list of `size` expressions into sympy values."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != size:
        raise ConfigError(f"expected {size} comma-separated values, got {len(parts)}")
    return [magint.expr.parse_expr(p) for p in parts]


def to_float(e):
    """Converts an exact sympy number to float; symbolic input is an error."""
    e = sympy.sympify(e)
    if e.free_symbols:
        raise ConfigError(f"expected a number, got {e}")
    return float(e)
