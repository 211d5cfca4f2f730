import copy
import functools
import getpass
import hashlib
import json
import logging
import os

import appdirs
import mementos
import pandas as pd
import sympy

import magint

logger = logging.getLogger(__name__)


def cache(func):
    """Caches the JSON-serialisable result of `func` on disk, in the user
    cache directory determined by the appdirs package.

    The cache key is an md5 of the package version and the JSON encoding of
    the arguments, so arguments must be JSON-serialisable.
    """

    @functools.wraps(func)
    def wrapper(*args):
        if not magint.get_option("cache"):
            return func(*args)

        cache_dir = appdirs.user_cache_dir("magint", getpass.getuser())

        key = json.dumps([magint.__version__, func.__qualname__, args], sort_keys=True)
        file_hash = hashlib.md5(key.encode(errors="replace")).hexdigest()
        filename = os.path.join(cache_dir, f"{file_hash}.json")

        if os.path.isfile(filename):
            logger.debug("cache hit for %s in %s", func.__qualname__, filename)
            with open(filename, "r", encoding="utf-8") as f:
                return json.load(f)

        logger.debug("cache miss for %s", func.__qualname__)
        result = func(*args)
        try:
            os.makedirs(cache_dir, exist_ok=True)
            with open(filename, "w+", encoding="utf-8") as f:
                json.dump(result, f, sort_keys=True)
        except OSError as exc:
            logger.warning("could not write cache file %s: %s", filename, exc)
        return result

    return wrapper


def _instance_identifier(arg):
    if isinstance(arg, dict):
        arg = tuple(sorted(arg.items(), key=lambda kv: str(kv[0])))
    try:
        hash(arg)
    except TypeError:
        return ("id", id(arg))
    return ("value", arg)


def get_class_instance_key(cls, args, kwargs):
    """
    Returns a unique identifier for a class instantiation.

    Hashable arguments (and dicts of hashable values) are keyed by value, so
    that equal arguments give the same instance; anything else is keyed by id.
    """
    identifiers = [("class", id(cls))]
    for arg in args:
        identifiers.append(_instance_identifier(arg))
    identifiers.extend((k, _instance_identifier(v)) for k, v in sorted(kwargs.items()))
    return tuple(identifiers)


# used as a metaclass for classes that should be memoized
# (technically not a decorator, but it's similar enough)
Cached = mementos.memento_factory("Cached", get_class_instance_key)


def _copy(v):
    # sympy objects are immutable, copying them is wasted work
    if isinstance(v, sympy.Basic):
        return v
    if isinstance(v, tuple):
        return tuple(_copy(x) for x in v)
    if callable(v) or getattr(type(v), "_immutable", False):
        return v
    return copy.deepcopy(v)


def memoize(fun):
    """Memoizes `fun` in process, keyed on its arguments.

    Results are handed out as copies (immutable values are shared). Arguments
    must be hashable; a TypeError is logged and re-raised. Option ``memoize``
    turns the table off.
    """
    table = {}

    @functools.wraps(fun)
    def wrapper(*args, **kwargs):
        if not magint.get_option("memoize"):
            return fun(*args, **kwargs)

        key = (args, frozenset(kwargs.items()))
        try:
            hit = key in table
        except TypeError:
            logger.error("unhashable arguments to %s: %r", fun.__name__, key)
            raise
        if not hit:
            table[key] = fun(*args, **kwargs)
        return _copy(table[key])

    wrapper.cache_clear = table.clear
    return wrapper


def both_branches(include_branch=False):
    """Fans a DataFrame-returning function out over the sign branch.

    The wrapped function takes an `eps` keyword (-1 or 1). Given ``"both"``
    (the default) it runs once per branch and concatenates the frames,
    tagging a ``branch`` column when `include_branch` is set.
    """

    def decorator(fun):
        def tagged(branch, args, kwargs):
            df = fun(*args, **dict(kwargs, eps=branch))
            if include_branch:
                df["branch"] = branch
            return df

        @functools.wraps(fun)
        def wrapper(*args, **kwargs):
            eps = kwargs.pop("eps", "both")
            if isinstance(eps, str) and eps.lower() == "both":
                return pd.concat([tagged(b, args, kwargs) for b in (-1, 1)], ignore_index=True)
            return tagged(eps, args, kwargs)

        return wrapper

    return decorator
