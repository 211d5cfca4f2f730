import os

import pandas as pd
from pytest import raises

import magint


def test_disk_cache(tmp_path, monkeypatch):
    monkeypatch.setattr(magint.decorators.appdirs, "user_cache_dir", lambda *args: str(tmp_path))
    calls = []

    @magint.decorators.cache
    def square(n):
        calls.append(n)
        return {"value": n * n}

    with magint.option_context(cache=True):
        assert square(3) == {"value": 9}
        assert square(3) == {"value": 9}
        assert square(4) == {"value": 16}
    assert calls == [3, 4]
    assert len(os.listdir(tmp_path)) == 2

    with magint.option_context(cache=False):
        square(3)
    assert calls == [3, 4, 3]


def test_memoize():
    calls = []

    @magint.decorators.memoize
    def table(n, label="x"):
        calls.append(n)
        return {label: list(range(n))}

    first = table(3)
    first["x"].append(99)
    assert table(3) == {"x": [0, 1, 2]}
    assert table(3, label="y") == {"y": [0, 1, 2]}
    assert calls == [3, 3]

    table.cache_clear()
    table(3)
    assert calls == [3, 3, 3]

    with magint.option_context(memoize=False):
        table(3)
    assert calls == [3, 3, 3, 3]


def test_memoize_rejects_unhashable_arguments():
    @magint.decorators.memoize
    def size(values):
        return len(values)

    with raises(TypeError):
        size([1, 2])


def test_cached_instances():
    class Thing(object, metaclass=magint.decorators.Cached):
        def __init__(self, name, params=None):
            self.name = name
            self.params = params

    assert Thing("a") is Thing("a")
    assert Thing("a", {"k": 1}) is Thing("a", {"k": 1})
    assert Thing("a", {"k": 1}) is not Thing("a", {"k": 2})


def test_both_branches():
    @magint.decorators.both_branches(include_branch=True)
    def extent(scale, eps=-1):
        return pd.DataFrame({"value": [scale * eps]})

    df = extent(2, eps="both")
    assert list(df["branch"]) == [-1, 1]
    assert list(df["value"]) == [-2, 2]
    assert list(extent(2)["branch"]) == [-1, 1]

    single = extent(2, eps=1)
    assert list(single["value"]) == [2]
    assert list(single["branch"]) == [1]


def test_both_branches_without_label():
    @magint.decorators.both_branches()
    def extent(eps=-1):
        return pd.DataFrame({"value": [eps]})

    df = extent(eps="BOTH")
    assert list(df.columns) == ["value"]
    assert len(df) == 2
