import logging

from pytest import raises

import magint


def test_defaults():
    assert magint.get_option("samples") == 1000
    assert magint.get_option("RTOL") == 1e-10
    assert magint.get_option("rho_min") == 1e-3


def test_unknown_option_is_logged(caplog):
    with caplog.at_level(logging.WARNING, logger="magint.options"):
        assert magint.get_option("colour") is None
        magint.set_option("colour", "red")
    assert caplog.text.count("option colour not recognized") == 2


def test_option_context_restores():
    with magint.option_context(seed=42, samples=10):
        assert magint.get_option("seed") == 42
        assert magint.get_option("samples") == 10
    assert magint.get_option("seed") == 0
    assert magint.get_option("samples") == 1000


def test_option_context_restores_on_error():
    with raises(RuntimeError):
        with magint.option_context(dt=0.5):
            raise RuntimeError("boom")
    assert magint.get_option("dt") == 0.01


def test_option_context_rejects_unknown_names():
    with raises(KeyError):
        with magint.option_context(seed=1, colour="red"):
            pass
    assert magint.get_option("seed") == 0
