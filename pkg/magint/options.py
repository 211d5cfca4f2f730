import contextlib
import logging

logger = logging.getLogger(__name__)

OPTIONS = {
    "cache": True,
    "memoize": True,
    "denominator_guard": 1e-6,
    "seed": 0,
    "samples": 1000,
    "rtol": 1e-10,
    "atol": 1e-12,
    "dt": 0.01,
    "rho_min": 1e-3,
    "escape_factor": 10.0,
    "window_fraction": 0.05,
    "sample_box": 2.0,
    "fd_step": 1e-5,
    "verify_tolerance": 1e-8,
}


def get_option(option):
    option = option.lower()
    if option in OPTIONS:
        return OPTIONS[option]
    else:
        logger.warning("option %s not recognized", option)
        return None


def set_option(option, value):
    option = option.lower()
    if option in OPTIONS:
        OPTIONS[option] = value
    else:
        logger.warning("option %s not recognized", option)


@contextlib.contextmanager
def option_context(**overrides):
    """Temporarily overrides options, restoring the previous values on exit.

    Unknown names raise KeyError before anything is changed.
    """
    unknown = sorted(k for k in overrides if k.lower() not in OPTIONS)
    if unknown:
        raise KeyError(f"unknown options: {', '.join(unknown)}")
    saved = {k.lower(): OPTIONS[k.lower()] for k in overrides}
    try:
        for k, v in overrides.items():
            set_option(k, v)
        yield
    finally:
        OPTIONS.update(saved)
