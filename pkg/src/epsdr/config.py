"""Working precision and other global defaults.

The default series precision is 32 coefficients; the environment variable
EPSDR_PRECISION overrides it, and `working_precision` overrides it locally.
"""
import contextlib
import contextvars
import os

DEFAULT_PRECISION = 32
CHECK_PRECISION = 48
DERHAM_POLE_BOUND = 24
MAX_CYCLIC_ATTEMPTS = 64

_precision = contextvars.ContextVar("epsdr_precision", default=None)


def default_precision():
    value = _precision.get()
    if value is not None:
        return value
    env = os.environ.get("EPSDR_PRECISION")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return DEFAULT_PRECISION


@contextlib.contextmanager
def working_precision(prec):
    token = _precision.set(int(prec))
    try:
        yield prec
    finally:
        _precision.reset(token)
