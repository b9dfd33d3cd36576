"""Iterated function systems on S1, T2 and S2: hyperspace witnesses and verifiers."""

import json as _json

from . import _core
from ._core import *  # noqa: F401,F403


def _report(fn):
    def wrapper(*args, **kwargs):
        return _json.loads(fn(*args, **kwargs))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# Report-returning functions hand back dicts instead of JSON text.
check_overlap_number = _report(_core.check_overlap_number)
check_hyper_minimal = _report(_core.check_hyper_minimal)
check_minimality_density = _report(_core.check_minimality_density)
