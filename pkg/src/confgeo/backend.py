"""Runtime configuration: numba kernel selection and differentiation backend.

Two independent switches live here:

* ``CONFGEO_NUMBA`` (env var) picks between the numba-compiled kernels and
  the pure-numpy fallbacks for the hot inner loops.  Set it to ``0`` to force
  the numpy path; default is numba when importable.
* The differentiation backend (``dual`` or ``fd``) selects forward-mode jet
  propagation or order-4 finite differences for every derivative taken by
  the package.  It is a process-global default with a context manager so the
  same field can be evaluated under both backends in one run.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

_FALSY = {"0", "false", "off", "no"}


def _numba_requested() -> bool:
    return os.environ.get("CONFGEO_NUMBA", "1").strip().lower() not in _FALSY


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED: bool = _numba_requested() and _numba_available()

DUAL = "dual"
FD = "fd"
_VALID_BACKENDS = (DUAL, FD)

_current_backend = DUAL


def numba_enabled() -> bool:
    """True when the numba kernel path is active for this process."""
    return NUMBA_ENABLED


def active_backend() -> str:
    return _current_backend


def set_backend(name: str) -> None:
    global _current_backend
    if name not in _VALID_BACKENDS:
        raise ValueError(f"unknown differentiation backend {name!r}; expected one of {_VALID_BACKENDS}")
    _current_backend = name


@contextmanager
def use_backend(name: str):
    """Temporarily switch the differentiation backend."""
    previous = _current_backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def resolve_backend(name: str | None) -> str:
    if name is None:
        return _current_backend
    if name not in _VALID_BACKENDS:
        raise ValueError(f"unknown differentiation backend {name!r}; expected one of {_VALID_BACKENDS}")
    return name
