"""Facade over the hot kernels: numba when enabled, numpy fallback otherwise.

``import confgeo.kernels as K`` and call ``K.jet_mul_o2`` etc.; the choice is
made once at import time from the ``CONFGEO_NUMBA`` env flag (see
:mod:`confgeo.backend`).  Both implementations are importable directly for
benchmarks and cross-checks.
"""

from __future__ import annotations

from . import backend
from . import _kernels_numpy

if backend.NUMBA_ENABLED:
    from . import _kernels_numba as _impl
else:
    _impl = _kernels_numpy

jet_mul_o1 = _impl.jet_mul_o1
jet_mul_o2 = _impl.jet_mul_o2
jet_mul_o3 = _impl.jet_mul_o3
jet_chain_o1 = _impl.jet_chain_o1
jet_chain_o2 = _impl.jet_chain_o2
jet_chain_o3 = _impl.jet_chain_o3
rk4_transport = _impl.rk4_transport

IMPLEMENTATION = "numba" if backend.NUMBA_ENABLED else "numpy"
