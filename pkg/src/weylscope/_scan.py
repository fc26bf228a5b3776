"""Scan kernel backend selection: compiled extension with NumPy fallback.

Both backends expose ``rational_table`` and ``kernel_table`` with identical
semantics (see ``weylscope._scan_numpy``); agreement is enforced by the test
suite and timed by ``benchmarks/bench_scan.py``.
"""

from __future__ import annotations

from . import _scan_numpy

try:  # pragma: no cover - depends on the build environment
    from . import _scan_cython as _impl
except ImportError:  # pragma: no cover
    _impl = _scan_numpy

BACKEND = _impl.BACKEND
rational_table = _impl.rational_table
kernel_table = _impl.kernel_table
fallback_rational_table = _scan_numpy.rational_table
fallback_kernel_table = _scan_numpy.kernel_table
