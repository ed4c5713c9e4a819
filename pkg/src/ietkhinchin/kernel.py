"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``IETKHINCHIN_PURE=1`` to force the pure-Python kernels (the benchmark
and the equivalence tests use this).  Both implementations perform identical
floating-point operations, so the choice never changes results, only speed.
"""

from __future__ import annotations

import os

from . import _kernel as _pure

OK = _pure.OK
PRECISION = _pure.PRECISION
TIE = _pure.TIE
BUDGET = _pure.BUDGET
REDUCED = _pure.REDUCED
NOT_REDUCED = _pure.NOT_REDUCED

if os.environ.get("IETKHINCHIN_PURE") == "1":
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

induction_arrows = _impl.induction_arrows
scan_solutions = _impl.scan_solutions
reduced_check = _impl.reduced_check

pure = _pure


def implementations():
    """(name, module) pairs of every available kernel implementation."""
    out = [("pure", _pure)]
    try:
        from . import _speedups

        out.append(("compiled", _speedups))
    except ImportError:
        pass
    return out
