"""Hot-loop kernels: objective evaluation and coordinate descent.

Two interchangeable backends implement the same algorithm:

* ``_fast`` -- Cython, calling LAPACK's dsyev directly; built by setup.py.
* ``_pure`` -- numpy fallback, always available.

The compiled backend is selected at import time when present.  Set
``CHAINSYNTH_PURE=1`` to force the fallback (used by the benchmark and
the backend-agreement tests).
"""

import os

from chainsynth._kernels import _pure

if os.environ.get("CHAINSYNTH_PURE"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from chainsynth._kernels import _fast as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

objective_value = _impl.objective_value
descend = _impl.descend

__all__ = ["BACKEND", "objective_value", "descend", "_pure"]
