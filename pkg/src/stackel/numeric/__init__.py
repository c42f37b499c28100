"""Floating-point cross-checks: evaluation, finite differences, trajectories.

The inner evaluation loop has a compiled Cython kernel (``_ckernels``) and a
numpy fallback (``_pykernels``).  The compiled one is used when it was built;
``STACKEL_NUMERIC=python`` forces the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("STACKEL_NUMERIC", "").strip().lower() == "python":
    from ._pykernels import eval_table

    KERNEL = "python"
else:
    try:
        from ._ckernels import eval_table

        KERNEL = "cython"
    except ImportError:  # extension not built
        from ._pykernels import eval_table

        KERNEL = "python"

__all__ = ["eval_table", "KERNEL"]
