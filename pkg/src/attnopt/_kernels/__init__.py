"""Kernel backend selection.

The compiled extension is preferred when present; set the environment
variable ``ATTN_OPT_FORCE_PYTHON=1`` to force the NumPy fallback (used by
the benchmark and by tests that compare the two backends).
"""

import os

from . import pure

_impl = pure
USING_COMPILED = False

if not os.environ.get("ATTN_OPT_FORCE_PYTHON"):
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        USING_COMPILED = True
    except ImportError:
        pass

gamma_value = _impl.gamma_value
project_budget = _impl.project_budget
pgd_minimize = _impl.pgd_minimize
dp_sweep = _impl.dp_sweep


def backend() -> str:
    return "compiled" if USING_COMPILED else "pure"
