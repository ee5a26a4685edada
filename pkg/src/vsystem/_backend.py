"""Select the compiled kernels when available, else the numpy fallback.

Set ``VSYSTEM_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py as python_kernels

kernels = python_kernels
compiled_kernels = None

if not os.environ.get("VSYSTEM_PURE_PYTHON"):
    try:
        from . import _kernels as compiled_kernels
    except ImportError:
        compiled_kernels = None
    else:
        kernels = compiled_kernels

BACKEND = kernels.NAME
