"""Backend selection for the hot kernels.

The compiled module is used when it imports; otherwise the numpy fallback is
used.  Setting ``COMPOP_BACKEND=python`` forces the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
kernels = _fallback

if os.environ.get("COMPOP_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        kernels = _compiled
        BACKEND = "cython"

char_eval = kernels.char_eval
mc_moments = kernels.mc_moments
convolve = kernels.convolve

__all__ = ["BACKEND", "kernels", "char_eval", "mc_moments", "convolve", "_fallback"]
