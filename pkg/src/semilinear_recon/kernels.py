"""Selects the SOR kernel backend at import time.

The compiled Cython extension is used when it has been built; otherwise the
numpy implementation is used. Set ``SEMILINEAR_RECON_PURE=1`` to force the
numpy path.
"""

import os

from . import _sor_py

BACKEND = "python"
sor_solve = _sor_py.sor_solve
residual_norm = _sor_py.residual_norm

if os.environ.get("SEMILINEAR_RECON_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _sor
    except ImportError:  # extension not built
        pass
    else:
        sor_solve = _sor.sor_solve
        residual_norm = _sor.residual_norm
        BACKEND = "cython"

__all__ = ["BACKEND", "sor_solve", "residual_norm"]
