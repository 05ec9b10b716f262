"""Backend selection for the residue-ring kernels.

The compiled module is used when it imports; ``REGBIP_KERNELS=python`` forces
the numpy fallback.
"""

import os

from . import _pykernels as python_backend

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("REGBIP_KERNELS", "").lower() != "python":
    active = compiled_backend
    BACKEND = "compiled"
else:
    active = python_backend
    BACKEND = "python"

# residues at or above this bound bypass the int64 kernels
SMALL_MODULUS = 1 << 31


def backends():
    """Available backends as a name -> module mapping."""
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["compiled"] = compiled_backend
    return out
