"""Selects the profile-enumeration backend at import time.

The compiled extension is used when it was built; otherwise the pure-Python
module with the same functions takes over. Setting POALP_BACKEND=python
forces the fallback even when the extension is present.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_forced = os.environ.get("POALP_BACKEND", "").strip().lower()
if _compiled is not None and _forced != "python":
    BACKEND, _active = "cython", _compiled
else:
    BACKEND, _active = "python", _kernels_py


def backends() -> dict:
    """Available backends by name."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


def evaluate_profiles(values, masks, n_actions, wpad, fpad, eps):
    return _active.evaluate_profiles(values, masks, n_actions, wpad, fpad, eps)


def deviation_table(values, masks, n_actions, wpad, fpad):
    return _active.deviation_table(values, masks, n_actions, wpad, fpad)


def n_profiles(n_actions) -> int:
    return int(_active.n_profiles(n_actions))
