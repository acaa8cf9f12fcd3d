"""Kernel backend selection.

The compiled Cython extension is preferred when present; otherwise the
NumPy fallback is used.  ``RQTRAJ_BACKEND=python`` or
``RQTRAJ_BACKEND=compiled`` forces the choice (the latter raises if the
extension was not built).
"""

import os

_forced = os.environ.get("RQTRAJ_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _fallback as impl
elif _forced == "compiled":
    from . import _core as impl  # type: ignore[no-redef]
else:
    try:
        from . import _core as impl  # type: ignore[no-redef]
    except ImportError:
        from . import _fallback as impl

BACKEND = impl.BACKEND_NAME

trig_pair = impl.trig_pair
exp_pair = impl.exp_pair
momentum_triplet = impl.momentum_triplet
kinematics_triplet = impl.kinematics_triplet
qshje_residual_rel = impl.qshje_residual_rel
qshje_residual_nonrel = impl.qshje_residual_nonrel
firqnl_residual_rel = impl.firqnl_residual_rel
fiqnl_residual_nonrel = impl.fiqnl_residual_nonrel
prop_position = impl.prop_position
prop_velocity = impl.prop_velocity
evan_position = impl.evan_position
evan_velocity = impl.evan_velocity
