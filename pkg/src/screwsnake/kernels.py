"""Kernel selector: compiled extension if available, numpy fallback otherwise.

Set SCREWSNAKE_PURE_PYTHON=1 to force the fallback (used by the benchmark
and the parity tests).
"""

import os

if os.environ.get("SCREWSNAKE_PURE_PYTHON"):
    from . import _core_py as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as _impl

IMPLEMENTATION = _impl.IMPLEMENTATION
chain_state = _impl.chain_state
induced_velocities = _impl.induced_velocities
segment_frame_velocities = _impl.segment_frame_velocities
twist_fit = _impl.twist_fit
twist_fit_locked_lateral = _impl.twist_fit_locked_lateral
kasa_circle = _impl.kasa_circle
advance_pose = _impl.advance_pose
