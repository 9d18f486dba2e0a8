"""Ring-cavity dipole trap and recoil-induced resonance toolkit."""

__version__ = "0.1.0"

from ._accel import NUMBA_ENABLED, backend_name  # noqa: E402,F401
