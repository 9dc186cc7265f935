"""Pick the enumeration kernel: compiled extension if built, else numpy."""

import os

from . import _enumerate_py

enumerate_py = _enumerate_py.enumerate_extrema

try:
    from ._enumerate import enumerate_extrema as enumerate_compiled
except ImportError:  # extension not built
    enumerate_compiled = None

if enumerate_compiled is not None and not os.environ.get("INTERVALID_PURE_PYTHON"):
    enumerate_extrema = enumerate_compiled
    BACKEND = "cython"
else:
    enumerate_extrema = enumerate_py
    BACKEND = "python"
