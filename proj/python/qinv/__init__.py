"""Quantum function-inversion experiments (C++ core via pybind11)."""

from ._qinv import *  # noqa: F401,F403
from ._qinv import __doc__  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
