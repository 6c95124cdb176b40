"""Confidence-calibration evaluation toolkit (python bindings)."""

try:
    from lifeeval._core import *  # noqa: F401,F403  (installed layout)
except ImportError:  # in-tree builds put _core on PYTHONPATH directly
    from _core import *  # noqa: F401,F403
