"""Blackboard multi-agent path planner with human-in-the-loop steering."""

__version__ = "0.1.0"

from coplan.kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
