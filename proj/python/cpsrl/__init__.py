"""Factored-MDP posterior-sampling laboratory (python bindings)."""

from ._cpsrl import *  # noqa: F401,F403
