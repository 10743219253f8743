"""Adaptive online sequential random-feature networks.

Inputs are d x N arrays (one column per sample); targets are N x m.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
