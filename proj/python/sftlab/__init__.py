"""Python facade over the compiled _core module."""

from _core import *  # noqa: F401,F403
from _core import __version__  # noqa: F401
