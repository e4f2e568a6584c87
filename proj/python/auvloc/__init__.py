"""2D AUV localization: SIR particle filter with geometric and semantic
measurement models, plus the block-world benchmark harness."""

from auvloc._core import *  # noqa: F401,F403
from auvloc._core import __doc__  # noqa: F401

__version__ = "0.1.0"
