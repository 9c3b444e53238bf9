"""Model Teichmueller spaces of the torus and the once-punctured torus."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
