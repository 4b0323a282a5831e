"""Quantum-game Lotka-Volterra toolkit.

CHSH mini-game correlators feeding predator-prey population dynamics, an
agent-based game world, and random correlation networks. The heavy lifting
lives in the compiled `_core` extension; this package re-exports it.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
