"""Python bindings for the socnav C++ core."""

try:
    from ._socnav import *  # noqa: F401,F403  (installed package layout)
except ImportError:
    from _socnav import *  # noqa: F401,F403  (in-tree build on PYTHONPATH)
