from ._flatlab import *  # noqa: F401,F403
from ._flatlab import Error, HeightMode, ModeKind

__all__ = [name for name in dir() if not name.startswith("_")]
