"""DC power flow emissions planning toolkit."""

from gridcarbon._core import *  # noqa: F401,F403
from gridcarbon._core import __version__  # noqa: F401
