"""All-pay auctions with budget-constrained buyers and competitive search."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
