"""K-spectral sets for two-disk intersections: geometry, annulus calculus, bounds."""

from ._kspec import *  # noqa: F401,F403
from ._kspec import __doc__  # noqa: F401
