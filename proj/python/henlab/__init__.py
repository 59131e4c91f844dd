"""Group dynamics of generalized Henon maps of C^2.

Thin re-export of the compiled extension. The quadratic fixture used across
the test suite is ``HenonMap([0, 0, 1], 1)`` (so h(x, y) = (y, y^2 - x)) with
the second generator a theta = pi/4 rotation conjugate.
"""

from ._henlab import *  # noqa: F401,F403
from ._henlab import __doc__  # noqa: F401
