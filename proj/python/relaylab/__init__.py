from ._relaylab import *  # noqa: F401,F403
from ._relaylab import __doc__  # noqa: F401
