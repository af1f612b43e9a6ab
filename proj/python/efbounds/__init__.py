from _efbounds import *  # noqa: F401,F403
from _efbounds import __doc__  # noqa: F401
