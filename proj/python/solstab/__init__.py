from ._solstab import *  # noqa: F401,F403
