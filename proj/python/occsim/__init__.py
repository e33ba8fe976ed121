"""Vehicle localization by optical camera communication and photogrammetry."""

from ._occsim import *  # noqa: F401,F403
