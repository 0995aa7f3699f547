"""Tool pose mixture models in tissue-relative frames."""

from ._tissuegmm import *  # noqa: F401,F403
from ._tissuegmm import TissueGmmError, __doc__  # noqa: F401
