"""Machine-generated text detection toolkit (Python bindings)."""

import os as _os

_resources = _os.path.join(_os.path.dirname(__file__), "resources")
if _os.path.isdir(_resources):
    _os.environ.setdefault("MGTDETECT_RESOURCES", _resources)

from ._core import *  # noqa: E402,F401,F403
from ._core import __version__  # noqa: E402,F401
