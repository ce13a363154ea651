"""Broadcast-news transcript QA pipeline (Python surface over the C++ core)."""

from newsrag._core import *  # noqa: F401,F403
from newsrag._core import __doc__ as _core_doc

__doc__ = _core_doc
