"""Weight calculus, order relations and closures for distance-decaying random graphs."""

from __future__ import annotations

__version__ = "0.1.0"
