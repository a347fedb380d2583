"""Exception types shared across the toolkit."""

from __future__ import annotations


class GuardError(RuntimeError):
    """A size or safety guard refused the requested computation."""
