"""Exact persistence categories, weighted idempotents and their splittings."""
from .field import INF, Field, level

__version__ = "0.1.0"
__all__ = ["Field", "INF", "level", "__version__"]
