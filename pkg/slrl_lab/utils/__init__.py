"""Utilities module for the SLRL lab."""

from .logging import get_logger
from .pagination import Cursor, PaginationError, paginate, parse_cursor

__all__ = [
    "Cursor",
    "PaginationError",
    "paginate",
    "parse_cursor",
    "get_logger",
]
