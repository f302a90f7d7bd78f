"""Cursor pagination for run listings."""

import json
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from ..config import get_config


class PaginationError(Exception):
    """Raised when a cursor is malformed or out of range."""


@dataclass(frozen=True)
class Cursor:
    offset: int
    page_size: int
    filters: Dict[str, Any]

    def encode(self) -> str:
        return json.dumps(
            {"offset": self.offset, "page_size": self.page_size, **self.filters},
            sort_keys=True,
        )


def parse_cursor(cursor: Optional[str], **filters: Any) -> Cursor:
    """Decode a cursor, or start a fresh one carrying ``filters``."""
    config = get_config()
    if not cursor or cursor == "null":
        return Cursor(0, config.default_page_size, filters)

    try:
        data = json.loads(cursor)
    except json.JSONDecodeError as e:
        raise PaginationError(f"Invalid cursor format: {e}") from e
    if not isinstance(data, dict):
        raise PaginationError("Invalid cursor format: cursor must be a JSON object")

    offset = data.pop("offset", 0)
    page_size = data.pop("page_size", config.default_page_size)
    if not isinstance(offset, int) or offset < 0:
        raise PaginationError("Offset must be a non-negative integer")
    if not isinstance(page_size, int) or not 1 <= page_size <= config.max_page_size:
        raise PaginationError(f"Page size must be between 1 and {config.max_page_size}")

    # cursor filters win so that page 2 lists the same collection as page 1
    return Cursor(offset, page_size, {**filters, **data})


def paginate(items: List[Any], cursor: Cursor) -> Dict[str, Any]:
    """Slice ``items`` for one page and describe the next one."""
    end = cursor.offset + cursor.page_size
    has_next = end < len(items)
    next_cursor = (
        Cursor(end, cursor.page_size, cursor.filters).encode() if has_next else None
    )
    return {
        "items": items[cursor.offset:end],
        "pagination": {
            "total_count": len(items),
            "page_size": cursor.page_size,
            "offset": cursor.offset,
            "has_next": has_next,
            "next_cursor": next_cursor,
        },
    }
