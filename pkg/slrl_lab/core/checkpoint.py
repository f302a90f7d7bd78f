"""JSON checkpoints for parameter stores.

Document layout::

    {"format_version": 1,
     "entries": {name: {"rows": r, "cols": c, "data": [...]}},
     "step_count": n}

Several stores can share one document; each store's entries are written
under its prefix (``policy/``, ``critic1/``...). Floats are written with
``repr`` which round-trips float64 exactly.
"""

import json
from pathlib import Path
from typing import Dict, Mapping, Sequence

import numpy as np

from ..exceptions import DatasetParseError
from .nn import ParamStore, tensor2

FORMAT_VERSION = 1


def to_document(stores: Mapping[str, ParamStore]) -> dict:
    entries = {}
    for prefix, store in stores.items():
        for name, entry in store.entries.items():
            rows, cols = entry.value.shape
            entries[f"{prefix}{name}"] = {
                "rows": rows,
                "cols": cols,
                "data": [float(x) for x in entry.value.ravel()],
            }
    first = next(iter(stores.values()), None)
    return {
        "format_version": FORMAT_VERSION,
        "entries": entries,
        "step_count": first.step_count if first is not None else 0,
        "step_counts": {prefix: store.step_count for prefix, store in stores.items()},
    }


def from_document(doc: dict, prefixes: Sequence[str], path: str = "<memory>") -> Dict[str, ParamStore]:
    """Split a document back into one store per prefix.

    Longest matching prefix wins; names matching none go to the "" store.
    """
    if doc.get("format_version") != FORMAT_VERSION:
        raise DatasetParseError(path, 1, f"unsupported format_version {doc.get('format_version')!r}")
    ordered = sorted(prefixes, key=len, reverse=True)
    stores: Dict[str, ParamStore] = {p: ParamStore() for p in prefixes}
    for full_name, blob in doc.get("entries", {}).items():
        prefix = next((p for p in ordered if p and full_name.startswith(p)), "")
        try:
            value = tensor2(int(blob["rows"]), int(blob["cols"]), blob["data"])
        except (KeyError, TypeError, ValueError) as e:
            raise DatasetParseError(path, 1, f"bad entry {full_name!r}: {e}") from e
        if not np.all(np.isfinite(value)):
            raise DatasetParseError(path, 1, f"non-finite values in entry {full_name!r}")
        stores.setdefault(prefix, ParamStore()).add(full_name[len(prefix):], value)
    for prefix, count in doc.get("step_counts", {}).items():
        if prefix in stores:
            stores[prefix].step_count = int(count)
    return stores


def save_checkpoint(path: Path, stores: Mapping[str, ParamStore]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_document(stores), sort_keys=True))
    return path


def load_checkpoint(path: Path, prefixes: Sequence[str]) -> Dict[str, ParamStore]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DatasetParseError(str(path), e.lineno, f"invalid JSON: {e.msg}") from e
    return from_document(doc, prefixes, str(path))
