"""orjson helpers shared by the report writers and the CLI."""

from pathlib import Path
from typing import Any

import numpy as np
import orjson

from core.errors import DataFormatError

_OPTIONS = orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


def _default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dump_json(payload: Any) -> bytes:
    """Indented, key-sorted JSON; identical inputs give identical bytes."""
    return orjson.dumps(payload, default=_default, option=_OPTIONS) + b"\n"


def load_json(path: str | Path) -> Any:
    """Parse a JSON file.

    Raises:
        DataFormatError: If the file is not valid JSON.
        OSError: If the file cannot be read.
    """
    raw = Path(path).read_bytes()
    try:
        return orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON ({exc})") from exc
