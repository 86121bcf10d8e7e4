# app/utils/jsonx.py
from typing import Any

import orjson

_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


def dumps(value: Any) -> str:
    """Stable, indented JSON (sorted keys) for machine-diffable reports."""
    return orjson.dumps(value, option=_OPTIONS).decode() + "\n"


def loads(raw: str) -> Any:
    return orjson.loads(raw)
