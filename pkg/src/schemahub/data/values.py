"""Runtime values stored in datasets.

Scalars map onto Python natives (None, str, int, float, bool) plus
``Timestamp``; lists are ``list``, tuples ``tuple``; sets and maps get small
frozen wrappers so they survive the ndjson round trip; embedded objects are
``Record`` instances.
"""
import enum
import logging
import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Any, Iterable, List, Optional, Tuple

import orjson

from ..core.errors import CastError
from ..core.model import DataType, ListType, MapType, ScalarType, SetType, TupleType

log = logging.getLogger(__name__)

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
TS_PREFIX = "$ts:"
_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_INTEGER = re.compile(r"^[+-]?\d+$")


class Record(dict):
    """One stored instance: field name to value, in insertion order."""

    def fields(self) -> List[str]:
        return [k for k in self if k not in RESERVED]


RESERVED = frozenset({"_out", "_in", "_id"})


@dataclass(frozen=True, order=True)
class Timestamp:
    millis: int

    @classmethod
    def parse(cls, text: str) -> "Timestamp":
        s = text.strip()
        if s.endswith(("Z", "z")):
            s = s[:-1] + "+00:00"
        dt = datetime.fromisoformat(s)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        delta = dt - EPOCH
        return cls(delta.days * 86_400_000 + delta.seconds * 1000 + delta.microseconds // 1000)

    def isoformat(self) -> str:
        dt = EPOCH + timedelta(milliseconds=self.millis)
        text = dt.strftime("%Y-%m-%dT%H:%M:%S")
        if self.millis % 1000:
            text += f".{self.millis % 1000:03d}"
        return text + "Z"

    def __str__(self) -> str:
        return self.isoformat()


@dataclass(frozen=True)
class SetValue:
    items: Tuple[Any, ...] = ()

    @classmethod
    def of(cls, values: Iterable[Any]) -> "SetValue":
        unique = {}
        for v in values:
            unique.setdefault(canonical_text(v), v)
        return cls(tuple(unique[k] for k in sorted(unique)))


@dataclass(frozen=True)
class MapValue:
    items: Tuple[Tuple[Any, Any], ...] = ()


class Mode(str, enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


# ----------------------------------------------------------------- defaults

def default_value(t: DataType) -> Any:
    if isinstance(t, ScalarType):
        return _SCALAR_DEFAULTS[t]
    if isinstance(t, ListType):
        return []
    if isinstance(t, SetType):
        return SetValue()
    if isinstance(t, MapType):
        return MapValue()
    if isinstance(t, TupleType):
        return tuple(default_value(e) for e in t.elements)
    raise TypeError(f"not a data type: {t!r}")


_SCALAR_DEFAULTS = {
    ScalarType.STRING: "",
    ScalarType.IDENTIFIER: "",
    ScalarType.INTEGER: 0,
    ScalarType.DOUBLE: 0.0,
    ScalarType.BOOLEAN: False,
    ScalarType.TIMESTAMP: Timestamp(0),
}


# ------------------------------------------------------------ canonical text

def to_json(v: Any) -> Any:
    """Interchange form of a value (plain JSON types only)."""
    if v is None or isinstance(v, (bool, int, float)):
        return v
    if isinstance(v, str):
        return {"$str": v} if v.startswith(TS_PREFIX) else v
    if isinstance(v, Timestamp):
        return TS_PREFIX + v.isoformat()
    if isinstance(v, dict):
        return {k: to_json(x) for k, x in v.items()}
    if isinstance(v, list):
        return [to_json(x) for x in v]
    if isinstance(v, tuple):
        return {"$tuple": [to_json(x) for x in v]}
    if isinstance(v, SetValue):
        return {"$set": [to_json(x) for x in v.items]}
    if isinstance(v, MapValue):
        return {"$map": [[to_json(k), to_json(x)] for k, x in v.items]}
    raise TypeError(f"unsupported value {v!r}")


def from_json(v: Any) -> Any:
    if isinstance(v, str):
        return Timestamp.parse(v[len(TS_PREFIX):]) if v.startswith(TS_PREFIX) else v
    if isinstance(v, list):
        return [from_json(x) for x in v]
    if isinstance(v, dict):
        if len(v) == 1:
            (tag, inner), = v.items()
            if tag == "$str":
                return inner
            if tag == "$tuple":
                return tuple(from_json(x) for x in inner)
            if tag == "$set":
                return SetValue(tuple(from_json(x) for x in inner))
            if tag == "$map":
                return MapValue(tuple((from_json(k), from_json(x)) for k, x in inner))
        return Record((k, from_json(x)) for k, x in v.items())
    return v


def canonical_text(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (str, int)):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Timestamp):
        return v.isoformat()
    return orjson.dumps(to_json(v)).decode()


def same_value(a: Any, b: Any) -> bool:
    """Equality that keeps booleans, integers and doubles apart."""
    return type(a) is type(b) and canonical_text(a) == canonical_text(b)


# -------------------------------------------------------------------- casts

def _convert(v: Any, to: ScalarType) -> Any:
    if v is None:
        return None
    if to in (ScalarType.STRING, ScalarType.IDENTIFIER):
        return canonical_text(v)
    if isinstance(v, (list, tuple, dict, SetValue, MapValue)):
        raise CastError(v, to)
    if to is ScalarType.INTEGER:
        if isinstance(v, bool):
            return int(v)
        if isinstance(v, int):
            return v
        if isinstance(v, float) and v == v and v not in (float("inf"), float("-inf")):
            return int(v)
        if isinstance(v, Timestamp):
            return v.millis
        if isinstance(v, str) and _INTEGER.match(v.strip()):
            return int(v.strip())
    elif to is ScalarType.DOUBLE:
        if isinstance(v, (int, float)):
            return float(v)
        if isinstance(v, Timestamp):
            return float(v.millis)
        if isinstance(v, str) and _DECIMAL.match(v.strip()):
            return float(v.strip())
    elif to is ScalarType.BOOLEAN:
        if isinstance(v, (bool, int, float)):
            return bool(v)
        if isinstance(v, str) and v.strip().lower() in ("true", "false"):
            return v.strip().lower() == "true"
    elif to is ScalarType.TIMESTAMP:
        if isinstance(v, Timestamp):
            return v
        if isinstance(v, int) and not isinstance(v, bool):
            return Timestamp(v)
        if isinstance(v, str):
            try:
                return Timestamp.parse(v)
            except ValueError:
                pass
    raise CastError(v, to)


def cast_value(v: Any, to: ScalarType, mode: Mode = Mode.STRICT,
               fallbacks: Optional[List[Any]] = None) -> Any:
    """Convert ``v`` to the scalar ``to``.

    STRICT raises CastError on a value that does not convert; LENIENT
    substitutes the default of ``to`` and appends the original value to
    ``fallbacks`` when given.
    """
    if not isinstance(to, ScalarType):
        raise CastError(v, to)
    try:
        return _convert(v, to)
    except CastError:
        if mode is Mode.STRICT:
            raise
    log.warning("cast fallback: %r to %s", v, to)
    if fallbacks is not None:
        fallbacks.append(v)
    return default_value(to)
