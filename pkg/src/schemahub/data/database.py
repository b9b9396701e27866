import enum
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional

import orjson
import yaml

from ..core.errors import FormatError
from .values import Record, from_json, to_json

log = logging.getLogger(__name__)

MANIFEST = "manifest.yaml"


class StoreMode(str, enum.Enum):
    AGGREGATE = "aggregate"
    GRAPH = "graph"


@dataclass
class Dataset:
    type_name: str
    records: List[Record] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[Record]:
        return iter(self.records)


@dataclass
class Database:
    mode: StoreMode = StoreMode.AGGREGATE
    collections: Dict[str, Dataset] = field(default_factory=dict)

    def dataset(self, name: str) -> Optional[Dataset]:
        return self.collections.get(name)

    def ensure(self, name: str) -> Dataset:
        if name not in self.collections:
            self.collections[name] = Dataset(name)
        return self.collections[name]

    def drop(self, name: str) -> int:
        ds = self.collections.pop(name, None)
        return len(ds) if ds else 0

    def rename(self, old: str, new: str):
        """Re-key a dataset, keeping its position in the collection order."""
        if old not in self.collections:
            return
        self.collections = {
            (new if k == old else k): (Dataset(new, v.records) if k == old else v)
            for k, v in self.collections.items()
        }

    def total(self) -> int:
        return sum(len(ds) for ds in self.collections.values())


# ------------------------------------------------------------------- codec

def dumps_record(record: Record) -> bytes:
    return orjson.dumps(to_json(record))


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ValueError(f"duplicate field {k!r}")
        out[k] = v
    return out


def loads_record(line: str, path: str = "<memory>", lineno: int = 0) -> Record:
    try:
        raw = json.loads(line, object_pairs_hook=_no_duplicates)
    except ValueError as e:
        raise FormatError(str(e), path, lineno) from None
    if not isinstance(raw, dict):
        raise FormatError("record is not a JSON object", path, lineno)
    try:
        return Record((k, from_json(v)) for k, v in raw.items())
    except ValueError as e:
        raise FormatError(str(e), path, lineno) from None


def read_dataset(path: Path, type_name: Optional[str] = None) -> Dataset:
    ds = Dataset(type_name or path.stem)
    with path.open(encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            if line.strip():
                ds.records.append(loads_record(line, str(path), n))
    return ds


def write_dataset(ds: Dataset, path: Path) -> Path:
    with path.open("wb") as fh:
        for r in ds.records:
            fh.write(dumps_record(r))
            fh.write(b"\n")
    return path


# -------------------------------------------------------------- directories

def load_database(root) -> Database:
    """Read ``<root>/manifest.yaml`` and one ``<Type>.ndjson`` per listed type.

    Without a manifest every ``*.ndjson`` file is loaded in name order in
    AGGREGATE mode.
    """
    root = Path(root)
    manifest = root / MANIFEST
    if manifest.exists():
        meta = yaml.safe_load(manifest.read_text(encoding="utf-8")) or {}
        if not isinstance(meta, dict):
            raise FormatError("manifest is not a mapping", str(manifest), 1)
        try:
            mode = StoreMode(str(meta.get("mode", "aggregate")).lower())
        except ValueError:
            raise FormatError(f"unknown store mode {meta.get('mode')!r}", str(manifest), 1) from None
        names = [str(n) for n in meta.get("types") or []]
    else:
        mode = StoreMode.AGGREGATE
        names = sorted(p.stem for p in root.glob("*.ndjson"))
    db = Database(mode)
    for name in names:
        path = root / f"{name}.ndjson"
        db.collections[name] = read_dataset(path, name) if path.exists() else Dataset(name)
    log.info("loaded %s: %d datasets, %d records", root, len(db.collections), db.total())
    return db


def store_database(db: Database, root) -> List[Path]:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    meta = {"mode": db.mode.value, "types": list(db.collections)}
    paths = [root / MANIFEST]
    paths[0].write_text(yaml.safe_dump(meta, sort_keys=False), encoding="utf-8")
    for name, ds in db.collections.items():
        paths.append(write_dataset(ds, root / f"{name}.ndjson"))
    log.info("stored %s: %d datasets", root, len(db.collections))
    return paths


def canonical_bytes(db: Database) -> bytes:
    """Byte-exact serialization used to compare databases."""
    out = [f"mode={db.mode.value}".encode()]
    for name, ds in db.collections.items():
        out.append(f"# {name}".encode())
        out.extend(dumps_record(r) for r in ds.records)
    return b"\n".join(out) + b"\n"
