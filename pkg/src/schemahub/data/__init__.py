from .classify import NO_MATCH, census, classify_variation, outlier_variations
from .database import Database, Dataset, StoreMode, load_database, store_database
from .migrate import MigrationReport, OpReport, migrate
from .values import Mode, Record, SetValue, MapValue, Timestamp, cast_value, default_value

__all__ = [
    "NO_MATCH", "census", "classify_variation", "outlier_variations",
    "Database", "Dataset", "StoreMode", "load_database", "store_database",
    "MigrationReport", "OpReport", "migrate",
    "Mode", "Record", "SetValue", "MapValue", "Timestamp", "cast_value", "default_value",
]
