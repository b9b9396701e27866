"""Variation membership of stored records.

A record belongs to a variation when its field names (reserved endpoint and
id fields aside) are exactly the variation's common plus added features.
"""
from collections import Counter
from typing import Dict, List, Mapping, Optional, Tuple

from ..core.model import Reference, Schema, SchemaType
from .database import Database, StoreMode
from .values import RESERVED, Record

NO_MATCH = 0


def variation_names(t: SchemaType, var_id: int, skip_references: bool = False) -> List[str]:
    return [f.name for f in t.variation_features(var_id)
            if not (skip_references and isinstance(f, Reference))]


def classify_variation(record: Mapping, t: SchemaType, skip_references: bool = False) -> int:
    """Id of the first variation whose feature names equal the record's; NO_MATCH otherwise.

    ``skip_references`` drops reference features from the comparison, the way
    graph stores keep them as edges outside the node.
    """
    present = {k for k in record if k not in RESERVED}
    for v in t.variations:
        if set(variation_names(t, v.var_id, skip_references)) == present:
            return v.var_id
    return NO_MATCH


def census(db: Database, schema: Schema) -> Dict[str, Dict[int, int]]:
    """Per stored type, record count per variation id (NO_MATCH included)."""
    graph = db.mode is StoreMode.GRAPH
    out: Dict[str, Dict[int, int]] = {}
    for name, ds in db.collections.items():
        t = schema.find_type(name)
        if t is None:
            continue
        counts = Counter(classify_variation(r, t, graph) for r in ds.records)
        out[name] = dict(sorted(counts.items()))
    return out


def outlier_variations(counts: Mapping[int, Optional[int]], top: int = 5) -> Tuple[List[int], List[int]]:
    """Split variation ids into the ``top`` most populated (regular) and the rest.

    Ties rank by id; unknown counts rank last.
    """
    ranked = sorted(counts, key=lambda v: (-(counts[v] or 0), v))
    return sorted(ranked[:top]), sorted(ranked[top:])


def declared_counts(t: SchemaType) -> Dict[int, Optional[int]]:
    return {v.var_id: v.count for v in t.variations}


def conforms(record: Record, t: SchemaType, skip_references: bool = False) -> bool:
    return classify_variation(record, t, skip_references) != NO_MATCH
