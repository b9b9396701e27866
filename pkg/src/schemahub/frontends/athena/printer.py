from typing import Iterable, List

from ...core.errors import InvalidSchema
from ...core.model import (
    Aggregate,
    Attribute,
    Feature,
    RangeConstraint,
    Reference,
    RegexConstraint,
    Schema,
    SchemaType,
    StructuralVariation,
    TypeKind,
    render_type,
)
from ...core.validation import validate

INDENT = "  "


def render_feature(f: Feature) -> str:
    prefix = ("+" if isinstance(f, Attribute) and f.key else "") + ("? " if f.optional else "")
    if isinstance(f, Attribute):
        text = render_type(f.type)
        if isinstance(f.constraint, RegexConstraint):
            text += f" /{f.constraint.pattern}/"
        elif isinstance(f.constraint, RangeConstraint):
            text += f" ({f.constraint.min} .. {f.constraint.max})"
    elif isinstance(f, Aggregate):
        text = f"Aggr<{f.target}>{f.cardinality.symbol}"
    else:
        alias = f" as {f.value_type.value}" if f.value_type is not None else ""
        text = f"Ref<{f.target}{alias}>{f.cardinality.symbol}"
        if f.attributes:
            text += " { " + ", ".join(render_feature(a) for a in f.attributes) + " }"
    return f"{prefix}{f.name}: {text}"


def render_features(features: Iterable[Feature], depth: int) -> List[str]:
    pad = INDENT * depth
    rows = [pad + render_feature(f) for f in features]
    return [r + "," for r in rows[:-1]] + rows[-1:]


def _is_flat(t: SchemaType) -> bool:
    if len(t.variations) != 1:
        return False
    v = t.variations[0]
    return v.var_id == 1 and not v.features and v.count is None


def _block(head: str, features, depth: int) -> List[str]:
    pad = INDENT * depth
    features = list(features)
    if not features:
        return [f"{pad}{head}{{}}"]
    return [f"{pad}{head}{{", *render_features(features, depth + 1), f"{pad}}}"]


def _variation_head(v: StructuralVariation) -> str:
    count = f" (count {v.count})" if v.count is not None else ""
    return f"Variation {v.var_id}{count} "


def render_type_decl(t: SchemaType) -> List[str]:
    if t.kind is TypeKind.RELATIONSHIP:
        head = f"Relationship {t.name} "
    else:
        head = f"{'Root entity' if t.root else 'Entity'} {t.name} "
    if _is_flat(t):
        return _block(head, t.common, 0)
    body: List[str] = []
    if t.common:
        body += _block("Common ", t.common, 1)
    for v in t.variations:
        body += _block(_variation_head(v), v.features, 1)
    return [head + "{", *body, "}"]


def print_athena(schema: Schema) -> str:
    violations = validate(schema)
    if violations:
        raise InvalidSchema(violations)
    lines = [f"Schema {schema.name}:{schema.version}"]
    for t in schema.types():
        lines.append("")
        lines.extend(render_type_decl(t))
    return "\n".join(lines) + "\n"
