from typing import Optional

from ...core.model import Cardinality, TypeKind
from ..athena.printer import render_feature
from .ast import ChangeOp, ChangeScript, FeatureSelector, JoinCondition, OpKind


def _flavor(op: ChangeOp, plural: bool = False) -> str:
    if op.flavor is TypeKind.RELATIONSHIP:
        return "RELATIONSHIPS" if plural else "RELATIONSHIP"
    return "ENTITIES" if plural else "ENTITY"


def _card(c: Cardinality) -> str:
    return c.symbol


def _where(join: Optional[JoinCondition]) -> str:
    return f" WHERE {join.source_feature}={join.target_feature}" if join else ""


def _body(features) -> str:
    if not features:
        return "{}"
    return "{ " + ", ".join(render_feature(f) for f in features) + " }"


def print_op(op: ChangeOp) -> str:
    k = op.kind
    sel: FeatureSelector = op.selector
    t = op.type_name
    if k is OpKind.ADD_TYPE:
        suffix = " EMBEDDED" if op.flavor is TypeKind.ENTITY and not op.root else ""
        return f"ADD {_flavor(op)} {t}: {_body(op.body)}{suffix}"
    if k is OpKind.DELETE_TYPE:
        return f"DELETE {_flavor(op)} {t}"
    if k is OpKind.RENAME_TYPE:
        return f"RENAME {_flavor(op)} {t} TO {op.new_name}"
    if k is OpKind.EXTRACT_TYPE:
        return f"EXTRACT {_flavor(op)} {t}::{', '.join(sel.features)} TO {op.new_name}"
    if k is OpKind.SPLIT_TYPE:
        a, b = op.parts
        return (f"SPLIT {_flavor(op)} {t} TO {a.name} {{ {', '.join(a.features)} }}"
                f" AND {b.name} {{ {', '.join(b.features)} }}")
    if k is OpKind.MERGE_TYPE:
        return f"MERGE {_flavor(op, plural=True)} {op.type_names[0]}, {op.type_names[1]} TO {op.new_name}"
    if k is OpKind.DELVAR:
        return f"DELVAR {_flavor(op)} {t}::v{op.variations[0]}"
    if k is OpKind.ADAPT:
        return f"ADAPT {_flavor(op)} {t}::v{op.variations[0]} TO v{op.variations[1]}"
    if k is OpKind.UNION:
        return f"UNION {_flavor(op)} {t}"
    if k is OpKind.DELETE_FEATURE:
        return f"DELETE {sel}"
    if k is OpKind.RENAME_FEATURE:
        return f"RENAME {sel} TO {op.new_name}"
    if k in (OpKind.COPY_FEATURE, OpKind.MOVE_FEATURE):
        verb = "COPY" if k is OpKind.COPY_FEATURE else "MOVE"
        return f"{verb} {sel} TO {op.target_type}::{op.new_name}{_where(op.join)}"
    if k is OpKind.NEST_FEATURE:
        return f"NEST {sel} TO {op.aggregate}"
    if k is OpKind.UNNEST_FEATURE:
        return f"UNNEST {sel} FROM {op.aggregate}"
    if k is OpKind.ADD_ATTR:
        text = render_feature(op.feature).split(": ", 1)[1]
        return f"ADD ATTR {sel}: {text}"
    if k is OpKind.CAST_ATTR:
        return f"CAST ATTR {sel} TO {op.scalar.value}"
    if k is OpKind.PROMOTE_ATTR:
        return f"PROMOTE ATTR {sel}"
    if k is OpKind.DEMOTE_ATTR:
        return f"DEMOTE ATTR {sel}"
    if k is OpKind.ADD_REF:
        ref = op.feature
        body = ref.value_type.value if ref.value_type is not None else _body(ref.attributes)
        return f"ADD REF {sel}: {body} {_card(ref.cardinality)} TO {ref.target}{_where(op.join)}"
    if k is OpKind.CAST_REF:
        return f"CAST REF {sel} TO {op.scalar.value}"
    if k in (OpKind.MULT_REF, OpKind.MULT_AGGR):
        what = "REF" if k is OpKind.MULT_REF else "AGGR"
        return f"MULT {what} {sel} TO {_card(op.cardinality)}"
    if k in (OpKind.MORPH_REF, OpKind.MORPH_AGGR):
        what = "REF" if k is OpKind.MORPH_REF else "AGGR"
        to = f" TO {op.new_name}" if op.new_name else ""
        return f"MORPH {what} {sel}{to}"
    if k is OpKind.ADD_AGGR:
        aggr = op.feature
        if op.inline:
            return f"ADD AGGR {sel}: {_body(op.body)}{_card(aggr.cardinality)} AS {aggr.target}"
        return f"ADD AGGR {sel}: {aggr.target}{_card(aggr.cardinality)}"
    raise ValueError(f"unprintable operation {k}")


def print_orion(script: ChangeScript) -> str:
    lines = [f"{script.name} operations", f"Using {script.using[0]}:{script.using[1]}"]
    if script.ops:
        lines.append("")
        lines.extend(print_op(op) for op in script.ops)
    return "\n".join(lines) + "\n"

