from .evolution import (
    ApplyOutcome,
    apply_aggregate_op,
    apply_attribute_op,
    apply_feature_op,
    apply_op,
    apply_reference_op,
    apply_schema_type_op,
    apply_script,
    apply_variation_op,
)

__all__ = [
    "ApplyOutcome", "apply_aggregate_op", "apply_attribute_op", "apply_feature_op", "apply_op",
    "apply_reference_op", "apply_schema_type_op", "apply_script", "apply_variation_op",
]
