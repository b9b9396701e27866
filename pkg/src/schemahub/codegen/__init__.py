from .base import (
    AbstractGenerator,
    Backend,
    GeneratedScript,
    GeneratorRegistry,
    Statement,
    UnsupportedOp,
    default_registry,
)
from .stacking import flatten, stack_optimize
from .writer import provenance_lines, render_script, write_script

__all__ = [
    "AbstractGenerator", "Backend", "GeneratedScript", "GeneratorRegistry", "Statement", "UnsupportedOp",
    "default_registry", "flatten", "stack_optimize", "provenance_lines", "render_script", "write_script",
]
