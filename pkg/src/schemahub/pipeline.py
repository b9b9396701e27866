"""Steps shared by the CLI and the HTTP surface."""
import logging
from typing import Optional, Tuple

from .codegen.base import AbstractGenerator, Backend, GeneratedScript, GeneratorRegistry
from .codegen.stacking import stack_optimize
from .core.model import Schema
from .frontends.orion.ast import ChangeScript
from .settings import Settings

log = logging.getLogger(__name__)


def build_registry(settings: Settings) -> GeneratorRegistry:
    registry = GeneratorRegistry().load_from_config(settings.targets())
    log.debug("generator targets: %s", ", ".join(registry.names()))
    return registry


def generate_script(schema: Schema, script: ChangeScript, target: str, registry: GeneratorRegistry,
                    stack: Optional[bool] = True) -> Tuple[AbstractGenerator, GeneratedScript]:
    generator = registry.get(target)
    generated = generator.generate(schema, script)
    if stack and generated.target is Backend.DOCUMENT:
        generated = stack_optimize(generated)
    return generator, generated
