from functools import lru_cache

from ..codegen.base import GeneratorRegistry
from ..pipeline import build_registry
from ..settings import Settings, load_settings


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()


@lru_cache(maxsize=1)
def get_registry() -> GeneratorRegistry:
    return build_registry(get_settings())
