from fastapi import APIRouter, Depends

from ..codegen.base import GeneratorRegistry
from .deps import get_registry

router = APIRouter(prefix="", tags=["health"])


@router.get("/health")
async def health():
    return {"status": "ok"}


@router.get("/ready")
async def ready(registry: GeneratorRegistry = Depends(get_registry)):
    names = registry.names()
    return {"ready": bool(names), "targets": names}
