import logging

from fastapi import APIRouter, Depends, HTTPException

from ..codegen.base import GeneratorRegistry
from ..core.schemas import (
    ApplyRequest, ApplyResponse, CheckRequest, CheckResponse, FailureOut, FeaturesRequest,
    FeaturesResponse, GenerateRequest, GenerateResponse, LogEntry, StatementOut, UnsupportedOut,
    ValidateRequest, ValidateResponse, ViolationOut,
)
from ..core.validation import features_of, validate
from ..engine.evolution import apply_script
from ..frontends.athena import parse_athena, print_athena
from ..frontends.orion import parse_orion
from ..pipeline import generate_script
from ..propcheck.checker import check_operation
from ..propcheck.generator import GenConfig
from ..settings import Settings
from .deps import get_registry, get_settings

log = logging.getLogger(__name__)

router = APIRouter(tags=['pipeline'])


@router.post('/schemas/validate', response_model=ValidateResponse)
async def validate_schema(req: ValidateRequest):
    schema = parse_athena(req.athena, '<request>', strict=False)
    return ValidateResponse(violations=[ViolationOut(rule=v.rule, path=v.path) for v in validate(schema)])


@router.post('/schemas/features', response_model=FeaturesResponse)
async def schema_features(req: FeaturesRequest):
    schema = parse_athena(req.athena, '<request>')
    return FeaturesResponse(type=req.type, features=[f.name for f in features_of(schema, req.type)])


@router.post('/scripts/apply', response_model=ApplyResponse, response_model_by_alias=True)
async def apply(req: ApplyRequest):
    schema = parse_athena(req.athena, '<schema>')
    outcome = apply_script(schema, parse_orion(req.orion, '<script>'))
    if not outcome.ok:
        raise outcome.failed_at[1]
    return ApplyResponse(schema_text=print_athena(outcome.schema),
                         log=[LogEntry(index=i, op=text) for i, text in outcome.log])


@router.post('/scripts/generate', response_model=GenerateResponse)
async def generate(req: GenerateRequest, registry: GeneratorRegistry = Depends(get_registry)):
    if req.target not in registry.names():
        raise HTTPException(status_code=404, detail=f'unknown target {req.target!r}')
    schema = parse_athena(req.athena, '<schema>')
    script = parse_orion(req.orion, '<script>')
    _, generated = generate_script(schema, script, req.target, registry, req.stack)
    return GenerateResponse(
        statements=[StatementOut(text=s.text, ops=list(s.ops)) for s in generated.statements],
        unsupported=[UnsupportedOut(op_index=u.op_index, operation=u.operation, reason=u.reason)
                     for u in generated.unsupported],
        provenance=generated.provenance(),
    )


@router.post('/scripts/check', response_model=CheckResponse)
def check(req: CheckRequest, settings: Settings = Depends(get_settings)):
    p = settings.propcheck
    cfg = GenConfig(seed=req.seed, max_types=p.max_types, max_variations=p.max_variations,
                    max_features=p.max_features, mode=settings.migration.store)
    result = check_operation(req.kind, cfg, req.cases, workers=p.workers)
    return CheckResponse(
        kind=result.kind, cases=result.cases, covered=result.covered,
        failures=[FailureOut(seed=f.seed, schema_fingerprint=f.schema, op=f.op, clause=f.clause)
                  for f in result.failures],
    )
