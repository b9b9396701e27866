from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..frontends.orion.ast import OpKind


class ViolationOut(BaseModel):
    rule: str
    path: str


class ParseErrorOut(BaseModel):
    message: str
    line: int
    column: int
    expected: List[str] = []


class ValidateRequest(BaseModel):
    athena: str


class ValidateResponse(BaseModel):
    violations: List[ViolationOut]


class FeaturesRequest(BaseModel):
    athena: str
    type: str


class FeaturesResponse(BaseModel):
    type: str
    features: List[str]


class ApplyRequest(BaseModel):
    athena: str
    orion: str


class LogEntry(BaseModel):
    index: int
    op: str


class ApplyResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_text: str = Field(..., alias='schema', description="updated schema in Athena syntax")
    log: List[LogEntry]


class GenerateRequest(BaseModel):
    athena: str
    orion: str
    target: str = 'document'
    stack: bool = True


class StatementOut(BaseModel):
    text: str
    ops: List[int]


class UnsupportedOut(BaseModel):
    op_index: int
    operation: str
    reason: str


class GenerateResponse(BaseModel):
    statements: List[StatementOut]
    unsupported: List[UnsupportedOut]
    provenance: List[Tuple[int, int]]


class CheckRequest(BaseModel):
    kind: OpKind
    cases: int = Field(50, ge=1)
    seed: int = 0


class FailureOut(BaseModel):
    seed: int
    schema_fingerprint: str
    op: str
    clause: str


class CheckResponse(BaseModel):
    kind: OpKind
    cases: int
    covered: int
    failures: List[FailureOut]
