from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .api.deps import get_registry
from .api.health import router as health_router
from .api.routes import router as pipeline_router
from .core.errors import (
    ConfigError, InvalidSchema, ParseError, PreconditionViolation, SchemaHubError, UnknownType,
)
from .core.schemas import ParseErrorOut
from .logging_config import configure_logging

configure_logging()

app = FastAPI(title="SchemaHub",
              description="Schema evolution toolchain: Athena schemas, Orion scripts, migration code generation",
              version="0.1.0")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(health_router)
app.include_router(pipeline_router)


@app.exception_handler(ParseError)
async def parse_error(request: Request, exc: ParseError):
    body = ParseErrorOut(message=exc.message, line=exc.line, column=exc.column, expected=list(exc.expected))
    return JSONResponse(status_code=422, content=body.model_dump())


@app.exception_handler(InvalidSchema)
async def invalid_schema(request: Request, exc: InvalidSchema):
    return JSONResponse(status_code=422, content={
        "detail": str(exc),
        "violations": [{"rule": v.rule, "path": v.path} for v in exc.violations],
    })


@app.exception_handler(UnknownType)
async def unknown_type(request: Request, exc: UnknownType):
    return JSONResponse(status_code=404, content={"detail": str(exc)})


@app.exception_handler(PreconditionViolation)
async def precondition(request: Request, exc: PreconditionViolation):
    return JSONResponse(status_code=409, content={
        "detail": str(exc), "op_index": exc.op_index, "clause": exc.clause,
    })


@app.exception_handler(ConfigError)
async def config_error(request: Request, exc: ConfigError):
    return JSONResponse(status_code=500, content={"detail": str(exc)})


@app.exception_handler(SchemaHubError)
async def schemahub_error(request: Request, exc: SchemaHubError):
    return JSONResponse(status_code=409, content={"detail": str(exc)})


@app.on_event("startup")
async def startup_event():
    get_registry()

# Run: uvicorn schemahub.main:app --host 0.0.0.0 --port 8080
