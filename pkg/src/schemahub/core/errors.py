from typing import Optional, Sequence, Tuple


class SchemaHubError(Exception):
    """Root of every error raised by the toolchain."""


# ---------------------------------------------------------------- parsing

class ParseError(SchemaHubError):
    def __init__(self, message: str, line: int = 1, column: int = 1,
                 expected: Sequence[str] = (), origin: str = "<memory>"):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.origin = origin
        self.message = message
        super().__init__(f"{origin}:{line}:{column}: {message}")


class AthenaSyntaxError(ParseError):
    pass


class OrionSyntaxError(ParseError):
    pass


class UnknownOperationKeyword(OrionSyntaxError):
    pass


class UnknownFSet(ParseError):
    pass


class UnknownTargetType(ParseError):
    pass


class DuplicateName(ParseError):
    pass


# ----------------------------------------------------------------- schema

class SchemaError(SchemaHubError):
    pass


class UnknownType(SchemaError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown schema type {name!r}")


class UnknownVariation(SchemaError):
    def __init__(self, type_name: str, var_id: int):
        self.type_name = type_name
        self.var_id = var_id
        super().__init__(f"schema type {type_name!r} has no variation {var_id}")


class InvalidSchema(SchemaError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.rule} at {v.path}" for v in self.violations)
        super().__init__(f"schema is not well-formed: {lines}")


# -------------------------------------------------------------- evolution

class EvolutionError(SchemaHubError):
    pass


class UsingMismatch(EvolutionError):
    def __init__(self, expected: Tuple[str, int], actual: Tuple[str, int]):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"script uses {expected[0]}:{expected[1]} but schema is {actual[0]}:{actual[1]}"
        )


class PreconditionViolation(EvolutionError):
    def __init__(self, clause: str, op_index: Optional[int] = None, detail: str = ""):
        self.clause = clause
        self.op_index = op_index
        self.detail = detail
        super().__init__(self._render())

    def _render(self) -> str:
        where = f"op {self.op_index}: " if self.op_index is not None else ""
        extra = f" ({self.detail})" if self.detail else ""
        return f"{where}precondition violated: {self.clause}{extra}"

    def at(self, op_index: int) -> "PreconditionViolation":
        self.op_index = op_index
        self.args = (self._render(),)
        return self


class AmbiguousSelector(PreconditionViolation):
    pass


class NonScalarCastTarget(PreconditionViolation):
    pass


# ------------------------------------------------------------------- data

class DataError(SchemaHubError):
    def __init__(self, message: str, op_index: Optional[int] = None,
                 record: Optional[Tuple[str, int]] = None):
        self.message = message
        self.op_index = op_index
        self.record = record
        super().__init__(self._render())

    def _render(self) -> str:
        parts = []
        if self.op_index is not None:
            parts.append(f"op {self.op_index}")
        if self.record is not None:
            parts.append(f"record {self.record[0]}#{self.record[1]}")
        prefix = ", ".join(parts)
        return f"{prefix}: {self.message}" if prefix else self.message

    def at(self, op_index: int) -> "DataError":
        self.op_index = op_index
        self.args = (self._render(),)
        return self


class CastError(DataError):
    def __init__(self, value, target, **kw):
        self.value = value
        self.target = target
        super().__init__(f"cannot cast {value!r} to {target}", **kw)


class JoinAmbiguity(DataError):
    pass


class MissingKey(DataError):
    pass


class UniquenessViolation(DataError):
    pass


class MultiplicityError(DataError):
    pass


class FormatError(DataError):
    def __init__(self, message: str, path: str = "<memory>", line: int = 0):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


# ----------------------------------------------------------------- config

class ConfigError(SchemaHubError):
    pass


# ---------------------------------------------------------------- codegen

class UnsupportedTargetOp(SchemaHubError):
    """An operation the selected backend has no translation for."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)
