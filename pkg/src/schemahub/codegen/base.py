import enum
import importlib
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from ..core.errors import ConfigError, UnsupportedTargetOp
from ..core.model import Schema
from ..engine.evolution import apply_op, apply_script
from ..frontends.orion.ast import ChangeOp, ChangeScript
from ..frontends.orion.printer import print_op

log = logging.getLogger(__name__)


class Backend(str, enum.Enum):
    DOCUMENT = "document"
    COLUMNAR = "columnar"
    GRAPH = "graph"


@dataclass(frozen=True)
class Statement:
    """One generated statement and the operation indexes it implements.

    ``filter``/``update`` are set on document updateMany statements, which
    is what makes them stackable; a stacked bulkWrite keeps its entries.
    """
    text: str
    ops: Tuple[int, ...]
    comments: Tuple[str, ...] = ()
    collection: Optional[str] = None
    filter: Optional[str] = None
    update: Optional[str] = None
    entries: Tuple["Statement", ...] = ()

    @property
    def stackable(self) -> bool:
        return self.filter is not None and self.update is not None

    def render(self, comment: str = "//") -> str:
        lines = [f"{comment} {c}" for c in self.comments]
        lines.append(self.text)
        return "\n".join(lines)


@dataclass(frozen=True)
class UnsupportedOp:
    op_index: int
    operation: str
    reason: str


@dataclass(frozen=True)
class GeneratedScript:
    target: Backend
    statements: Tuple[Statement, ...] = ()
    unsupported: Tuple[UnsupportedOp, ...] = ()
    name: str = "script"
    using: Tuple[str, int] = ("", 0)

    def provenance(self) -> List[Tuple[int, int]]:
        """(op index, statement index) pairs in statement order."""
        return [(op, i) for i, s in enumerate(self.statements) for op in s.ops]

    def covered(self) -> List[int]:
        ops = {op for op, _ in self.provenance()} | {u.op_index for u in self.unsupported}
        return sorted(ops)


class AbstractGenerator(ABC):
    backend: Backend
    comment = "//"
    extension = "txt"

    def __init__(self, **params):
        self.params = params

    def generate(self, schema: Schema, script: ChangeScript) -> GeneratedScript:
        """Translate every operation against the schema it applies to."""
        outcome = apply_script(schema, script)
        if not outcome.ok:
            raise outcome.failed_at[1]
        statements: List[Statement] = []
        unsupported: List[UnsupportedOp] = []
        current = schema
        for i, op in enumerate(script.ops):
            after = apply_op(current, op)
            try:
                produced = self.translate(current, after, op, i)
            except UnsupportedTargetOp as e:
                log.warning("%s: op %d unsupported (%s)", self.backend.value, i, e.reason)
                unsupported.append(UnsupportedOp(i, print_op(op), e.reason))
                produced = []
            statements.extend(produced)
            log.debug("%s: op %d -> %d statements", self.backend.value, i, len(produced))
            current = after
        return GeneratedScript(self.backend, tuple(statements), tuple(unsupported),
                               script.name, tuple(script.using))

    @abstractmethod
    def translate(self, before: Schema, after: Schema, op: ChangeOp, index: int) -> List[Statement]:
        ...

    def statement(self, text: str, op: ChangeOp, index: int, **kw) -> Statement:
        return Statement(text, (index,), (print_op(op),), **kw)


class GeneratorRegistry:
    def __init__(self):
        self.generators: Dict[str, AbstractGenerator] = {}

    def load_from_config(self, targets: Mapping[str, Mapping]):
        for name, entry in targets.items():
            try:
                mod = importlib.import_module(entry["module"])
                cls = getattr(mod, entry["class"])
            except (ImportError, AttributeError, KeyError) as e:
                log.warning("skipping target %s: import failed (%s)", name, e)
                continue
            self.register(name, cls(**(entry.get("params") or {})))
        return self

    def register(self, name: str, generator: AbstractGenerator):
        self.generators[name] = generator

    def get(self, name: str) -> AbstractGenerator:
        try:
            return self.generators[name]
        except KeyError:
            raise ConfigError(f"no generator registered for target {name!r}") from None

    def names(self) -> List[str]:
        return list(self.generators)


DEFAULT_TARGETS = {
    "document": {"module": "schemahub.codegen.document", "class": "DocumentGenerator"},
    "columnar": {"module": "schemahub.codegen.columnar", "class": "ColumnarGenerator"},
    "graph": {"module": "schemahub.codegen.graph", "class": "GraphGenerator"},
}


def default_registry() -> GeneratorRegistry:
    return GeneratorRegistry().load_from_config(DEFAULT_TARGETS)
