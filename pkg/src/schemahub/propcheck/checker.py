"""Postcondition, frame-condition and well-formedness checking over
generated schemas, plus a bounded-exhaustive sweep at scope 2."""
import hashlib
import itertools
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from ..core.errors import PreconditionViolation
from ..core.model import Aggregate, Attribute, EntityType, Reference, ScalarType, Schema, StructuralVariation
from ..core.validation import validate
from ..engine.evolution import apply_op
from ..engine.postconditions import check_postcondition, frame_holds
from ..frontends.athena.printer import print_athena
from ..frontends.orion.ast import ChangeOp, OpKind
from ..frontends.orion.printer import print_op
from .generator import GenConfig, candidates, gen_applicable_op, gen_schema
from .preconditions import precondition_holds

log = logging.getLogger(__name__)

Apply = Callable[[Schema, ChangeOp], Schema]

SWEEP_KINDS = (OpKind.RENAME_TYPE, OpKind.RENAME_FEATURE, OpKind.DELETE_TYPE, OpKind.DELETE_FEATURE,
               OpKind.MERGE_TYPE)
_WELL_FORMED = "resulting schema is well-formed"
_REJECTED = "rejected an applicable operation: "


@dataclass(frozen=True)
class Failure:
    seed: int
    schema: str
    op: str
    clause: str


@dataclass(frozen=True)
class CheckResult:
    kind: OpKind
    cases: int
    failures: Tuple[Failure, ...] = ()
    covered: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        return f"{self.kind.value}\t{self.cases}\t{len(self.failures)}"


@dataclass(frozen=True)
class Finding:
    """A precondition the engine enforces beyond the taxonomy's own clauses."""
    kind: OpKind
    clause: str
    example: str


@dataclass(frozen=True)
class SweepResult:
    schemas: int
    checked: int
    failures: Tuple[Failure, ...] = ()
    findings: Tuple[Finding, ...] = ()


def fingerprint(schema: Schema) -> str:
    return hashlib.sha1(print_athena(schema).encode("utf-8")).hexdigest()[:12]


def case_seed(seed: int, kind: OpKind, index: int) -> int:
    return (seed * 100 + list(OpKind).index(kind)) * 1_000_000 + index


def _guarded(clause: str) -> bool:
    """The engine refused an op only because its result would be ill-formed."""
    return clause.startswith(_REJECTED + _WELL_FORMED)


def verify(schema: Schema, op: ChangeOp, apply: Apply = apply_op) -> Optional[str]:
    """First violated clause for ``op`` on ``schema``, or None."""
    try:
        after = apply(schema, op)
    except PreconditionViolation as e:
        return _REJECTED + e.clause
    try:
        clause = check_postcondition(schema, after, op)
        if clause is not None:
            return clause
        if not frame_holds(schema, after, op):
            return "frame condition"
    except Exception as e:  # a broken engine can leave the result unreadable
        return f"check raised {type(e).__name__}: {e}"
    violations = validate(after)
    if violations:
        return f"validate: {violations[0].rule}"
    return None


def _run_case(kind: OpKind, cfg: GenConfig, index: int, apply: Apply) -> Tuple[bool, Optional[Failure]]:
    seed = case_seed(cfg.seed, kind, index)
    schema = gen_schema(replace(cfg, seed=seed))
    op = gen_applicable_op(schema, kind, random.Random(seed))
    if op is None:
        return False, None
    clause = verify(schema, op, apply)
    if clause is None:
        return True, None
    if _guarded(clause):
        log.debug("%s: seed %d hits the well-formedness guard", kind.value, seed)
        return False, None
    return True, Failure(seed, fingerprint(schema), print_op(op), clause)


def check_operation(kind: OpKind, cfg: GenConfig, cases: int, apply: Apply = apply_op,
                    workers: int = 1) -> CheckResult:
    if cases < 1:
        raise ValueError("cases must be at least 1")
    run = partial(_run_case, kind, cfg, apply=apply)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, range(cases)))
    else:
        outcomes = [run(i) for i in range(cases)]
    failures = tuple(f for _, f in outcomes if f is not None)
    covered = sum(1 for hit, _ in outcomes if hit)
    for f in failures:
        log.warning("%s: seed %d fails %s (%s)", kind.value, f.seed, f.clause, f.op)
    log.info("%s: %d cases, %d covered, %d failures", kind.value, cases, covered, len(failures))
    return CheckResult(kind, cases, failures, covered)


def replay(failure: Failure, kind: OpKind, cfg: GenConfig, apply: Apply = apply_op) -> Optional[str]:
    """Re-run one reported failure from its seed."""
    schema = gen_schema(replace(cfg, seed=failure.seed))
    op = gen_applicable_op(schema, kind, random.Random(failure.seed))
    return verify(schema, op, apply) if op is not None else None


def run_suite(cfg: GenConfig, cases_per_op: int, apply: Apply = apply_op,
              workers: int = 1) -> Dict[OpKind, CheckResult]:
    return {kind: check_operation(kind, cfg, cases_per_op, apply, workers) for kind in OpKind}


def report_lines(results: Dict[OpKind, CheckResult]) -> List[str]:
    return [r.line() for r in results.values()]


# -------------------------------------------------------- exhaustive sweep

_FEATURE_SHAPES = ("string", "key", "ref", "aggr")


def _features(shapes: Sequence[str], owner: int, names: Iterator[int], n_types: int, roots: Sequence[bool]):
    out = []
    for shape in shapes:
        name = f"f{next(names)}"
        if shape == "string":
            out.append(Attribute(name, ScalarType.STRING))
        elif shape == "key":
            out.append(Attribute(name, ScalarType.INTEGER, key=True))
        elif shape == "ref":
            out.append(Reference(name, "E0"))
        else:
            other = 1 - owner
            if n_types < 2 or roots[other]:
                return None
            out.append(Aggregate(name, f"E{other}"))
    return out


def tiny_schemas() -> Iterator[Schema]:
    """Every schema with at most two entity types of at most two features,
    one or two variations each."""
    for n_types in (1, 2):
        for roots in itertools.product((True, False), repeat=n_types):
            if not roots[0]:
                continue
            per_type = [list(itertools.product(_FEATURE_SHAPES, repeat=k)) for k in (0, 1, 2)]
            shapes = [s for group in per_type for s in group]
            for combo in itertools.product(shapes, repeat=n_types):
                for split in itertools.product((False, True), repeat=n_types):
                    names = itertools.count()
                    types = []
                    for i, (feature_shapes, vary) in enumerate(zip(combo, split)):
                        feats = _features(feature_shapes, i, names, n_types, roots)
                        if feats is None:
                            break
                        if vary and feats:
                            variations = (StructuralVariation(1, tuple(feats[-1:])), StructuralVariation(2))
                            common = tuple(feats[:-1])
                        else:
                            variations, common = (StructuralVariation(1),), tuple(feats)
                        types.append(EntityType(f"E{i}", common, variations, is_root=roots[i]))
                    else:
                        schema = Schema("tiny", 1, tuple(types))
                        if not validate(schema):
                            yield schema


def exhaustive_sweep(kinds: Sequence[OpKind] = SWEEP_KINDS, apply: Apply = apply_op) -> SweepResult:
    failures: List[Failure] = []
    findings: Dict[Tuple[OpKind, str], Finding] = {}
    n_schemas = checked = 0
    for schema in tiny_schemas():
        n_schemas += 1
        for kind in kinds:
            for op in candidates(schema, kind, random.Random(0)):
                if not precondition_holds(schema, op):
                    continue
                clause = verify(schema, op, apply)
                if clause is not None and _guarded(clause):
                    guard = clause[len(_REJECTED):]
                    findings.setdefault((kind, guard), Finding(kind, guard, print_op(op)))
                    continue
                checked += 1
                if clause is not None:
                    failures.append(Failure(0, fingerprint(schema), print_op(op), clause))
    log.info("sweep: %d schemas, %d operations, %d failures, %d findings",
             n_schemas, checked, len(failures), len(findings))
    ordered = sorted(findings.values(), key=lambda f: (list(OpKind).index(f.kind), f.clause))
    return SweepResult(n_schemas, checked, tuple(failures), tuple(ordered))
