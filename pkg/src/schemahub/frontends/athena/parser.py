import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from lark import Token, v_args

from ...core.errors import AthenaSyntaxError, DuplicateName, InvalidSchema, UnknownFSet, UnknownTargetType
from ...core.model import (
    Aggregate,
    EntityType,
    Feature,
    Reference,
    RelationshipType,
    Schema,
    StructuralVariation,
    TypeKind,
)
from ...core.validation import validate
from ..common import FeatureTransformer, load_parser, position, run_parser

log = logging.getLogger(__name__)

GRAMMAR = Path(__file__).with_name("athena.lark")


@dataclass
class _Common:
    features: List[Feature]


@dataclass
class _TypeDecl:
    kind: TypeKind
    name: Token
    root: bool
    common: List[Feature]
    variations: List[Tuple[Token, StructuralVariation]]
    fsets: List[Token] = field(default_factory=list)


@dataclass
class _FSetDecl:
    name: Token
    features: List[Feature]


@v_args(inline=True)
class _AthenaTransformer(FeatureTransformer):
    error_cls = AthenaSyntaxError

    def start(self, header, *decls):
        return header, list(decls)

    def header(self, name, version):
        return str(name), int(version)

    def root_entity(self, name, body, refs):
        return _TypeDecl(TypeKind.ENTITY, name, True, *body, fsets=refs)

    def nested_entity(self, name, body, refs):
        return _TypeDecl(TypeKind.ENTITY, name, False, *body, fsets=refs)

    def relationship_decl(self, name, body, refs):
        return _TypeDecl(TypeKind.RELATIONSHIP, name, False, *body, fsets=refs)

    def fset_decl(self, name, features):
        return _FSetDecl(name, features)

    def flat_body(self, features):
        return features, []

    def variant_body(self, *parts):
        common: List[Feature] = []
        variations = []
        for p in parts:
            if isinstance(p, _Common):
                common = p.features
            else:
                variations.append(p)
        return common, variations

    def common(self, features):
        return _Common(features)

    def variation(self, var_id, *rest):
        count = rest[0] if len(rest) == 2 else None
        features = rest[-1]
        return var_id, StructuralVariation(int(var_id), tuple(features), count)

    def count(self, n):
        return int(n)

    def fset_refs(self, *names):
        return list(names)


def parse_athena(text: str, origin: str = "<memory>", *, strict: bool = True) -> Schema:
    """Parse Athena text into a Schema.

    FSets are inlined into the including type's common features. With
    ``strict`` off, dangling reference/aggregate targets and other
    well-formedness problems are left for ``validate`` to report.
    """
    transformer = _AthenaTransformer(text, origin)
    (name, version), decls = run_parser(load_parser(str(GRAMMAR)), transformer, text, origin,
                                        AthenaSyntaxError)
    schema = _Resolver(text, origin).resolve(name, version, decls, strict)
    if strict:
        violations = validate(schema)
        if violations:
            raise InvalidSchema(violations)
    log.debug("parsed %s: %d entity, %d relationship types", origin,
              len(schema.entity_types), len(schema.relationship_types))
    return schema


def parse_athena_file(path, *, strict: bool = True) -> Schema:
    p = Path(path)
    return parse_athena(p.read_text(encoding="utf-8"), str(p), strict=strict)


class _Resolver:
    def __init__(self, text: str, origin: str):
        self.text = text
        self.origin = origin

    def _fail(self, cls, message: str, token: Token):
        line, column = position(self.text, token)
        return cls(message, line, column, (), self.origin)

    def resolve(self, name: str, version: int, decls, strict: bool) -> Schema:
        fsets: Dict[str, _FSetDecl] = {}
        types: List[_TypeDecl] = []
        seen: Dict[str, Token] = {}
        for d in decls:
            if isinstance(d, _FSetDecl):
                if str(d.name) in fsets:
                    raise self._fail(DuplicateName, f"duplicate feature set {d.name}", d.name)
                fsets[str(d.name)] = d
                self._check_unique(d.features, d.name)
                continue
            if str(d.name) in seen:
                raise self._fail(DuplicateName, f"duplicate schema type {d.name}", d.name)
            seen[str(d.name)] = d.name
            types.append(d)

        entity_names = {str(t.name) for t in types if t.kind is TypeKind.ENTITY}
        entities, relationships = [], []
        for d in types:
            common = list(d.common)
            for ref in d.fsets:
                fs = fsets.get(str(ref))
                if fs is None:
                    raise self._fail(UnknownFSet, f"unknown feature set {ref}", ref)
                common.extend(fs.features)
            self._check_unique(common, d.name)
            variations = self._variations(d)
            for v in variations:
                self._check_unique(common + list(v.features), d.name)
            if strict:
                for f in common + [f for v in variations for f in v.features]:
                    if isinstance(f, (Reference, Aggregate)) and f.target not in entity_names:
                        raise self._fail(UnknownTargetType,
                                         f"{d.name}.{f.name} targets undeclared type {f.target}", d.name)
            if d.kind is TypeKind.ENTITY:
                entities.append(EntityType(str(d.name), tuple(common), variations, is_root=d.root))
            else:
                relationships.append(RelationshipType(str(d.name), tuple(common), variations))
        return Schema(name, version, tuple(entities), tuple(relationships))

    def _variations(self, d: _TypeDecl) -> Tuple[StructuralVariation, ...]:
        if not d.variations:
            return (StructuralVariation(1),)
        ids = set()
        for token, v in d.variations:
            if v.var_id in ids:
                raise self._fail(DuplicateName, f"duplicate variation {v.var_id} in {d.name}", token)
            ids.add(v.var_id)
        return tuple(v for _, v in d.variations)

    def _check_unique(self, features, anchor: Token):
        names = set()
        for f in features:
            if f.name in names:
                raise self._fail(DuplicateName, f"duplicate feature {f.name} in {anchor}", anchor)
            names.add(f.name)
