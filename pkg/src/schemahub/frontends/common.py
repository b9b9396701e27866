"""Grammar loading and the pieces both languages share: feature declarations
and the translation of lark failures into positioned ParseErrors."""
import functools
import re
from pathlib import Path
from typing import Iterable, Optional, Tuple, Type

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from ..core.errors import ParseError, SchemaHubError
from ..core.model import (
    Aggregate,
    Attribute,
    Cardinality,
    ListType,
    MapType,
    RangeConstraint,
    Reference,
    RegexConstraint,
    ScalarType,
    SetType,
    TupleType,
    UNBOUNDED,
)

GRAMMAR_DIR = Path(__file__).parent / "grammars"

_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@functools.lru_cache(maxsize=None)
def load_parser(grammar_path: str) -> Lark:
    """LALR parser for one language, composed with the shared feature fragment."""
    text = Path(grammar_path).read_text(encoding="utf-8")
    shared = (GRAMMAR_DIR / "features.lark").read_text(encoding="utf-8")
    return Lark(text + "\n" + shared, parser="lalr", lexer="contextual",
                propagate_positions=True, maybe_placeholders=True)


def scalar_of(token: str) -> ScalarType:
    # Number is the informal spelling used in change scripts
    if token == "Number":
        return ScalarType.INTEGER
    return ScalarType(token)


def clamp_position(text: str, line: Optional[int], column: Optional[int]) -> Tuple[int, int]:
    lines = text.split("\n") or [""]
    ln = line if line and line > 0 else len(lines)
    ln = min(ln, len(lines))
    width = len(lines[ln - 1]) + 1
    col = column if column and column > 0 else width
    return ln, min(col, width)


def word_at(text: str, line: int, column: int) -> str:
    row = text.split("\n")[line - 1] if text else ""
    m = _WORD.match(row, column - 1)
    return m.group(0) if m else ""


def translate(exc: UnexpectedInput, text: str, origin: str,
              error_cls: Type[ParseError]) -> ParseError:
    if isinstance(exc, UnexpectedEOF):
        line, column = clamp_position(text, None, None)
        return error_cls("unexpected end of input", line, column,
                         sorted(exc.expected), origin)
    line, column = clamp_position(text, exc.line, exc.column)
    if isinstance(exc, UnexpectedToken):
        expected = sorted(exc.expected)
        found = exc.token.value if exc.token.type != "$END" else "end of input"
        return error_cls(f"unexpected {found!r}", line, column, expected, origin)
    if isinstance(exc, UnexpectedCharacters):
        expected = sorted(exc.allowed or ())
        found = word_at(text, line, column) or text[exc.pos_in_stream:exc.pos_in_stream + 1]
        return error_cls(f"unexpected {found!r}", line, column, expected, origin)
    return error_cls(str(exc), line, column, (), origin)


def run_parser(parser: Lark, transformer: Transformer, text: str, origin: str,
               error_cls: Type[ParseError]):
    try:
        tree = parser.parse(text)
    except UnexpectedInput as e:
        raise translate(e, text, origin, error_cls) from None
    try:
        return transformer.transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, SchemaHubError):
            raise e.orig_exc from None
        raise


def position(text: str, token: Token) -> Tuple[int, int]:
    return clamp_position(text, getattr(token, "line", None), getattr(token, "column", None))


# ----------------------------------------------------------------- features

class _Modifier(str):
    pass


KEY = _Modifier("key")
OPTIONAL = _Modifier("optional")


@v_args(inline=True)
class FeatureTransformer(Transformer):
    """Builds model features from the shared feature fragment."""

    error_cls: Type[ParseError] = ParseError

    def __init__(self, text: str = "", origin: str = "<memory>"):
        super().__init__()
        self.text = text
        self.origin = origin

    def error(self, message: str, token: Token) -> ParseError:
        line, column = position(self.text, token)
        return self.error_cls(message, line, column, (), self.origin)

    def feature_list(self, *features):
        return [f for f in features if f is not None]

    def feature(self, *parts):
        *mods, name, build = parts
        key = KEY in mods
        optional = OPTIONAL in mods
        if key and build.func is not Attribute:
            raise self.error(f"key modifier on non-attribute feature {name}", name)
        if build.func is Attribute:
            return build(name=str(name), key=key, optional=optional)
        return build(name=str(name), optional=optional)

    def key_mod(self):
        return KEY

    def opt_mod(self):
        return OPTIONAL

    def attr_type(self, dtype, constraint=None):
        return functools.partial(Attribute, type=dtype, constraint=constraint)

    def aggr_type(self, target, card):
        return functools.partial(Aggregate, target=str(target), cardinality=card)

    def ref_type(self, target, *rest):
        value_type = next((r for r in rest if isinstance(r, ScalarType)), None)
        card = next(r for r in rest if isinstance(r, Cardinality))
        attrs = next((r for r in rest if isinstance(r, tuple)), ())
        return functools.partial(Reference, target=str(target), cardinality=card,
                                 value_type=value_type, attributes=attrs)

    def ref_as(self, scalar):
        return scalar_of(scalar)

    def ref_attrs(self, features):
        for f in features:
            if not isinstance(f, Attribute):
                raise self.error(f"reference attribute {f.name} must be an attribute", Token("NAME", f.name))
        return tuple(features)

    def scalar(self, token):
        return scalar_of(token)

    def list_type(self, element):
        return ListType(element)

    def set_type(self, element):
        return SetType(element)

    def map_type(self, key, value):
        return MapType(key, value)

    def tuple_type(self, *elements):
        return TupleType(tuple(elements))

    def regex_constraint(self, token):
        return RegexConstraint(str(token)[1:-1])

    def range_constraint(self, lo, hi):
        if int(lo) > int(hi):
            raise self.error(f"empty range ({lo} .. {hi})", lo)
        return RangeConstraint(int(lo), int(hi))

    def card_opt(self):
        return Cardinality(0, 1)

    def card_one(self):
        return Cardinality(1, 1)

    def card_any(self):
        return Cardinality(0, UNBOUNDED)

    def card_some(self):
        return Cardinality(1, UNBOUNDED)


def names(tokens: Iterable) -> Tuple[str, ...]:
    return tuple(str(t) for t in tokens)
