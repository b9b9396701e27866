from .ast import ChangeOp, ChangeScript, FeatureSelector, JoinCondition, OpCategory, OpKind, SplitPart
from .parser import parse_orion, parse_orion_file
from .printer import print_op, print_orion

__all__ = [
    "ChangeOp", "ChangeScript", "FeatureSelector", "JoinCondition", "OpCategory", "OpKind",
    "SplitPart", "parse_orion", "parse_orion_file", "print_op", "print_orion",
]
