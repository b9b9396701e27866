from .parser import parse_athena, parse_athena_file
from .printer import print_athena

__all__ = ["parse_athena", "parse_athena_file", "print_athena"]
