"""Inductive data type systems: simply-typed terms with inductive types,
higher-order rewriting, and a checker for the General Schema termination
criterion."""

from .errors import (ArityError, EncodingError, FuelExhausted, IDTSError, NotARedex,
                     ParseError, PositionError, RecursorError, RuleError, StatusError,
                     TermTypeError, ValidationError)
from .rewriting import Rule, RuleSystem, normalize
from .schema import check_rule_schema, check_system
from .signature import Signature, Status, seal, validate
from .syntax import load, parse, parse_term, print_spec
from .terms import Abs, App, FunApp, Symbol, Var
from .types import Arrow, Ind

__all__ = [
    "ArityError", "EncodingError", "FuelExhausted", "IDTSError", "NotARedex", "ParseError",
    "PositionError", "RecursorError", "RuleError", "StatusError", "TermTypeError",
    "ValidationError", "Rule", "RuleSystem", "normalize", "check_rule_schema",
    "check_system", "Signature", "Status", "seal", "validate", "load", "parse",
    "parse_term", "print_spec", "Abs", "App", "FunApp", "Symbol", "Var", "Arrow", "Ind",
]

__version__ = "0.1.0"
