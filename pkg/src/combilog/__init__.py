"""Combilog: variable-free compositional relational programming.

Parse programs, evaluate queries over finite fact bases, translate
definitions to Prolog and draw conjunction-of-makes definitions as
Higraph diagrams.
"""

from .ast import (
    And,
    Definition,
    Diagnostic,
    Foldl,
    Foldr,
    Make,
    Or,
    PredRef,
    Program,
    SourceSpan,
    arity_of,
    check_program,
    normalize,
    pretty_print,
)
from .codegen import (
    CodegenOutput,
    PrologClause,
    alpha_equivalent,
    compile_definition,
    compile_program,
    emit_prolog_text,
)
from .engine import (
    EvalConfig,
    ModePlan,
    brute_force_oracle,
    eval_closed,
    herbrand_universe,
    oracle_answers,
    safety_check,
    solve,
)
from .errors import (
    ArityMismatch,
    CombilogError,
    CombilogSyntaxError,
    FoldListTooLong,
    NameCollision,
    NotDiagrammable,
    NotFinitelyDenotable,
    ProgramError,
    RecursiveDefinition,
    SolutionLimitExceeded,
    UniverseTooLarge,
    UnknownPredicate,
    UnsafeQuery,
)
from .higraph import (
    HigraphModel,
    build_higraph,
    emit_dot,
    emit_svg,
    layout,
    normalize_to_conjunction_of_makes,
    render,
)
from .parser import Query, parse_expr, parse_program, parse_query
from .terms import Atom, Int, ListTerm, Relation, Substitution, Var, make_term

__version__ = "0.1.0"

__all__ = [
    "And",
    "Definition",
    "Diagnostic",
    "Foldl",
    "Foldr",
    "Make",
    "Or",
    "PredRef",
    "Program",
    "SourceSpan",
    "arity_of",
    "check_program",
    "normalize",
    "pretty_print",
    "CodegenOutput",
    "PrologClause",
    "alpha_equivalent",
    "compile_definition",
    "compile_program",
    "emit_prolog_text",
    "EvalConfig",
    "ModePlan",
    "brute_force_oracle",
    "eval_closed",
    "herbrand_universe",
    "oracle_answers",
    "safety_check",
    "solve",
    "ArityMismatch",
    "CombilogError",
    "CombilogSyntaxError",
    "FoldListTooLong",
    "NameCollision",
    "NotDiagrammable",
    "NotFinitelyDenotable",
    "ProgramError",
    "RecursiveDefinition",
    "SolutionLimitExceeded",
    "UniverseTooLarge",
    "UnknownPredicate",
    "UnsafeQuery",
    "HigraphModel",
    "build_higraph",
    "emit_dot",
    "emit_svg",
    "layout",
    "normalize_to_conjunction_of_makes",
    "render",
    "Query",
    "parse_expr",
    "parse_program",
    "parse_query",
    "Atom",
    "Int",
    "ListTerm",
    "Relation",
    "Substitution",
    "Var",
    "make_term",
]
