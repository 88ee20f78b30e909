from .parser import NadlError, parse, parse_formula, tokenize
from .syntax import (Action, Agent, ArithOp, Bin, Const, DomainDescription, Ite, Not, Num,
                     NumVar, Pos, Prop, Rel, VarDecl, conj, desugar_ite, disj, format_arith,
                     format_domain, format_formula, variables)
from .validate import Violation, format_violations, validate


def load_domain(text: str) -> DomainDescription:
    """Parse and validate; raises :class:`NadlError` on the first problem."""
    dd = parse(text)
    problems = validate(dd)
    if problems:
        v = problems[0]
        line, col = (v.pos.line, v.pos.col) if v.pos else (0, 0)
        err = NadlError(v.message, line, col, v.code)
        err.violations = problems
        raise err
    return dd
