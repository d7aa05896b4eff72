"""Syntactic mutation operators and mutant enumeration.

Eight operator classes, each keyed by a tag:

    AOR  arithmetic  + - * / %      each replaced by the other four
    ROR  relational  < <= > >= == !=  each replaced by the other five
    LOR  logical     & | ^          each replaced by the other two
    SOR  shift       << >>          swapped
    COR  conditional && ||          replaced by the other operator, the
                                    left operand, the right operand,
                                    true, and false
    ORU  unary       - ~            replaced by each other and by the
                                    bare operand
    LVR  literal     integer n      -> {0, 1, -1} \\ {n}, plus -n when
                                    nonzero; booleans are negated
    STD  statement   deletion       non-return, non-declaration
                                    statements become no-ops

Enumeration is a deterministic pre-order walk, so the same source always
yields the same ordered mutant list.  Statement deletion keeps ``return``
(removing it rarely leaves a meaningful program) and ``let`` (later
references to the name would no longer resolve).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidConfig
from ..matrix import OPERATOR_TAGS
from .nodes import (
    Assign,
    Binary,
    BoolLit,
    ExprStmt,
    If,
    IntLit,
    NoOp,
    Program,
    Unary,
    While,
    fragment_text,
    node_at,
    replace_at,
    walk,
)

_ARITH = ("+", "-", "*", "/", "%")
_RELATIONAL = ("<", "<=", ">", ">=", "==", "!=")
_LOGICAL = ("&", "|", "^")
_SHIFT = ("<<", ">>")
_CONDITIONAL = ("&&", "||")

NO_OP_TEXT = "<NO-OP>"


@dataclass(frozen=True)
class MutantInstance:
    """One mutation: where it applies and what it puts there."""

    operator: str
    path: tuple  # child-index route from the program root
    original: str
    replacement: str
    method: str  # enclosing function
    replacement_node: object = field(compare=False)


def _replacements(node):
    """(operator tag, replacement node, replacement text) for one AST node."""
    out = []
    if isinstance(node, Binary):
        if node.op in _ARITH:
            for op in _ARITH:
                if op != node.op:
                    out.append(("AOR", Binary(op, node.left, node.right), None))
        elif node.op in _RELATIONAL:
            for op in _RELATIONAL:
                if op != node.op:
                    out.append(("ROR", Binary(op, node.left, node.right), None))
        elif node.op in _LOGICAL:
            for op in _LOGICAL:
                if op != node.op:
                    out.append(("LOR", Binary(op, node.left, node.right), None))
        elif node.op in _SHIFT:
            other = "<<" if node.op == ">>" else ">>"
            out.append(("SOR", Binary(other, node.left, node.right), None))
        elif node.op in _CONDITIONAL:
            other = "&&" if node.op == "||" else "||"
            out.append(("COR", Binary(other, node.left, node.right), None))
            out.append(("COR", node.left, None))
            out.append(("COR", node.right, None))
            out.append(("COR", BoolLit(True), None))
            out.append(("COR", BoolLit(False), None))
    elif isinstance(node, Unary) and node.op in ("-", "~"):
        other = "~" if node.op == "-" else "-"
        out.append(("ORU", Unary(other, node.operand), None))
        out.append(("ORU", node.operand, None))
    elif isinstance(node, IntLit):
        values = [v for v in (0, 1, -1) if v != node.value]
        if node.value != 0 and -node.value not in values:
            values.append(-node.value)
        for v in values:
            out.append(("LVR", IntLit(v), None))
    elif isinstance(node, BoolLit):
        out.append(("LVR", BoolLit(not node.value), None))
    elif isinstance(node, (Assign, ExprStmt, If, While)):
        out.append(("STD", NoOp(), NO_OP_TEXT))
    return out


def generate_mutants(program: Program, operators=None) -> list[MutantInstance]:
    """Enumerate every mutant of the selected operator classes.

    ``operators`` is a collection of tags (default: all eight); unknown
    tags raise InvalidConfig.
    """
    if operators is None:
        selected = set(OPERATOR_TAGS)
    else:
        selected = set(operators)
        unknown = selected - set(OPERATOR_TAGS)
        if unknown:
            raise InvalidConfig(f"unknown operator tags: {sorted(unknown)}")

    mutants = []
    for fi, function in enumerate(program.functions):
        for node, sub_path in walk(function):
            path = (fi,) + sub_path
            for tag, replacement, text in _replacements(node):
                if tag not in selected:
                    continue
                mutants.append(
                    MutantInstance(
                        operator=tag,
                        path=path,
                        original=fragment_text(node),
                        replacement=text if text is not None else fragment_text(replacement),
                        method=function.name,
                        replacement_node=replacement,
                    )
                )
    return mutants


def apply_mutant(program: Program, mutant: MutantInstance) -> Program:
    """Program with the mutant's node swapped in (the original is untouched)."""
    return replace_at(program, mutant.path, mutant.replacement_node)


def original_node(program: Program, mutant: MutantInstance):
    return node_at(program, mutant.path)
