"""AST for the toy imperative language.

Nodes are frozen dataclasses, so structural equality is free and mutant
application can rebuild trees immutably.  Every node exposes its
children in a fixed order through :func:`children`; a mutant's location
is the child-index route from the program root to the mutated node.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class Unary:
    op: str  # "-", "~", "!"
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


# -- statements ---------------------------------------------------------------


@dataclass(frozen=True)
class Let:
    name: str
    expr: object


@dataclass(frozen=True)
class Assign:
    name: str
    expr: object


@dataclass(frozen=True)
class ExprStmt:
    expr: object


@dataclass(frozen=True)
class Return:
    expr: object | None = None


@dataclass(frozen=True)
class NoOp:
    pass


@dataclass(frozen=True)
class If:
    cond: object
    then: tuple
    orelse: tuple = ()


@dataclass(frozen=True)
class While:
    cond: object
    body: tuple


# -- program structure -----------------------------------------------------------


@dataclass(frozen=True)
class Function:
    name: str
    params: tuple
    body: tuple


@dataclass(frozen=True)
class Program:
    functions: tuple


@dataclass(frozen=True)
class TestCase:
    """A named test: a sequence of boolean assertions over the program."""

    name: str
    assertions: tuple


# -- tree navigation ----------------------------------------------------------


def children(node) -> list:
    """The node's child nodes in canonical order."""
    if isinstance(node, Program):
        return list(node.functions)
    if isinstance(node, Function):
        return list(node.body)
    if isinstance(node, (Let, Assign, ExprStmt)):
        return [node.expr]
    if isinstance(node, Return):
        return [] if node.expr is None else [node.expr]
    if isinstance(node, If):
        return [node.cond, *node.then, *node.orelse]
    if isinstance(node, While):
        return [node.cond, *node.body]
    if isinstance(node, Unary):
        return [node.operand]
    if isinstance(node, Binary):
        return [node.left, node.right]
    if isinstance(node, Call):
        return list(node.args)
    if isinstance(node, (IntLit, BoolLit, Var, NoOp)):
        return []
    raise TypeError(f"not an AST node: {node!r}")


def with_child(node, index: int, new):
    """Copy of ``node`` with its index-th child replaced."""
    if isinstance(node, Program):
        fs = list(node.functions)
        fs[index] = new
        return Program(tuple(fs))
    if isinstance(node, Function):
        body = list(node.body)
        body[index] = new
        return Function(node.name, node.params, tuple(body))
    if isinstance(node, Let):
        return Let(node.name, new)
    if isinstance(node, Assign):
        return Assign(node.name, new)
    if isinstance(node, ExprStmt):
        return ExprStmt(new)
    if isinstance(node, Return):
        return Return(new)
    if isinstance(node, If):
        if index == 0:
            return If(new, node.then, node.orelse)
        index -= 1
        if index < len(node.then):
            then = list(node.then)
            then[index] = new
            return If(node.cond, tuple(then), node.orelse)
        index -= len(node.then)
        orelse = list(node.orelse)
        orelse[index] = new
        return If(node.cond, node.then, tuple(orelse))
    if isinstance(node, While):
        if index == 0:
            return While(new, node.body)
        body = list(node.body)
        body[index - 1] = new
        return While(node.cond, tuple(body))
    if isinstance(node, Unary):
        return Unary(node.op, new)
    if isinstance(node, Binary):
        if index == 0:
            return Binary(node.op, new, node.right)
        return Binary(node.op, node.left, new)
    if isinstance(node, Call):
        args = list(node.args)
        args[index] = new
        return Call(node.name, tuple(args))
    raise TypeError(f"cannot replace a child of {node!r}")


def node_at(root, path):
    """Follow a child-index route from ``root``."""
    node = root
    for index in path:
        node = children(node)[index]
    return node


def replace_at(root, path, new):
    """Rebuild the tree with the node at ``path`` replaced by ``new``."""
    if not path:
        return new
    child = children(root)[path[0]]
    return with_child(root, path[0], replace_at(child, path[1:], new))


def walk(root, path=()):
    """Pre-order traversal yielding (node, path) pairs."""
    yield root, path
    for i, child in enumerate(children(root)):
        yield from walk(child, path + (i,))


# -- source rendering ------------------------------------------------------------

_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6,
    "!=": 6,
    "<": 7,
    "<=": 7,
    ">": 7,
    ">=": 7,
    "<<": 8,
    ">>": 8,
    "+": 9,
    "-": 9,
    "*": 10,
    "/": 10,
    "%": 10,
}
_UNARY_PRECEDENCE = 11


def _expr_text(node, parent_prec=0, right_side=False):
    if isinstance(node, IntLit):
        return str(node.value)
    if isinstance(node, BoolLit):
        return "true" if node.value else "false"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({', '.join(_expr_text(a) for a in node.args)})"
    if isinstance(node, Unary):
        inner = _expr_text(node.operand, _UNARY_PRECEDENCE)
        return f"{node.op}{inner}"
    if isinstance(node, Binary):
        prec = _PRECEDENCE[node.op]
        left = _expr_text(node.left, prec)
        # All binary operators associate left; the right child needs
        # parentheses at equal precedence.
        right = _expr_text(node.right, prec, right_side=True)
        text = f"{left} {node.op} {right}"
        if prec < parent_prec or (prec == parent_prec and right_side):
            return f"({text})"
        return text
    raise TypeError(f"not an expression node: {node!r}")


def _stmt_lines(node, indent):
    pad = "    " * indent
    if isinstance(node, Let):
        return [f"{pad}let {node.name} = {_expr_text(node.expr)};"]
    if isinstance(node, Assign):
        return [f"{pad}{node.name} = {_expr_text(node.expr)};"]
    if isinstance(node, ExprStmt):
        return [f"{pad}{_expr_text(node.expr)};"]
    if isinstance(node, Return):
        if node.expr is None:
            return [f"{pad}return;"]
        return [f"{pad}return {_expr_text(node.expr)};"]
    if isinstance(node, NoOp):
        return [f"{pad}skip;"]
    if isinstance(node, If):
        lines = [f"{pad}if ({_expr_text(node.cond)}) {{"]
        for s in node.then:
            lines.extend(_stmt_lines(s, indent + 1))
        if node.orelse:
            lines.append(f"{pad}}} else {{")
            for s in node.orelse:
                lines.extend(_stmt_lines(s, indent + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(node, While):
        lines = [f"{pad}while ({_expr_text(node.cond)}) {{"]
        for s in node.body:
            lines.extend(_stmt_lines(s, indent + 1))
        lines.append(f"{pad}}}")
        return lines
    raise TypeError(f"not a statement node: {node!r}")


def to_source(node) -> str:
    """Render any node back to parseable source text."""
    if isinstance(node, Program):
        chunks = [to_source(f) for f in node.functions]
        return "\n\n".join(chunks) + "\n"
    if isinstance(node, Function):
        lines = [f"fn {node.name}({', '.join(node.params)}) {{"]
        for s in node.body:
            lines.extend(_stmt_lines(s, 1))
        lines.append("}")
        return "\n".join(lines)
    if isinstance(node, (Let, Assign, ExprStmt, Return, NoOp, If, While)):
        return "\n".join(_stmt_lines(node, 0))
    return _expr_text(node)


def fragment_text(node) -> str:
    """Single-line rendering used in mutant descriptions."""
    return " ".join(to_source(node).split())
