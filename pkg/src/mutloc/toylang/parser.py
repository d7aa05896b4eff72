"""Lexer, recursive-descent parser, and name resolution.

Grammar (also documented in docs/toy_language.md):

    program   := function*
    function  := "fn" NAME "(" [NAME ("," NAME)*] ")" block
    block     := "{" statement* "}"
    statement := "let" NAME "=" expr ";"
               | NAME "=" expr ";"
               | "if" "(" expr ")" block ["else" (block | if-statement)]
               | "while" "(" expr ")" block
               | "return" [expr] ";"
               | "skip" ";"
               | expr ";"
    testfile  := ("test" NAME "{" ("assert" expr ";")+ "}")*

Expressions use C-style precedence: ``||`` < ``&&`` < ``|`` < ``^`` <
``&`` < ``==``/``!=`` < relational < shifts < additive < multiplicative
< unary ``- ~ !``.  Integer literals are decimal and non-negative
(negative values come from unary minus).

Name resolution happens here: variables must be declared (``let`` or a
parameter) before use, shadowing a visible name is rejected, and every
call must target a defined function with the right arity.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError, UnresolvedName
from .nodes import (
    Assign,
    Binary,
    BoolLit,
    Call,
    ExprStmt,
    Function,
    If,
    IntLit,
    Let,
    NoOp,
    Program,
    Return,
    TestCase,
    Unary,
    Var,
    While,
    walk,
)

KEYWORDS = {"fn", "let", "if", "else", "while", "return", "skip", "assert", "test", "true", "false"}

# Longest-match-first operator tokens.
_OPERATORS = (
    "||", "&&", "==", "!=", "<=", ">=", "<<", ">>",
    "|", "^", "&", "<", ">", "+", "-", "*", "/", "%", "~", "!", "=",
    "(", ")", "{", "}", ",", ";",
)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "keyword", "op", "eof"
    text: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":  # comment to end of line
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            text = source[start:i]
            tokens.append(Token("int", text, line, col))
            col += len(text)
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            kind = "keyword" if text in KEYWORDS else "name"
            tokens.append(Token(kind, text, line, col))
            col += len(text)
            continue
        for op in _OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("op", op, line, col))
                i += len(op)
                col += len(op)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        self.scopes: list[set[str]] = []

    # -- token plumbing -----------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.current
        self.pos += 1
        return tok

    def check(self, text: str) -> bool:
        return self.current.text == text and self.current.kind in ("op", "keyword")

    def accept(self, text: str) -> bool:
        if self.check(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.check(text):
            tok = self.current
            got = tok.text if tok.kind != "eof" else "end of input"
            raise ParseError(f"expected {text!r}, got {got!r}", tok.line, tok.column)
        return self.advance()

    def expect_name(self, what: str) -> Token:
        tok = self.current
        if tok.kind != "name":
            got = tok.text if tok.kind != "eof" else "end of input"
            raise ParseError(f"expected {what}, got {got!r}", tok.line, tok.column)
        return self.advance()

    # -- scopes ---------------------------------------------------------------

    def visible(self, name: str) -> bool:
        return any(name in scope for scope in self.scopes)

    def declare(self, tok: Token):
        if self.visible(tok.text):
            raise ParseError(f"{tok.text!r} is already declared", tok.line, tok.column)
        self.scopes[-1].add(tok.text)

    def require_visible(self, tok: Token):
        if not self.visible(tok.text):
            raise UnresolvedName(
                f"{tok.line}:{tok.column}: undefined variable {tok.text!r}"
            )

    # -- program -------------------------------------------------------------

    def parse_program(self) -> Program:
        functions = []
        names = set()
        while self.current.kind != "eof":
            fn = self.parse_function()
            if fn.name in names:
                raise ParseError(f"duplicate function {fn.name!r}", 0, 0)
            names.add(fn.name)
            functions.append(fn)
        program = Program(tuple(functions))
        _check_calls(program)
        return program

    def parse_function(self) -> Function:
        self.expect("fn")
        name = self.expect_name("function name").text
        self.expect("(")
        params = []
        if not self.check(")"):
            while True:
                tok = self.expect_name("parameter name")
                if tok.text in params:
                    raise ParseError(
                        f"duplicate parameter {tok.text!r}", tok.line, tok.column
                    )
                params.append(tok.text)
                if not self.accept(","):
                    break
        self.expect(")")
        self.scopes = [set(params)]
        body = self.parse_block()
        self.scopes = []
        return Function(name, tuple(params), body)

    def parse_block(self) -> tuple:
        self.expect("{")
        self.scopes.append(set())
        statements = []
        while not self.check("}"):
            statements.append(self.parse_statement())
        self.expect("}")
        self.scopes.pop()
        return tuple(statements)

    def parse_statement(self):
        if self.accept("let"):
            tok = self.expect_name("variable name")
            self.expect("=")
            expr = self.parse_expr()
            self.expect(";")
            self.declare(tok)  # the initialiser may not reference the new name
            return Let(tok.text, expr)
        if self.accept("if"):
            return self.parse_if_tail()
        if self.accept("while"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            body = self.parse_block()
            return While(cond, body)
        if self.accept("return"):
            if self.accept(";"):
                return Return(None)
            expr = self.parse_expr()
            self.expect(";")
            return Return(expr)
        if self.accept("skip"):
            self.expect(";")
            return NoOp()
        if self.current.kind == "name" and self.tokens[self.pos + 1].text == "=":
            tok = self.advance()
            self.require_visible(tok)
            self.expect("=")
            expr = self.parse_expr()
            self.expect(";")
            return Assign(tok.text, expr)
        expr = self.parse_expr()
        self.expect(";")
        return ExprStmt(expr)

    def parse_if_tail(self) -> If:
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_block()
        orelse: tuple = ()
        if self.accept("else"):
            if self.accept("if"):
                orelse = (self.parse_if_tail(),)
            else:
                orelse = self.parse_block()
        return If(cond, then, orelse)

    # -- expressions (precedence climbing) ---------------------------------------

    _LEVELS = (
        ("||",),
        ("&&",),
        ("|",),
        ("^",),
        ("&",),
        ("==", "!="),
        ("<", "<=", ">", ">="),
        ("<<", ">>"),
        ("+", "-"),
        ("*", "/", "%"),
    )

    def parse_expr(self, level: int = 0):
        if level == len(self._LEVELS):
            return self.parse_unary()
        node = self.parse_expr(level + 1)
        while any(self.check(op) for op in self._LEVELS[level]):
            op = self.advance().text
            right = self.parse_expr(level + 1)
            node = Binary(op, node, right)
        return node

    def parse_unary(self):
        for op in ("-", "~", "!"):
            if self.check(op):
                self.advance()
                return Unary(op, self.parse_unary())
        return self.parse_primary()

    def parse_primary(self):
        tok = self.current
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text))
        if self.accept("true"):
            return BoolLit(True)
        if self.accept("false"):
            return BoolLit(False)
        if self.accept("("):
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if tok.kind == "name":
            self.advance()
            if self.accept("("):
                args = []
                if not self.check(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                return Call(tok.text, tuple(args))
            self.require_visible(tok)
            return Var(tok.text)
        got = tok.text if tok.kind != "eof" else "end of input"
        raise ParseError(f"expected an expression, got {got!r}", tok.line, tok.column)

    # -- test files ----------------------------------------------------------------

    def parse_tests(self) -> list[TestCase]:
        tests = []
        names = set()
        while self.current.kind != "eof":
            self.expect("test")
            name = self.expect_name("test name").text
            if name in names:
                raise ParseError(f"duplicate test {name!r}", 0, 0)
            names.add(name)
            self.expect("{")
            assertions = []
            self.scopes = [set()]
            while not self.check("}"):
                self.expect("assert")
                assertions.append(self.parse_expr())
                self.expect(";")
            self.scopes = []
            self.expect("}")
            if not assertions:
                raise ParseError(f"test {name!r} has no assertions", 0, 0)
            tests.append(TestCase(name, tuple(assertions)))
        return tests


def _check_calls(program: Program) -> None:
    """Every call must target a defined function with matching arity."""
    signatures = {f.name: len(f.params) for f in program.functions}
    for node, _ in walk(program):
        if isinstance(node, Call):
            if node.name not in signatures:
                raise UnresolvedName(f"call to undefined function {node.name!r}")
            if len(node.args) != signatures[node.name]:
                raise UnresolvedName(
                    f"function {node.name!r} takes {signatures[node.name]} "
                    f"argument(s), got {len(node.args)}"
                )


def parse_program(source: str) -> Program:
    """Parse and resolve a toy program; raises ParseError/UnresolvedName."""
    return _Parser(source).parse_program()


def parse_tests(source: str, program: Program | None = None) -> list[TestCase]:
    """Parse a test file; with ``program`` given, calls are also resolved."""
    tests = _Parser(source).parse_tests()
    if program is not None:
        signatures = {f.name: len(f.params) for f in program.functions}
        for test in tests:
            for assertion in test.assertions:
                for node, _ in walk(assertion):
                    if isinstance(node, Call):
                        if node.name not in signatures:
                            raise UnresolvedName(
                                f"test {test.name!r} calls undefined function {node.name!r}"
                            )
                        if len(node.args) != signatures[node.name]:
                            raise UnresolvedName(
                                f"test {test.name!r}: function {node.name!r} takes "
                                f"{signatures[node.name]} argument(s), got {len(node.args)}"
                            )
    return tests
