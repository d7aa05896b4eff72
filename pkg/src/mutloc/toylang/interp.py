"""Deterministic tree-walking interpreter for the toy language.

Values are signed 64-bit integers (wrapping two's-complement arithmetic)
and booleans.  Execution is metered: every statement executed and every
expression node evaluated costs one step, and exhausting the budget ends
the run with a TIMEOUT outcome.  A call-depth cap (part of the same
resource budget) keeps runaway recursion deterministic instead of
overflowing the host stack.

Runtime faults -- division or modulo by zero, shift counts outside
[0, 63], and operand type mismatches (which mutations can introduce) --
end the run with an ERROR outcome.  Outcomes, not exceptions, are the
interface: a test always yields exactly one of PASS, FAIL, ERROR,
TIMEOUT.
"""

from __future__ import annotations

import enum
import sys

from .nodes import (
    Assign,
    Binary,
    BoolLit,
    Call,
    ExprStmt,
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
)

DEFAULT_STEP_LIMIT = 100_000
DEFAULT_CALL_DEPTH_LIMIT = 200

_INT_BITS = 64
_INT_MIN = -(1 << (_INT_BITS - 1))
_MASK = (1 << _INT_BITS) - 1


class RunOutcome(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"
    TIMEOUT = "timeout"


class _Budget(Exception):
    """Step or call-depth budget exhausted."""


class _Fault(Exception):
    """Runtime fault (division by zero, bad shift, type mismatch)."""


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


def wrap_int(v: int) -> int:
    """Reduce to signed 64-bit two's complement."""
    return ((v - _INT_MIN) & _MASK) + _INT_MIN


def _require_int(v):
    if type(v) is not int:
        raise _Fault("expected an integer operand")
    return v


def _require_bool(v):
    if type(v) is not bool:
        raise _Fault("expected a boolean operand")
    return v


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


class Interpreter:
    """Executes one program; step budget is shared across a whole test."""

    def __init__(self, program: Program, step_limit: int = DEFAULT_STEP_LIMIT,
                 call_depth_limit: int = DEFAULT_CALL_DEPTH_LIMIT):
        if step_limit < 1:
            raise ValueError(f"step_limit must be >= 1, got {step_limit}")
        self.functions = {f.name: f for f in program.functions}
        self.steps_left = step_limit
        self.depth_left = call_depth_limit
        # The tree walker recurses in Python; leave ample headroom so the
        # call-depth cap (not the host stack) is what ends deep runs.
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))

    def _tick(self):
        self.steps_left -= 1
        if self.steps_left < 0:
            raise _Budget("step budget exhausted")

    # -- expression evaluation ------------------------------------------------

    def eval(self, node, env: dict):
        self._tick()
        if isinstance(node, IntLit):
            return wrap_int(node.value)
        if isinstance(node, BoolLit):
            return node.value
        if isinstance(node, Var):
            try:
                return env[node.name]
            except KeyError:
                raise _Fault(f"variable {node.name!r} has no value") from None
        if isinstance(node, Unary):
            v = self.eval(node.operand, env)
            if node.op == "-":
                return wrap_int(-_require_int(v))
            if node.op == "~":
                return wrap_int(~_require_int(v))
            return not _require_bool(v)
        if isinstance(node, Binary):
            return self._binary(node, env)
        if isinstance(node, Call):
            args = [self.eval(a, env) for a in node.args]
            return self.call(node.name, args)
        raise TypeError(f"not an expression node: {node!r}")

    def _binary(self, node: Binary, env: dict):
        op = node.op
        if op in ("&&", "||"):
            left = _require_bool(self.eval(node.left, env))
            if op == "&&":
                return left and _require_bool(self.eval(node.right, env))
            return left or _require_bool(self.eval(node.right, env))

        left = self.eval(node.left, env)
        right = self.eval(node.right, env)
        if op in ("==", "!="):
            if type(left) is not type(right):
                raise _Fault("cannot compare values of different types")
            return (left == right) if op == "==" else (left != right)

        a = _require_int(left)
        b = _require_int(right)
        if op == "+":
            return wrap_int(a + b)
        if op == "-":
            return wrap_int(a - b)
        if op == "*":
            return wrap_int(a * b)
        if op == "/":
            if b == 0:
                raise _Fault("division by zero")
            return wrap_int(_trunc_div(a, b))
        if op == "%":
            if b == 0:
                raise _Fault("modulo by zero")
            return wrap_int(a - _trunc_div(a, b) * b)
        if op == "<<":
            if not 0 <= b < _INT_BITS:
                raise _Fault(f"shift count {b} out of range")
            return wrap_int(a << b)
        if op == ">>":
            if not 0 <= b < _INT_BITS:
                raise _Fault(f"shift count {b} out of range")
            return a >> b  # Python >> is already arithmetic on negatives
        if op == "&":
            return wrap_int(a & b)
        if op == "|":
            return wrap_int(a | b)
        if op == "^":
            return wrap_int(a ^ b)
        if op in ("<", "<=", ">", ">="):
            if op == "<":
                return a < b
            if op == "<=":
                return a <= b
            if op == ">":
                return a > b
            return a >= b
        raise TypeError(f"unknown operator {op!r}")

    # -- statement execution -----------------------------------------------------

    def exec_block(self, statements, env: dict):
        for stmt in statements:
            self.exec_stmt(stmt, env)

    def exec_stmt(self, stmt, env: dict):
        self._tick()
        if isinstance(stmt, (Let, Assign)):
            env[stmt.name] = self.eval(stmt.expr, env)
        elif isinstance(stmt, ExprStmt):
            self.eval(stmt.expr, env)
        elif isinstance(stmt, Return):
            value = None if stmt.expr is None else self.eval(stmt.expr, env)
            raise _ReturnSignal(value)
        elif isinstance(stmt, NoOp):
            pass
        elif isinstance(stmt, If):
            if _require_bool(self.eval(stmt.cond, env)):
                self.exec_block(stmt.then, env)
            else:
                self.exec_block(stmt.orelse, env)
        elif isinstance(stmt, While):
            while _require_bool(self.eval(stmt.cond, env)):
                self.exec_block(stmt.body, env)
        else:
            raise TypeError(f"not a statement node: {stmt!r}")

    # -- calls ----------------------------------------------------------------------

    def call(self, name: str, args):
        try:
            fn = self.functions[name]
        except KeyError:
            raise _Fault(f"call to undefined function {name!r}") from None
        if len(args) != len(fn.params):
            raise _Fault(
                f"function {name!r} takes {len(fn.params)} argument(s), got {len(args)}"
            )
        self.depth_left -= 1
        if self.depth_left < 0:
            raise _Budget("call depth budget exhausted")
        env = dict(zip(fn.params, args))
        try:
            self.exec_block(fn.body, env)
        except _ReturnSignal as signal:
            return signal.value
        finally:
            self.depth_left += 1
        return None


def run_test(program: Program, test: TestCase,
             step_limit: int = DEFAULT_STEP_LIMIT) -> RunOutcome:
    """Run one test: PASS only if every assertion evaluates to true."""
    interp = Interpreter(program, step_limit)
    try:
        for assertion in test.assertions:
            value = interp.eval(assertion, {})
            if type(value) is not bool:
                return RunOutcome.ERROR
            if not value:
                return RunOutcome.FAIL
    except _Budget:
        return RunOutcome.TIMEOUT
    except _Fault:
        return RunOutcome.ERROR
    except RecursionError:
        # Host-stack backstop; the call-depth cap normally fires first.
        return RunOutcome.TIMEOUT
    return RunOutcome.PASS
