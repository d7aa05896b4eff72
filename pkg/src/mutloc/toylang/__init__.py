"""Toy-language mutation engine: parser, interpreter, operators, analysis."""

from .analysis import analyze_source, build_kill_matrix, check_baseline
from .interp import (
    DEFAULT_CALL_DEPTH_LIMIT,
    DEFAULT_STEP_LIMIT,
    Interpreter,
    RunOutcome,
    run_test,
)
from .mutate import MutantInstance, apply_mutant, generate_mutants
from .nodes import Program, TestCase, to_source
from .parser import parse_program, parse_tests

__all__ = [
    "DEFAULT_CALL_DEPTH_LIMIT",
    "DEFAULT_STEP_LIMIT",
    "Interpreter",
    "MutantInstance",
    "Program",
    "RunOutcome",
    "TestCase",
    "analyze_source",
    "apply_mutant",
    "build_kill_matrix",
    "check_baseline",
    "generate_mutants",
    "parse_program",
    "parse_tests",
    "run_test",
    "to_source",
]
