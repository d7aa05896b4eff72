"""Mutation analysis for toy programs: execute tests, emit a kill matrix.

The baseline program must pass every test before analysis starts; a
mutant is killed by a test when the run ends in anything but PASS
(assertion failure, runtime fault, or budget exhaustion all count).
Mutant executions are independent, so they may run on a thread pool;
the matrix layout is fixed by the deterministic mutant order either way.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import PreconditionFailed
from ..matrix import KillMatrix, MutantRecord
from .interp import DEFAULT_STEP_LIMIT, RunOutcome, run_test
from .mutate import MutantInstance, apply_mutant, generate_mutants
from .nodes import Program
from .parser import parse_program, parse_tests


def check_baseline(program: Program, tests, step_limit: int = DEFAULT_STEP_LIMIT) -> None:
    """Every test must PASS on the unmutated program."""
    for test in tests:
        outcome = run_test(program, test, step_limit)
        if outcome is not RunOutcome.PASS:
            raise PreconditionFailed(
                f"test {test.name!r} does not pass on the original program "
                f"(outcome: {outcome.value})"
            )


def build_kill_matrix(
    program: Program,
    tests,
    mutants: list[MutantInstance] | None = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
    operators=None,
    jobs: int = 1,
) -> KillMatrix:
    """Run every (mutant, test) pair and assemble the kill grid.

    Mutants default to the full enumeration under ``operators``.  Record
    ids are m1, m2, ... in enumeration order and descriptions read
    ``original ↦ replacement``.
    """
    tests = list(tests)
    if mutants is None:
        mutants = generate_mutants(program, operators)
    check_baseline(program, tests, step_limit)

    def run_row(instance: MutantInstance):
        mutated = apply_mutant(program, instance)
        return [
            run_test(mutated, test, step_limit) is not RunOutcome.PASS
            for test in tests
        ]

    if jobs > 1 and len(mutants) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_row, mutants))
    else:
        rows = [run_row(m) for m in mutants]

    records = [
        MutantRecord(
            id=f"m{i + 1}",
            method=instance.method,
            operator=instance.operator,
            description=f"{instance.original} ↦ {instance.replacement}",
        )
        for i, instance in enumerate(mutants)
    ]
    test_names = [t.name for t in tests]
    kills = (
        np.array(rows, dtype=bool)
        if rows
        else np.empty((0, len(test_names)), dtype=bool)
    )
    return KillMatrix(test_names, records, kills)


def analyze_source(
    program_source: str,
    tests_source: str,
    operators=None,
    step_limit: int = DEFAULT_STEP_LIMIT,
    jobs: int = 1,
) -> KillMatrix:
    """Parse sources and run the full analysis in one call."""
    program = parse_program(program_source)
    tests = parse_tests(tests_source, program)
    return build_kill_matrix(
        program, tests, step_limit=step_limit, operators=operators, jobs=jobs
    )
