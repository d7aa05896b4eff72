"""Shared fixtures and random-instance generators."""

import numpy as np
import pytest

from mutloc.bundled import demo_matrix, example_matrix
from mutloc.matrix import FailureObservation, KillMatrix, MutantRecord


@pytest.fixture(scope="session")
def acme():
    """The seven-mutant worked example (two methods, four tests)."""
    return example_matrix()


@pytest.fixture(scope="session")
def acme_obs():
    """The canonical observation on the worked example: t1, t4 fail."""
    return FailureObservation({"t1", "t4"}, {"t2", "t3"})


@pytest.fixture(scope="session")
def demo():
    """The golden matrix of the bundled toy-language demo corpus."""
    return demo_matrix()


def random_matrix(rng, max_tests=8, max_mutants=30, max_methods=5, min_tests=1,
                  min_mutants=1) -> KillMatrix:
    """A random small matrix for brute-force comparisons."""
    n_tests = int(rng.integers(min_tests, max_tests + 1))
    n_mutants = int(rng.integers(min_mutants, max_mutants + 1))
    n_methods = int(rng.integers(1, max_methods + 1))
    tests = [f"t{j}" for j in range(n_tests)]
    mutants = [
        MutantRecord(f"m{i}", f"fn{int(rng.integers(n_methods))}", "imported", "")
        for i in range(n_mutants)
    ]
    kills = rng.random((n_mutants, n_tests)) < rng.uniform(0.2, 0.8)
    return KillMatrix(tests, mutants, kills)


def random_observation(rng, matrix: KillMatrix, with_passing=True):
    """A random observation whose tests are all matrix columns."""
    n = matrix.n_tests
    n_failing = int(rng.integers(1, n + 1))
    order = rng.permutation(n)
    failing = {matrix.tests[j] for j in order[:n_failing]}
    if not with_passing:
        return FailureObservation(failing)
    passing = {matrix.tests[j] for j in order[n_failing:]}
    return FailureObservation(failing, passing)
