"""Mutant sampling: shrink a kill matrix before inference.

Uniform sampling draws a fixed fraction of the whole mutant pool;
stratified sampling caps the number of mutants per method.  Both keep
the surviving mutants in their original matrix order, copy kill rows
verbatim, and leave the test columns untouched.

Randomness comes from numpy's PCG64 generator seeded explicitly, so a
(matrix, plan) pair reproduces the same sample on any platform.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidConfig
from .matrix import KillMatrix


class SampleKind(enum.Enum):
    UNIFORM = "uniform"
    STRATIFIED = "stratified"


@dataclass(frozen=True)
class SamplePlan:
    kind: SampleKind
    rate: float | None = None
    n_per_method: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.seed < 0:
            raise InvalidConfig(f"seed must be unsigned, got {self.seed}")
        if self.kind is SampleKind.UNIFORM:
            if self.rate is None or not 0 < self.rate <= 1:
                raise InvalidConfig(f"uniform sampling needs a rate in (0, 1], got {self.rate}")
        else:
            if self.n_per_method is None or self.n_per_method < 1:
                raise InvalidConfig(
                    f"stratified sampling needs n_per_method >= 1, got {self.n_per_method}"
                )


def _round_half_up(rate: float, n: int) -> int:
    # Exact arithmetic on the binary value of `rate`, so k is completely
    # determined by the inputs (no double-rounding surprises).
    scaled = Fraction(rate) * n
    return int(scaled + Fraction(1, 2)) if scaled >= 0 else 0


def _keep_rows(matrix: KillMatrix, rows) -> KillMatrix:
    rows = sorted(rows)
    return KillMatrix(
        matrix.tests, [matrix.mutants[i] for i in rows], matrix.kills[rows]
    )


def sample_uniform(matrix: KillMatrix, rate: float, seed: int = 0) -> KillMatrix:
    """Keep max(1, round-half-up(rate * n)) mutants, drawn without replacement."""
    if not 0 < rate <= 1:
        raise InvalidConfig(f"rate must be in (0, 1], got {rate}")
    n = matrix.n_mutants
    if n == 0:
        raise InvalidConfig("cannot sample an empty matrix")
    k = max(1, _round_half_up(rate, n))
    if k >= n:
        return matrix
    rng = np.random.default_rng(seed)
    keep = rng.choice(n, size=k, replace=False)
    return _keep_rows(matrix, keep.tolist())


def sample_stratified(matrix: KillMatrix, n_per_method: int, seed: int = 0) -> KillMatrix:
    """Keep min(n_per_method, stratum size) mutants within every method."""
    if n_per_method < 1:
        raise InvalidConfig(f"n_per_method must be >= 1, got {n_per_method}")
    rng = np.random.default_rng(seed)
    keep: list[int] = []
    for method in matrix.methods:
        rows = matrix.method_rows(method)
        if len(rows) <= n_per_method:
            keep.extend(rows.tolist())
        else:
            chosen = rng.choice(len(rows), size=n_per_method, replace=False)
            keep.extend(rows[np.sort(chosen)].tolist())
    return _keep_rows(matrix, keep)


def sample(matrix: KillMatrix, plan: SamplePlan) -> KillMatrix:
    if plan.kind is SampleKind.UNIFORM:
        return sample_uniform(matrix, plan.rate, plan.seed)
    return sample_stratified(matrix, plan.n_per_method, plan.seed)
