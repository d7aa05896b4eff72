"""Counting-based suspiciousness models and ranking.

Six models, one per (family, scope) pair:

====== ===================================================================
em     exact match: count the method's mutants whose kill set equals the
       observed failing set
pm*    multiplicative partial match: product over tests of per-test match
       counts, each offset by a small epsilon so a single zero term
       cannot erase the rest
pm+    additive partial match: sum over tests of per-test match counts
====== ===================================================================

Scope ``f`` consults only the failing tests (matrix columns are first
restricted to them, so passing columns are ignored); scope ``fp``
consults the full observed universe, failing plus passing.

All scores are per-method, over the matrix's whole method universe, and
are turned into a ranking with max tie-breaking: every member of a tie
group receives the group's worst position.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidConfig, InvalidObservation, NotFound
from .matrix import FailureObservation, KillMatrix

#: method name -> suspiciousness score
ScoreMap = dict


class ModelFamily(enum.Enum):
    EM = "em"
    PM_STAR = "pm*"
    PM_PLUS = "pm+"


class Scope(enum.Enum):
    F = "f"
    FP = "fp"


_FAMILY_TOKENS = {f.value: f for f in ModelFamily}
_SCOPE_TOKENS = {s.value: s for s in Scope}


@dataclass(frozen=True)
class ModelSpec:
    """One of the six valid (family, scope) model combinations."""

    family: ModelFamily
    scope: Scope

    @classmethod
    def parse(cls, family: str, scope: str) -> "ModelSpec":
        try:
            fam = _FAMILY_TOKENS[family.lower()]
        except KeyError:
            raise InvalidConfig(
                f"unknown model {family!r}; expected one of {sorted(_FAMILY_TOKENS)}"
            ) from None
        try:
            sc = _SCOPE_TOKENS[scope.lower()]
        except KeyError:
            raise InvalidConfig(
                f"unknown scope {scope!r}; expected one of {sorted(_SCOPE_TOKENS)}"
            ) from None
        return cls(fam, sc)

    def __str__(self) -> str:
        return f"{self.family.value}/{self.scope.value}"


@dataclass(frozen=True)
class RankerConfig:
    """Knobs shared by the counting models; epsilon feeds pm* only."""

    epsilon: float = 0.001

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidConfig(f"epsilon must be positive, got {self.epsilon}")


class RankedMethod(NamedTuple):
    method: str
    score: float
    rank: int


#: ordered list of RankedMethod, scores non-increasing
Ranking = list


# -- observation/matrix alignment ------------------------------------------


def _failing_columns(matrix: KillMatrix, obs: FailureObservation) -> list[str]:
    """Failing tests in matrix column order; all must be columns."""
    present = [t for t in matrix.tests if t in obs.failing]
    if len(present) != len(obs.failing):
        missing = sorted(obs.failing - set(matrix.tests))
        raise NotFound(f"failing tests not in matrix: {missing}")
    return present


def _universe_columns(matrix: KillMatrix, obs: FailureObservation) -> tuple[list[str], list[str]]:
    """(failing, passing) test lists in matrix column order, for fp scope."""
    if obs.passing is None:
        raise InvalidObservation("fp scope requires a recorded passing set")
    failing = _failing_columns(matrix, obs)
    passing = [t for t in matrix.tests if t in obs.passing]
    if len(passing) != len(obs.passing):
        missing = sorted(obs.passing - set(matrix.tests))
        raise NotFound(f"passing tests not in matrix: {missing}")
    return failing, passing


def _columns(matrix: KillMatrix, tests) -> np.ndarray:
    return np.array([matrix.column_of(t) for t in tests], dtype=int)


# -- the six scorers --------------------------------------------------------


def score_em(matrix: KillMatrix, obs: FailureObservation, scope: Scope) -> ScoreMap:
    """Exact-match counts.

    f: mutants killed by *every* failing test (other columns ignored).
    fp: mutants whose kill set over the observed universe equals the
    failing set exactly.
    """
    if scope is Scope.F:
        cols = _columns(matrix, _failing_columns(matrix, obs))
        hits = matrix.kills[:, cols].all(axis=1)
    else:
        failing, passing = _universe_columns(matrix, obs)
        fcols = _columns(matrix, failing)
        pcols = _columns(matrix, passing)
        hits = matrix.kills[:, fcols].all(axis=1) & ~matrix.kills[:, pcols].any(axis=1)
    return {
        e: int(hits[matrix.method_rows(e)].sum()) for e in matrix.methods
    }


def _per_test_match_counts(matrix, obs, scope):
    """methods x tests grid of per-test match counts, plus the test list.

    f: entry (e, t) counts the mutants of e killed by failing test t.
    fp: entry (e, t) counts mutants of e whose outcome on t mirrors the
    observation (killed for failing t, not killed for passing t).
    """
    if scope is Scope.F:
        tests = _failing_columns(matrix, obs)
        cols = _columns(matrix, tests)
        killed = matrix.kills[:, cols]
        per_mutant = killed
    else:
        failing, passing = _universe_columns(matrix, obs)
        tests = failing + passing
        fcols = _columns(matrix, failing)
        pcols = _columns(matrix, passing)
        per_mutant = np.concatenate(
            [matrix.kills[:, fcols], ~matrix.kills[:, pcols]], axis=1
        )
    counts = np.zeros((len(matrix.methods), len(tests)), dtype=int)
    for i, e in enumerate(matrix.methods):
        rows = matrix.method_rows(e)
        counts[i] = per_mutant[rows].sum(axis=0)
    return counts


def score_pm_star(
    matrix: KillMatrix,
    obs: FailureObservation,
    scope: Scope,
    config: RankerConfig = RankerConfig(),
) -> ScoreMap:
    """Multiplicative partial match: product of (match count + epsilon)."""
    counts = _per_test_match_counts(matrix, obs, scope)
    scores = np.prod(counts.astype(float) + config.epsilon, axis=1)
    return dict(zip(matrix.methods, (float(s) for s in scores)))


def score_pm_plus(matrix: KillMatrix, obs: FailureObservation, scope: Scope) -> ScoreMap:
    """Additive partial match: sum of per-test match counts (exact ints)."""
    counts = _per_test_match_counts(matrix, obs, scope)
    return dict(zip(matrix.methods, (int(s) for s in counts.sum(axis=1))))


# -- ranking -----------------------------------------------------------------


def rank(scores: ScoreMap) -> Ranking:
    """Sort methods by score descending with max tie-breaking.

    All members of a tie group share the group's worst position (the
    number of methods scoring >= the group's score); within a group the
    output order is lexicographic so results are deterministic.
    """
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    ranking: Ranking = []
    i = 0
    while i < len(ordered):
        j = i
        while j < len(ordered) and ordered[j][1] == ordered[i][1]:
            j += 1
        for method, score in ordered[i:j]:
            ranking.append(RankedMethod(method, score, j))
        i = j
    return ranking


def localize(
    matrix: KillMatrix,
    obs: FailureObservation,
    spec: ModelSpec,
    config: RankerConfig = RankerConfig(),
) -> Ranking:
    """Score with the requested model, then rank."""
    if spec.family is ModelFamily.EM:
        scores = score_em(matrix, obs, spec.scope)
    elif spec.family is ModelFamily.PM_STAR:
        scores = score_pm_star(matrix, obs, spec.scope, config)
    else:
        scores = score_pm_plus(matrix, obs, spec.scope)
    return rank(scores)


# -- ranking persistence --------------------------------------------------------


def _printed_score(score) -> float:
    # 6 significant digits everywhere so stdout tables and files agree.
    return float(f"{score:.6g}")


def save_ranking(ranking: Ranking, path, format: str | None = None, *, extra: dict | None = None) -> None:
    fmt = format or ("json" if str(path).endswith(".json") else "csv")
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["rank", "method", "score"])
            for entry in ranking:
                writer.writerow([entry.rank, entry.method, f"{entry.score:.6g}"])
    elif fmt == "json":
        doc = {
            "ranking": [
                {"rank": e.rank, "method": e.method, "score": _printed_score(e.score)}
                for e in ranking
            ]
        }
        if extra:
            doc.update(extra)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"unknown ranking format {fmt!r}")


def format_ranking(ranking: Ranking, top_k: int | None = None) -> str:
    """Aligned text table of the top results for standard output."""
    rows = ranking if top_k is None else ranking[:top_k]
    lines = [f"{'rank':>5}  {'score':>12}  method"]
    for entry in rows:
        lines.append(f"{entry.rank:>5}  {entry.score:>12.6g}  {entry.method}")
    return "\n".join(lines)
