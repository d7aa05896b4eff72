"""Localisation quality metrics and the planted-fault harness.

acc@n counts faults whose best-ranked faulty method sits within the top
n; wef (wasted effort) is one less than that best rank; MAP is the mean
of per-fault average precision.  All three consume rankings produced
with max tie-breaking.

The planted-fault harness evaluates a matrix against itself: each mutant
in turn plays the "real" fault, its kill row becomes the observed
failure symptom, its own row is removed from the knowledge matrix, and
the ranker must find the mutant's method.  Passing a separate
``model_matrix`` (e.g. a sampled copy) evaluates degraded knowledge
against the same fault population.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NothingToEvaluate
from .matrix import FailureObservation, KillMatrix
from .ranking import ModelSpec, Ranking, RankerConfig, localize

ACC_LEVELS = (1, 3, 5, 10)


@dataclass(frozen=True)
class FaultSpec:
    """A known fault: an id and the methods its fix touched."""

    fault_id: str
    faulty_methods: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "faulty_methods", frozenset(self.faulty_methods))
        if not self.faulty_methods:
            raise ValueError(f"fault {self.fault_id!r} names no methods")


def best_rank(ranking: Ranking, fault: FaultSpec) -> int | None:
    """Smallest rank among the fault's methods; None when none is ranked."""
    ranks = [e.rank for e in ranking if e.method in fault.faulty_methods]
    return min(ranks) if ranks else None


def acc_at_n(best_ranks, n: int) -> int:
    """Number of faults whose best rank is within the top n."""
    return sum(1 for r in best_ranks if r is not None and r <= n)


def wef(ranking: Ranking, fault: FaultSpec) -> int:
    """Wasted effort: one less than the best rank.

    A fault whose methods never appear costs the whole ranking, so an
    unretrieved fault scores the number of ranked methods.
    """
    r = best_rank(ranking, fault)
    return len(ranking) if r is None else r - 1


def average_precision(ranking: Ranking, fault: FaultSpec) -> float:
    """AP of the fault's methods: mean over them of i / r_i, zero if absent."""
    ranks = sorted(e.rank for e in ranking if e.method in fault.faulty_methods)
    total = sum(i / r for i, r in enumerate(ranks, start=1))
    return total / len(fault.faulty_methods)


def mean_average_precision(aps) -> float:
    aps = list(aps)
    return sum(aps) / len(aps) if aps else 0.0


# -- planted-fault harness ----------------------------------------------------


@dataclass(frozen=True)
class PlantedFaultResult:
    fault_id: str
    method: str
    best_rank: int | None
    wef: int
    ap: float


@dataclass(frozen=True)
class EvalReport:
    model: str
    per_fault: tuple[PlantedFaultResult, ...]
    skipped_empty: int  # mutants whose kill set was empty (no symptom)
    skipped_unlocatable: int  # knowledge matrix empty after row removal

    @property
    def n_faults(self) -> int:
        return len(self.per_fault)

    def acc(self, n: int) -> int:
        return acc_at_n((r.best_rank for r in self.per_fault), n)

    @property
    def wef_values(self) -> list[int]:
        return [r.wef for r in self.per_fault]

    @property
    def map_score(self) -> float:
        return mean_average_precision(r.ap for r in self.per_fault)

    def summary(self) -> dict:
        wefs = np.array(self.wef_values, dtype=float)
        return {
            "model": self.model,
            "n_faults": self.n_faults,
            "skipped_empty_kill_set": self.skipped_empty,
            "skipped_unlocatable": self.skipped_unlocatable,
            "acc": {str(n): self.acc(n) for n in ACC_LEVELS},
            "wef": {
                "median": float(np.median(wefs)),
                "mean": float(wefs.mean()),
                "std": float(wefs.std()),
            },
            "map": self.map_score,
        }

    def to_json(self, *, extra: dict | None = None) -> dict:
        doc = self.summary()
        doc["per_fault"] = [
            {
                "fault": r.fault_id,
                "method": r.method,
                "best_rank": r.best_rank,
                "wef": r.wef,
                "ap": r.ap,
            }
            for r in self.per_fault
        ]
        if extra:
            doc.update(extra)
        return doc

    def format_table(self) -> str:
        s = self.summary()
        header = (
            f"{'model':>8} {'faults':>7} "
            + " ".join(f"{'acc@' + str(n):>7}" for n in ACC_LEVELS)
            + f" {'wef med':>8} {'wef mean':>9} {'wef std':>9} {'MAP':>7}"
        )
        row = (
            f"{self.model:>8} {self.n_faults:>7} "
            + " ".join(f"{s['acc'][str(n)]:>7}" for n in ACC_LEVELS)
            + f" {s['wef']['median']:>8.1f} {s['wef']['mean']:>9.2f}"
            + f" {s['wef']['std']:>9.2f} {s['map']:>7.4f}"
        )
        return header + "\n" + row


def save_report(report: EvalReport, path, *, extra: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.to_json(extra=extra), fh, indent=2)
        fh.write("\n")


def _evaluate_one(matrix, model, spec, config, mutant):
    failing = matrix.kill_set(mutant)
    passing = set(matrix.tests) - failing
    obs = FailureObservation(failing, passing)
    knowledge = model.without_mutant(mutant.id) if mutant.id in {m.id for m in model.mutants} else model
    if knowledge.n_mutants == 0:
        return None
    ranking = localize(knowledge, obs, spec, config)
    fault = FaultSpec(mutant.id, frozenset([mutant.method]))
    r = best_rank(ranking, fault)
    return PlantedFaultResult(
        mutant.id, mutant.method, r, wef(ranking, fault), average_precision(ranking, fault)
    )


def planted_fault_eval(
    matrix: KillMatrix,
    spec: ModelSpec,
    config: RankerConfig = RankerConfig(),
    *,
    model_matrix: KillMatrix | None = None,
    jobs: int = 1,
) -> EvalReport:
    """Hold-one-mutant-out evaluation.

    Every mutant of ``matrix`` with a non-empty kill set is planted as a
    fault: its kill row is the failing set, the rest of the columns pass.
    Localisation runs on ``model_matrix`` (default: ``matrix``) with the
    planted mutant's own row removed when present.  Mutants that cannot
    produce a symptom (empty kill set) or leave no knowledge behind are
    skipped and counted.
    """
    model = matrix if model_matrix is None else model_matrix
    candidates = [m for m in matrix.mutants if matrix.kill_set(m)]
    skipped_empty = matrix.n_mutants - len(candidates)

    def run(mutant):
        return _evaluate_one(matrix, model, spec, config, mutant)

    if jobs > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run, candidates))
    else:
        outcomes = [run(m) for m in candidates]

    results = tuple(r for r in outcomes if r is not None)
    skipped_unlocatable = len(outcomes) - len(results)
    if not results:
        raise NothingToEvaluate(
            "no mutant has both a non-empty kill set and a usable knowledge matrix"
        )
    return EvalReport(str(spec), results, skipped_empty, skipped_unlocatable)
