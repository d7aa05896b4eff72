"""Bayesian ranker: six scorers vs a brute-force oracle, ranking rules."""

import numpy as np
import pytest

from conftest import random_matrix, random_observation
from mutloc.errors import InvalidConfig, InvalidObservation, NotFound
from mutloc.matrix import FailureObservation, KillMatrix, MutantRecord
from mutloc.ranking import (
    ModelFamily,
    ModelSpec,
    RankerConfig,
    Scope,
    localize,
    rank,
    save_ranking,
    score_em,
    score_pm_plus,
    score_pm_star,
)

# ---------------------------------------------------------------------------
# Brute-force oracle: direct set-comprehension transliteration of the six
# counting models.  Deliberately shares no code with mutloc.ranking.
# ---------------------------------------------------------------------------


def oracle_scores(matrix, obs, family, scope, epsilon=0.001):
    kill_sets = {m.id: matrix.kill_set(m) for m in matrix.mutants}
    failing = obs.failing
    scores = {}
    for method in matrix.methods:
        stratum = [kill_sets[m.id] for m in matrix.mutants if m.method == method]
        if scope is Scope.F:
            tests = [t for t in matrix.tests if t in failing]
            if family is ModelFamily.EM:
                scores[method] = sum(1 for ks in stratum if failing <= ks)
            elif family is ModelFamily.PM_PLUS:
                scores[method] = sum(
                    sum(1 for ks in stratum if t in ks) for t in tests
                )
            else:
                value = 1.0
                for t in tests:
                    value *= sum(1 for ks in stratum if t in ks) + epsilon
                scores[method] = value
        else:
            universe = [t for t in matrix.tests if t in failing | obs.passing]
            if family is ModelFamily.EM:
                scores[method] = sum(
                    1 for ks in stratum if ks & set(universe) == failing
                )
            elif family is ModelFamily.PM_PLUS:
                scores[method] = sum(
                    sum(1 for ks in stratum if (t in failing) == (t in ks))
                    for t in universe
                )
            else:
                value = 1.0
                for t in universe:
                    matched = sum(1 for ks in stratum if (t in failing) == (t in ks))
                    value *= matched + epsilon
                scores[method] = value
    return scores


def implementation_scores(matrix, obs, family, scope, epsilon=0.001):
    if family is ModelFamily.EM:
        return score_em(matrix, obs, scope)
    if family is ModelFamily.PM_PLUS:
        return score_pm_plus(matrix, obs, scope)
    return score_pm_star(matrix, obs, scope, RankerConfig(epsilon))


# ---------------------------------------------------------------------------
# Worked-example values, frozen from hand application of the formulas
# ---------------------------------------------------------------------------


class TestWorkedExample:
    def test_em_f(self, acme, acme_obs):
        assert score_em(acme, acme_obs, Scope.F) == {"getType": 1, "resolveType": 1}

    def test_em_fp(self, acme, acme_obs):
        assert score_em(acme, acme_obs, Scope.FP) == {"getType": 1, "resolveType": 1}

    def test_em_fp_single_failure(self, acme):
        obs = FailureObservation({"t4"}, {"t1", "t2", "t3"})
        assert score_em(acme, obs, Scope.FP) == {"getType": 1, "resolveType": 0}

    def test_pm_star_f(self, acme, acme_obs):
        scores = score_pm_star(acme, acme_obs, Scope.F)
        # per-test kill counts: getType 1 and 4, resolveType 2 and 2
        assert scores["getType"] == pytest.approx((1 + 1e-3) * (4 + 1e-3), abs=1e-9)
        assert scores["resolveType"] == pytest.approx((2 + 1e-3) ** 2, abs=1e-9)
        assert scores["getType"] == pytest.approx(4.005001, abs=1e-9)
        assert scores["resolveType"] == pytest.approx(4.004001, abs=1e-9)

    def test_pm_star_fp(self, acme, acme_obs):
        scores = score_pm_star(acme, acme_obs, Scope.FP)
        # per-test match counts: getType (1, 2, 4, 4), resolveType (2, 2, 3, 2)
        assert scores["getType"] == pytest.approx(
            (1 + 1e-3) * (2 + 1e-3) * (4 + 1e-3) * (4 + 1e-3), abs=1e-9
        )
        assert scores["getType"] == pytest.approx(32.064042011001, abs=1e-9)
        assert scores["resolveType"] == pytest.approx(24.044030009001, abs=1e-9)

    def test_pm_plus_f(self, acme, acme_obs):
        assert score_pm_plus(acme, acme_obs, Scope.F) == {"getType": 5, "resolveType": 4}

    def test_pm_plus_fp(self, acme, acme_obs):
        assert score_pm_plus(acme, acme_obs, Scope.FP) == {
            "getType": 11,
            "resolveType": 9,
        }

    def test_zero_match_method_scores_epsilon_power(self):
        # A method matching nothing still gets epsilon per failing test.
        m = KillMatrix(
            ["t1", "t2"],
            [
                MutantRecord("m1", "hot", "imported"),
                MutantRecord("m2", "cold", "imported"),
            ],
            [[1, 1], [0, 0]],
        )
        obs = FailureObservation({"t1", "t2"})
        scores = score_pm_star(m, obs, Scope.F)
        assert scores["cold"] == pytest.approx(1e-3 ** 2, rel=1e-12)
        assert scores["cold"] > 0

    def test_method_with_no_mutants_in_matrix_scores_zero(self):
        m = KillMatrix(
            ["t1"],
            [MutantRecord("m1", "only", "imported")],
            [[0]],
        )
        obs = FailureObservation({"t1"})
        assert score_pm_plus(m, obs, Scope.F) == {"only": 0}


class TestObservationErrors:
    def test_empty_failing_set(self):
        with pytest.raises(InvalidObservation):
            FailureObservation(set(), {"t1"})

    def test_fp_without_passing(self, acme):
        obs = FailureObservation({"t1"})
        for scorer in (score_em, score_pm_plus):
            with pytest.raises(InvalidObservation):
                scorer(acme, obs, Scope.FP)
        with pytest.raises(InvalidObservation):
            score_pm_star(acme, obs, Scope.FP)

    def test_unknown_failing_test(self, acme):
        obs = FailureObservation({"nope"})
        with pytest.raises(NotFound):
            score_em(acme, obs, Scope.F)

    def test_unknown_passing_test(self, acme):
        obs = FailureObservation({"t1"}, {"nope"})
        with pytest.raises(NotFound):
            score_em(acme, obs, Scope.FP)

    def test_epsilon_must_be_positive(self):
        with pytest.raises(InvalidConfig):
            RankerConfig(epsilon=0.0)

    def test_model_spec_parsing(self):
        spec = ModelSpec.parse("PM+", "F")
        assert spec.family is ModelFamily.PM_PLUS
        assert spec.scope is Scope.F
        with pytest.raises(InvalidConfig):
            ModelSpec.parse("nope", "f")
        with pytest.raises(InvalidConfig):
            ModelSpec.parse("em", "nope")


class TestRank:
    def test_simple_order(self):
        assert rank({"a": 5, "b": 4}) == [("a", 5, 1), ("b", 4, 2)]

    def test_max_tie_breaking(self):
        ranking = rank({"a": 1, "b": 1, "c": 0})
        assert [(e.method, e.rank) for e in ranking] == [("a", 2), ("b", 2), ("c", 3)]

    def test_empty(self):
        assert rank({}) == []

    def test_tie_groups_are_lexicographic(self):
        ranking = rank({"z": 1, "a": 1, "m": 1})
        assert [e.method for e in ranking] == ["a", "m", "z"]
        assert {e.rank for e in ranking} == {3}

    def test_rank_equals_methods_at_or_above(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            scores = {f"e{i}": int(rng.integers(0, 4)) for i in range(int(rng.integers(1, 9)))}
            for entry in rank(scores):
                at_or_above = sum(1 for s in scores.values() if s >= entry.score)
                assert entry.rank == at_or_above


class TestLocalize:
    def test_pm_plus_top_method(self, acme, acme_obs):
        ranking = localize(acme, acme_obs, ModelSpec(ModelFamily.PM_PLUS, Scope.F))
        assert ranking[0] == ("getType", 5, 1)

    def test_em_tie(self, acme, acme_obs):
        ranking = localize(acme, acme_obs, ModelSpec(ModelFamily.EM, Scope.F))
        assert [(e.method, e.rank) for e in ranking] == [
            ("getType", 2),
            ("resolveType", 2),
        ]

    def test_em_fp_single_failure(self, acme):
        obs = FailureObservation({"t4"}, {"t1", "t2", "t3"})
        ranking = localize(acme, obs, ModelSpec(ModelFamily.EM, Scope.FP))
        assert ranking[0].method == "getType"
        assert ranking[0].rank == 1


class TestOracleEquivalence:
    @pytest.mark.parametrize("family", list(ModelFamily))
    @pytest.mark.parametrize("scope", list(Scope))
    def test_matches_brute_force(self, family, scope):
        rng = np.random.default_rng(hash((family.value, scope.value)) % 2**32)
        for _ in range(60):
            matrix = random_matrix(rng)
            obs = random_observation(rng, matrix)
            expected = oracle_scores(matrix, obs, family, scope)
            actual = implementation_scores(matrix, obs, family, scope)
            assert set(actual) == set(expected)
            for method, value in expected.items():
                if family is ModelFamily.PM_STAR:
                    assert actual[method] == pytest.approx(value, rel=1e-12)
                else:
                    assert actual[method] == value


class TestInvariants:
    def test_column_and_row_permutation_invariance(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            matrix = random_matrix(rng, min_tests=2, min_mutants=2)
            obs = random_observation(rng, matrix)
            shuffled_tests = list(matrix.tests)
            rng.shuffle(shuffled_tests)
            permuted = matrix.restrict(shuffled_tests)
            row_order = rng.permutation(matrix.n_mutants)
            permuted = KillMatrix(
                permuted.tests,
                [permuted.mutants[i] for i in row_order],
                permuted.kills[row_order],
            )
            for family in ModelFamily:
                for scope in Scope:
                    a = implementation_scores(matrix, obs, family, scope)
                    b = implementation_scores(permuted, obs, family, scope)
                    if family is ModelFamily.PM_STAR:
                        assert set(a) == set(b)
                        for k in a:
                            assert a[k] == pytest.approx(b[k], rel=1e-12)
                    else:
                        assert a == b

    def test_pm_plus_consistent_with_fail_given_mutated(self):
        rng = np.random.default_rng(22)
        for _ in range(30):
            matrix = random_matrix(rng)
            obs = random_observation(rng, matrix, with_passing=False)
            scores = score_pm_plus(matrix, obs, Scope.F)
            for method in matrix.methods:
                size = len(matrix.mutants_of(method))
                expected = sum(
                    round(size * matrix.fail_given_mutated(method, t))
                    for t in obs.failing
                )
                assert scores[method] == expected

    def test_pm_star_ranking_invariant_to_epsilon_without_zero_counts(self):
        rng = np.random.default_rng(23)
        checked = 0
        while checked < 15:
            matrix = random_matrix(rng, min_mutants=4)
            obs = random_observation(rng, matrix, with_passing=False)
            counts_ok = all(
                round(len(matrix.mutants_of(e)) * matrix.fail_given_mutated(e, t)) > 0
                for e in matrix.methods
                for t in obs.failing
            )
            if not counts_ok:
                continue
            checked += 1
            order_small = [
                e.method for e in rank(score_pm_star(matrix, obs, Scope.F, RankerConfig(1e-6)))
            ]
            order_large = [
                e.method for e in rank(score_pm_star(matrix, obs, Scope.F, RankerConfig(1e-3)))
            ]
            assert order_small == order_large

    def test_em_fp_bounded_by_em_f(self):
        # Exact equality over the whole universe implies killing every
        # failing test, so the fp count can never exceed the f count.
        rng = np.random.default_rng(24)
        for _ in range(40):
            matrix = random_matrix(rng)
            obs = random_observation(rng, matrix)
            f_scores = score_em(matrix, obs, Scope.F)
            fp_scores = score_em(matrix, obs, Scope.FP)
            for method in matrix.methods:
                assert fp_scores[method] <= f_scores[method]


class TestRankingPersistence:
    def test_csv_layout_and_significant_digits(self, tmp_path, acme, acme_obs):
        ranking = localize(acme, acme_obs, ModelSpec(ModelFamily.PM_STAR, Scope.F))
        path = tmp_path / "ranking.csv"
        save_ranking(ranking, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "rank,method,score"
        assert lines[1] == "1,getType,4.005"
        assert lines[2] == "2,resolveType,4.004"

    def test_json_mirror_agrees_with_csv(self, tmp_path, acme, acme_obs):
        import csv
        import json

        ranking = localize(acme, acme_obs, ModelSpec(ModelFamily.PM_PLUS, Scope.FP))
        cpath = tmp_path / "r.csv"
        jpath = tmp_path / "r.json"
        save_ranking(ranking, cpath)
        save_ranking(ranking, jpath)
        with open(cpath) as fh:
            rows = list(csv.DictReader(fh))
        doc = json.loads(jpath.read_text())
        assert len(doc["ranking"]) == len(rows)
        for row, entry in zip(rows, doc["ranking"]):
            assert int(row["rank"]) == entry["rank"]
            assert row["method"] == entry["method"]
            assert float(row["score"]) == entry["score"]
