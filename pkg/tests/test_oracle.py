"""Reference implementations: mirror, enumeration oracle, bisection, Gittins."""
from __future__ import annotations

import numpy as np
import pytest

from banditindex import (
    Cubic,
    Discounted,
    Indexable,
    Multichain,
    Naive,
    NonIndexable,
    SolverOptions,
    TooLarge,
    UnsupportedByOracle,
    advantage_at,
    compute_indices,
    enumerate_bellman_optimal,
    evaluate_policy,
    generate_banded,
    generate_dense_uniform,
    gittins_indices,
    naive_whittle,
    oracle_discounted_index,
    oracle_gittins,
    oracle_indexability,
)
from conftest import (
    INDEXABLE3_INDICES,
    make_arm,
    make_indexable3,
    make_multichain_act2,
    make_multichain_rest2,
    make_nonindexable3,
    make_plateau2,
    make_transient_inf2,
)


class TestNaiveMirror:
    """The fresh-factorization mirror must reproduce engine verdicts exactly."""

    def all_fixtures(self):
        return [
            make_indexable3(),
            make_nonindexable3(),
            make_plateau2(),
            make_multichain_rest2(),
            make_transient_inf2(),
            make_multichain_act2(),
        ]

    def test_fixture_verdicts_match_engine(self):
        for arm in self.all_fixtures():
            engine = compute_indices(arm, SolverOptions(variant=Cubic()))
            mirror = naive_whittle(arm)
            assert type(engine) is type(mirror)
            if isinstance(engine, Indexable):
                np.testing.assert_allclose(engine.indices, mirror.indices,
                                           atol=1e-9)
                assert engine.sigma == mirror.sigma
            elif isinstance(engine, NonIndexable):
                assert engine.witness_state == mirror.witness_state
                assert engine.at_iteration == mirror.at_iteration
            else:
                assert engine.at_policy == mirror.at_policy

    def test_size_guard(self):
        with pytest.raises(TooLarge):
            naive_whittle(generate_dense_uniform(501, 0))


class TestEnumeration:
    def test_optimal_sets_track_indices(self, indexable3):
        # Indices are near (0.299, 0.803, 0.702); the optimal active set
        # drops states as the penalty passes each one.
        assert enumerate_bellman_optimal(indexable3, 0.1) == [(0, 1, 2)]
        assert enumerate_bellman_optimal(indexable3, 0.5) == [(1, 2)]
        assert enumerate_bellman_optimal(indexable3, 0.75) == [(1,)]
        assert enumerate_bellman_optimal(indexable3, 0.9) == [()]

    def test_tie_at_breakpoint_lists_both(self, indexable3):
        lam = INDEXABLE3_INDICES[2]  # state 2 exactly indifferent here
        sets = enumerate_bellman_optimal(indexable3, lam)
        assert (1,) in sets and (1, 2) in sets

    def test_size_guard(self):
        with pytest.raises(TooLarge):
            enumerate_bellman_optimal(generate_dense_uniform(13, 0), 0.0)


class TestOracleIndexability:
    def test_agrees_with_engine_on_indexable(self, indexable3):
        oracle = oracle_indexability(indexable3)
        engine = compute_indices(indexable3, SolverOptions(variant=Cubic()))
        assert isinstance(oracle, Indexable)
        np.testing.assert_allclose(oracle.indices, engine.indices, atol=1e-9)
        assert oracle.sigma == engine.sigma

    def test_flags_nonindexable_with_witness(self, nonindexable3):
        oracle = oracle_indexability(nonindexable3)
        assert isinstance(oracle, NonIndexable)
        assert oracle.witness_state == 2

    def test_plateau_indexable_at_zero(self, plateau2):
        oracle = oracle_indexability(plateau2)
        assert isinstance(oracle, Indexable)
        np.testing.assert_allclose(oracle.indices, [0.0, 0.0], atol=1e-9)

    @pytest.mark.parametrize(
        "maker", [make_multichain_rest2, make_transient_inf2, make_multichain_act2]
    )
    def test_multichain_policies_unsupported(self, maker):
        oracle = oracle_indexability(maker())
        assert isinstance(oracle, UnsupportedByOracle)
        assert "multichain" in oracle.reason

    def test_size_guard(self):
        with pytest.raises(TooLarge):
            oracle_indexability(generate_dense_uniform(11, 0))

    def test_random_corpus_agreement(self):
        for n, seed in [(3, 0), (4, 1), (5, 2), (6, 3), (7, 4), (8, 5)]:
            for maker in (generate_dense_uniform,
                          lambda n, s: generate_banded(n, 3, s)):
                arm = maker(n, seed)
                oracle = oracle_indexability(arm)
                engine = compute_indices(arm, SolverOptions(variant=Cubic()))
                assert not isinstance(oracle, UnsupportedByOracle)
                assert type(oracle) is type(engine)
                if isinstance(engine, Indexable):
                    np.testing.assert_allclose(oracle.indices, engine.indices,
                                               atol=1e-7)


class TestEvaluatePolicy:
    def test_hand_solved_chain(self):
        # Deterministic 0 -> 1 with absorbing 1 and rewards (0, 1):
        # gain 1, bias (0, 1) under the normalization bias[0] = 0.
        P = [[0.0, 1.0], [0.0, 1.0]]
        arm = make_arm(P, P, [0.0, 1.0], [0.0, 1.0])
        ev = evaluate_policy(arm, (0, 1))
        assert ev.gain == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(ev.bias, [0.0, 1.0], atol=1e-12)

    def test_advantage_matches_direct_evaluation(self, indexable3):
        policy = (1, 2)
        ev = evaluate_policy(indexable3, policy)
        for lam in (-0.3, 0.0, 0.41, 1.7):
            np.testing.assert_allclose(
                ev.advantage.at(lam), advantage_at(indexable3, policy, lam),
                atol=1e-10
            )

    def test_affine_vector_evaluation(self, indexable3):
        ev = evaluate_policy(indexable3, (0,))
        direct = ev.advantage.constant + 2.5 * ev.advantage.slope
        np.testing.assert_allclose(ev.advantage.at(2.5), direct, atol=0)


class TestDiscountedBisection:
    def test_matches_engine_on_indexable3(self, indexable3):
        beta = 0.99
        engine = compute_indices(
            indexable3, SolverOptions(variant=Cubic(), criterion=Discounted(beta))
        )
        for state in range(3):
            lam = oracle_discounted_index(indexable3, beta, state, tol=1e-9)
            assert lam == pytest.approx(engine.indices[state], abs=1e-7)

    def test_hint_accelerates_same_answer(self, indexable3):
        beta = 0.9
        no_hint = oracle_discounted_index(indexable3, beta, 1, tol=1e-9)
        hinted = oracle_discounted_index(indexable3, beta, 1, tol=1e-9,
                                         hint=no_hint)
        assert hinted == pytest.approx(no_hint, abs=1e-8)

    def test_wild_hint_still_converges(self, indexable3):
        beta = 0.9
        truth = oracle_discounted_index(indexable3, beta, 0, tol=1e-9)
        wild = oracle_discounted_index(indexable3, beta, 0, tol=1e-9, hint=1e6)
        assert wild == pytest.approx(truth, abs=1e-7)

    def test_input_validation(self, indexable3):
        with pytest.raises(ValueError):
            oracle_discounted_index(indexable3, 1.0, 0, tol=1e-9)
        with pytest.raises(ValueError):
            oracle_discounted_index(indexable3, 0.9, 0, tol=0.0)


class TestOracleGittins:
    def test_matches_engine_on_random_rested_arms(self):
        rng = np.random.Generator(np.random.PCG64(10))
        for beta in (0.5, 0.9, 0.99):
            for trial in range(4):
                n = int(rng.integers(2, 21))
                P = rng.random((n, n))
                P /= P.sum(axis=1, keepdims=True)
                r = rng.random(n)
                np.testing.assert_allclose(
                    gittins_indices(P, r, beta), oracle_gittins(P, r, beta),
                    atol=1e-9
                )

    def test_chain_exact(self):
        P = np.array([[0.0, 1.0], [0.0, 1.0]])
        r = np.array([0.0, 1.0])
        g = oracle_gittins(P, r, 0.9)
        np.testing.assert_allclose(g, [0.9, 1.0], atol=1e-12)

    def test_ordering_matches_values(self):
        rng = np.random.Generator(np.random.PCG64(11))
        P = rng.random((6, 6))
        P /= P.sum(axis=1, keepdims=True)
        r = rng.random(6)
        g = oracle_gittins(P, r, 0.8)
        assert g.max() == pytest.approx(r.max(), abs=1e-12)


class TestUnsupportedMarker:
    def test_reason_is_informative(self):
        marker = oracle_indexability(make_multichain_rest2())
        assert isinstance(marker, UnsupportedByOracle)
        assert isinstance(marker.reason, str) and marker.reason
