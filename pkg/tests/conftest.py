"""Shared test fixtures: small arms with independently verified behavior.

Expected values recorded here were computed once with the fresh-factorization
reference implementation (and, where possible, checked by hand or against the
exhaustive policy-enumeration oracle) and then frozen.
"""
from __future__ import annotations

import numpy as np
import pytest

from banditindex import RestlessArm


def make_arm(P0, P1, r0, r1, discount=None) -> RestlessArm:
    return RestlessArm(
        np.asarray(P0, dtype=float),
        np.asarray(P1, dtype=float),
        np.asarray(r0, dtype=float),
        np.asarray(r1, dtype=float),
        discount,
    )


def make_indexable3() -> RestlessArm:
    """Dense 3-state arm with known indices near (0.3, 0.8, 0.7)."""
    P0 = np.array(
        [
            [0.363, 0.503, 0.134],
            [0.082, 0.754, 0.164],
            [0.246, 0.029, 0.724],
        ]
    )
    P0[2] /= P0[2].sum()  # published digits sum to 0.999; renormalize exactly
    P1 = [
        [0.172, 0.175, 0.653],
        [0.055, 0.931, 0.014],
        [0.155, 0.627, 0.218],
    ]
    return make_arm(P0, P1, [0.0, 0.0, 0.0], [0.441, 0.803, 0.426])


#: Frozen average-reward output for make_indexable3().
INDEXABLE3_INDICES = (0.29935171088379997, 0.8030000000000002, 0.7020913319226706)
INDEXABLE3_SIGMA = (0, 2, 1)

#: Frozen output for make_indexable3() under discount 0.99.
INDEXABLE3_DISCOUNTED_099 = (0.3010875475584536, 0.8030000000000024, 0.698913387116566)


def make_nonindexable3() -> RestlessArm:
    """Dense 3-state arm where state 2's advantage recrosses zero (not indexable)."""
    P0 = [
        [0.005, 0.793, 0.202],
        [0.027, 0.558, 0.415],
        [0.736, 0.249, 0.015],
    ]
    P1 = [
        [0.718, 0.254, 0.028],
        [0.347, 0.097, 0.556],
        [0.015, 0.956, 0.029],
    ]
    return make_arm(P0, P1, [0.0, 0.0, 0.0], [0.699, 0.362, 0.715])


def make_plateau2() -> RestlessArm:
    """Both actions identical: every state switches at penalty 0."""
    P = [[0.0, 1.0], [0.0, 1.0]]
    return make_arm(P, P, [1.0, 1.0], [1.0, 1.0])


def make_multichain_rest2() -> RestlessArm:
    """Resting freezes every state, so the one-active-state policy is multichain."""
    return make_arm(
        [[1.0, 0.0], [0.0, 1.0]],
        [[0.0, 1.0], [0.0, 1.0]],
        [1.0, 1.0],
        [1.0, 1.0],
    )


def make_transient_inf2() -> RestlessArm:
    """State 0 is transient with infinite index; state 1 switches at 0."""
    return make_arm(
        [[1.0, 0.0], [0.0, 1.0]],
        [[0.0, 1.0], [0.0, 1.0]],
        [0.0, 1.0],
        [1.0, 1.0],
    )


def make_multichain_act2() -> RestlessArm:
    """The all-active policy is the identity chain: multichain at iteration 0."""
    return make_arm(
        [[0.0, 1.0], [0.0, 1.0]],
        [[1.0, 0.0], [0.0, 1.0]],
        [0.0, 0.0],
        [0.0, 1.0],
    )


def make_rested_chain2(beta: float) -> RestlessArm:
    """Deterministic rested chain 0 -> 1 with absorbing reward; indices (beta, 1)."""
    P = [[0.0, 1.0], [0.0, 1.0]]
    return make_arm([[1.0, 0.0], [0.0, 1.0]], P, [0.0, 0.0], [0.0, 1.0], beta)


@pytest.fixture
def indexable3() -> RestlessArm:
    return make_indexable3()


@pytest.fixture
def nonindexable3() -> RestlessArm:
    return make_nonindexable3()


@pytest.fixture
def plateau2() -> RestlessArm:
    return make_plateau2()


@pytest.fixture
def multichain_rest2() -> RestlessArm:
    return make_multichain_rest2()


@pytest.fixture
def transient_inf2() -> RestlessArm:
    return make_transient_inf2()


@pytest.fixture
def multichain_act2() -> RestlessArm:
    return make_multichain_act2()
