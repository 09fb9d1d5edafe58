"""Dense linear algebra for the index engine.

Provides the policy-evaluation matrix ``A`` in both criteria, a right-form
dense solver with explicit singularity detection, and a block Woodbury update
for low-rank corrections of an inverse.
"""
from __future__ import annotations

import warnings
from typing import Iterable

import numpy as np
import scipy.linalg

from .arm import RestlessArm


#: Relative pivot threshold below which a factorization is declared singular.
PIVOT_RTOL = 1e-12


class Singular(Exception):
    """A matrix factorization hit a negligible pivot.

    ``pivot_index`` is the 0-indexed elimination step at which the pivot
    magnitude fell below ``PIVOT_RTOL`` times the largest entry of the matrix.
    """

    def __init__(self, pivot_index: int):
        self.pivot_index = pivot_index
        super().__init__(f"matrix is singular at pivot {pivot_index}")


class InnerSingular(Exception):
    """The inner (capacitance) matrix of a Woodbury update is singular."""


def lu_factor_checked(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """LU-factor ``A`` and raise :class:`Singular` on a negligible pivot.

    The returned ``(lu, piv)`` pair is usable with ``scipy.linalg.lu_solve``.
    The singularity threshold is ``PIVOT_RTOL * max|A|`` (with an absolute
    floor of ``PIVOT_RTOL`` for all-zero matrices).
    """
    scale = float(np.abs(A).max()) if A.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    tol = PIVOT_RTOL * max(scale, 1e-300)
    diag = np.abs(np.diagonal(lu))
    small = diag <= tol
    if small.any():
        raise Singular(int(np.flatnonzero(small)[0]))
    return lu, piv


def build_A_matrix(arm: RestlessArm, policy: Iterable[int]) -> np.ndarray:
    """Build the average-reward evaluation matrix for ``policy``.

    With ``P`` the row mix of ``P1`` (rows in the policy) and ``P0`` (rows
    outside), the matrix has first column all ones and column ``j >= 1`` equal
    to ``e_j - P[:, j]``.  It is invertible iff the policy's chain is
    unichain, and solving against it yields the gain (first component) and the
    bias pinned to 0 in state 0 (remaining components).
    """
    from .arm import _policy_row_mask

    n = arm.n
    mask = _policy_row_mask(n, policy)
    A = np.where(mask[:, None], arm.P1, arm.P0)
    np.negative(A, out=A)
    idx = np.arange(1, n)
    A[idx, idx] += 1.0
    A[:, 0] = 1.0
    return A


def build_discounted_A_matrix(
    arm: RestlessArm, policy: Iterable[int], beta: float
) -> np.ndarray:
    """Build ``I - beta * P`` for the row mix ``P`` induced by ``policy``.

    Always invertible for ``beta`` in ``(0, 1)`` because the spectral radius
    of a stochastic matrix is 1.
    """
    from .arm import _policy_row_mask

    n = arm.n
    mask = _policy_row_mask(n, policy)
    A = np.where(mask[:, None], arm.P1, arm.P0)
    A *= -beta
    idx = np.arange(n)
    A[idx, idx] += 1.0
    return A


def solve_dense(A: np.ndarray, B: np.ndarray, overwrite_b: bool = False) -> np.ndarray:
    """Solve ``X A = B`` for ``X`` with a single LU factorization of ``A``.

    Implemented as the transposed left solve ``A^T X^T = B^T``; the
    factorization is computed once and reused for every right-hand side.
    With ``overwrite_b`` and a C-contiguous square ``B``, the solve happens
    inside ``B``'s own buffer and the returned ``X`` aliases it, so no
    result-sized allocation is made (``B``'s previous contents are lost).

    Raises:
        Singular: a pivot of the factorization is negligible (below
            ``PIVOT_RTOL`` relative to ``max|A|``).
    """
    # A.T of a C-ordered matrix is an F-contiguous view, so the factorization
    # allocates exactly one matrix-sized buffer and A itself is preserved.
    lu, piv = lu_factor_checked(np.asfortranarray(A.T))
    Xt = scipy.linalg.lu_solve(
        (lu, piv), B.T, overwrite_b=overwrite_b, check_finite=False
    )
    return np.ascontiguousarray(Xt.T)


def woodbury_block_update(
    A_inv: np.ndarray, U: np.ndarray, C: np.ndarray, V: np.ndarray
) -> np.ndarray:
    """Return ``(A + U C V)^{-1}`` given ``A_inv = A^{-1}``.

    Uses the block Woodbury identity
    ``(A + U C V)^{-1} = A^{-1} - A^{-1} U (C^{-1} + V A^{-1} U)^{-1} V A^{-1}``
    computed in stages ``D := A^{-1} U``, ``E := V A^{-1}`` and the inner
    solve against the capacitance ``C^{-1} + V D``.  ``U`` is ``(n, m)``,
    ``C`` is ``(m, m)`` and ``V`` is ``(m, n)``; ``m = 0`` returns a copy of
    ``A_inv`` unchanged.

    Raises:
        InnerSingular: ``C`` or the capacitance matrix is singular, meaning
            the updated matrix ``A + U C V`` is not invertible.
    """
    m = U.shape[1]
    if m == 0:
        return A_inv.copy()
    try:
        C_lu = lu_factor_checked(C)
        C_inv = scipy.linalg.lu_solve(C_lu, np.eye(m), check_finite=False)
        D = A_inv @ U
        E = V @ A_inv
        core = C_inv + V @ D
        core_lu = lu_factor_checked(core)
    except Singular as exc:
        raise InnerSingular(str(exc)) from None
    return A_inv - D @ scipy.linalg.lu_solve(core_lu, E, check_finite=False)
