"""Brute-force reference implementations used to verify the index engine.

Everything here trades speed for independence: fresh factorizations, full
policy enumeration, bisection on exactly solved Markov decision processes,
and the classical largest-index-first Gittins computation.  None of it shares
incremental state with the engine, so agreement between the two is evidence
of correctness rather than of shared bugs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.linalg import lu_solve

from .arm import ChainKind, RestlessArm, classify_policy_chain, is_weakly_communicating
from .index_solver import (
    AverageReward,
    Criterion,
    Discounted,
    IndexResult,
    Indexable,
    Multichain,
    NonIndexable,
    NotWeaklyCommunicating,
    _build_delta,
    _build_eval_matrix,
)
from .linalg import Singular, lu_factor_checked

#: Largest arm accepted by :func:`naive_whittle`.
NAIVE_MAX_N = 500

#: Largest arm accepted by :func:`enumerate_bellman_optimal` (2**n scan).
ENUMERATE_MAX_N = 12

#: Largest arm accepted by :func:`oracle_indexability`.
ORACLE_INDEXABILITY_MAX_N = 10

#: Sign-pattern slack when testing Bellman optimality of an evaluated policy.
PATTERN_TOL = 1e-8

#: Collapse distance for coincident advantage-root penalties.
BREAKPOINT_COLLAPSE_TOL = 1e-9


class TooLarge(Exception):
    """The requested brute-force computation is too big to be an oracle."""

    def __init__(self, n: int) -> None:
        self.n = int(n)
        super().__init__(f"arm with n={n} exceeds this oracle's size bound")


class NonMonotone(Exception):
    """Action preference at ``state`` is not monotone in the penalty."""

    def __init__(self, state: int) -> None:
        self.state = int(state)
        super().__init__(f"action preference at state {state} is not monotone in the penalty")


@dataclass(frozen=True)
class UnsupportedByOracle:
    """The enumeration oracle cannot classify this arm.

    Returned when a multichain policy shows up inside the enumeration (the
    sign-pattern optimality test only applies to unichain policies), or when
    no evaluated policy passes the test at some probe penalty.
    """

    reason: str


@dataclass(frozen=True, eq=False)
class AffineVector:
    """A vector-valued affine function of the penalty: ``constant + lam*slope``."""

    constant: np.ndarray
    slope: np.ndarray

    def at(self, lam: float) -> np.ndarray:
        return self.constant + lam * self.slope


@dataclass(frozen=True, eq=False)
class PolicyEvaluation:
    """Average-reward evaluation of one unichain policy.

    ``gain`` and ``bias`` are taken at penalty 0 with the normalization
    ``bias[0] = 0``; ``advantage`` is the full affine active-advantage
    function of the penalty.
    """

    gain: float
    bias: np.ndarray
    advantage: AffineVector


def evaluate_policy(arm: RestlessArm, policy) -> PolicyEvaluation:
    """Solve the average-reward evaluation equations for ``policy``.

    Raises:
        MultichainPolicy: the policy has more than one recurrent class.
    """
    from .index_solver import MultichainPolicy

    policy_t = tuple(sorted(int(s) for s in policy))
    n = arm.n
    mask = np.zeros(n, dtype=bool)
    if policy_t:
        mask[list(policy_t)] = True
    A = _build_eval_matrix(arm, np.flatnonzero(mask), AverageReward())
    try:
        lu = lu_factor_checked(A)
    except Singular:
        raise MultichainPolicy(policy_t) from None
    r_pi = np.where(mask, arm.r1, arm.r0)
    v0 = lu_solve(lu, r_pi, check_finite=False)
    v1 = lu_solve(lu, -mask.astype(float), check_finite=False)
    Delta = _build_delta(arm, AverageReward())
    delta = arm.r1 - arm.r0
    a0 = delta + Delta @ v0
    a1 = Delta @ v1 - 1.0
    bias = v0.copy()
    bias[0] = 0.0
    return PolicyEvaluation(
        gain=float(v0[0]),
        bias=bias,
        advantage=AffineVector(constant=a0, slope=a1),
    )


# ---------------------------------------------------------------------------
# Algorithm-mirror with fresh factorizations (quartic total cost)
# ---------------------------------------------------------------------------


def naive_whittle(
    arm: RestlessArm,
    criterion: Optional[Criterion] = None,
    tolerance: Optional[float] = None,
    check_indexability: bool = True,
) -> IndexResult:
    """Reference index computation: one fresh factorization per iteration.

    Mirrors the engine's removal order, tolerance semantics and verdicts
    exactly, but recomputes the advantage slopes from scratch every iteration
    instead of updating them, for quartic total cost.

    Raises:
        TooLarge: ``n`` exceeds ``NAIVE_MAX_N``.
        NotWeaklyCommunicating: as :func:`banditindex.compute_indices`.
    """
    from .index_solver import DEFAULT_TOLERANCE, EPS_DEN, SolverOptions

    if criterion is None:
        criterion = AverageReward()
    n = arm.n
    if n > NAIVE_MAX_N:
        raise TooLarge(n)
    if tolerance is None:
        tolerance = SolverOptions().resolved_tolerance()
    eps_z = tolerance * (1.0 + arm.reward_scale())
    eps_den = EPS_DEN
    averaged = isinstance(criterion, AverageReward)
    if averaged and not is_weakly_communicating(arm):
        raise NotWeaklyCommunicating(
            "average-reward indices require a weakly communicating arm"
        )

    Delta = _build_delta(arm, criterion)
    delta = arm.r1 - arm.r0
    active = np.ones(n, dtype=bool)

    # Iteration 1: the all-active advantage has slope exactly -1, so each
    # state's crossing penalty is its advantage at penalty 0.
    A = _build_eval_matrix(arm, np.flatnonzero(active), criterion)
    try:
        lu = lu_factor_checked(A)
    except Singular:
        if averaged:
            return Multichain(tuple(range(n)), iterations=0)
        raise
    v0 = lu_solve(lu, np.where(active, arm.r1, arm.r0), check_finite=False)
    mu = delta + Delta @ v0

    lam = np.full(n, np.nan)
    sigma: list[int] = []
    mu_min = float(mu.min())
    sig = int(np.flatnonzero(mu == mu_min)[0])
    lam[sig] = mu_min
    sigma.append(sig)
    active[sig] = False
    z = mu - mu_min

    for k in range(2, n + 1):
        pol = np.flatnonzero(active)
        A = _build_eval_matrix(arm, pol, criterion)
        try:
            lu = lu_factor_checked(A)
        except Singular:
            if averaged:
                return Multichain(tuple(int(s) for s in pol), iterations=k)
            raise
        d = lu_solve(lu, -active.astype(float), check_finite=False)
        y = Delta @ d

        one_minus_y = 1.0 - y
        mu = np.full(n, np.inf)
        growing = active & (z > eps_z) & (one_minus_y > eps_den)
        np.divide(z, one_minus_y, out=mu, where=growing)
        mu[growing] += mu_min
        mu[active & (np.abs(z) <= eps_z)] = mu_min
        mu[~active] = np.inf

        mn = float(mu.min())
        dmu = mn - mu_min
        if dmu < 0.0:
            dmu = 0.0

        if math.isinf(mn):
            moving = np.abs(one_minus_y) > eps_den
            z[moving & (one_minus_y > 0.0)] = -np.inf
            z[moving & (one_minus_y < 0.0)] = np.inf
        elif dmu > 0.0:
            z -= dmu * one_minus_y

        if check_indexability and dmu > eps_z:
            removed = ~active
            offending = removed & (z >= -eps_z)
            if offending.any():
                masked = np.where(offending, z, -np.inf)
                witness = int(np.argmax(masked))
                return NonIndexable(at_iteration=k, witness_state=witness, iterations=k)

        if math.isinf(mn):
            rest = [int(s) for s in np.flatnonzero(active)]
            lam[rest] = np.inf
            lam.setflags(write=False)
            return Indexable(
                indices=lam, sigma=tuple(sigma) + tuple(rest), iterations=k
            )

        level = mu_min + dmu
        cand = np.flatnonzero(mu == mn)
        sig = int(cand[0])
        lam[sig] = level
        sigma.append(sig)
        active[sig] = False
        mu_min = level

    if averaged:
        verdict = classify_policy_chain(arm, ())
        if verdict.kind is ChainKind.Multichain:
            return Multichain((), iterations=n)
    lam.setflags(write=False)
    return Indexable(indices=lam, sigma=tuple(sigma), iterations=n)


# ---------------------------------------------------------------------------
# Policy enumeration
# ---------------------------------------------------------------------------


class _PolicyTable:
    """Affine data for every policy of a small arm, indexed by bitmask.

    For policy mask ``p``, row ``p`` of ``a0``/``a1`` holds the active
    advantage ``a0 + lam*a1``; ``g0``/``g1`` hold the gain (average-reward
    criterion only) and ``unichain[p]`` its chain classification.  Multichain
    policies get NaN rows.
    """

    def __init__(self, arm: RestlessArm, criterion: Criterion) -> None:
        n = arm.n
        count = 1 << n
        self.n = n
        self.criterion = criterion
        self.averaged = isinstance(criterion, AverageReward)
        self.active = np.zeros((count, n), dtype=bool)
        for i in range(n):
            self.active[:, i] = (np.arange(count) >> i) & 1
        self.unichain = np.ones(count, dtype=bool)
        self.a0 = np.full((count, n), np.nan)
        self.a1 = np.full((count, n), np.nan)
        self.g0 = np.full(count, np.nan)
        self.g1 = np.full(count, np.nan)
        Delta = _build_delta(arm, criterion)
        delta = arm.r1 - arm.r0
        for p in range(count):
            mask = self.active[p]
            pol = np.flatnonzero(mask)
            if self.averaged:
                verdict = classify_policy_chain(arm, pol)
                if verdict.kind is ChainKind.Multichain:
                    self.unichain[p] = False
                    continue
            A = _build_eval_matrix(arm, pol, criterion)
            lu = lu_factor_checked(A)
            v0 = lu_solve(lu, np.where(mask, arm.r1, arm.r0), check_finite=False)
            v1 = lu_solve(lu, -mask.astype(float), check_finite=False)
            self.a0[p] = delta + Delta @ v0
            self.a1[p] = Delta @ v1 - 1.0
            if self.averaged:
                self.g0[p] = v0[0]
                self.g1[p] = v1[0]

    def any_multichain(self) -> bool:
        return not bool(self.unichain.all())

    def optimal_masks(self, lam: float) -> np.ndarray:
        """Bitmasks of policies that are Bellman optimal at ``lam``.

        A unichain policy qualifies when its advantage is ``>= -PATTERN_TOL``
        on active states and ``<= PATTERN_TOL`` on passive ones; under the
        average-reward criterion it must also attain the maximum gain among
        unichain policies within ``PATTERN_TOL``.
        """
        alpha = self.a0 + lam * self.a1
        ok = (
            self.unichain
            & np.all((alpha >= -PATTERN_TOL) | ~self.active, axis=1)
            & np.all((alpha <= PATTERN_TOL) | self.active, axis=1)
        )
        if self.averaged:
            gains = self.g0 + lam * self.g1
            gmax = np.nanmax(np.where(self.unichain, gains, np.nan))
            ok &= gains >= gmax - PATTERN_TOL
        return np.flatnonzero(ok)

def _mask_to_policy(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if (mask >> i) & 1)


def enumerate_bellman_optimal(arm: RestlessArm, lam: float) -> list[tuple[int, ...]]:
    """All Bellman-optimal policies of ``arm`` at penalty ``lam``.

    Policies are returned as sorted tuples of active states, in increasing
    bitmask order.  Multichain policies are skipped (they cannot be verified
    through the sign-pattern test); use :func:`oracle_indexability` to learn
    whether that skip matters for the arm.

    Raises:
        TooLarge: ``n`` exceeds ``ENUMERATE_MAX_N``.
        NotWeaklyCommunicating: the arm is not weakly communicating
            (average-reward criterion).
    """
    n = arm.n
    if n > ENUMERATE_MAX_N:
        raise TooLarge(n)
    criterion: Criterion = (
        AverageReward() if arm.discount is None else Discounted(arm.discount)
    )
    if isinstance(criterion, AverageReward) and not is_weakly_communicating(arm):
        raise NotWeaklyCommunicating(
            "Bellman optimality enumeration requires a weakly communicating arm"
        )
    table = _PolicyTable(arm, criterion)
    return [_mask_to_policy(int(p), n) for p in table.optimal_masks(float(lam))]


def _collapse(values: np.ndarray, tol: float) -> list[float]:
    """Sorted representatives of ``values`` with near-duplicates merged."""
    out: list[float] = []
    for v in np.sort(values):
        if not out or v - out[-1] > tol:
            out.append(float(v))
    return out


def oracle_indexability(arm: RestlessArm) -> Union[IndexResult, UnsupportedByOracle]:
    """Indexability verdict and indices by exhaustive policy enumeration.

    Scans the Bellman-optimal policy sets at every advantage-root penalty and
    at midpoints between consecutive roots, checks that the sets are nested
    as the penalty grows, and reads each state's index off the penalty where
    it leaves every optimal policy.  Indices may be ``±inf``.

    Returns ``UnsupportedByOracle`` when a multichain policy appears in the
    enumeration (average-reward criterion) or when some probe has no
    verified optimal policy.

    Raises:
        TooLarge: ``n`` exceeds ``ORACLE_INDEXABILITY_MAX_N``.
        NotWeaklyCommunicating: average-reward criterion, arm not weakly
            communicating.
    """
    n = arm.n
    if n > ORACLE_INDEXABILITY_MAX_N:
        raise TooLarge(n)
    criterion: Criterion = (
        AverageReward() if arm.discount is None else Discounted(arm.discount)
    )
    averaged = isinstance(criterion, AverageReward)
    if averaged and not is_weakly_communicating(arm):
        raise NotWeaklyCommunicating(
            "indexability enumeration requires a weakly communicating arm"
        )
    table = _PolicyTable(arm, criterion)
    if averaged and table.any_multichain():
        bad = int(np.flatnonzero(~table.unichain)[0])
        return UnsupportedByOracle(
            f"multichain policy {_mask_to_policy(bad, n)} in the enumeration"
        )

    with np.errstate(divide="ignore", invalid="ignore"):
        roots = -table.a0 / table.a1
    roots = roots[np.isfinite(roots)]
    points = _collapse(roots, BREAKPOINT_COLLAPSE_TOL)
    if points:
        probes = [points[0] - 1.0]
        for left, right in zip(points, points[1:]):
            probes.append(left)
            probes.append(0.5 * (left + right))
        probes.append(points[-1])
        probes.append(points[-1] + 1.0)
    else:
        probes = [0.0]

    unions: list[int] = []
    inters: list[int] = []
    for lam in probes:
        masks = table.optimal_masks(lam)
        if masks.size == 0:
            return UnsupportedByOracle(
                f"no verified Bellman-optimal policy at penalty {lam!r}"
            )
        u = 0
        i_mask = (1 << n) - 1
        for p in masks:
            u |= int(p)
            i_mask &= int(p)
        unions.append(u)
        inters.append(i_mask)

    for t in range(len(probes) - 1):
        stray = unions[t + 1] & ~inters[t]
        if stray:
            witness = (stray & -stray).bit_length() - 1
            return NonIndexable(at_iteration=0, witness_state=witness, iterations=0)

    indices = np.empty(n)
    for i in range(n):
        bit = 1 << i
        lam_i = math.inf
        for t, lam in enumerate(probes):
            if not (inters[t] & bit):
                lam_i = -math.inf if t == 0 else float(lam)
                break
        indices[i] = lam_i
    indices.setflags(write=False)
    order = sorted(range(n), key=lambda i: (indices[i], i))
    return Indexable(indices=indices, sigma=tuple(order), iterations=n)


# ---------------------------------------------------------------------------
# Discounted single-state index by bisection on exactly solved MDPs
# ---------------------------------------------------------------------------


def _optimal_advantage(
    arm: RestlessArm, beta: float, lam: float, warm: Optional[np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """Advantage gap of the optimal policy of the ``lam``-penalized arm.

    Runs policy iteration with exact evaluation solves.  Returns the
    per-state gap ``Q_activate - Q_rest`` and the final active mask.
    """
    n = arm.n
    r1_pen = arm.r1 - lam
    mask = r1_pen >= arm.r0 if warm is None else warm.copy()
    tie = 1e-13 * (1.0 + arm.reward_scale() + abs(lam))
    for _ in range(200):
        P = np.where(mask[:, None], arm.P1, arm.P0)
        A = -beta * P
        A[np.diag_indices(n)] += 1.0
        rhs = np.where(mask, r1_pen, arm.r0)
        V = np.linalg.solve(A, rhs)
        gap = (r1_pen + beta * (arm.P1 @ V)) - (arm.r0 + beta * (arm.P0 @ V))
        new_mask = np.where(np.abs(gap) <= tie, mask, gap > 0.0)
        if np.array_equal(new_mask, mask):
            return gap, mask
        mask = new_mask
    raise RuntimeError("policy iteration did not converge")


def oracle_discounted_index(
    arm: RestlessArm,
    beta: float,
    state: int,
    tol: float,
    hint: Optional[float] = None,
) -> float:
    """Index of ``state`` under discount ``beta`` by bisection on the
    penalty, solving each penalized MDP exactly.

    Returns ``±inf`` when the action preference at ``state`` never flips
    within ``|lam| <= 10*(1+max|r|)/(1-beta)``.  With ``hint``, tries the
    bracket ``hint ± 1e-3`` first (widening geometrically if needed) and
    skips the monotonicity scan.

    Raises:
        NonMonotone: the preference at ``state`` is not monotone across the
            probed grid — evidence the arm is not indexable at this state.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    scale = 1.0 + arm.reward_scale()
    bound = 10.0 * scale / (1.0 - beta)
    warm: list[Optional[np.ndarray]] = [None]

    def active_at(lam: float) -> bool:
        gap, mask = _optimal_advantage(arm, beta, lam, warm[0])
        warm[0] = mask
        return bool(gap[state] > 0.0)

    lo = hi = None
    if hint is not None and math.isfinite(hint):
        width = 1e-3
        while width <= bound:
            cand_lo, cand_hi = hint - width, hint + width
            if active_at(cand_lo):
                if not active_at(cand_hi):
                    lo, hi = cand_lo, cand_hi
                    break
                width *= 8.0
            else:
                # Hint is above the flip (or preference never activates);
                # fall back to the scanned grid.
                break

    if lo is None:
        inner = np.linspace(-scale, scale, 13)
        grid = np.concatenate(([-bound], inner, [bound]))
        prefs = [active_at(g) for g in grid]
        flips = [t for t in range(len(grid) - 1) if prefs[t] != prefs[t + 1]]
        for t in range(len(grid) - 1):
            if not prefs[t] and prefs[t + 1]:
                raise NonMonotone(state)
        if not prefs[0]:
            return -math.inf
        if prefs[-1]:
            return math.inf
        lo, hi = float(grid[flips[0]]), float(grid[flips[0] + 1])

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if active_at(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Classical Gittins computation
# ---------------------------------------------------------------------------


def oracle_gittins(P: np.ndarray, r: np.ndarray, beta: float) -> np.ndarray:
    """Gittins indices by the classical largest-index-first elimination.

    The highest-index state is the one with the largest reward and its index
    is that reward.  Each subsequent state maximizes the ratio of expected
    discounted reward to expected discounted time over the stopping time
    that exits the already-ranked continue set.
    """
    P = np.asarray(P, dtype=float)
    r = np.asarray(r, dtype=float)
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    n = r.shape[0]
    G = np.empty(n)
    continue_set: list[int] = []
    remaining = list(range(n))
    while remaining:
        if not continue_set:
            ratios = {i: float(r[i]) for i in remaining}
        else:
            idx = np.array(continue_set)
            M = np.eye(len(idx)) - beta * P[np.ix_(idx, idx)]
            Nc = np.linalg.solve(M, r[idx])
            Dc = np.linalg.solve(M, np.ones(len(idx)))
            ratios = {}
            for i in remaining:
                num = float(r[i] + beta * (P[i, idx] @ Nc))
                den = float(1.0 + beta * (P[i, idx] @ Dc))
                ratios[i] = num / den
        best = max(remaining, key=lambda i: ratios[i])
        G[best] = ratios[best]
        continue_set.append(best)
        remaining.remove(best)
    return G
