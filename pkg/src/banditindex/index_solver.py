"""Indexability testing and index computation for restless bandit arms.

The solver removes states one per iteration in order of increasing index,
maintaining the sensitivity matrix ``X = Delta @ inv(A)`` for the current
active-set policy.  Between full recomputations, ``X`` columns are advanced
lazily through accumulated Sherman-Morrison update directions; the ``Block``
variant periodically folds the accumulated directions back into ``X`` with a
dense block update so the per-iteration work stays cache-friendly.

States are numbered ``0 .. n-1`` in every public interface.  Iterations are
numbered from 1; iteration ``k`` removes the ``k``-th state (or finishes).
Internally, rows of ``X`` and the vectors ``y``/``z`` live in *position
space*: still-active states occupy a shrinking prefix and the state removed
at iteration ``k`` sits permanently at position ``n - k``.  Columns of ``X``
stay in original state order.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.linalg import lu_solve
from scipy.linalg.blas import dgemm

from .arm import BadDiscount, ChainKind, RestlessArm, classify_policy_chain, is_weakly_communicating
from .kernels import advance_column
from .linalg import (
    Singular,
    build_A_matrix,
    build_discounted_A_matrix,
    lu_factor_checked,
    solve_dense,
)

#: Default relative tolerance for treating an advantage value as zero.
DEFAULT_TOLERANCE = 1e-10

#: Absolute threshold below which an update denominator counts as singular.
EPS_DEN = 1e-12

#: Environment variable consulted when no explicit tolerance is given.
TOLERANCE_ENV_VAR = "BANDIT_INDEX_TOL"


# ---------------------------------------------------------------------------
# Criteria, variants and options
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AverageReward:
    """Long-run average reward criterion."""


@dataclass(frozen=True)
class Discounted:
    """Expected total discounted reward criterion with factor ``beta``."""

    beta: float

    def __post_init__(self) -> None:
        beta = float(self.beta)
        if not math.isfinite(beta) or not 0.0 < beta < 1.0:
            raise BadDiscount(self.beta)
        object.__setattr__(self, "beta", beta)


Criterion = Union[AverageReward, Discounted]


@dataclass(frozen=True)
class Naive:
    """Reference variant: refactor the evaluation matrix at every iteration."""


@dataclass(frozen=True)
class Cubic:
    """Advance one column per iteration; never recompute ``X`` in bulk."""


@dataclass(frozen=True)
class Block:
    """Like :class:`Cubic` but periodically fold pending updates into ``X``.

    ``recompute_count`` is the number of bulk recomputations over the whole
    run; ``None`` selects ``max(1, round(2 * n ** 0.1))``.
    """

    recompute_count: Optional[int] = None

    def __post_init__(self) -> None:
        if self.recompute_count is not None and self.recompute_count < 1:
            raise ValueError(f"recompute_count must be >= 1, got {self.recompute_count}")


Variant = Union[Naive, Cubic, Block]


def default_recompute_count(n: int) -> int:
    """Default number of bulk ``X`` recomputations for an ``n``-state arm."""
    return max(1, int(round(2.0 * n**0.1)))


def _block_stride(n: int, recompute_count: int) -> int:
    """Iteration stride between bulk recomputations (ceil division)."""
    return -(-n // (recompute_count + 1))


@dataclass(frozen=True)
class SolverOptions:
    """Configuration for :func:`compute_indices` and the stepwise API.

    ``tolerance`` is the relative zero threshold for advantage comparisons;
    ``None`` means: use the ``BANDIT_INDEX_TOL`` environment variable if set,
    else ``DEFAULT_TOLERANCE``.  The effective absolute threshold is
    ``tolerance * (1 + max |reward|)``.
    """

    check_indexability: bool = True
    variant: Variant = field(default_factory=Block)
    criterion: Criterion = field(default_factory=AverageReward)
    tolerance: Optional[float] = None

    def resolved_tolerance(self) -> float:
        """Return the relative tolerance after applying the fallback chain."""
        if self.tolerance is not None:
            return float(self.tolerance)
        env = os.environ.get(TOLERANCE_ENV_VAR)
        if env is not None and env != "":
            try:
                return float(env)
            except ValueError:
                raise ValueError(
                    f"{TOLERANCE_ENV_VAR} must be a float, got {env!r}"
                ) from None
        return DEFAULT_TOLERANCE


# ---------------------------------------------------------------------------
# Results and signals
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Indexable:
    """The arm is indexable; ``indices[i]`` is the index of state ``i``.

    ``sigma`` lists states in removal order (ties and states sharing an
    infinite index are ordered by state number).  Entries of ``indices`` may
    be ``+inf`` when a state's passive action is strictly dominant at every
    penalty level.
    """

    indices: np.ndarray
    sigma: tuple[int, ...]
    iterations: int


@dataclass(frozen=True)
class NonIndexable:
    """A removed state's advantage turned nonnegative again.

    ``witness_state`` re-entered the active region at ``at_iteration``,
    certifying that the active sets are not nested.
    """

    at_iteration: int
    witness_state: int
    iterations: int


class Multichain(Exception):
    """An encountered active-set policy has more than one recurrent class.

    Average-reward indices are ill-defined through such a policy, so the run
    stops.  ``at_policy`` is the offending active set (sorted state tuple).
    Raised by :func:`init_state` when the all-active policy is multichain;
    otherwise returned as a result value.
    """

    def __init__(self, at_policy: tuple[int, ...], iterations: int = 0) -> None:
        self.at_policy = tuple(int(s) for s in at_policy)
        self.iterations = int(iterations)
        super().__init__(
            f"multichain active-set policy {self.at_policy} at iteration {self.iterations}"
        )


IndexResult = Union[Indexable, NonIndexable, Multichain]


class MultichainSignal(Exception):
    """A column advance hit a singular denominator at iteration ``k``."""

    def __init__(self, k: int) -> None:
        self.k = int(k)
        super().__init__(f"singular update denominator at iteration {k}")


class NotWeaklyCommunicating(Exception):
    """The arm is not weakly communicating; average-reward indices need that."""


class MultichainPolicy(Exception):
    """A single-policy evaluation was requested for a multichain policy."""

    def __init__(self, policy: tuple[int, ...]) -> None:
        self.policy = tuple(int(s) for s in policy)
        super().__init__(f"policy {self.policy} is multichain")


@dataclass(frozen=True)
class Continue:
    """The iteration removed a state; more remain."""


@dataclass(frozen=True, eq=False)
class Finished:
    """The run is over; ``result`` is the final verdict."""

    result: IndexResult


# ---------------------------------------------------------------------------
# Solver state
# ---------------------------------------------------------------------------


class SolverState:
    """Mutable working state of an index computation.

    Attributes:
        n: number of states.
        check: whether re-entry of removed states is being monitored.
        eps_z: absolute zero threshold for advantage comparisons.
        eps_den: singularity threshold for update denominators.
        criterion: evaluation criterion in force.
        X: (n, n) sensitivity matrix; rows in position space, columns in
            original state order; current through removal ``base``.
        W: transposed update-direction buffer; row ``r`` holds the scaled
            direction created at removal ``base + r + 1``.
        y: cumulative change of active-state advantage per unit of index
            growth (position space); ``1 - y`` is the advantage slope.
        z: advantage gap above the current index level (position space).
        lambda_: per-state index values in original state order; ``nan``
            while a state is still active.  (Named with a trailing underscore
            because ``lambda`` is reserved.)
        mu_min: index level reached so far (non-decreasing).
        sigma: states removed so far, in removal order.
        stateat: ``stateat[p]`` is the original state at position ``p``.
        base: removals already folded directly into ``X``.
        k: iterations completed.
        V: length-``n`` scratch vector for column advances.
        finished: the final result once the run is over, else ``None``.
    """

    __slots__ = (
        "n",
        "check",
        "eps_z",
        "eps_den",
        "criterion",
        "X",
        "W",
        "y",
        "z",
        "lambda_",
        "mu_min",
        "sigma",
        "stateat",
        "base",
        "k",
        "V",
        "finished",
        "_xcol",
        "_arm",
    )

    def __init__(
        self,
        n: int,
        check: bool,
        eps_z: float,
        criterion: Criterion,
        X: np.ndarray,
        W: np.ndarray,
        arm: RestlessArm,
    ) -> None:
        self.n = n
        self.check = check
        self.eps_z = eps_z
        self.eps_den = EPS_DEN
        self.criterion = criterion
        self.X = X
        self.W = W
        self.y = np.zeros(n)
        self.z = np.empty(n)
        self.lambda_ = np.full(n, np.nan)
        self.mu_min = math.nan
        self.sigma: list[int] = []
        self.stateat = np.arange(n)
        self.base = 0
        self.k = 0
        self.V = np.empty(n)
        self.finished: Optional[IndexResult] = None
        self._xcol: Optional[np.ndarray] = None
        self._arm = arm

    @property
    def active(self) -> np.ndarray:
        """Still-active states, sorted by state number."""
        return np.sort(self.stateat[: self.n - len(self.sigma)])

    def _swap_positions(self, p: int, q: int, wrows: int) -> None:
        """Swap positions ``p`` and ``q`` in every position-space array."""
        if p == q:
            return
        st = self.stateat
        st[p], st[q] = st[q], st[p]
        y = self.y
        y[p], y[q] = y[q], y[p]
        z = self.z
        z[p], z[q] = z[q], z[p]
        self.X[[p, q]] = self.X[[q, p]]
        if wrows > 0:
            W = self.W
            tmp = W[:wrows, p].copy()
            W[:wrows, p] = W[:wrows, q]
            W[:wrows, q] = tmp

    def _select_and_remove(self, mu: np.ndarray, m: int, k: int) -> tuple[int, float]:
        """Pick the argmin of ``mu`` over the active prefix and retire it.

        Ties (exact float equality) break toward the smallest state number.
        Returns ``(state, mu_value)``.
        """
        mn = float(mu.min())
        cand = np.flatnonzero(mu == mn)
        if cand.size == 1:
            p_sel = int(cand[0])
        else:
            p_sel = int(cand[np.argmin(self.stateat[cand])])
        sig_state = int(self.stateat[p_sel])
        wrows = len(self.sigma) - self.base
        self._swap_positions(p_sel, m - 1, wrows)
        self.sigma.append(sig_state)
        self.k = k
        return sig_state, mn


def _is_identity(P: np.ndarray) -> bool:
    """True iff ``P`` is exactly the identity matrix."""
    n = P.shape[0]
    return (
        np.count_nonzero(P) == n
        and bool((np.diagonal(P) == 1.0).all())
    )


def _build_delta(arm: RestlessArm, criterion: Criterion) -> np.ndarray:
    """Action gap of the transition part of the advantage function.

    Average reward: ``P1 - P0`` with column 0 zeroed (the first unknown of
    the evaluation system is the gain, whose coefficient gap is zero).
    Discounted: ``beta * (P1 - P0)`` in full.
    """
    Delta = arm.P1 - arm.P0
    if isinstance(criterion, AverageReward):
        Delta[:, 0] = 0.0
    else:
        Delta *= criterion.beta
    return Delta


def _build_eval_matrix(
    arm: RestlessArm, policy: np.ndarray, criterion: Criterion
) -> np.ndarray:
    """Evaluation system matrix ``A`` for the given active-set policy."""
    if isinstance(criterion, AverageReward):
        return build_A_matrix(arm, policy)
    return build_discounted_A_matrix(arm, policy, criterion.beta)


def init_state(arm: RestlessArm, opts: SolverOptions) -> SolverState:
    """Set up iteration 1: evaluate the all-active policy and pick the first
    state to retire.

    Raises:
        NotWeaklyCommunicating: average-reward criterion on an arm whose
            union transition structure is not weakly communicating.
        Multichain: the all-active policy itself is multichain (average
            reward only); ``iterations`` is 0.
        ValueError: the ``Naive`` variant (it has no stepwise form; use
            :func:`compute_indices`).
    """
    if isinstance(opts.variant, Naive):
        raise ValueError("the Naive variant has no stepwise state; use compute_indices")
    criterion = opts.criterion
    n = arm.n
    eps_z = opts.resolved_tolerance() * (1.0 + arm.reward_scale())

    if isinstance(criterion, AverageReward) and not is_weakly_communicating(arm):
        raise NotWeaklyCommunicating(
            "average-reward indices require a weakly communicating arm"
        )

    all_active = np.arange(n)
    Delta = _build_delta(arm, criterion)
    if isinstance(criterion, Discounted) and _is_identity(arm.P1):
        # Active action is a self-loop: the evaluation matrix is
        # (1 - beta) * I, so X = Delta / (1 - beta) without a solve.
        Delta *= 1.0 / (1.0 - criterion.beta)
        X = Delta
    else:
        A = _build_eval_matrix(arm, all_active, criterion)
        try:
            X = solve_dense(A, Delta, overwrite_b=True)
        except Singular:
            if isinstance(criterion, AverageReward):
                raise Multichain(tuple(range(n)), iterations=0) from None
            raise
        del A
    del Delta  # keep at most X plus one direction buffer alive from here on

    if isinstance(opts.variant, Cubic):
        wrows = max(n - 1, 0)
    else:
        assert isinstance(opts.variant, Block)
        count = opts.variant.recompute_count
        if count is None:
            count = default_recompute_count(n)
        wrows = min(_block_stride(n, count) + 2, max(n - 1, 0))
    W = np.empty((wrows, n))

    state = SolverState(n, bool(opts.check_indexability), eps_z, criterion, X, W, arm)

    mu = arm.r1 - arm.r0
    mu += X @ arm.r1
    # Fill z before the selection swap so the swap keeps it consistent.
    np.subtract(mu, mu.min(), out=state.z)
    sig_state, mn = state._select_and_remove(mu, n, k=1)
    state.lambda_[sig_state] = mn
    state.mu_min = mn
    return state


def update_x_cubic(state: SolverState, k: int) -> None:
    """Advance the column of the newest removed state through all pending
    update directions and append its scaled direction to ``state.W``.

    Raises:
        MultichainSignal: the Sherman-Morrison denominator is negligible,
            meaning the post-removal policy's evaluation matrix is singular.
    """
    t = len(state.sigma)
    col = state.sigma[-1]
    denom = advance_column(
        state.X, state.W, state.base, t, col, state.V, state.eps_den, state.check
    )
    if abs(denom) <= state.eps_den:
        raise MultichainSignal(k)
    state._xcol = state.W[t - 1 - state.base]


def update_x_block(state: SolverState, k: int, recompute_count: int) -> None:
    """Block-variant column advance: periodically fold pending directions
    into ``X`` with one dense rank-``m`` update, then read the needed column
    directly.

    ``recompute_count`` must match the value the state was initialised with
    (it fixes both the fold schedule and the size of ``state.W``).

    Raises:
        MultichainSignal: singular update denominator, or a singular
            evaluation matrix during a fold's fallback fresh solve.
    """
    t = len(state.sigma)
    if t % _block_stride(state.n, recompute_count) == 0:
        _fold_into_x(state, k)
        span = state.n if state.check else state.n - t
        state._xcol = np.ascontiguousarray(state.X[:span, state.sigma[-1]])
    else:
        update_x_cubic(state, k)


def _fold_into_x(state: SolverState, k: int) -> None:
    """Fold removals ``base .. t-1`` into ``X`` (Woodbury identity in X-space).

    With ``rho`` the folded removals, the updated matrix is
    ``X - X[:, rho] @ inv(I + X[rho_pos, rho]) @ X[rho_pos, :]`` where
    ``rho_pos`` are their positions.  If the small core is singular the fold
    falls back to a fresh dense solve for the current active-set policy; if
    that is singular too, the policy is multichain.
    """
    n = state.n
    t = len(state.sigma)
    base = state.base
    folded = state.sigma[base:t]
    rows = n - 1 - np.arange(base, t)
    X = state.X
    Xrows = X[rows, :]  # fancy indexing copies: (m, n)
    core = np.ascontiguousarray(Xrows[:, folded])
    core[np.diag_indices_from(core)] += 1.0
    try:
        core_lu = lu_factor_checked(core)
    except Singular:
        _fresh_solve_into_x(state, k)
        return
    F = np.ascontiguousarray(lu_solve(core_lu, Xrows, check_finite=False))
    Xcols = np.ascontiguousarray(X[:, folded])
    # In-place rank-m downdate: X -= Xcols @ F, via the transposed system so
    # the C-ordered X is a valid Fortran-ordered output operand.
    out = dgemm(alpha=-1.0, a=F.T, b=Xcols.T, beta=1.0, c=X.T, overwrite_c=1)
    if not np.shares_memory(out, X):
        X[:, :] = out.T
    state.base = t


def _fresh_solve_into_x(state: SolverState, k: int) -> None:
    """Rebuild ``X`` exactly for the current active set (fold fallback).

    Used when the fold's small core is singular, which can happen even for a
    nonsingular target policy.  A singular fresh solve, by contrast, is
    definitive: the active-set policy is multichain.
    """
    arm = state._arm
    n = state.n
    t = len(state.sigma)
    active = np.sort(state.stateat[: n - t])
    A = _build_eval_matrix(arm, active, state.criterion)
    Delta = _build_delta(arm, state.criterion)
    # Row selection commutes with the right-solve, so permute the rows into
    # position order up front and reuse X's buffer for both the right-hand
    # side and the solution; the rescue then stays within the solver's
    # memory ceiling.  On the multichain branch X's old contents are lost,
    # but the run is over at that point.
    np.take(Delta, state.stateat, axis=0, out=state.X)
    del Delta
    try:
        Xnew = solve_dense(A, state.X, overwrite_b=True)
    except Singular:
        raise MultichainSignal(k) from None
    if not np.shares_memory(Xnew, state.X):
        state.X[:, :] = Xnew
    state.base = t


def compute_indices(arm: RestlessArm, opts: Optional[SolverOptions] = None) -> IndexResult:
    """Test indexability and compute per-state indices of ``arm``.

    Returns an :class:`Indexable`, :class:`NonIndexable` or
    :class:`Multichain` verdict.  ``Multichain`` doubles as an exception
    type but is returned, never raised, by this function.

    Raises:
        NotWeaklyCommunicating: average-reward criterion on an arm that is
            not weakly communicating.
    """
    if opts is None:
        opts = SolverOptions()
    if isinstance(opts.variant, Naive):
        from .oracle import naive_whittle

        return naive_whittle(
            arm,
            opts.criterion,
            tolerance=opts.resolved_tolerance(),
            check_indexability=opts.check_indexability,
        )
    try:
        state = init_state(arm, opts)
    except Multichain as verdict:
        return verdict
    while True:
        step = iterate(state, arm, opts)
        if isinstance(step, Finished):
            return step.result


def iterate(state: SolverState, arm: RestlessArm, opts: SolverOptions) -> Union[Continue, Finished]:
    """Run one iteration: advance the newest column, update slopes and gaps,
    test for re-entry, and either retire one more state or finish.

    Idempotent after completion: returns the stored :class:`Finished`.
    """
    if state.finished is not None:
        return Finished(state.finished)
    n = state.n
    t = len(state.sigma)
    if t == n:
        return Finished(_finalize_full_run(state, arm))
    k = state.k + 1

    try:
        if isinstance(opts.variant, Block):
            count = opts.variant.recompute_count
            if count is None:
                count = default_recompute_count(n)
            update_x_block(state, k, count)
        else:
            update_x_cubic(state, k)
    except MultichainSignal:
        result = Multichain(tuple(int(s) for s in state.active), iterations=k)
        state.k = k
        state.finished = result
        return Finished(result)

    m = n - t  # active count this iteration
    span = n if state.check else m
    xcol = state._xcol
    y = state.y
    z = state.z

    # Fold the newest direction into the slope vector.  The direction's own
    # entry at the removed position makes (1 - y) vanish there exactly.
    coef = 1.0 - y[m]
    if coef != 0.0:
        y[:span] += coef * xcol[:span]

    # Candidate next index level for each active state (three cases).
    za = z[:m]
    ya = y[:m]
    one_minus_y = 1.0 - ya
    mu = np.full(m, np.inf)
    growing = (za > state.eps_z) & (one_minus_y > state.eps_den)
    np.divide(za, one_minus_y, out=mu, where=growing)
    mu[growing] += state.mu_min
    mu[np.abs(za) <= state.eps_z] = state.mu_min

    mn = float(mu.min())
    dmu = mn - state.mu_min
    if dmu < 0.0:
        # Guard against rounding pushing the level backwards.
        dmu = 0.0
    level = state.mu_min + dmu

    # Advance the gap vector to the new level.
    if math.isinf(mn):
        omy = 1.0 - y[:span]
        zs = z[:span]
        moving = np.abs(omy) > state.eps_den
        zs[moving & (omy > 0.0)] = -np.inf
        zs[moving & (omy < 0.0)] = np.inf
    elif dmu > 0.0:
        z[:span] -= dmu * (1.0 - y[:span])

    # Re-entry test: once the level strictly rises, every removed state must
    # show a strictly negative gap or the active sets fail to nest.
    if state.check and dmu > state.eps_z:
        zrem = z[m:]
        offending = zrem >= -state.eps_z
        if offending.any():
            masked = np.where(offending, zrem, -np.inf)
            witness = int(state.stateat[m + int(np.argmax(masked))])
            result = NonIndexable(at_iteration=k, witness_state=witness, iterations=k)
            state.k = k
            state.finished = result
            return Finished(result)

    if math.isinf(mn):
        # Every remaining state keeps its passive advantage forever.
        rest = sorted(int(s) for s in state.stateat[:m])
        state.lambda_[rest] = np.inf
        state.mu_min = np.inf
        state.k = k
        result = _make_indexable(state, tuple(state.sigma) + tuple(rest), k)
        state.finished = result
        return Finished(result)

    sig_state, _ = state._select_and_remove(mu, m, k)
    state.lambda_[sig_state] = level
    state.mu_min = level
    return Continue()


def _finalize_full_run(state: SolverState, arm: RestlessArm) -> IndexResult:
    """All ``n`` states retired: confirm the empty policy, then report."""
    if state.finished is not None:
        return state.finished
    # The work buffers are dead once every state is retired; drop them now so
    # the chain check's scratch does not stack on top of them.
    state.X = np.empty((0, 0))
    state.W = np.empty((0, 0))
    state._xcol = None
    if isinstance(state.criterion, AverageReward):
        verdict = classify_policy_chain(arm, ())
        if verdict.kind is ChainKind.Multichain:
            result: IndexResult = Multichain((), iterations=state.k)
            state.finished = result
            return result
    result = _make_indexable(state, tuple(state.sigma), state.k)
    state.finished = result
    return result


def _make_indexable(state: SolverState, sigma: tuple[int, ...], iterations: int) -> Indexable:
    indices = state.lambda_.copy()
    indices.setflags(write=False)
    return Indexable(indices=indices, sigma=sigma, iterations=iterations)


def advantage_at(
    arm: RestlessArm,
    policy,
    lam: float,
    criterion: Optional[Criterion] = None,
) -> np.ndarray:
    """Active-minus-passive advantage of every state under ``policy`` at
    penalty ``lam``.

    ``policy`` is an iterable of active state numbers.  The advantage of
    state ``i`` is the gain of taking the active action once (paying ``lam``)
    and then following ``policy``, minus the gain of the passive action.

    Raises:
        MultichainPolicy: average-reward criterion and ``policy`` induces
            more than one recurrent class.
    """
    if criterion is None:
        criterion = AverageReward() if arm.discount is None else Discounted(arm.discount)
    policy_t = tuple(sorted(int(s) for s in policy))
    n = arm.n
    mask = np.zeros(n, dtype=bool)
    if policy_t:
        mask[list(policy_t)] = True
    A = _build_eval_matrix(arm, np.flatnonzero(mask), criterion)
    rhs = np.where(mask, arm.r1 - lam, arm.r0)
    try:
        lu = lu_factor_checked(A)
    except Singular:
        if isinstance(criterion, AverageReward):
            raise MultichainPolicy(policy_t) from None
        raise
    v = lu_solve(lu, rhs, check_finite=False)
    Delta = _build_delta(arm, criterion)
    alpha = arm.r1 - arm.r0
    alpha -= lam
    alpha += Delta @ v
    return alpha


def gittins_indices(P: np.ndarray, r: np.ndarray, beta: float) -> np.ndarray:
    """Gittins indices of the rested chain ``(P, r)`` under discount ``beta``.

    Uses the retirement formulation: freezing the chain for a per-step
    charge ``lam`` is worth ``-lam / (1 - beta)``, so a state's Gittins
    index equals the negated penalty at which freezing becomes preferable.
    That penalty is the index of an arm whose active action is the frozen
    self-loop, which the engine computes without any indexability risk (the
    self-loop arm is always indexable in the discounted sense).
    """
    from .arm import validate_arm

    P = np.asarray(P, dtype=float)
    r = np.asarray(r, dtype=float)
    n = r.shape[0]
    arm = validate_arm(
        {
            "n": n,
            "P0": P,
            "P1": np.eye(n),
            "r0": r,
            "r1": np.zeros(n),
            "discount": float(beta),
        }
    )
    opts = SolverOptions(
        check_indexability=False,
        variant=Cubic(),
        criterion=Discounted(float(beta)),
    )
    result = compute_indices(arm, opts)
    assert isinstance(result, Indexable)
    return -np.asarray(result.indices)
