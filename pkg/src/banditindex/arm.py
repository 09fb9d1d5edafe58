"""Arm model: validation, random generation, serialization and chain structure.

An arm is a two-action Markov decision process on states ``0 .. n-1``: action 1
("activate") with transition matrix ``P1`` and reward vector ``r1``, action 0
("rest") with ``P0`` and ``r0``.  A *policy* is the set of states where action
1 is taken.  The optional ``discount`` switches the arm to the discounted
criterion; ``None`` means the average-reward criterion.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

#: Tolerance for row sums of transition matrices.
ROW_SUM_TOL = 1e-9


class ArmError(ValueError):
    """Base class for arm validation errors."""


class NonStochasticRow(ArmError):
    """A transition-matrix row has negative/non-finite entries or a bad sum."""

    def __init__(self, row: int, action: int, row_sum: float):
        self.row = row
        self.action = action
        self.row_sum = row_sum
        super().__init__(
            f"row {row} of P{action} is not a probability distribution "
            f"(sum={row_sum!r})"
        )


class ShapeMismatch(ArmError):
    """A field is missing, malformed, or inconsistent with the declared size."""

    def __init__(self, field: str, detail: str):
        self.field = field
        self.detail = detail
        super().__init__(f"field {field!r}: {detail}")


class BadDiscount(ArmError):
    """The discount factor is not a float in the open interval (0, 1)."""

    def __init__(self, value: object):
        self.value = value
        super().__init__(f"discount must be a float in (0, 1) or null, got {value!r}")


class BadBandwidth(ArmError):
    """The requested bandwidth is not an odd integer in [1, 2n-1]."""

    def __init__(self, value: object):
        self.value = value
        super().__init__(f"bandwidth must be an odd integer in [1, 2n-1], got {value!r}")


class ChainKind(Enum):
    """Chain structure of a fixed policy's Markov chain."""

    Unichain = "unichain"
    Multichain = "multichain"


@dataclass(frozen=True)
class ChainVerdict:
    """Recurrent-class structure of the chain induced by a policy.

    ``kind`` is ``Unichain`` iff there is exactly one recurrent class.
    ``recurrent_classes`` lists each class as a sorted tuple of states,
    ordered by smallest member.
    """

    kind: ChainKind
    recurrent_classes: tuple[tuple[int, ...], ...]


@dataclass(frozen=True, eq=False)
class RestlessArm:
    """A validated two-action arm.

    Arrays are float64, C-contiguous and marked read-only.  ``discount`` is
    ``None`` for the average-reward criterion, otherwise a float in (0, 1).
    """

    P0: np.ndarray
    P1: np.ndarray
    r0: np.ndarray
    r1: np.ndarray
    discount: float | None = None

    @property
    def n(self) -> int:
        """Number of states."""
        return self.r1.shape[0]

    def reward_scale(self) -> float:
        """Return ``max(|r0|, |r1|)``, used to scale solver tolerances."""
        return float(max(np.abs(self.r0).max(), np.abs(self.r1).max(), 0.0))


def _as_float_matrix(field: str, value: object, n: int) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ShapeMismatch(field, f"not a numeric matrix ({exc})") from None
    if arr.shape != (n, n):
        raise ShapeMismatch(field, f"expected shape ({n}, {n}), got {arr.shape}")
    return np.ascontiguousarray(arr)


def _as_float_vector(field: str, value: object, n: int) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ShapeMismatch(field, f"not a numeric vector ({exc})") from None
    if arr.shape != (n,):
        raise ShapeMismatch(field, f"expected shape ({n},), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ShapeMismatch(field, "contains non-finite entries")
    return np.ascontiguousarray(arr)


def _check_stochastic(P: np.ndarray, action: int) -> None:
    finite = np.isfinite(P).all(axis=1)
    nonneg = (P >= 0.0).all(axis=1)
    sums = P.sum(axis=1)
    good = finite & nonneg & (np.abs(sums - 1.0) <= ROW_SUM_TOL)
    if not good.all():
        row = int(np.flatnonzero(~good)[0])
        raise NonStochasticRow(row, action, float(sums[row]))


def validate_arm(raw: Mapping[str, object]) -> RestlessArm:
    """Validate a raw arm description and return a :class:`RestlessArm`.

    ``raw`` is a mapping with keys ``n``, ``P0``, ``P1``, ``r0``, ``r1`` and
    optionally ``discount`` (``None`` for the average-reward criterion).
    Values may be nested lists (as parsed from JSON) or NumPy arrays.

    Raises:
        ShapeMismatch: missing/malformed field or inconsistent dimensions.
        NonStochasticRow: a transition row is not a probability distribution.
        BadDiscount: discount outside ``(0, 1)``.
    """
    if not isinstance(raw, Mapping):
        raise ShapeMismatch("<root>", f"expected a mapping, got {type(raw).__name__}")
    for key in ("n", "P0", "P1", "r0", "r1"):
        if key not in raw:
            raise ShapeMismatch(key, "missing")
    try:
        n = int(raw["n"])  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise ShapeMismatch("n", f"not an integer: {raw['n']!r}") from None
    if n < 1:
        raise ShapeMismatch("n", f"must be >= 1, got {n}")

    P0 = _as_float_matrix("P0", raw["P0"], n)
    P1 = _as_float_matrix("P1", raw["P1"], n)
    r0 = _as_float_vector("r0", raw["r0"], n)
    r1 = _as_float_vector("r1", raw["r1"], n)
    _check_stochastic(P0, 0)
    _check_stochastic(P1, 1)

    discount_raw = raw.get("discount", None)
    discount: float | None
    if discount_raw is None:
        discount = None
    else:
        try:
            discount = float(discount_raw)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            raise BadDiscount(discount_raw) from None
        if not np.isfinite(discount) or not 0.0 < discount < 1.0:
            raise BadDiscount(discount_raw)

    for arr in (P0, P1, r0, r1):
        arr.flags.writeable = False
    return RestlessArm(P0=P0, P1=P1, r0=r0, r1=r1, discount=discount)


def _exponential_rows(rng: np.random.Generator, sizes: Iterable[int]) -> list[np.ndarray]:
    """Draw one normalized exponential row per requested size.

    Exponentials come from the uniform stream through the inverse CDF
    ``-log1p(-u)``, so the number of uniforms consumed per row equals the row
    size and the stream layout is stable across implementations.
    """
    rows = []
    for size in sizes:
        u = rng.random(size)
        e = -np.log1p(-u)
        rows.append(e / e.sum())
    return rows


def generate_dense_uniform(n: int, seed: int) -> RestlessArm:
    """Generate a dense random arm (average-reward, no discount).

    Rows of ``P0`` then ``P1`` are drawn in row-major order as normalized
    exponentials; rewards ``r0`` then ``r1`` are uniform on ``[0, 1)``.  All
    randomness comes from ``numpy.random.Generator(PCG64(seed))``.
    """
    if n < 1:
        raise ShapeMismatch("n", f"must be >= 1, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    P0 = np.vstack(_exponential_rows(rng, [n] * n))
    P1 = np.vstack(_exponential_rows(rng, [n] * n))
    r0 = rng.random(n)
    r1 = rng.random(n)
    for arr in (P0, P1, r0, r1):
        arr.flags.writeable = False
    return RestlessArm(P0=P0, P1=P1, r0=r0, r1=r1, discount=None)


def generate_banded(n: int, bandwidth: int, seed: int) -> RestlessArm:
    """Generate a random arm whose transition matrices are banded.

    ``bandwidth`` must be an odd integer ``b`` with ``1 <= b <= 2n - 1``; row
    ``i`` has support on columns ``max(0, i-h) .. min(n-1, i+h)`` where
    ``h = (b - 1) // 2`` (``b = 3`` gives tridiagonal matrices).  Within each
    row the nonzero entries are normalized exponentials; exactly one uniform
    draw is consumed per in-band entry, rows of ``P0`` first, then ``P1``,
    then rewards ``r0``, ``r1`` uniform on ``[0, 1)``.
    """
    if n < 1:
        raise ShapeMismatch("n", f"must be >= 1, got {n}")
    if not isinstance(bandwidth, (int, np.integer)) or isinstance(bandwidth, bool):
        raise BadBandwidth(bandwidth)
    if bandwidth % 2 == 0 or not 1 <= bandwidth <= 2 * n - 1:
        raise BadBandwidth(bandwidth)
    half = (bandwidth - 1) // 2
    rng = np.random.Generator(np.random.PCG64(seed))
    windows = [(max(0, i - half), min(n, i + half + 1)) for i in range(n)]

    def banded_matrix() -> np.ndarray:
        P = np.zeros((n, n))
        rows = _exponential_rows(rng, [hi - lo for lo, hi in windows])
        for i, ((lo, hi), row) in enumerate(zip(windows, rows)):
            P[i, lo:hi] = row
        return P

    P0 = banded_matrix()
    P1 = banded_matrix()
    r0 = rng.random(n)
    r1 = rng.random(n)
    for arr in (P0, P1, r0, r1):
        arr.flags.writeable = False
    return RestlessArm(P0=P0, P1=P1, r0=r0, r1=r1, discount=None)


def _policy_row_mask(n: int, policy: Iterable[int]) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    states = np.asarray(sorted(set(int(s) for s in policy)), dtype=np.intp)
    if states.size:
        if states[0] < 0 or states[-1] >= n:
            raise ShapeMismatch("policy", f"state out of range for n={n}")
        mask[states] = True
    return mask


def _recurrent_classes_of_support(S: np.ndarray) -> list[tuple[int, ...]]:
    """Recurrent classes of a chain given its boolean support matrix.

    Recurrent classes are the strongly connected components without any
    outgoing edge (sink components); the support is exact, so zero-probability
    transitions do not create edges.
    """
    n = S.shape[0]
    n_comp, labels = connected_components(
        csr_matrix(S), directed=True, connection="strong"
    )
    if n_comp == 1:
        return [tuple(range(n))]
    cross = S & (labels[:, None] != labels[None, :])
    rows_out = cross.any(axis=1)
    has_out = np.bincount(labels[rows_out], minlength=n_comp) > 0
    classes = [
        tuple(np.flatnonzero(labels == comp))
        for comp in np.flatnonzero(~has_out)
    ]
    classes.sort(key=lambda cls: cls[0])
    return classes


def classify_policy_chain(arm: RestlessArm, policy: Iterable[int]) -> ChainVerdict:
    """Classify the Markov chain induced by ``policy`` on ``arm``.

    ``policy`` is the set of states using action 1.  Returns the
    :class:`ChainVerdict` with kind ``Unichain`` iff the chain has exactly one
    recurrent class; the classes themselves are listed sorted by smallest
    member.
    """
    mask = _policy_row_mask(arm.n, policy)
    S = arm.P0 > 0.0
    if mask.any():
        S[mask] = arm.P1[mask] > 0.0
    classes = _recurrent_classes_of_support(S)
    kind = ChainKind.Unichain if len(classes) == 1 else ChainKind.Multichain
    return ChainVerdict(kind=kind, recurrent_classes=tuple(classes))


def is_weakly_communicating(arm: RestlessArm) -> bool:
    """Whether the arm is weakly communicating.

    Tested structurally: the arm is weakly communicating iff the chain whose
    transitions are supported wherever either action has positive probability
    (the support of ``(P0 + P1) / 2``) has a single recurrent class.
    """
    S = (arm.P0 > 0.0) | (arm.P1 > 0.0)
    return len(_recurrent_classes_of_support(S)) == 1


def arm_to_dict(arm: RestlessArm) -> dict:
    """Return the JSON-serializable dictionary form of an arm."""
    return {
        "n": arm.n,
        "P0": arm.P0.tolist(),
        "P1": arm.P1.tolist(),
        "r0": arm.r0.tolist(),
        "r1": arm.r1.tolist(),
        "discount": arm.discount,
    }


def save_arm(arm: RestlessArm, path: str | Path) -> None:
    """Write an arm to ``path`` as JSON.

    Floats are serialized with shortest round-trip repr, so saving and
    reloading reproduces the arrays bit for bit.
    """
    Path(path).write_text(json.dumps(arm_to_dict(arm), indent=2) + "\n")


def load_arm(path: str | Path) -> RestlessArm:
    """Load and validate an arm from a JSON file written by :func:`save_arm`."""
    with open(path) as fh:
        raw = json.load(fh)
    return validate_arm(raw)
