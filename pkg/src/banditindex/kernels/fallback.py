"""Pure-NumPy fallback for the compiled column-advancement kernel.

The solver stores its working matrices in *position space*: active states
occupy a shrinking prefix of the row range, and the state removed at step
``ell`` (0-indexed) sits permanently at position ``n - 1 - ell``.  Columns of
``X`` remain in original state order.  ``WT`` holds, one per row, the scaled
Sherman-Morrison update directions ``w = x / (1 + x[p])`` created at each
removal since ``X`` was last made fully current (``base`` removals were
already folded into ``X`` itself).
"""
from __future__ import annotations

import numpy as np


def advance_column(
    X: np.ndarray,
    WT: np.ndarray,
    base: int,
    t: int,
    col: int,
    V: np.ndarray,
    eps_den: float,
    full: bool,
) -> float:
    """Advance column ``col`` of ``X`` through the pending rank-1 updates.

    ``t`` is the number of states removed so far; the advanced column belongs
    to the most recent removal, which sits at position ``n - t``.  The column
    is seeded from ``X`` and pushed through update directions ``base .. t-2``
    (rows ``0 .. t-2-base`` of ``WT``).  On success, row ``t - 1 - base`` of
    ``WT`` receives the advanced column scaled by ``1 / (1 + V[n - t])`` and
    the denominator is returned.  A denominator of magnitude at most
    ``eps_den`` signals a singular (multichain) update; nothing is written and
    the near-zero value is returned so the caller can abort.

    When ``full`` is false, each update only spans the prefix of positions
    that can still be read later (active states plus pending directions);
    when true, updates span all ``n`` positions so removed states keep
    current values as well.

    Args:
        X: (n, n) row-major matrix, rows in position space, columns in
            original state order.
        WT: update-direction buffer; row ``r`` spans positions
            ``0 .. n-2-base-r`` (or all ``n`` when ``full``).
        base: number of removals already folded directly into ``X``.
        t: number of removals performed so far (``t >= base + 1``).
        col: original-state column index to advance.
        V: scratch vector of length ``n``, overwritten.
        eps_den: singularity threshold for the update denominator.
        full: whether updates span every position.

    Returns:
        The update denominator ``1 + V[n - t]``.
    """
    n = X.shape[0]
    # The seed must cover every position later read as an update pivot (the
    # first pending update reads position n - 1 - base), not just the
    # still-active prefix.
    span = n if full else n - base
    V[:span] = X[:span, col]
    for ell in range(base, t - 1):
        vs = V[n - 1 - ell]
        if vs != 0.0:
            L = n if full else n - 1 - ell
            V[:L] -= vs * WT[ell - base, :L]
    denom = 1.0 + V[n - t]
    if abs(denom) <= eps_den:
        return float(denom)
    L = n if full else n - t
    np.multiply(V[:L], 1.0 / denom, out=WT[t - 1 - base, :L])
    return float(denom)
