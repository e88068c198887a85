"""Pure-numpy simplex pivot kernel (fallback for the compiled twin).

The compiled kernel in ``_tableau_cy`` implements the same loop with the
same pivot selection rules and the same order of floating-point
operations (multiply-then-subtract row updates, no FMA), so both kernels
produce bit-identical tableaus.  Any change here must be mirrored there.

Status codes: 0 optimal, 1 unbounded, 2 iteration limit.
"""

from __future__ import annotations

import numpy as np

NB_LB = 0  # nonbasic at lower bound (value 0 in shifted space)
NB_UB = 1  # nonbasic at upper bound (value = range)
BASIC = 2

_TIE = 1e-12  # ratio-test tie window and degenerate-step threshold


def simplex_kernel(
    T: np.ndarray,
    values: np.ndarray,
    basis: np.ndarray,
    vstat: np.ndarray,
    ranges: np.ndarray,
    n_enterable: int,
    tol: float,
    stall_limit: int,
    max_iter: int,
    bland: bool,
) -> tuple[int, int, bool]:
    """Bounded-variable primal simplex pivots, in place.

    ``T`` is (m+1, ncols); row m is the reduced-cost row.  ``values`` holds
    the current basic-variable values per row.  ``ranges`` is ub-lb per
    column (inf allowed); fixed columns (range <= tol) never enter.
    """
    m = T.shape[0] - 1
    iters = 0
    stall = 0
    cost = T[m]
    enterable = np.arange(n_enterable)
    while iters < max_iter:
        d = cost[:n_enterable]
        st = vstat[:n_enterable]
        blocked = (st == BASIC) | (ranges[:n_enterable] <= tol)
        score = np.where(st == NB_LB, d, -d)
        score = np.where(blocked, np.inf, score)
        if bland:
            ok = score < -tol
            if not ok.any():
                return (0, iters, bland)
            j = int(enterable[ok][0])
        else:
            j = int(np.argmin(score))
            if not score[j] < -tol:
                return (0, iters, bland)
        dirn = 1.0 if vstat[j] == NB_LB else -1.0

        col = T[:m, j]
        a = dirn * col
        ub_b = ranges[basis]
        r = np.full(m, np.inf)
        pos = a > tol
        r[pos] = values[pos] / a[pos]
        neg = (a < -tol) & np.isfinite(ub_b)
        if neg.any():
            r[neg] = (ub_b[neg] - values[neg]) / (-a[neg])
        row_theta = float(r.min()) if m else np.inf
        if row_theta < 0.0:
            row_theta = 0.0

        if ranges[j] < row_theta - _TIE:
            # bound flip: variable jumps to its other bound, basis unchanged
            theta = ranges[j]
            values -= (dirn * theta) * col
            vstat[j] = NB_UB if vstat[j] == NB_LB else NB_LB
            iters += 1
            stall = 0 if theta > _TIE else stall + 1
            if stall > stall_limit:
                bland = True
            continue
        if not np.isfinite(row_theta):
            return (1, iters, bland)
        theta = row_theta

        ties = r <= theta + _TIE
        bids = np.where(ties, basis, np.iinfo(np.int64).max)
        leave = int(np.argmin(bids))
        leave_to_ub = bool(neg[leave])

        values -= (dirn * theta) * col
        enter_val = theta if dirn > 0 else ranges[j] - theta
        k = basis[leave]
        vstat[k] = NB_UB if leave_to_ub else NB_LB

        piv = T[leave, j]
        T[leave] /= piv
        f = T[:, j].copy()
        f[leave] = 0.0
        # rows with a zero multiplier are skipped, not updated with 0*row:
        # subtracting +-0.0 can flip the sign of stored zeros, which would
        # break bit-parity with the compiled kernel's skip-if-zero loop
        nz = f != 0.0
        if nz.any():
            T[nz, :] -= f[nz, None] * T[leave, :]
        basis[leave] = j
        vstat[j] = BASIC
        values[leave] = enter_val

        iters += 1
        stall = 0 if theta > _TIE else stall + 1
        if stall > stall_limit:
            bland = True
    return (2, iters, bland)
