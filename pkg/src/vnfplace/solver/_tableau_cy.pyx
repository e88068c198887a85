# cython: language_level=3
"""Compiled simplex pivot kernel.

Twin of ``_tableau_py.simplex_kernel``: identical pivot selection rules
and an identical order of floating-point operations (plain
multiply-then-subtract row updates; the extension is compiled with
-ffp-contract=off so no FMA contraction sneaks in).  Both kernels must
produce bit-identical tableaus; a test compares them elementwise.
"""

from libc.math cimport INFINITY, isfinite

cdef int NB_LB = 0
cdef int NB_UB = 1
cdef int BASIC = 2

cdef double _TIE = 1e-12


def simplex_kernel(
    double[:, ::1] T,
    double[::1] values,
    long long[::1] basis,
    signed char[::1] vstat,
    double[::1] ranges,
    int n_enterable,
    double tol,
    int stall_limit,
    long long max_iter,
    bint bland,
):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t ncols = T.shape[1]
    cdef long long iters = 0
    cdef int stall = 0
    cdef Py_ssize_t i, jj, kcol, j, leave
    cdef double d, score, best, dirn, a, rr, row_theta, theta
    cdef double ub_b, piv, f, s, enter_val
    cdef long long best_bid, k
    cdef bint leave_to_ub, to_ub

    while iters < max_iter:
        # ---- entering column -------------------------------------------
        j = -1
        if bland:
            for jj in range(n_enterable):
                if vstat[jj] == BASIC or ranges[jj] <= tol:
                    continue
                d = T[m, jj]
                score = d if vstat[jj] == NB_LB else -d
                if score < -tol:
                    j = jj
                    break
            if j < 0:
                return (0, iters, bland)
        else:
            best = INFINITY
            for jj in range(n_enterable):
                if vstat[jj] == BASIC or ranges[jj] <= tol:
                    continue
                d = T[m, jj]
                score = d if vstat[jj] == NB_LB else -d
                if score < best:
                    best = score
                    j = jj
            if j < 0 or not best < -tol:
                return (0, iters, bland)
        dirn = 1.0 if vstat[j] == NB_LB else -1.0

        # ---- ratio test, pass 1: minimum ratio --------------------------
        row_theta = INFINITY
        for i in range(m):
            a = dirn * T[i, j]
            if a > tol:
                rr = values[i] / a
                if rr < row_theta:
                    row_theta = rr
            elif a < -tol:
                ub_b = ranges[basis[i]]
                if isfinite(ub_b):
                    rr = (ub_b - values[i]) / (-a)
                    if rr < row_theta:
                        row_theta = rr
        if row_theta < 0.0:
            row_theta = 0.0

        if ranges[j] < row_theta - _TIE:
            # bound flip
            theta = ranges[j]
            s = dirn * theta
            for i in range(m):
                values[i] -= s * T[i, j]
            vstat[j] = NB_UB if vstat[j] == NB_LB else NB_LB
            iters += 1
            if theta > _TIE:
                stall = 0
            else:
                stall += 1
            if stall > stall_limit:
                bland = True
            continue
        if row_theta == INFINITY:
            return (1, iters, bland)
        theta = row_theta

        # ---- pass 2: leaving row = smallest basis id within tie window --
        best_bid = 9223372036854775807
        leave = -1
        leave_to_ub = False
        for i in range(m):
            a = dirn * T[i, j]
            rr = INFINITY
            to_ub = False
            if a > tol:
                rr = values[i] / a
            elif a < -tol:
                ub_b = ranges[basis[i]]
                if isfinite(ub_b):
                    rr = (ub_b - values[i]) / (-a)
                    to_ub = True
            if rr <= theta + _TIE and basis[i] < best_bid:
                best_bid = basis[i]
                leave = i
                leave_to_ub = to_ub

        s = dirn * theta
        for i in range(m):
            values[i] -= s * T[i, j]
        enter_val = theta if dirn > 0 else ranges[j] - theta
        k = basis[leave]
        vstat[k] = NB_UB if leave_to_ub else NB_LB

        piv = T[leave, j]
        for kcol in range(ncols):
            T[leave, kcol] /= piv
        for i in range(m + 1):
            if i == leave:
                continue
            f = T[i, j]
            if f != 0.0:
                for kcol in range(ncols):
                    T[i, kcol] -= f * T[leave, kcol]
        basis[leave] = j
        vstat[j] = BASIC
        values[leave] = enter_val

        iters += 1
        if theta > _TIE:
            stall = 0
        else:
            stall += 1
        if stall > stall_limit:
            bland = True
    return (2, iters, bland)
