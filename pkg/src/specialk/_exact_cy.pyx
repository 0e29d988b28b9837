# cython: boundscheck=False, wraparound=False
"""Compiled kernel for exact linear algebra over the Gaussian rationals.

Same row format and semantics as specialk._exact_impl (the pure-Python
twin): a row is a flat list of Python ints [den, a0, b0, a1, b1, ...] for
entries (a_j + b_j*i)/den with den > 0.  Entries stay arbitrary-precision
Python ints; the speedup comes from compiled loop and list handling around
them, which dominates on the small matrices this package reduces in bulk.
"""

from math import gcd

is_python_impl = False


cdef list _reduce_row(list row):
    cdef Py_ssize_t k, n = len(row)
    g = row[0]
    for k in range(1, n):
        v = row[k]
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        for k in range(n):
            row[k] = row[k] // g
    return row


def rref(rows, Py_ssize_t ncols):
    """Reduced row-echelon form over Q(i); returns (rows, pivot columns)."""
    cdef list work = [list(rw) for rw in rows]
    cdef Py_ssize_t nrows = len(work)
    cdef list pivots = []
    cdef Py_ssize_t r = 0, c, i, j, ia, ib, src, rowlen
    cdef list row, new, other, upd, rowr
    for c in range(ncols):
        ia = 1 + 2 * c
        ib = ia + 1
        src = -1
        for i in range(r, nrows):
            row = <list>work[i]
            if row[ia] != 0 or row[ib] != 0:
                src = i
                break
        if src < 0:
            continue
        if src != r:
            work[r], work[src] = work[src], work[r]
        row = <list>work[r]
        la = row[ia]
        lb = row[ib]
        nrm = la * la + lb * lb
        rowlen = len(row)
        new = [nrm]
        for j in range(1, rowlen, 2):
            a = row[j]
            b = row[j + 1]
            new.append(a * la + b * lb)
            new.append(b * la - a * lb)
        work[r] = _reduce_row(new)
        rowr = <list>work[r]
        dr = rowr[0]
        for i in range(nrows):
            if i == r:
                continue
            other = <list>work[i]
            fa = other[ia]
            fb = other[ib]
            if fa == 0 and fb == 0:
                continue
            di = other[0]
            upd = [di * dr]
            for j in range(1, rowlen, 2):
                a = other[j]
                b = other[j + 1]
                ra = rowr[j]
                rb = rowr[j + 1]
                upd.append(a * dr - fa * ra + fb * rb)
                upd.append(b * dr - fa * rb - fb * ra)
            work[i] = _reduce_row(upd)
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return work[:r], pivots


def matmul(a_rows, b_rows, Py_ssize_t b_cols):
    """Exact product of two Q(i) matrices in flat-row format."""
    cdef Py_ssize_t inner = len(b_rows)
    cdef list out = []
    cdef Py_ssize_t j, t, ja, jb
    cdef list row, res, srow
    if inner == 0:
        for row in a_rows:
            out.append([1] + [0] * (2 * b_cols))
        return out
    lcm_b = 1
    for row in b_rows:
        d = row[0]
        lcm_b = lcm_b // gcd(lcm_b, d) * d
    cdef list scaled = []
    for row in b_rows:
        f = lcm_b // row[0]
        scaled.append([v * f for v in row[1:]])
    for row in a_rows:
        da = row[0]
        res = [da * lcm_b]
        for j in range(b_cols):
            ca = 0
            cb = 0
            ja = 2 * j
            jb = ja + 1
            for t in range(inner):
                aa = row[1 + 2 * t]
                ab = row[2 + 2 * t]
                if aa == 0 and ab == 0:
                    continue
                srow = <list>scaled[t]
                ba = srow[ja]
                bb = srow[jb]
                ca += aa * ba - ab * bb
                cb += aa * bb + ab * ba
            res.append(ca)
            res.append(cb)
        out.append(_reduce_row(res))
    return out
