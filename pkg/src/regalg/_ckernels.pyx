# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for the contracts."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef list _lower_neighbours(const unsigned char[:, ::1] leq, int n, int arity):
    cdef long size = 1
    cdef int k, d, e
    cdef long p, s
    for k in range(arity):
        size *= n
    strides = [n ** (arity - 1 - k) for k in range(arity)]
    out = []
    for p in range(size):
        lows = []
        for k in range(arity):
            s = strides[k]
            d = (p // s) % n
            for e in range(d):
                if leq[e, d]:
                    lows.append(p + (e - d) * s)
        out.append(np.asarray(lows, dtype=np.int64))
    return out


def is_monotone(leq, table, int n, int arity):
    cdef const unsigned char[:, ::1] L = np.ascontiguousarray(leq, dtype=np.uint8)
    cdef const int[::1] T = np.ascontiguousarray(table, dtype=np.int32)
    cdef long p, j
    cdef const long long[::1] lw
    lows = _lower_neighbours(L, n, arity)
    for p in range(T.shape[0]):
        lw = lows[p]
        for j in range(lw.shape[0]):
            if not L[T[lw[j]], T[p]]:
                return False
    return True


def monotone_tables(leq, int n, int arity):
    cdef const unsigned char[:, ::1] L = np.ascontiguousarray(leq, dtype=np.uint8)
    lows_list = _lower_neighbours(L, n, arity)
    cdef long size = len(lows_list)
    # flatten neighbour lists into CSR form
    cdef cnp.ndarray[cnp.int64_t, ndim=1] start = np.zeros(size + 1, dtype=np.int64)
    cdef long p
    for p in range(size):
        start[p + 1] = start[p] + len(lows_list[p])
    cdef cnp.ndarray[cnp.int64_t, ndim=1] flat = (
        np.concatenate(lows_list).astype(np.int64) if start[size] else np.zeros(0, dtype=np.int64))
    cdef cnp.ndarray[cnp.int32_t, ndim=1] table = np.zeros(size, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] choice = np.full(size, -1, dtype=np.int32)
    cdef long j, q
    cdef int c
    cdef bint ok
    out = []
    if size == 0:
        return out
    p = 0
    while p >= 0:
        c = choice[p] + 1
        while c < n:
            ok = True
            for j in range(start[p], start[p + 1]):
                q = flat[j]
                if not L[table[q], c]:
                    ok = False
                    break
            if ok:
                break
            c += 1
        if c >= n:
            choice[p] = -1
            p -= 1
            continue
        choice[p] = c
        table[p] = c
        if p == size - 1:
            out.append(tuple(table.tolist()))
        else:
            p += 1
    return out


def table_kleene(kind, consts, arity, offset, children, tables, leq, int n, int bottom, long budget):
    cdef const int[::1] K = np.ascontiguousarray(kind, dtype=np.int32)
    cdef const int[::1] C = np.ascontiguousarray(consts, dtype=np.int32)
    cdef const int[::1] A = np.ascontiguousarray(arity, dtype=np.int32)
    cdef const long long[::1] O = np.ascontiguousarray(offset, dtype=np.int64)
    cdef const int[:, ::1] CH = np.ascontiguousarray(children, dtype=np.int32).reshape(len(kind), -1)
    cdef const int[::1] T = np.ascontiguousarray(tables, dtype=np.int32)
    cdef const unsigned char[:, ::1] L = np.ascontiguousarray(leq, dtype=np.uint8)
    cdef long m = K.shape[0]
    old_arr = np.full(m, bottom, dtype=np.int32)
    new_arr = np.full(m, bottom, dtype=np.int32)
    cdef int[::1] old = old_arr
    cdef int[::1] new = new_arr
    cdef long it, i, idx
    cdef int j, v
    cdef bint changed
    for it in range(1, budget + 1):
        for i in range(m):
            if K[i] == 0:
                v = bottom
            elif K[i] == 1:
                v = C[i]
            else:
                idx = 0
                for j in range(A[i]):
                    idx = idx * n + old[CH[i, j]]
                v = T[O[i] + idx]
            new[i] = v
        changed = False
        for i in range(m):
            if new[i] != old[i]:
                if not L[old[i], new[i]]:
                    return new_arr.tolist(), it, 2
                changed = True
        if not changed:
            return new_arr.tolist(), it, 0
        old_arr, new_arr = new_arr, old_arr
        old = old_arr
        new = new_arr
    return old_arr.tolist(), budget, 1


def capped_kleene(kind, consts, left, right, long long cap, long budget):
    cdef const int[::1] K = np.ascontiguousarray(kind, dtype=np.int32)
    cdef const long long[::1] C = np.ascontiguousarray(consts, dtype=np.int64)
    cdef const int[::1] LF = np.ascontiguousarray(left, dtype=np.int32)
    cdef const int[::1] RT = np.ascontiguousarray(right, dtype=np.int32)
    cdef long m = K.shape[0]
    buf = np.zeros((2, m), dtype=np.int64)
    cdef long long[:, ::1] B = buf
    cdef long it, i
    cdef int k, cur = 0, nxt = 1
    cdef long long v
    cdef bint changed
    if m == 0:
        return [], 1, 0
    for it in range(1, budget + 1):
        for i in range(m):
            k = K[i]
            if k == 1:
                v = C[i]
            elif k == 2:
                v = B[cur, LF[i]] + B[cur, RT[i]]
            elif k == 3:
                v = B[cur, LF[i]] * B[cur, RT[i]]
            elif k == 5:
                v = 1
            else:
                v = 0
            B[nxt, i] = v if v <= cap else cap
        changed = False
        for i in range(m):
            if B[nxt, i] != B[cur, i]:
                if B[nxt, i] < B[cur, i]:
                    return buf[nxt].tolist(), it, 2
                changed = True
        if not changed:
            return buf[nxt].tolist(), it, 0
        cur, nxt = nxt, cur
    return buf[cur].tolist(), budget, 1
