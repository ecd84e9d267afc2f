"""Numba kernels for Rips complex enumeration and Z/2 persistence pairing.

The pairing kernel reduces coboundary columns (one per p-simplex, processed
in reverse filtration order, pivot = earliest cofacet) instead of boundary
columns. With columns already paired one dimension down cleared, this visits
the same pairs as the textbook boundary reduction but almost every column
claims its pivot immediately, which is what makes 256-point documents cheap.
Correctness against a naive boundary reduction is pinned by the test suite.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def count_triangles(dm, thr, cap):
    """Number of triangles with diameter <= thr; stops early past cap."""
    n = dm.shape[0]
    cnt = 0
    for i in range(n):
        for j in range(i + 1, n):
            if dm[i, j] > thr:
                continue
            for k in range(j + 1, n):
                if dm[i, k] <= thr and dm[j, k] <= thr:
                    cnt += 1
            if cnt > cap:
                return cnt
    return cnt


@njit(cache=True, nogil=True)
def fill_triangles(dm, thr, tri, tval):
    n = dm.shape[0]
    c = 0
    for i in range(n):
        for j in range(i + 1, n):
            dij = dm[i, j]
            if dij > thr:
                continue
            for k in range(j + 1, n):
                dik = dm[i, k]
                djk = dm[j, k]
                if dik <= thr and djk <= thr:
                    tri[c, 0] = i
                    tri[c, 1] = j
                    tri[c, 2] = k
                    v = dij
                    if dik > v:
                        v = dik
                    if djk > v:
                        v = djk
                    tval[c] = v
                    c += 1
    return c


@njit(cache=True, nogil=True)
def count_tetrahedra(dm, thr, cap):
    n = dm.shape[0]
    cnt = 0
    for i in range(n):
        for j in range(i + 1, n):
            if dm[i, j] > thr:
                continue
            for k in range(j + 1, n):
                if dm[i, k] > thr or dm[j, k] > thr:
                    continue
                for l in range(k + 1, n):
                    if dm[i, l] <= thr and dm[j, l] <= thr and dm[k, l] <= thr:
                        cnt += 1
                if cnt > cap:
                    return cnt
    return cnt


@njit(cache=True, nogil=True)
def fill_tetrahedra(dm, thr, tet, qval):
    n = dm.shape[0]
    c = 0
    for i in range(n):
        for j in range(i + 1, n):
            dij = dm[i, j]
            if dij > thr:
                continue
            for k in range(j + 1, n):
                dik = dm[i, k]
                djk = dm[j, k]
                if dik > thr or djk > thr:
                    continue
                for l in range(k + 1, n):
                    dil = dm[i, l]
                    djl = dm[j, l]
                    dkl = dm[k, l]
                    if dil <= thr and djl <= thr and dkl <= thr:
                        tet[c, 0] = i
                        tet[c, 1] = j
                        tet[c, 2] = k
                        tet[c, 3] = l
                        v = dij
                        for d in (dik, djk, dil, djl, dkl):
                            if d > v:
                                v = d
                        qval[c] = v
                        c += 1
    return c


@njit(cache=True, nogil=True)
def union_find_merges(eu, ev, n):
    """Merge flag per edge, edges given in filtration order."""
    parent = np.arange(n)
    merges = np.zeros(eu.shape[0], dtype=np.bool_)
    for i in range(eu.shape[0]):
        a = eu[i]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = ev[i]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            parent[a] = b
            merges[i] = True
    return merges


@njit(cache=True, nogil=True, inline="always")
def _push_min(heap, size, val):
    heap[size] = val
    i = size
    size += 1
    while i > 0:
        p = (i - 1) >> 1
        if heap[p] > heap[i]:
            heap[p], heap[i] = heap[i], heap[p]
            i = p
        else:
            break
    return size


@njit(cache=True, nogil=True, inline="always")
def _pop_min(heap, size):
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    i = 0
    while True:
        l = 2 * i + 1
        r = l + 1
        small = i
        if l < size and heap[l] < heap[small]:
            small = l
        if r < size and heap[r] < heap[small]:
            small = r
        if small == i:
            break
        heap[i], heap[small] = heap[small], heap[i]
        i = small
    return top, size


@njit(cache=True, nogil=True)
def reduce_coboundary(col_ptr, col_rows, skip_col, n_cols, n_rows):
    """Pair p-simplex columns with (p+1)-simplex rows over Z/2.

    col_ptr/col_rows: CSR of cofacet row ids (forward filtration ranks) per
    column; columns are processed from the last filtration rank to the first
    and the pivot of a column is its minimal surviving row. skip_col marks
    columns already paired one dimension down (cleared).

    Returns (pivot_rows, pivot_cols, zero_cols, n_additions).
    """
    pivot_owner = np.full(n_rows, -1, dtype=np.int64)
    store_data = np.empty(1 << 16, dtype=np.int64)
    store_ptr = np.zeros(max(n_rows, 1), dtype=np.int64)
    store_len = np.zeros(max(n_rows, 1), dtype=np.int64)
    store_used = 0

    heap = np.empty(1 << 12, dtype=np.int64)
    tmp = np.empty(1 << 12, dtype=np.int64)

    out_rows = np.empty(n_cols, dtype=np.int64)
    out_cols = np.empty(n_cols, dtype=np.int64)
    n_pairs = 0
    zero_cols = np.empty(n_cols, dtype=np.int64)
    n_zero = 0
    n_adds = 0

    for c in range(n_cols - 1, -1, -1):
        if skip_col[c]:
            continue
        lo = col_ptr[c]
        hi = col_ptr[c + 1]
        hs = 0
        while hi - lo + 4 > heap.shape[0]:
            heap = np.concatenate((heap, np.empty(heap.shape[0], dtype=np.int64)))
        for q in range(lo, hi):
            hs = _push_min(heap, hs, col_rows[q])
        claimed = False
        while hs > 0:
            low, hs = _pop_min(heap, hs)
            parity = 1
            while hs > 0 and heap[0] == low:
                _, hs = _pop_min(heap, hs)
                parity ^= 1
            if parity == 0:
                continue
            if pivot_owner[low] == -1:
                # claim: materialize the reduced column for later additions
                if tmp.shape[0] < hs + 1:
                    tmp = np.empty(2 * (hs + 1), dtype=np.int64)
                col_sz = 1
                tmp[0] = low
                while hs > 0:
                    v, hs = _pop_min(heap, hs)
                    par = 1
                    while hs > 0 and heap[0] == v:
                        _, hs = _pop_min(heap, hs)
                        par ^= 1
                    if par == 1:
                        tmp[col_sz] = v
                        col_sz += 1
                while store_used + col_sz > store_data.shape[0]:
                    store_data = np.concatenate(
                        (store_data, np.empty(store_data.shape[0], dtype=np.int64))
                    )
                store_ptr[low] = store_used
                store_len[low] = col_sz
                for q in range(col_sz):
                    store_data[store_used + q] = tmp[q]
                store_used += col_sz
                pivot_owner[low] = c
                out_rows[n_pairs] = low
                out_cols[n_pairs] = c
                n_pairs += 1
                claimed = True
                break
            # add the owning column; its copy of `low` cancels ours
            st = store_ptr[low]
            ln = store_len[low]
            while hs + ln + 4 > heap.shape[0]:
                heap = np.concatenate((heap, np.empty(heap.shape[0], dtype=np.int64)))
            for q in range(ln):
                v = store_data[st + q]
                if v != low:
                    hs = _push_min(heap, hs, v)
            n_adds += 1
        if not claimed:
            zero_cols[n_zero] = c
            n_zero += 1
    return out_rows[:n_pairs], out_cols[:n_pairs], zero_cols[:n_zero], n_adds
