# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled label-setting shortest path on an implicit grid graph.

Mirror of _gridpath_py.dijkstra.  The binary heap orders (distance, node)
pairs exactly like Python tuples; since strict-< relaxation never pushes
the same pair twice, the pop order matches the fallback's bit for bit.
"""

from libc.stdlib cimport free, malloc, realloc
from libc.stdint cimport int64_t


cdef struct Heap:
    double *d
    int64_t *n
    Py_ssize_t size
    Py_ssize_t cap


cdef inline bint _less(double d1, int64_t n1, double d2, int64_t n2) nogil:
    if d1 != d2:
        return d1 < d2
    return n1 < n2


cdef inline int _heap_push(Heap *h, double d, int64_t node) nogil:
    cdef Py_ssize_t pos, parent
    cdef double *nd
    cdef int64_t *nn
    if h.size == h.cap:
        h.cap = h.cap * 2
        nd = <double *> realloc(h.d, h.cap * sizeof(double))
        nn = <int64_t *> realloc(h.n, h.cap * sizeof(int64_t))
        if nd == NULL or nn == NULL:
            free(nd if nd != NULL else h.d)
            free(nn if nn != NULL else h.n)
            h.d = NULL
            h.n = NULL
            return -1
        h.d = nd
        h.n = nn
    pos = h.size
    h.size += 1
    while pos > 0:
        parent = (pos - 1) >> 1
        if _less(d, node, h.d[parent], h.n[parent]):
            h.d[pos] = h.d[parent]
            h.n[pos] = h.n[parent]
            pos = parent
        else:
            break
    h.d[pos] = d
    h.n[pos] = node
    return 0


cdef inline void _heap_pop(Heap *h, double *d_out, int64_t *n_out) nogil:
    cdef Py_ssize_t pos = 0, child
    cdef double d
    cdef int64_t node
    d_out[0] = h.d[0]
    n_out[0] = h.n[0]
    h.size -= 1
    if h.size == 0:
        return
    d = h.d[h.size]
    node = h.n[h.size]
    child = 1
    while child < h.size:
        if child + 1 < h.size and _less(h.d[child + 1], h.n[child + 1],
                                        h.d[child], h.n[child]):
            child += 1
        if _less(h.d[child], h.n[child], d, node):
            h.d[pos] = h.d[child]
            h.n[pos] = h.n[child]
            pos = child
            child = 2 * pos + 1
        else:
            break
    h.d[pos] = d
    h.n[pos] = node


def dijkstra(const double[::1] kvals, const int64_t[::1] shape,
             const int64_t[::1] strides, const int64_t[:, ::1] off_delta,
             const int64_t[::1] off_flat, const double[::1] off_len,
             int64_t source, int64_t target,
             double[::1] dist, int64_t[::1] prev):
    cdef Py_ssize_t n = shape.shape[0]
    cdef Py_ssize_t koff = off_flat.shape[0]
    cdef Py_ssize_t j, ax
    cdef int64_t u, v, c, rem
    cdef int64_t coord[64]
    cdef double d, ku, w, nd
    cdef bint ok
    cdef int status = 0
    cdef Heap heap

    if n > 64:
        raise ValueError("more than 64 axes is not supported")

    heap.cap = 1024
    heap.size = 0
    heap.d = <double *> malloc(heap.cap * sizeof(double))
    heap.n = <int64_t *> malloc(heap.cap * sizeof(int64_t))
    if heap.d == NULL or heap.n == NULL:
        free(heap.d)
        free(heap.n)
        raise MemoryError()

    dist[source] = 0.0
    with nogil:
        status = _heap_push(&heap, 0.0, source)
        while status == 0 and heap.size > 0:
            _heap_pop(&heap, &d, &u)
            if d > dist[u]:
                continue
            if u == target:
                break
            ku = kvals[u]
            rem = u
            for ax in range(n):
                c = rem // strides[ax]
                rem -= c * strides[ax]
                coord[ax] = c
            for j in range(koff):
                ok = True
                for ax in range(n):
                    c = coord[ax] + off_delta[j, ax]
                    if c < 0 or c >= shape[ax]:
                        ok = False
                        break
                if not ok:
                    continue
                v = u + off_flat[j]
                w = 0.5 * (ku + kvals[v]) * off_len[j]
                nd = d + w
                if nd < dist[v]:
                    dist[v] = nd
                    prev[v] = u
                    status = _heap_push(&heap, nd, v)
                    if status != 0:
                        break
    if heap.d != NULL:
        free(heap.d)
    if heap.n != NULL:
        free(heap.n)
    if status != 0:
        raise MemoryError("heap allocation failed")
