"""Pure-Python label-setting shortest path; the fallback backend.

Kept in lockstep with _gridpath.pyx: same relaxation expression, same
strict-< update rule, same (distance, node) heap ordering.  Plain Python
floats and lists are deliberately used in the hot loop; they are IEEE
doubles like the compiled version's, just slower to push around.
"""

from heapq import heappop, heappush

_INF = float("inf")


def dijkstra(kvals, shape, strides, off_delta, off_flat, off_len, source, target,
             dist_out, prev_out):
    n = len(shape)
    koff = len(off_flat)
    total = len(kvals)
    klist = kvals.tolist()
    shape_l = shape.tolist()
    strides_l = strides.tolist()
    delta_l = [tuple(row) for row in off_delta.tolist()]
    flat_l = off_flat.tolist()
    len_l = off_len.tolist()

    dist = [_INF] * total
    prev = [-1] * total
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heappop(heap)
        if d > dist[u]:
            continue  # stale entry
        if u == target:
            break
        ku = klist[u]
        rem = u
        coord = []
        for ax in range(n):
            s = strides_l[ax]
            c = rem // s
            rem -= c * s
            coord.append(c)
        for j in range(koff):
            delta = delta_l[j]
            ok = True
            for ax in range(n):
                c = coord[ax] + delta[ax]
                if c < 0 or c >= shape_l[ax]:
                    ok = False
                    break
            if not ok:
                continue
            v = u + flat_l[j]
            w = 0.5 * (ku + klist[v]) * len_l[j]
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                prev[v] = u
                heappush(heap, (nd, v))
    dist_out[:] = dist
    prev_out[:] = prev
