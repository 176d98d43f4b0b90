# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled search kernels; same contract as ``_pykernels``.

Masks are uint64, gains and costs int64. The caller checks that the instance
fits (at most 62 modifications, sums within int64) before dispatching here.
The searches run without the GIL so subtree tasks can run on threads.
"""

from cython.operator cimport dereference as deref
from libc.math cimport pow, INFINITY
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

NAME = "cython"
MAX_ITEMS = 62


cdef struct Problem:
    int n
    uint64_t* adj
    int64_t* gain
    int64_t* cost
    int64_t budget
    double gscale
    double cscale
    double offset
    double gamma
    double tol


cdef struct BudgetBest:
    bint found
    uint64_t mask
    int64_t gain
    int64_t cost


cdef struct Cand:
    uint64_t mask
    double obj
    int64_t gain
    int64_t cost


cdef int _load(Problem* P, adj, gains, costs) except -1:
    cdef int n = len(adj)
    cdef int i
    if n > MAX_ITEMS:
        raise ValueError(f"compiled kernels handle at most {MAX_ITEMS} items, got {n}")
    P.n = n
    P.adj = <uint64_t*> malloc(max(n, 1) * sizeof(uint64_t))
    P.gain = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    P.cost = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    if P.adj == NULL or P.gain == NULL or P.cost == NULL:
        _release(P)
        raise MemoryError()
    for i in range(n):
        P.adj[i] = adj[i]
        P.gain[i] = gains[i] if gains is not None else 0
        P.cost[i] = costs[i] if costs is not None else 0
    return 0


cdef void _release(Problem* P) noexcept:
    free(P.adj)
    free(P.gain)
    free(P.cost)
    P.adj = NULL
    P.gain = NULL
    P.cost = NULL


cdef uint64_t _count(uint64_t* adj, uint64_t s, unordered_map[uint64_t, uint64_t]* memo) noexcept nogil:
    cdef uint64_t low, rest, r
    cdef int v
    if s == 0:
        return 1
    it = memo.find(s)
    if it != memo.end():
        return deref(it).second
    low = s & (~s + 1)
    v = 0
    while not ((s >> v) & 1):
        v += 1
    rest = s & ~low
    if adj[v] & rest:
        r = _count(adj, rest, memo) + _count(adj, rest & ~adj[v], memo)
    else:
        r = 2 * _count(adj, rest, memo)
    memo[0][s] = r
    return r


def count_independent(adj):
    cdef Problem P
    cdef uint64_t full, r
    cdef unordered_map[uint64_t, uint64_t] memo
    _load(&P, adj, None, None)
    try:
        full = (<uint64_t> 1 << P.n) - 1 if P.n < 64 else ~(<uint64_t> 0)
        with nogil:
            r = _count(P.adj, full, &memo)
        return int(r)
    finally:
        _release(&P)


cdef void _enum(Problem* P, vector[uint64_t]* ms, vector[int64_t]* gs, vector[int64_t]* cs,
                uint64_t mask, int last, uint64_t forb, int64_t g, int64_t c) noexcept nogil:
    cdef int j
    ms.push_back(mask)
    gs.push_back(g)
    cs.push_back(c)
    for j in range(last + 1, P.n):
        if (forb >> j) & 1:
            continue
        _enum(P, ms, gs, cs, mask | (<uint64_t> 1 << j), j, forb | P.adj[j], g + P.gain[j], c + P.cost[j])


def enumerate_independent(adj, gains, costs):
    cdef Problem P
    cdef vector[uint64_t] ms
    cdef vector[int64_t] gs
    cdef vector[int64_t] cs
    _load(&P, adj, gains, costs)
    try:
        with nogil:
            _enum(&P, &ms, &gs, &cs, 0, -1, 0, 0, 0)
        return list(ms), list(gs), list(cs)
    finally:
        _release(&P)


cdef void _budget(Problem* P, BudgetBest* B, uint64_t mask, int last, uint64_t forb,
                  int64_t g, int64_t c) noexcept nogil:
    cdef int j
    cdef int64_t rem = 0
    if (not B.found) or g > B.gain or (g == B.gain and c < B.cost):
        B.found = True
        B.mask = mask
        B.gain = g
        B.cost = c
    for j in range(last + 1, P.n):
        if (forb >> j) & 1 or c + P.cost[j] > P.budget:
            continue
        if P.gain[j] > 0:
            rem += P.gain[j]
    if g + rem < B.gain or (g + rem == B.gain and c >= B.cost):
        return
    for j in range(last + 1, P.n):
        if (forb >> j) & 1 or c + P.cost[j] > P.budget:
            continue
        _budget(P, B, mask | (<uint64_t> 1 << j), j, forb | P.adj[j], g + P.gain[j], c + P.cost[j])


def budget_search(adj, gains, costs, budget, int first=-1):
    cdef Problem P
    cdef BudgetBest B
    _load(&P, adj, gains, costs)
    P.budget = budget
    B.found = False
    B.mask = 0
    B.gain = 0
    B.cost = 0
    try:
        with nogil:
            if first < 0:
                _budget(&P, &B, 0, -1, 0, 0, 0)
            elif P.cost[first] <= P.budget:
                _budget(&P, &B, <uint64_t> 1 << first, first, P.adj[first], P.gain[first], P.cost[first])
        return bool(B.found), int(B.mask), int(B.gain), int(B.cost)
    finally:
        _release(&P)


cdef void _ratio(Problem* P, vector[Cand]* out, double* best, uint64_t mask, int last,
                 uint64_t forb, int64_t g, int64_t c) noexcept nogil:
    cdef int j
    cdef bint any_child = False
    cdef int64_t rem = 0
    cdef int64_t cmin = 0
    cdef double q, obj, qub, denom
    cdef Cand cand
    if mask:
        q = P.offset + <double> g / P.gscale
        if q >= 0:
            obj = pow(q, P.gamma) / (<double> c / P.cscale)
            if obj >= best[0] - P.tol:
                cand.mask = mask
                cand.obj = obj
                cand.gain = g
                cand.cost = c
                out.push_back(cand)
                if obj > best[0]:
                    best[0] = obj
    for j in range(last + 1, P.n):
        if (forb >> j) & 1:
            continue
        if not any_child or P.cost[j] < cmin:
            cmin = P.cost[j]
        any_child = True
        if P.gain[j] > 0:
            rem += P.gain[j]
    if not any_child:
        return
    qub = P.offset + <double> (g + rem) / P.gscale
    if qub < 0:
        return
    denom = (<double> c if mask else <double> cmin) / P.cscale
    if pow(qub, P.gamma) / denom < best[0] - P.tol:
        return
    for j in range(last + 1, P.n):
        if (forb >> j) & 1:
            continue
        _ratio(P, out, best, mask | (<uint64_t> 1 << j), j, forb | P.adj[j], g + P.gain[j], c + P.cost[j])


def ratio_search(adj, gains, costs, gain_scale, cost_scale, double offset, double gamma,
                 double tol, int first=-1):
    cdef Problem P
    cdef vector[Cand] out
    cdef double best = -INFINITY
    cdef size_t i
    _load(&P, adj, gains, costs)
    P.gscale = <double> gain_scale
    P.cscale = <double> cost_scale
    P.offset = offset
    P.gamma = gamma
    P.tol = tol
    try:
        with nogil:
            if first < 0:
                _ratio(&P, &out, &best, 0, -1, 0, 0, 0)
            else:
                _ratio(&P, &out, &best, <uint64_t> 1 << first, first, P.adj[first],
                       P.gain[first], P.cost[first])
        return [(int(out[i].mask), out[i].obj, int(out[i].gain), int(out[i].cost)) for i in range(out.size())]
    finally:
        _release(&P)
