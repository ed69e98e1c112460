"""Compiled core of the 4-sphere enumeration.

Iterative depth-first completion of open ridges with three sound
prunings, each justified by the fact that a closed submanifold of a
connected closed manifold of the same dimension is the whole manifold:

* a triangle whose link closes into a cycle accepts no further facets,
  and a closed cycle coexisting with other link vertices is fatal;
* a vertex whose star closes must have a 3-sphere link right away
  (edge links are 2-spheres, link connected) and accepts no further
  facets;
* the open ridge with the fewest admissible completions is processed
  first (forced moves propagate, zero-candidate states die).

Leaves are closed 4-manifolds; the caller keeps those with Euler
characteristic 2 (the 4-spheres) and discards the rest.
"""

from __future__ import annotations

import numpy as np
from numba import njit

N = 9
FULL = (1 << N) - 1
MAX_FACETS = 30

_POP = np.array([bin(m).count("1") for m in range(1 << N)], dtype=np.int8)
_RIDGES = np.array([m for m in range(1 << N) if _POP[m] == 4], dtype=np.int64)


@njit(cache=True)
def _bits_arr(mask, out):
    n = 0
    while mask:
        b = mask & (-mask)
        v = 0
        bb = b
        while bb > 1:
            bb >>= 1
            v += 1
        out[n] = v
        n += 1
        mask ^= b
    return n


@njit(cache=True)
def _edge_link_is_sphere(v, u, fac, nfac):
    """Link of the edge {v,u}: closed connected surface with chi 2."""
    vu = (1 << v) | (1 << u)
    tris = np.empty(40, np.int64)
    nt = 0
    for i in range(nfac):
        f = fac[i]
        if f & vu == vu:
            tris[nt] = f ^ vu
            nt += 1
    if nt == 0:
        return False
    deg = np.zeros(1 << N, np.int8)
    vset = 0
    tmp = np.empty(N, np.int64)
    for i in range(nt):
        t = tris[i]
        vset |= t
        k = _bits_arr(t, tmp)
        for j in range(k):
            deg[t ^ (1 << tmp[j])] += 1
    E = 0
    for m in range(1 << N):
        if deg[m] > 0:
            if deg[m] != 2:
                return False
            E += 1
    V = 0
    m = vset
    while m:
        m &= m - 1
        V += 1
    if V - E + nt != 2:
        return False
    # connectivity over shared edges
    seen = np.zeros(40, np.uint8)
    stack = np.empty(40, np.int64)
    seen[0] = 1
    stack[0] = 0
    ns = 1
    count = 1
    while ns > 0:
        ns -= 1
        a = stack[ns]
        for b in range(nt):
            if seen[b] == 0:
                common = tris[a] & tris[b]
                c = 0
                m = common
                while m:
                    m &= m - 1
                    c += 1
                if c == 2:
                    seen[b] = 1
                    stack[ns] = b
                    ns += 1
                    count += 1
    return count == nt


@njit(cache=True)
def _vertex_star_ok(v, fac, nfac):
    """Closed star of v: link must be a connected closed 3-manifold,
    hence (at most 8 vertices) a 3-sphere."""
    vb = 1 << v
    tets = np.empty(40, np.int64)
    nt = 0
    uset = 0
    for i in range(nfac):
        f = fac[i]
        if f & vb:
            tets[nt] = f ^ vb
            uset |= f ^ vb
            nt += 1
    if nt == 0:
        return True
    tmp = np.empty(N, np.int64)
    k = _bits_arr(uset, tmp)
    for j in range(k):
        if not _edge_link_is_sphere(v, tmp[j], fac, nfac):
            return False
    # connectivity of the link over shared triangles
    seen = np.zeros(40, np.uint8)
    stack = np.empty(40, np.int64)
    seen[0] = 1
    stack[0] = 0
    ns = 1
    count = 1
    while ns > 0:
        ns -= 1
        a = stack[ns]
        for b in range(nt):
            if seen[b] == 0:
                common = tets[a] & tets[b]
                c = 0
                m = common
                while m:
                    m &= m - 1
                    c += 1
                if c == 3:
                    seen[b] = 1
                    stack[ns] = b
                    ns += 1
                    count += 1
    return count == nt


@njit(cache=True)
def _candidate_ok(f, in_fac, ridge_deg, tri_closed, vclosed, tmp):
    if in_fac[f]:
        return False
    k = _bits_arr(f, tmp)
    for a in range(k):
        if vclosed[tmp[a]]:
            return False
        if ridge_deg[f ^ (1 << tmp[a])] >= 2:
            return False
    for a in range(k):
        for b in range(a + 1, k):
            t = f ^ (1 << tmp[a]) ^ (1 << tmp[b])
            if tri_closed[t]:
                return False
    return True


@njit(cache=True)
def _cycle_state(t, a, tri_adj):
    """(closed, whole): component of a in lk(t) is a cycle / is all of lk(t)."""
    comp = 0
    stack = np.empty(N, np.int64)
    stack[0] = a
    ns = 1
    comp |= 1 << a
    edges = 0
    tmp = np.empty(N, np.int64)
    while ns > 0:
        ns -= 1
        u = stack[ns]
        nb = tri_adj[t, u]
        m = nb
        while m:
            m &= m - 1
            edges += 1
        k = _bits_arr(nb, tmp)
        for j in range(k):
            w = tmp[j]
            if not (comp >> w) & 1:
                comp |= 1 << w
                stack[ns] = w
                ns += 1
    edges //= 2
    nc = 0
    m = comp
    while m:
        m &= m - 1
        nc += 1
    if edges != nc:
        return False, False
    total = 0
    for u in range(N):
        if tri_adj[t, u] != 0:
            total += 1
    return True, total == nc


@njit(cache=True)
def search(ridges, results, max_results):
    """Returns the number of closed-4-manifold leaves on all 9 vertices
    written into `results` (rows of 30 facet masks, -1 padded)."""
    fac = np.zeros(MAX_FACETS + 1, np.int64)
    in_fac = np.zeros(1 << N, np.uint8)
    ridge_deg = np.zeros(1 << N, np.int8)
    tri_adj = np.zeros((1 << N, N), np.int64)
    tri_closed = np.zeros(1 << N, np.uint8)
    vclosed = np.zeros(N, np.uint8)
    vopen = np.zeros(N, np.int64)
    tmp = np.empty(N, np.int64)
    tmp2 = np.empty(N, np.int64)

    seed = 31  # facet {0,1,2,3,4}
    fac[0] = seed
    nfac = 1
    in_fac[seed] = 1
    nopen = 0
    for a in range(5):
        x = seed ^ (1 << a)
        ridge_deg[x] = 1
        nopen += 1
        k = _bits_arr(x, tmp)
        for j in range(k):
            vopen[tmp[j]] += 1
    for a in range(5):
        for b in range(a + 1, 5):
            t = seed ^ (1 << a) ^ (1 << b)
            tri_adj[t, a] |= 1 << b
            tri_adj[t, b] |= 1 << a

    # per-depth stacks
    cand = np.zeros((MAX_FACETS + 1, N), np.int64)
    ncand = np.zeros(MAX_FACETS + 1, np.int64)
    ci = np.zeros(MAX_FACETS + 1, np.int64)
    maxu = np.zeros(MAX_FACETS + 2, np.int64)
    maxu[0] = 4
    rec_tri = np.zeros((MAX_FACETS + 1, 10), np.int64)
    nrec_tri = np.zeros(MAX_FACETS + 1, np.int64)
    rec_v = np.zeros((MAX_FACETS + 1, 5), np.int64)
    nrec_v = np.zeros(MAX_FACETS + 1, np.int64)

    nres = 0
    depth = 0
    expand = True
    nodes = 0
    while True:
        if expand:
            nodes += 1
            ncand[depth] = 0
            ci[depth] = 0
            if nopen == 0:
                used = 0
                for i in range(nfac):
                    used |= fac[i]
                if used == FULL and nres < max_results:
                    for i in range(MAX_FACETS):
                        results[nres, i] = fac[i] if i < nfac else -1
                    nres += 1
            elif nfac < MAX_FACETS:
                # fail-first: open ridge with fewest admissible completions
                best_r = -1
                best_cnt = 1000
                hi = maxu[depth] + 1
                if hi > N - 1:
                    hi = N - 1
                for ri in range(ridges.shape[0]):
                    r = ridges[ri]
                    if ridge_deg[r] != 1:
                        continue
                    cnt = 0
                    for v in range(hi + 1):
                        if (r >> v) & 1:
                            continue
                        if _candidate_ok(r | (1 << v), in_fac, ridge_deg,
                                         tri_closed, vclosed, tmp):
                            cnt += 1
                    if cnt < best_cnt:
                        best_cnt = cnt
                        best_r = r
                        if cnt == 0:
                            break
                if best_cnt > 0:
                    r = best_r
                    n = 0
                    for v in range(hi + 1):
                        if (r >> v) & 1:
                            continue
                        f = r | (1 << v)
                        if _candidate_ok(f, in_fac, ridge_deg,
                                         tri_closed, vclosed, tmp):
                            cand[depth, n] = f
                            n += 1
                    ncand[depth] = n
            expand = False
            continue
        if ci[depth] < ncand[depth]:
            f = cand[depth, ci[depth]]
            ci[depth] += 1
            # ---- apply ----
            fac[nfac] = f
            nfac += 1
            in_fac[f] = 1
            k = _bits_arr(f, tmp)
            newmax = maxu[depth]
            for a in range(k):
                if tmp[a] > newmax:
                    newmax = tmp[a]
            for a in range(k):
                x = f ^ (1 << tmp[a])
                ridge_deg[x] += 1
                kk = _bits_arr(x, tmp2)
                if ridge_deg[x] == 1:
                    nopen += 1
                    for j in range(kk):
                        vopen[tmp2[j]] += 1
                else:
                    nopen -= 1
                    for j in range(kk):
                        vopen[tmp2[j]] -= 1
            dead = False
            nrec_tri[depth] = 0
            for a in range(k):
                for b in range(a + 1, k):
                    t = f ^ (1 << tmp[a]) ^ (1 << tmp[b])
                    tri_adj[t, tmp[a]] |= 1 << tmp[b]
                    tri_adj[t, tmp[b]] |= 1 << tmp[a]
                    closed, whole = _cycle_state(t, tmp[a], tri_adj)
                    if closed:
                        if whole:
                            rec_tri[depth, nrec_tri[depth]] = t
                            nrec_tri[depth] += 1
                        else:
                            dead = True
            nrec_v[depth] = 0
            if not dead:
                for t in range(nrec_tri[depth]):
                    tri_closed[rec_tri[depth, t]] = 1
                for a in range(k):
                    v = tmp[a]
                    if vopen[v] == 0 and vclosed[v] == 0:
                        if _vertex_star_ok(v, fac, nfac):
                            vclosed[v] = 1
                            rec_v[depth, nrec_v[depth]] = v
                            nrec_v[depth] += 1
                        else:
                            dead = True
                            break
            if dead:
                # ---- immediate undo ----
                for t in range(nrec_tri[depth]):
                    tri_closed[rec_tri[depth, t]] = 0
                for t in range(nrec_v[depth]):
                    vclosed[rec_v[depth, t]] = 0
                for a in range(k):
                    for b in range(a + 1, k):
                        t = f ^ (1 << tmp[a]) ^ (1 << tmp[b])
                        tri_adj[t, tmp[a]] &= ~(1 << tmp[b])
                        tri_adj[t, tmp[b]] &= ~(1 << tmp[a])
                for a in range(k):
                    x = f ^ (1 << tmp[a])
                    kk = _bits_arr(x, tmp2)
                    if ridge_deg[x] == 1:
                        nopen -= 1
                        for j in range(kk):
                            vopen[tmp2[j]] -= 1
                    else:
                        nopen += 1
                        for j in range(kk):
                            vopen[tmp2[j]] += 1
                    ridge_deg[x] -= 1
                in_fac[f] = 0
                nfac -= 1
                continue
            maxu[depth + 1] = newmax
            depth += 1
            expand = True
            continue
        # exhausted: backtrack
        if depth == 0:
            break
        depth -= 1
        f = cand[depth, ci[depth] - 1]
        k = _bits_arr(f, tmp)
        for t in range(nrec_tri[depth]):
            tri_closed[rec_tri[depth, t]] = 0
        for t in range(nrec_v[depth]):
            vclosed[rec_v[depth, t]] = 0
        for a in range(k):
            for b in range(a + 1, k):
                t = f ^ (1 << tmp[a]) ^ (1 << tmp[b])
                tri_adj[t, tmp[a]] &= ~(1 << tmp[b])
                tri_adj[t, tmp[b]] &= ~(1 << tmp[a])
        for a in range(k):
            x = f ^ (1 << tmp[a])
            kk = _bits_arr(x, tmp2)
            if ridge_deg[x] == 1:
                nopen -= 1
                for j in range(kk):
                    vopen[tmp2[j]] -= 1
            else:
                nopen += 1
                for j in range(kk):
                    vopen[tmp2[j]] += 1
            ridge_deg[x] -= 1
        in_fac[f] = 0
        nfac -= 1
    return nres, nodes


def run(max_results: int = 6000000):
    results = np.full((max_results, MAX_FACETS), -1, dtype=np.int16)
    nres, nodes = search(_RIDGES, results, max_results)
    if nres >= max_results:
        raise RuntimeError("result buffer exhausted")
    out = []
    for i in range(nres):
        row = results[i]
        out.append(tuple(int(x) for x in row[row >= 0]))
    return out, nodes
