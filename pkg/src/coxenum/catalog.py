"""Catalog of the candidate facet complexes: simplicial 4-spheres on 9
vertices, i.e. boundary complexes eligible to be the face lattice of a
simple 5-polytope with 9 facets (vertices here are facet indices of the
dual simple polytope).

Enumeration: grow a pure 4-complex from a seed facet by completing open
ridges (4-sets of degree 1), with vertices introduced in increasing
order.  A finished complex is kept when it is a closed combinatorial
4-manifold with Euler characteristic 2: with 9 vertices every such
manifold is the 4-sphere except the 9-vertex complex-projective-plane
triangulation, which has characteristic 3.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from functools import lru_cache

N_VERTICES = 9
MAX_FACETS = 30  # upper bound theorem for 4-spheres with 9 vertices
FULL_MASK = (1 << N_VERTICES) - 1


def _bits(mask):
    out = []
    while mask:
        b = mask & -mask
        out.append(b.bit_length() - 1)
        mask ^= b
    return out


def _facet_faces(facets):
    """All faces (as masks) by dimension: faces[k] = set of (k+1)-subsets."""
    faces = [set() for _ in range(5)]
    for f in facets:
        verts = _bits(f)
        for k in range(1, 6):
            for comb in itertools.combinations(verts, k):
                m = 0
                for v in comb:
                    m |= 1 << v
                faces[k - 1].add(m)
    return faces


def _connected(facets):
    if not facets:
        return False
    seen = {facets[0]}
    stack = [facets[0]]
    rest = set(facets[1:])
    while stack:
        f = stack.pop()
        join = [g for g in rest if bin(f & g).count("1") == 4]
        for g in join:
            rest.discard(g)
            seen.add(g)
            stack.append(g)
    return not rest


def _link(facets, face_mask):
    return [f & ~face_mask for f in facets if f & face_mask == face_mask]


def _is_surface_sphere(tris):
    """Whether a set of 3-sets (masks) forms a 2-sphere: every edge in
    exactly two triangles, connected, Euler characteristic 2."""
    if not tris:
        return False
    edge_deg = defaultdict(int)
    verts = set()
    for t in tris:
        vs = _bits(t)
        verts.update(vs)
        for a, b in itertools.combinations(vs, 2):
            edge_deg[(1 << a) | (1 << b)] += 1
    if any(d != 2 for d in edge_deg.values()):
        return False
    if len(verts) - len(edge_deg) + len(tris) != 2:
        return False
    return _connected(list(tris))


def is_closed_four_manifold(facets) -> bool:
    """Closed combinatorial 4-manifold test for a pure 4-complex given by
    facet masks; assumes every ridge already has degree exactly 2.

    Every edge link must be a 2-sphere (which makes every vertex link a
    closed 3-manifold, and closed 3-manifolds on at most 8 vertices are
    3-spheres), and every vertex link must be connected.
    """
    faces = _facet_faces(facets)
    for e in faces[1]:
        if not _is_surface_sphere(_link(facets, e)):
            return False
    for v in range(N_VERTICES):
        lk = _link(facets, 1 << v)
        if lk and not _connected(lk):
            return False
    return True


def euler_characteristic(facets) -> int:
    faces = _facet_faces(facets)
    return sum((-1) ** k * len(faces[k]) for k in range(5))


def _triangles_of(f):
    vs = _bits(f)
    out = []
    for comb in itertools.combinations(vs, 3):
        m = 0
        for v in comb:
            m |= 1 << v
        out.append(m)
    return out


def enumerate_raw():
    """All closed 4-manifold complexes on exactly 9 vertices with
    characteristic 2, vertices in order of first appearance.  Yields
    sorted facet-mask tuples; distinct labelings of one combinatorial
    type can appear more than once."""
    seed = 0b11111
    facets = [seed]
    facet_set = {seed}
    ridge_deg = defaultdict(int)
    open_ridges = set()
    for v in range(5):
        ridge_deg[seed ^ (1 << v)] = 1
        open_ridges.add(seed ^ (1 << v))
    # link graphs of triangles: tri_adj[t][u] = neighbor mask of u in lk(t);
    # once the link closes into a cycle the triangle accepts no new facets
    tri_adj = defaultdict(lambda: defaultdict(int))
    closed_tri = set()
    for t in _triangles_of(seed):
        a, b = _bits(seed ^ t)
        tri_adj[t][a] |= 1 << b
        tri_adj[t][b] |= 1 << a
    results = []

    def cycle_closed(t, a):
        """After adding link edge through a: does the component of a form a
        closed cycle, and is it then the whole link of t so far?"""
        adj = tri_adj[t]
        comp = {a}
        stack = [a]
        edges = 0
        while stack:
            u = stack.pop()
            nb = adj[u]
            edges += bin(nb).count("1")
            for w in _bits(nb):
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        edges //= 2
        if edges != len(comp):
            return False, False  # not a closed cycle (tree/path component)
        total = sum(1 for u, nb in adj.items() if nb)
        return True, total == len(comp)

    def rec(max_used):
        if not open_ridges:
            used = 0
            for f in facets:
                used |= f
            if used == FULL_MASK and euler_characteristic(facets) == 2 \
                    and is_closed_four_manifold(facets):
                results.append(tuple(sorted(facets)))
            return
        if len(facets) >= MAX_FACETS:
            return
        r = min(open_ridges)
        hi = min(max_used + 1, N_VERTICES - 1)
        for v in range(hi + 1):
            if r & (1 << v):
                continue
            f = r | (1 << v)
            if f in facet_set:
                continue
            rr = [f ^ (1 << u) for u in _bits(f)]
            if any(ridge_deg[x] >= 2 for x in rr):
                continue
            tris = _triangles_of(f)
            if any(t in closed_tri for t in tris):
                continue
            facets.append(f)
            facet_set.add(f)
            for x in rr:
                ridge_deg[x] += 1
                if ridge_deg[x] == 1:
                    open_ridges.add(x)
                else:
                    open_ridges.discard(x)
            newly_closed = []
            dead = False
            for t in tris:
                a, b = _bits(f ^ t)
                tri_adj[t][a] |= 1 << b
                tri_adj[t][b] |= 1 << a
                closed, whole = cycle_closed(t, a)
                if closed:
                    if whole:
                        newly_closed.append(t)
                    else:
                        dead = True
            if not dead:
                for t in newly_closed:
                    closed_tri.add(t)
                rec(max(max_used, v))
                for t in newly_closed:
                    closed_tri.discard(t)
            for t in tris:
                a, b = _bits(f ^ t)
                tri_adj[t][a] &= ~(1 << b)
                tri_adj[t][b] &= ~(1 << a)
            for x in rr:
                ridge_deg[x] -= 1
                if ridge_deg[x] == 1:
                    open_ridges.add(x)
                else:
                    open_ridges.discard(x)
            facet_set.discard(f)
            facets.pop()

    rec(4)
    return results


# ----------------------------------------------------------------------
# isomorphism reduction
# ----------------------------------------------------------------------

def _vertex_invariants(facets):
    """Iteratively refined per-vertex invariants for isomorphism tests."""
    deg = [0] * N_VERTICES
    for f in facets:
        for v in _bits(f):
            deg[v] += 1
    edge_deg = defaultdict(int)
    for f in facets:
        for a, b in itertools.combinations(_bits(f), 2):
            edge_deg[(a, b)] += 1
    inv = [(deg[v],) for v in range(N_VERTICES)]
    for _ in range(3):
        nxt = []
        for v in range(N_VERTICES):
            around = sorted(
                (edge_deg.get((min(v, u), max(v, u)), 0), inv[u])
                for u in range(N_VERTICES) if u != v)
            nxt.append((inv[v], tuple(around)))
        # compress to small ints to keep tuples comparable and cheap
        codes = {t: i for i, t in enumerate(sorted(set(nxt)))}
        inv = [(codes[t],) for t in nxt]
        if len(codes) == N_VERTICES:
            break
    return [t[0] for t in inv]


def _relabel(facets, perm):
    out = []
    for f in facets:
        m = 0
        for v in _bits(f):
            m |= 1 << perm[v]
        out.append(m)
    return tuple(sorted(out))


def isomorphic(fa, fb) -> bool:
    """Backtracking isomorphism test between two facet-mask tuples."""
    if len(fa) != len(fb):
        return False
    ia, ib = _vertex_invariants(fa), _vertex_invariants(fb)
    if sorted(ia) != sorted(ib):
        return False
    fb_set = set(fb)
    order = sorted(range(N_VERTICES), key=lambda v: (ia.count(ia[v]), v))
    perm = [-1] * N_VERTICES
    used = [False] * N_VERTICES

    def ok_partial():
        assigned = [v for v in range(N_VERTICES) if perm[v] >= 0]
        amask = 0
        for v in assigned:
            amask |= 1 << v
        for f in fa:
            if f & amask == f:
                m = 0
                for v in _bits(f):
                    m |= 1 << perm[v]
                if m not in fb_set:
                    return False
        return True

    def rec(i):
        if i == N_VERTICES:
            return _relabel(fa, perm) == tuple(sorted(fb))
        v = order[i]
        for w in range(N_VERTICES):
            if used[w] or ib[w] != ia[v]:
                continue
            perm[v] = w
            used[w] = True
            if ok_partial() and rec(i + 1):
                return True
            used[w] = False
            perm[v] = -1
        return False

    return rec(0)


def _fingerprint(facets):
    faces = _facet_faces(facets)
    deg = sorted(_vertex_invariants(facets))
    return (len(facets), tuple(len(x) for x in faces), tuple(deg))


def reduce_isomorphism(raw):
    """Representatives of the combinatorial types, search order preserved."""
    buckets = defaultdict(list)
    reps = []
    for facets in raw:
        key = _fingerprint(facets)
        if any(isomorphic(facets, other) for other in buckets[key]):
            continue
        buckets[key].append(facets)
        reps.append(facets)
    return reps


def nonedges(facets):
    """Vertex pairs never in a common facet (dotted pairs of the dual)."""
    faces = _facet_faces(facets)
    out = []
    for a in range(N_VERTICES):
        for b in range(a + 1, N_VERTICES):
            if ((1 << a) | (1 << b)) not in faces[1]:
                out.append((a, b))
    return out


def facets_as_sets(facets):
    return [frozenset(v + 1 for v in _bits(f)) for f in facets]


# ----------------------------------------------------------------------
# persisted catalog
# ----------------------------------------------------------------------

_DATA_FILE = "data/spheres9.txt"


def _catalog_path():
    import pathlib
    return pathlib.Path(__file__).parent / _DATA_FILE


def load_catalog():
    """The shipped catalog: incidence lines of all 337 simplicial
    4-spheres on 9 vertices (the 322 polytopal types plus 15
    non-polytopal spheres, all of the latter with at most one
    missing edge)."""
    with open(_catalog_path()) as fh:
        return [line.strip() for line in fh if line.strip()]


def regenerate_catalog():
    """Re-run the full enumeration; returns incidence lines in the same
    deterministic order as the shipped file."""
    from . import catalog_search
    leaves, _nodes = catalog_search.run()
    spheres = [list(l) for l in leaves if euler_characteristic(list(l)) == 2]
    reps = reduce_isomorphism([tuple(s) for s in spheres])
    reps = sorted(reps, key=lambda r: (len(r), len(nonedges(list(r))), r))
    lines = []
    for r in reps:
        sets = sorted(sorted(v + 1 for v in _bits(f)) for f in r)
        lines.append(" ".join("[" + ",".join(map(str, s)) + "]" for s in sets))
    return lines
