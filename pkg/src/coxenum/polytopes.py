"""Facet-vertex incidence of simple polytopes and the derived
combinatorial sets that drive the pasting filters.

Facets are labeled 1..m.  A vertex of a simple d-polytope is recorded as
the d-set of facets through it; a facet subset T has nonempty (codim-|T|)
intersection iff T lies inside some vertex set.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field


@dataclass(frozen=True)
class CombinatorialPolytope:
    dim: int
    num_facets: int
    vertices: tuple  # of frozensets of facet indices, each of size dim

    def __post_init__(self):
        sizes = {len(v) for v in self.vertices}
        if sizes != {self.dim}:
            raise ValueError("vertex sets must all have cardinality dim")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex sets must be distinct")
        seen = set().union(*self.vertices) if self.vertices else set()
        if seen != set(range(1, self.num_facets + 1)):
            raise ValueError("every facet index 1..m must occur")


_BRACKET = re.compile(r"\[([^\]]*)\]")


def parse_polytope_line(text: str) -> CombinatorialPolytope:
    """One polytope per line: whitespace-separated bracketed integer
    lists, one bracket per vertex."""
    stripped = re.sub(_BRACKET, "", text).strip()
    if stripped:
        raise ValueError(f"malformed incidence line: stray text {stripped!r}")
    verts = []
    for body in _BRACKET.findall(text):
        try:
            nums = [int(x) for x in re.split(r"[,\s]+", body.strip()) if x]
        except ValueError as exc:
            raise ValueError(f"malformed bracket [{body}]") from exc
        if not nums or min(nums) < 1:
            raise ValueError(f"facet indices must be >= 1 in [{body}]")
        verts.append(frozenset(nums))
    if not verts:
        raise ValueError("no brackets found")
    sizes = {len(v) for v in verts}
    if len(sizes) != 1:
        raise ValueError(f"non-uniform vertex cardinalities {sorted(sizes)}")
    m = max(max(v) for v in verts)
    return CombinatorialPolytope(dim=sizes.pop(), num_facets=m,
                                 vertices=tuple(verts))


def polytope_line(P: CombinatorialPolytope) -> str:
    return " ".join(
        "[" + ",".join(str(x) for x in sorted(v)) + "]"
        for v in sorted(P.vertices, key=sorted))


@dataclass(frozen=True)
class CombinatorialData:
    disjoint_pairs: frozenset      # unordered facet pairs sharing no vertex
    l4: frozenset                  # simplex sublattices of rank 4
    l5: frozenset                  # simplex sublattices of rank 5
    l_basis: frozenset             # (facet b, top-rank simplex subset)
    s3: frozenset
    s4: frozenset
    s5: frozenset
    e3: frozenset
    e4: frozenset
    e5: frozenset
    se6: frozenset
    se7: frozenset
    i2: frozenset                  # square-pattern 4-subsets
    symmetry: tuple                # facet permutations as dicts? tuples

    @property
    def l5_basis(self):
        return self.l_basis


def _subsets_of_some_vertex(P, size):
    out = set()
    for v in P.vertices:
        for comb in itertools.combinations(sorted(v), size):
            out.add(frozenset(comb))
    return out


def compute_data(P: CombinatorialPolytope) -> CombinatorialData:
    m = P.num_facets
    facets = range(1, m + 1)
    covered = {j: _subsets_of_some_vertex(P, j)
               for j in range(2, min(P.dim, 7) + 1)}

    disjoint = frozenset(
        frozenset(p) for p in itertools.combinations(facets, 2)
        if frozenset(p) not in covered[2])

    def no_disjoint(sub):
        return all(frozenset(p) not in disjoint
                   for p in itertools.combinations(sorted(sub), 2))

    e = {}
    for j in range(3, 8):
        e[j] = frozenset(
            frozenset(c) for c in itertools.combinations(facets, j)
            if j <= m and no_disjoint(c))

    s = {}
    for j in range(3, 6):
        if j <= P.dim:
            s[j] = frozenset(sub for sub in e[j] if sub not in covered[j])
        else:
            # no j facets meet in a face at all
            s[j] = e[j]

    def simplex_sublattices(j):
        """j-subsets bounding a (j-1)-simplex face complex: every proper
        (j-1)-subset is a face but the full intersection is empty."""
        if j > P.dim or j < 3:
            return frozenset()
        out = set()
        for c in itertools.combinations(facets, j):
            sub = frozenset(c)
            if sub in covered[j]:
                continue
            if all(frozenset(t) in covered[j - 1]
                   for t in itertools.combinations(c, j - 1)):
                out.add(sub)
        return frozenset(out)

    l4 = simplex_sublattices(4)
    l5 = simplex_sublattices(5)
    ltop = l5 if P.dim == 5 else l4

    # (b, S): the simplex on S bounds a simplex facet of the polytope cut
    # off by b; i.e. b's vertex figure lives entirely on S
    l_basis = set()
    for S in ltop:
        for b in facets:
            if b in S:
                continue
            stars = [v for v in P.vertices if b in v]
            if stars and all(v - {b} <= S for v in stars):
                l_basis.add((b, S))

    i2 = set()
    for c in itertools.combinations(facets, 4):
        pairs = [frozenset(p) for p in itertools.combinations(c, 2)]
        dis = [p for p in pairs if p in disjoint]
        if len(dis) == 2 and dis[0].isdisjoint(dis[1]):
            i2.add(frozenset(c))

    symmetry = tuple(_symmetry_group(P))

    return CombinatorialData(
        disjoint_pairs=disjoint, l4=l4, l5=l5, l_basis=frozenset(l_basis),
        s3=s[3], s4=s[4], s5=s[5], e3=e[3], e4=e[4], e5=e[5],
        se6=e[6], se7=e[7], i2=frozenset(i2), symmetry=symmetry)


def _symmetry_group(P: CombinatorialPolytope):
    """All facet permutations preserving the vertex-set family, by
    backtracking over images with degree-profile pruning."""
    m = P.num_facets
    vsets = set(P.vertices)
    deg = {f: sum(1 for v in P.vertices if f in v) for f in range(1, m + 1)}
    pair_deg = {}
    for a, b in itertools.combinations(range(1, m + 1), 2):
        pair_deg[(a, b)] = pair_deg[(b, a)] = sum(
            1 for v in P.vertices if a in v and b in v)
    perms = []
    img = {}
    used = set()

    def compatible(f, g):
        if deg[f] != deg[g]:
            return False
        return all(pair_deg[(f, h)] == pair_deg[(g, img[h])] for h in img)

    def rec(f):
        if f > m:
            p = tuple(img[i] for i in range(1, m + 1))
            if all(frozenset(p[i - 1] for i in v) in vsets for v in P.vertices):
                perms.append(p)
            return
        for g in range(1, m + 1):
            if g in used or not compatible(f, g):
                continue
            img[f] = g
            used.add(g)
            rec(f + 1)
            used.discard(g)
            del img[f]

    rec(1)
    return perms


def filter_by_disjoint_pairs(polytopes):
    """Drop polytopes with fewer than 2 disjoint pairs; group the rest
    by the pair count."""
    groups = {}
    for P in polytopes:
        n = _disjoint_pair_count(P)
        if n >= 2:
            groups.setdefault(n, []).append(P)
    return groups


def _disjoint_pair_count(P):
    cov = _subsets_of_some_vertex(P, 2)
    return sum(1 for p in itertools.combinations(range(1, P.num_facets + 1), 2)
               if frozenset(p) not in cov)


# ----------------------------------------------------------------------
# reference patterns and embeddings
# ----------------------------------------------------------------------

def prism3() -> CombinatorialPolytope:
    """Triangular prism: sides 1..3, ends 4 and 5."""
    verts = [frozenset({a, b, e})
             for a, b in itertools.combinations((1, 2, 3), 2)
             for e in (4, 5)]
    return CombinatorialPolytope(3, 5, tuple(verts))


def prism4() -> CombinatorialPolytope:
    """3-simplex x interval: sides 1..4, ends 5 and 6."""
    verts = [frozenset(t) | {e}
             for t in itertools.combinations((1, 2, 3, 4), 3)
             for e in (5, 6)]
    return CombinatorialPolytope(4, 6, tuple(verts))


def duoprism() -> CombinatorialPolytope:
    """2-simplex x 2-simplex: facets 1..3 and 4..6, no disjoint pairs."""
    verts = [frozenset(a) | frozenset(b)
             for a in itertools.combinations((1, 2, 3), 2)
             for b in itertools.combinations((4, 5, 6), 2)]
    return CombinatorialPolytope(4, 6, tuple(verts))


def simplex(d: int) -> CombinatorialPolytope:
    verts = [frozenset(c)
             for c in itertools.combinations(range(1, d + 2), d)]
    return CombinatorialPolytope(d, d + 1, tuple(verts))


PATTERNS = {"P3": prism3, "P4": prism4, "D4": duoprism}


def _face_family(P: CombinatorialPolytope):
    """Maximal members of {T : T has nonempty facet intersection}."""
    fam = set(P.vertices)
    out = []
    for v in fam:
        if not any(v < w for w in fam):
            out.append(v)
    return set(out)


def find_pattern_embeddings(P: CombinatorialPolytope, pattern: str):
    """Facet subsets of P whose intersection lattice matches the named
    pattern (P3, P4, D4), as sorted tuples."""
    Q = PATTERNS[pattern]()
    p = Q.num_facets
    q_faces = set(Q.vertices)          # maximal faces of the pattern complex
    cov = {j: _subsets_of_some_vertex(P, j) for j in range(1, P.dim + 1)}

    def complex_on(A):
        """Maximal face-subsets of A (each T <= some vertex set of P)."""
        faces = set()
        for j in range(min(len(A), P.dim), 0, -1):
            for c in itertools.combinations(A, j):
                sub = frozenset(c)
                if sub in cov[j] and not any(sub < w for w in faces):
                    faces.add(sub)
        return faces

    out = []
    for A in itertools.combinations(range(1, P.num_facets + 1), p):
        faces = complex_on(A)
        if {len(f) for f in faces} != {Q.dim}:
            continue
        if len(faces) != len(q_faces):
            continue
        if _families_isomorphic(list(A), faces, list(range(1, p + 1)), q_faces):
            out.append(tuple(A))
    return out


def _families_isomorphic(A, fam_a, B, fam_b):
    """Existence of a bijection A->B carrying set family fam_a to fam_b."""
    deg_a = {x: sum(1 for f in fam_a if x in f) for x in A}
    deg_b = {x: sum(1 for f in fam_b if x in f) for x in B}
    if sorted(deg_a.values()) != sorted(deg_b.values()):
        return False
    img = {}
    used = set()

    def rec(i):
        if i == len(A):
            return {frozenset(img[x] for x in f) for f in fam_a} == fam_b
        x = A[i]
        for y in B:
            if y in used or deg_a[x] != deg_b[y]:
                continue
            img[x] = y
            used.add(y)
            if rec(i + 1):
                return True
            used.discard(y)
            del img[x]
        return False

    return rec(0)
