"""Coxeter diagram classification and the weight-vector data sets.

A diagram of rank r is a symmetric r x r integer weight matrix with 1 on the
diagonal and off-diagonal weights in 2..7 (weight 2 = "no edge").  The data
sets driving the pasting filters are sets of upper-triangle weight tuples in
lexicographic pair order, closed under node relabelings.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .field import FIELD_WITH_COS7, Q235, gram_entry
from .linalg import inertia, is_positive_definite

MIN_WEIGHT = 2
MAX_WEIGHT = 7


# ----------------------------------------------------------------------
# pair orderings and permutation machinery
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def pair_order(rank: int):
    """Lexicographic list of index pairs (i, j), i < j."""
    return tuple((i, j) for i in range(rank) for j in range(i + 1, rank))


@lru_cache(maxsize=None)
def _pair_pos(rank: int):
    return {p: k for k, p in enumerate(pair_order(rank))}


@lru_cache(maxsize=None)
def perm_column_maps(rank: int) -> np.ndarray:
    """For every permutation p of nodes, the column map M with
    new_vector[k] = old_vector[M[k]] where column k is pair (i, j) and
    M[k] is the position of (p(i), p(j))."""
    pairs = pair_order(rank)
    pos = _pair_pos(rank)
    maps = []
    for p in itertools.permutations(range(rank)):
        maps.append([pos[tuple(sorted((p[i], p[j])))] for (i, j) in pairs])
    return np.array(maps, dtype=np.int64)


def matrix_to_vector(weights) -> tuple:
    r = len(weights)
    return tuple(weights[i][j] for (i, j) in pair_order(r))


def vector_to_matrix(vec, rank: int):
    M = [[1] * rank for _ in range(rank)]
    for k, (i, j) in enumerate(pair_order(rank)):
        M[i][j] = M[j][i] = vec[k]
    return tuple(tuple(row) for row in M)


def canonical_vector(vec, rank: int) -> tuple:
    arr = np.asarray(vec, dtype=np.uint8)
    allv = arr[perm_column_maps(rank)]
    view = allv.tobytes()
    n = allv.shape[1]
    best = min(view[k * n:(k + 1) * n] for k in range(allv.shape[0]))
    return tuple(best)


def expand_permutations(vectors, rank: int) -> set:
    """All distinct relabelings of the given weight vectors."""
    if not vectors:
        return set()
    arr = np.asarray(sorted(vectors), dtype=np.uint8)
    maps = perm_column_maps(rank)
    out = arr[:, maps]                     # (n, perms, C)
    out = out.reshape(-1, out.shape[-1])
    out = np.unique(out, axis=0)
    return {tuple(int(x) for x in row) for row in out}


def count_expanded(vectors, rank: int) -> int:
    if not vectors:
        return 0
    arr = np.asarray(sorted(vectors), dtype=np.uint8)
    maps = perm_column_maps(rank)
    out = arr[:, maps].reshape(-1, len(pair_order(rank)))
    return len(np.unique(out, axis=0))


# ----------------------------------------------------------------------
# exact / hybrid definiteness checks
# ----------------------------------------------------------------------

_COS = {k: math.cos(math.pi / k) for k in range(2, MAX_WEIGHT + 1)}


def _float_gram(weights):
    r = len(weights)
    G = np.eye(r)
    for i in range(r):
        for j in range(i + 1, r):
            G[i, j] = G[j, i] = -_COS[weights[i][j]]
    return G


def _exact_gram(weights):
    r = len(weights)
    has7 = any(weights[i][j] == 7 for i in range(r) for j in range(i + 1, r))
    if has7:
        ext = FIELD_WITH_COS7
        half = ext.from_base(Q235.from_rational(1)) / 2
        t = ext.gen()
        def entry(w):
            if w == 7:
                return -t * half
            return ext.from_base(gram_entry(w))
        one = ext.one()
    else:
        def entry(w):
            return gram_entry(w)
        one = Q235.one()
    M = [[one if i == j else entry(weights[i][j]) for j in range(r)]
         for i in range(r)]
    return M


_EIG_MARGIN = 1e-7


def gram_definiteness(weights):
    """(-1, 0, +1): indefinite / degenerate-PSD / positive definite.

    Floating eigenvalues decide well-separated cases; near-zero smallest
    eigenvalues fall back to the exact inertia.
    """
    ev = np.linalg.eigvalsh(_float_gram(weights))
    mn = ev.min()
    if mn > _EIG_MARGIN:
        return 1
    if mn < -_EIG_MARGIN:
        return -1
    sig = inertia(_exact_gram(weights))
    if sig.neg > 0:
        return -1
    return 0 if sig.zero > 0 else 1


def exact_signature(weights):
    return inertia(_exact_gram(weights))


def _components(weights):
    r = len(weights)
    seen = [False] * r
    comps = []
    for s in range(r):
        if seen[s]:
            continue
        stack = [s]
        comp = []
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in range(r):
                if not seen[u] and weights[v][u] > 2:
                    seen[u] = True
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def _induced(weights, nodes):
    return tuple(tuple(weights[i][j] for j in nodes) for i in nodes)


def classify(weights) -> str:
    """'elliptic' | 'parabolic' | 'lanner' | 'other' per the standard
    definitions (exact arithmetic on boundary cases)."""
    r = len(weights)
    d = gram_definiteness(weights)
    if d > 0:
        return "elliptic"
    comps = _components(weights)
    # parabolic: every component degenerate PSD with all proper
    # subdiagrams (of each component) elliptic
    def comp_parabolic(nodes):
        sub = _induced(weights, nodes)
        if gram_definiteness(sub) != 0:
            return False
        sig = inertia(_exact_gram(sub))
        if sig.zero != 1 or sig.neg != 0:
            return False
        return all(
            gram_definiteness(_induced(sub, [k for k in range(len(nodes))
                                             if k != drop])) > 0
            for drop in range(len(nodes)))
    if all(comp_parabolic(c) for c in comps):
        return "parabolic"
    if len(comps) == 1 and r >= 2:
        ok = all(
            gram_definiteness(_induced(weights,
                                       [k for k in range(r) if k != drop])) > 0
            for drop in range(r))
        if ok and d < 0:
            return "lanner"
    return "other"


# ----------------------------------------------------------------------
# enumeration up to isomorphism
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _triangle_pd(a: int, b: int, c: int) -> bool:
    """Positive definiteness of the rank-3 diagram with weights
    (w12, w13, w23) = (a, b, c)."""
    return gram_definiteness(vector_to_matrix((a, b, c), 3)) > 0


@lru_cache(maxsize=None)
def _elliptic_reps(rank: int):
    """Canonical weight vectors of all elliptic diagrams (possibly
    disconnected) of the given rank, weights <= MAX_WEIGHT."""
    if rank == 1:
        return (tuple(),)
    out = set()
    for rep in _elliptic_reps(rank - 1):
        W = vector_to_matrix(rep, rank - 1)
        k = rank - 1
        # DFS over the weight vector of the new node
        def grow(i, chosen):
            if i == k:
                full = [list(row) + [chosen[r_]] for r_, row in enumerate(W)]
                full.append(chosen + [1])
                fullt = tuple(tuple(row) for row in full)
                if gram_definiteness(fullt) > 0:
                    out.add(canonical_vector(matrix_to_vector(fullt), rank))
                return
            for w in range(MIN_WEIGHT, MAX_WEIGHT + 1):
                ok = True
                for j in range(i):
                    if not _triangle_pd(W[j][i], chosen[j], w):
                        ok = False
                        break
                if ok:
                    grow(i + 1, chosen + [w])
        grow(0, [])
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _grown_candidates(rank: int):
    """Connected diagrams of the given rank whose node-deleted subdiagrams
    are all elliptic (candidates for connected parabolic / Lannér)."""
    out = set()
    for rep in _elliptic_reps(rank - 1):
        W = vector_to_matrix(rep, rank - 1)
        k = rank - 1
        def grow(i, chosen):
            if i == k:
                if all(w == 2 for w in chosen):
                    return
                full = [list(row) + [chosen[r_]] for r_, row in enumerate(W)]
                full.append(chosen + [1])
                fullt = tuple(tuple(row) for row in full)
                if len(_components(fullt)) != 1:
                    return
                ok = all(
                    gram_definiteness(
                        _induced(fullt, [t for t in range(rank) if t != d])) > 0
                    for d in range(rank))
                if ok:
                    out.add(canonical_vector(matrix_to_vector(fullt), rank))
                return
            for w in range(MIN_WEIGHT, MAX_WEIGHT + 1):
                ok = True
                # triples with the new node sit inside a node deletion
                # only when rank >= 4; at rank 3 the triple is the whole
                # diagram and may legitimately be non-elliptic
                if rank >= 4:
                    for j in range(i):
                        if not _triangle_pd(W[j][i], chosen[j], w):
                            ok = False
                            break
                if ok:
                    grow(i + 1, chosen + [w])
        grow(0, [])
    return tuple(sorted(out))


def enumerate_class(rank: int, cls: str, max_weight: int = MAX_WEIGHT):
    """Isomorphism-class representatives (weight vectors) of the given
    diagram class at the given rank."""
    if not 1 <= rank <= 7:
        raise ValueError(f"rank {rank} out of supported range")
    if max_weight != MAX_WEIGHT:
        raise ValueError("only the weight-7 truncation is supported")
    if cls == "elliptic":
        return list(_elliptic_reps(rank))
    reps = []
    for vec in _grown_candidates(rank):
        W = vector_to_matrix(vec, rank)
        c = classify(W)
        if cls == "parabolic_connected" and c == "parabolic":
            reps.append(vec)
        elif cls == "lanner" and c == "lanner":
            reps.append(vec)
    if cls not in ("parabolic_connected", "lanner", "elliptic"):
        raise ValueError(f"unknown class {cls!r}")
    return reps


# ----------------------------------------------------------------------
# named data sets
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def dataset(name: str) -> frozenset:
    """The filter data sets: S3..S7 (elliptic), E3..E7 (connected
    parabolic), L4/L5 (Lanner), I2 (Euclidean squares).

    Entries are full upper-triangle weight tuples; I2 entries use
    INF_MARK at the two opposite (disjoint) positions.
    """
    kind, rank = name[0], int(name[1])
    if kind == "S":
        reps = enumerate_class(rank, "elliptic")
    elif kind == "E":
        reps = enumerate_class(rank, "parabolic_connected")
    elif kind == "L":
        reps = enumerate_class(rank, "lanner")
    elif kind == "I":
        return _euclidean_squares()
    else:
        raise ValueError(f"unknown dataset {name!r}")
    return frozenset(expand_permutations(reps, rank))


INF_MARK = 8  # marker for a disjoint (dotted) pair inside small pattern vectors


@lru_cache(maxsize=None)
def _euclidean_squares() -> frozenset:
    """Weight vectors of the Euclidean 2-cube configurations.

    A square pattern on nodes (1,2,3,4) has disjoint opposite pairs
    (1,3) and (2,4); the flat (Euclidean) realization forces adjacent
    hyperplane pairs to be orthogonal, i.e. all four side weights 2.
    Expanding over node relabelings moves the opposite-pair positions,
    giving the three distinct vectors.
    """
    base = [INF_MARK] * 6   # pairs 12,13,14,23,24,34
    pos = _pair_pos(4)
    for (i, j) in ((0, 1), (1, 2), (2, 3), (0, 3)):
        base[pos[(min(i, j), max(i, j))]] = 2
    return frozenset(expand_permutations([tuple(base)], 4))


DATASET_TABLE = {
    # name: (diagram count, vector count) from the library size contract
    "L5": (5, 420),
    "L4": (9, 108),
    "S3": (9, 31),
    "S4": (29, 242),
    "S5": (47, 1946),
    "S6": (117, 20206),
    "S7": (196, 227676),
    "E3": (3, 10),
    "E4": (3, 27),
    "E5": (5, 257),
    "E6": (4, 870),
    "E7": (5, 6870),
    "I2": (4, 3),
}


def dataset_rank(name: str) -> int:
    return int(name[1])


def preblock(rank: int = 5) -> frozenset:
    """The elliptic vector set used to seed per-vertex blocks."""
    return dataset(f"S{rank}")
