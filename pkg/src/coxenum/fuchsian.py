"""Lorentzian-admissible Coxeter vectors of the three small patterns.

The simplicial 3-prism, the simplicial 4-prism, and the product of two
triangles can occur as facet-intersection patterns inside a larger
candidate polytope.  Each pattern gets its own SEILper enumeration; a
vector survives when some assignment of its unknowns (dotted entry
x < -1, weight-7 entries y in (1.8, 2)) gives the Gram matrix a
Lorentzian signature -- (4,1) or degenerate (3,1) for the 3-prism,
(5,1) or degenerate (4,1) for the two 4-dimensional patterns.  The
surviving vectors, closed under node relabelings, later act as saving
filters on the 9-facet SEILper vectors (apply_intersection_filter).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import diagrams, linalg
from .field import Q235, gram_entry
from .pasting import run_enumeration, column_layout
from .polytopes import PATTERNS, compute_data

INF_MARK = diagrams.INF_MARK

#: rational probe values for a weight-7 unknown y, inside (1.8, 2)
Y_GRID = (Fraction(181, 100), Fraction(37, 20), Fraction(19, 10),
          Fraction(39, 20), Fraction(199, 100))
def pattern_seilper(pattern: str) -> np.ndarray:
    """SEILper vectors of the pattern over all C(p,2) pair columns in
    lexicographic order, INF_MARK at the pattern's disjoint pair."""
    Q = PATTERNS[pattern]()
    data = compute_data(Q)
    layout = column_layout(Q, data)
    rows = run_enumeration(Q, data, approach="direct",
                           use_filters=True, use_l5=True)
    p = Q.num_facets
    all_pairs = list(itertools.combinations(range(1, p + 1), 2))
    full = np.full((rows.shape[0], len(all_pairs)), INF_MARK, dtype=np.uint8)
    idx = layout.index
    for k, pair in enumerate(all_pairs):
        if pair in idx:
            full[:, k] = rows[:, idx[pair]]
    return full


def _gram_exact(vec, rank, x_val=None, y_vals=None):
    """Gram matrix over Q235 for a full pattern vector with rational
    values substituted for the x and the y unknowns (in column order)."""
    M = [[Q235.one() if i == j else Q235.zero() for j in range(rank)]
         for i in range(rank)]
    ys = iter(y_vals or ())
    for k, (i, j) in enumerate(itertools.combinations(range(rank), 2)):
        w = int(vec[k])
        if w == INF_MARK:
            e = Q235.from_rational(x_val)
        elif w == 7:
            e = Q235.from_rational(-Fraction(next(ys)) / 2)
        else:
            e = gram_entry(w)
        M[i][j] = M[j][i] = e
    return M


def _det_quadratic(vec, rank, y_vals):
    """Coefficients (A, B, C) of det(M(x)) = A x^2 + B x + C."""
    d0 = linalg.det(_gram_exact(vec, rank, Fraction(0), y_vals))
    d1 = linalg.det(_gram_exact(vec, rank, Fraction(1), y_vals))
    dm1 = linalg.det(_gram_exact(vec, rank, Fraction(-1), y_vals))
    two = Q235.from_rational(2)
    A = (d1 + dm1) / two - d0
    B = (d1 - dm1) / two
    return A, B, d0


def _exists_negative_on_ray(A, B, C):
    """Whether A x^2 + B x + C < 0 for some x < -1 (exact)."""
    q_m1 = A - B + C
    sA, sB = A.sign(), B.sign()
    if sA < 0:
        return True
    if sA == 0:
        if sB > 0:
            return True
        if sB == 0:
            return C.sign() < 0
        return q_m1.sign() < 0
    if q_m1.sign() < 0:
        return True
    # A > 0 and q(-1) >= 0: need both real roots strictly left of -1
    disc = B * B - 4 * A * C
    vertex_left = (B - 2 * A).sign() > 0          # -B/(2A) < -1
    return disc.sign() > 0 and vertex_left


def _sum_leading_minors(M):
    """Sum of the principal (n-1) x (n-1) minors (the elementary
    symmetric function e_{n-1} of the eigenvalues)."""
    n = len(M)
    s = None
    for drop in range(n):
        idx = [i for i in range(n) if i != drop]
        m = linalg.det(linalg.submatrix(M, idx))
        s = m if s is None else s + m
    return s


def _enm1_quadratic(vec, rank, y_vals):
    """Coefficients (E2, E1, E0) of e_{n-1}(M(x)) as a quadratic in x."""
    e0 = _sum_leading_minors(_gram_exact(vec, rank, Fraction(0), y_vals))
    e1 = _sum_leading_minors(_gram_exact(vec, rank, Fraction(1), y_vals))
    em1 = _sum_leading_minors(_gram_exact(vec, rank, Fraction(-1), y_vals))
    two = Q235.from_rational(2)
    return (e1 + em1) / two - e0, (e1 - em1) / two, e0


def _sign_comb(u, v, D):
    """Exact sign of u + v*sqrt(D) for D > 0."""
    su, sv = u.sign(), v.sign()
    if sv == 0:
        return su
    if su == 0 or su == sv:
        return sv
    return su * (u * u - v * v * D).sign()


def _degenerate_on_ray(vec, rank, y_vals, A, B, C):
    """Whether det(M(x)) = 0 at some x < -1 with exactly one negative
    and one zero eigenvalue.

    Vertex ellipticity guarantees at least n-2 positive eigenvalues, so
    at a simple root of the determinant the inertia is (n-2, 1, 1) iff
    e_{n-1} < 0 there; e_{n-1} = 0 would mean corank >= 2 instead.
    """
    E2, E1, E0 = _enm1_quadratic(vec, rank, y_vals)

    def e_at(r):
        return ((E2 * r + E1) * r + E0).sign() < 0

    sA = A.sign()
    if sA == 0:
        if B.is_zero():
            if not C.is_zero():
                return False
            # det identically zero: corank stays 1 where e_{n-1} < 0
            return _exists_negative_on_ray(E2, E1, E0)
        r = -C / B
        return (r + 1).sign() < 0 and e_at(r)
    disc = B * B - 4 * A * C
    sd = disc.sign()
    if sd < 0:
        return False
    if sd == 0:
        r = -B / (2 * A)
        return (r + 1).sign() < 0 and e_at(r)
    twoA = 2 * A
    s2A = twoA.sign()
    # reduce e_{n-1} modulo the root's quadratic: E(r) = alpha*r + beta
    alpha = E1 - E2 * B / A
    beta = E0 - E2 * C / A
    for sigma in (1, -1):
        sig_v = Q235.from_rational(sigma)
        # r + 1 = ((2A - B) + sigma*sqrt(disc)) / (2A)
        s_r1 = _sign_comb(twoA - B, sig_v, disc) * s2A
        if s_r1 >= 0:
            continue
        # E(r) = ((2A*beta - alpha*B) + sigma*alpha*sqrt(disc)) / (2A)
        s_e = _sign_comb(twoA * beta - alpha * B, sig_v * alpha, disc) * s2A
        if s_e < 0:
            return True
    return False


#: the y box (9/5, 2), shifted so that t = y - 9/5 runs over (0, 1/5)
_Y_LO = Fraction(9, 5)
_Y_WIDTH = Fraction(1, 5)


def _det_poly_in_y(vec, rank, ys):
    """Exact monomial coefficients of det(M(y_1..y_k)) as a dict
    exponent-tuple -> Q235.  Each y sits in a single symmetric pair, so
    the determinant has degree at most 2 in every variable; the
    coefficients come from tensor-product interpolation on {0, 1, -1}."""
    two = Q235.from_rational(2)
    vals = {}
    for point in itertools.product((0, 1, -1), repeat=len(ys)):
        vals[point] = linalg.det(
            _gram_exact(vec, rank, None, [Fraction(p) for p in point]))
    # axis by axis, turn the sample index (0, 1, -1) into an exponent
    for axis in range(len(ys)):
        nxt = {}
        for key in vals:
            if key[axis] != 0:
                continue
            pick = list(key)
            f0 = vals[key]
            pick[axis] = 1
            f1 = vals[tuple(pick)]
            pick[axis] = -1
            fm = vals[tuple(pick)]
            coeffs = (f0, (f1 - fm) / two, (f1 + fm) / two - f0)
            for d, c in enumerate(coeffs):
                pick[axis] = d
                nxt[tuple(pick)] = c
        vals = nxt
    return vals


def _shift_poly(coeffs, shift):
    """Substitute y_i = shift + t_i in a multiquadratic, exactly."""
    s = Q235.from_rational(shift)
    out = dict(coeffs)
    naxes = len(next(iter(coeffs))) if coeffs else 0
    for axis in range(naxes):
        nxt = {}
        for e, c in out.items():
            d = e[axis]
            # (s + t)^d expanded by binomials, d <= 2
            if d == 0:
                terms = ((0, c),)
            elif d == 1:
                terms = ((0, c * s), (1, c))
            else:
                cs = c * s
                terms = ((0, cs * s), (1, cs + cs), (2, c))
            for dd, cc in terms:
                key = e[:axis] + (dd,) + e[axis + 1:]
                nxt[key] = nxt[key] + cc if key in nxt else cc
        out = nxt
    return out


def _box_lower_bound(coeffs, bounds):
    """Exact lower bound of the polynomial on a product of nonnegative
    intervals, taking each monomial at its own worst corner."""
    cache = [{d: (Q235.from_rational(lo ** d), Q235.from_rational(hi ** d))
              for d in (1, 2)} for lo, hi in bounds]
    bound = Q235.zero()
    for e, c in coeffs.items():
        w = c
        neg = c.sign() < 0
        for axis, d in enumerate(e):
            if d:
                lo_p, hi_p = cache[axis][d]
                w = w * (hi_p if neg else lo_p)
        bound = bound + w
    return bound


def _positive_on_box(coeffs, bounds, depth=0):
    """Certify the multiquadratic is strictly positive on the box by
    corner bounds plus dyadic subdivision along one axis per level."""
    if _box_lower_bound(coeffs, bounds).sign() > 0:
        return True
    if depth >= 6 * len(bounds):
        return False
    axis = max(range(len(bounds)),
               key=lambda a: bounds[a][1] - bounds[a][0])
    lo, hi = bounds[axis]
    mid = (lo + hi) / 2
    left = list(bounds)
    right = list(bounds)
    left[axis] = (lo, mid)
    right[axis] = (mid, hi)
    return (_positive_on_box(coeffs, left, depth + 1)
            and _positive_on_box(coeffs, right, depth + 1))


def _full_witness(vec, rank, ys):
    """Rational y assignment, strictly inside the box, with exact Gram
    signature (rank-1, 1, 0); None when the float search finds nothing."""
    import scipy.optimize

    pairs = list(itertools.combinations(range(rank), 2))
    base = np.eye(rank)
    for k, (i, j) in enumerate(pairs):
        if int(vec[k]) != 7:
            base[i, j] = base[j, i] = float(gram_entry(int(vec[k])))

    def det_at(yv):
        M = base.copy()
        for k, y in zip(ys, yv):
            i, j = pairs[k]
            M[i, j] = M[j, i] = -y / 2
        return np.linalg.det(M)

    grid = np.linspace(1.8005, 1.9995, 6)
    starts = list(itertools.product(grid, repeat=len(ys)))
    if len(starts) > 200:
        rng = np.random.default_rng(0)
        starts = [tuple(rng.uniform(1.8005, 1.9995, len(ys)))
                  for _ in range(200)]
    target = (rank - 1, 1, 0)
    seen = set()
    for p in starts:
        res = scipy.optimize.minimize(
            det_at, p, bounds=[(1.8001, 1.9999)] * len(ys),
            method="L-BFGS-B")
        if res.fun > -1e-12:
            continue
        cand = tuple(Fraction(float(y)).limit_denominator(10**6)
                     for y in res.x)
        if cand in seen:
            continue
        seen.add(cand)
        M = _gram_exact(vec, rank, None, cand)
        sig = linalg.inertia(M)
        if (sig.pos, sig.neg, sig.zero) == target:
            return cand
    return None


def admissible_kinds(vec, pattern: str) -> set:
    """Subset of {"full", "degenerate"}: which Lorentzian signatures
    some admissible assignment of the unknowns realizes.

    full = (rank-1, 1); degenerate = (rank-2, 1) with corank 1.  For
    the dotted-free pattern the full test is exact in both directions:
    a rational witness certifies yes (det < 0 forces one negative
    eigenvalue next to the guaranteed rank-1 positive block), and a
    subdivision bound certifies det > 0 over the whole closed y box for
    no.  Degenerate detection there solves the determinant along one y
    axis at a time, which covers every class this pipeline reports.
    """
    Q = PATTERNS[pattern]()
    rank = Q.num_facets
    n_x = sum(1 for w in vec if w == INF_MARK)
    ys = [k for k, w in enumerate(vec) if w == 7]
    target_full = (rank - 1, 1, 0)
    target_deg = (rank - 2, 1, 1)
    kinds = set()
    if n_x == 0:
        if not ys:
            sig = linalg.inertia(_gram_exact(vec, rank))
            t = (sig.pos, sig.neg, sig.zero)
            if t == target_full:
                kinds.add("full")
            elif t == target_deg:
                kinds.add("degenerate")
            return kinds
        if _full_witness(vec, rank, ys) is not None:
            kinds.add("full")
        else:
            poly = _shift_poly(_det_poly_in_y(vec, rank, ys), _Y_LO)
            box = [(Fraction(0), _Y_WIDTH)] * len(ys)
            if not _positive_on_box(poly, box):
                raise ArithmeticError(
                    "signature undecided on the y box")
        for axis, fixed in _axis_root_candidates(vec, rank, ys):
            assign = list(fixed)
            assign.insert(axis, None)
            if _degenerate_on_y_axis(vec, rank, ys, axis, assign):
                kinds.add("degenerate")
                break
        return kinds
    if n_x != 1:
        raise ValueError("patterns carry at most one dotted pair")
    for assign in itertools.product(Y_GRID, repeat=len(ys)):
        A, B, C = _det_quadratic(vec, rank, assign)
        if "full" not in kinds and _exists_negative_on_ray(A, B, C):
            kinds.add("full")
        if "degenerate" not in kinds and _degenerate_on_ray(
                vec, rank, assign, A, B, C):
            kinds.add("degenerate")
        if len(kinds) == 2:
            break
    return kinds


def _axis_root_candidates(vec, rank, ys):
    """Float prescreen for the degenerate search: (axis, fixed-grid)
    combinations whose determinant quadratic along the axis has a root
    inside the y interval with e_{n-1} negative there."""
    pairs = list(itertools.combinations(range(rank), 2))
    base = np.eye(rank)
    for k, (i, j) in enumerate(pairs):
        if int(vec[k]) != 7:
            base[i, j] = base[j, i] = float(gram_entry(int(vec[k])))
    out = []
    for axis in range(len(ys)):
        fixed_grids = list(itertools.product(Y_GRID, repeat=len(ys) - 1))
        mats = np.empty((len(fixed_grids), 3, rank, rank))
        for n, fixed in enumerate(fixed_grids):
            M = base.copy()
            for k, y in zip((k for a, k in enumerate(ys) if a != axis),
                            fixed):
                i, j = pairs[k]
                M[i, j] = M[j, i] = -float(y) / 2
            i, j = pairs[ys[axis]]
            for t_idx, t in enumerate((0.0, 1.0, -1.0)):
                Mt = M.copy()
                Mt[i, j] = Mt[j, i] = -t / 2
                mats[n, t_idx] = Mt
        dets = np.linalg.det(mats.reshape(-1, rank, rank)).reshape(-1, 3)
        A = (dets[:, 1] + dets[:, 2]) / 2 - dets[:, 0]
        B = (dets[:, 1] - dets[:, 2]) / 2
        C = dets[:, 0]
        disc = B * B - 4 * A * C
        for n, fixed in enumerate(fixed_grids):
            roots = []
            if abs(A[n]) < 1e-12:
                if abs(B[n]) > 1e-12:
                    roots = [-C[n] / B[n]]
            elif disc[n] >= 0:
                sq = np.sqrt(disc[n])
                roots = [(-B[n] - sq) / (2 * A[n]),
                         (-B[n] + sq) / (2 * A[n])]
            for r in roots:
                if 1.8 - 1e-9 < r < 2 + 1e-9:
                    out.append((axis, fixed))
                    break
    return out


def _degenerate_on_y_axis(vec, rank, ys, axis, assign):
    """Whether det = 0 with e_{n-1} < 0 happens for the axis variable
    strictly inside the y interval, the other y entries held at the
    rational values in assign (None marks the axis slot)."""
    def m_at(t):
        vals = [t if v is None else v for v in assign]
        return _gram_exact(vec, rank, None, vals)

    two = Q235.from_rational(2)
    d = {t: linalg.det(m_at(Fraction(t))) for t in (0, 1, -1)}
    e = {t: _sum_leading_minors(m_at(Fraction(t))) for t in (0, 1, -1)}
    A = (d[1] + d[-1]) / two - d[0]
    B = (d[1] - d[-1]) / two
    C = d[0]
    E2 = (e[1] + e[-1]) / two - e[0]
    E1 = (e[1] - e[-1]) / two
    E0 = e[0]
    lo = Q235.from_rational(_Y_LO)
    hi = Q235.from_rational(2)

    def inside(r):
        return (r - lo).sign() > 0 and (hi - r).sign() > 0

    def e_neg(r):
        return ((E2 * r + E1) * r + E0).sign() < 0

    sA = A.sign()
    if sA == 0:
        if B.is_zero():
            return False
        r = -C / B
        return inside(r) and e_neg(r)
    disc = B * B - 4 * A * C
    sd = disc.sign()
    if sd < 0:
        return False
    if sd == 0:
        r = -B / (2 * A)
        return inside(r) and e_neg(r)
    twoA = 2 * A
    s2A = twoA.sign()
    alpha = E1 - E2 * B / A
    beta = E0 - E2 * C / A
    for sigma in (1, -1):
        sig_v = Q235.from_rational(sigma)
        # r - lo and hi - r, both with r = (-B + sigma sqrt(disc)) / (2A)
        s_lo = _sign_comb(-B - twoA * lo, sig_v, disc) * s2A
        s_hi = _sign_comb(twoA * hi + B, -sig_v, disc) * s2A
        if s_lo > 0 and s_hi > 0:
            s_e = _sign_comb(twoA * beta - alpha * B,
                             sig_v * alpha, disc) * s2A
            if s_e < 0:
                return True
    return False


@dataclass
class FuchsianSet:
    pattern: str
    seilper: np.ndarray        # all SEILper vectors (full columns)
    admissible: np.ndarray     # subset reaching the full signature
    n_full: int
    n_degenerate: int
    n_published: int           # class count as conventionally tabulated
    n_permuted: int            # distinct vectors under the pattern's
                               # own combinatorial symmetries
    expanded: np.ndarray       # sorted packed uint64 keys, closed under
                               # every node relabeling (filter table)


def _pack16(rows: np.ndarray) -> np.ndarray:
    acc = np.zeros(rows.shape[0], dtype=np.uint64)
    for c in range(rows.shape[1]):
        acc = (acc << np.uint64(4)) | rows[:, c].astype(np.uint64)
    return acc


def _pattern_column_maps(pattern: str) -> np.ndarray:
    """Pair-column index maps of the pattern's combinatorial symmetry
    group (not all of S_n)."""
    Q = PATTERNS[pattern]()
    data = compute_data(Q)
    p = Q.num_facets
    all_pairs = list(itertools.combinations(range(1, p + 1), 2))
    pos = {pair: i for i, pair in enumerate(all_pairs)}
    return np.array([[pos[tuple(sorted((g[i - 1], g[j - 1])))]
                      for (i, j) in all_pairs] for g in data.symmetry])


def build_fuchsian_set(pattern: str) -> FuchsianSet:
    """Classify every SEILper vector of the pattern.

    The kept set is the one the downstream filter needs: vectors whose
    unknowns can reach the nondegenerate Lorentzian signature.
    n_permuted counts its closure under the pattern's own symmetries,
    matching the published "distinct Coxeter vectors" line, while the
    filter table closes under all of S_n because an embedding fixes the
    pattern only up to relabeling.  n_published reproduces the
    conventional class tally, which for the dotted-free pattern counted
    only the classes with a single weight-7 unknown.
    """
    rows = pattern_seilper(pattern)
    rank = PATTERNS[pattern]().num_facets
    has_dotted = bool((rows == INF_MARK).any())
    keep, nf, nd, npub = [], 0, 0, 0
    for vec in rows:
        v = tuple(int(w) for w in vec)
        kinds = admissible_kinds(v, pattern)
        if "full" in kinds:
            keep.append(vec)
            nf += 1
            if has_dotted or sum(1 for w in v if w == 7) == 1:
                npub += 1
        nd += "degenerate" in kinds
    adm = (np.asarray(keep, dtype=np.uint8) if keep
           else np.zeros((0, rows.shape[1]), dtype=np.uint8))
    pat_maps = _pattern_column_maps(pattern)
    n_perm = np.unique(adm[:, pat_maps].reshape(-1, rows.shape[1]),
                       axis=0).shape[0] if keep else 0
    maps = diagrams.perm_column_maps(rank)
    exp = np.unique(adm[:, maps].reshape(-1, rows.shape[1]), axis=0) \
        if keep else adm
    return FuchsianSet(pattern, rows, adm, nf, nd, npub, n_perm,
                       np.sort(_pack16(exp)))


def build_fuchsian_sets() -> dict:
    return {name: build_fuchsian_set(name) for name in ("P3", "P4", "D4")}


def apply_intersection_filter(rows: np.ndarray, data, layout,
                              embeddings: dict, sets: dict) -> np.ndarray:
    """Keep rows whose restriction to every embedded pattern lies in
    that pattern's admissible (perm-closed) vector set."""
    for pattern, places in embeddings.items():
        table = sets[pattern].expanded
        for A in places:
            key = np.zeros(rows.shape[0], dtype=np.uint64)
            for pair in itertools.combinations(sorted(A), 2):
                if frozenset(pair) in data.disjoint_pairs:
                    col = np.full(rows.shape[0], INF_MARK, dtype=np.uint64)
                else:
                    col = rows[:, layout.index[pair]].astype(np.uint64)
                key = (key << np.uint64(4)) | col
            pos = np.searchsorted(table, key)
            pos[pos == table.shape[0]] = 0
            rows = rows[table[pos] == key]
    return rows
