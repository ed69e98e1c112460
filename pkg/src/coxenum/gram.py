"""Gram matrices from determined Coxeter vectors: solve and certify.

A determined vector fixes every angle entry of the Gram matrix; disjoint
pairs become dotted unknowns x < -1 and weight-7 marks become unknowns
-y/2 with 1.8 < y < 2.  Signature (d, 1) forces rank d + 1, imposed as
the vanishing of all principal minors of size d + 2.  Real solutions in
the constraint box are located by bounded least-squares polishing of
screened seed grids, refined by a high-precision Newton step on a
well-conditioned square subsystem, and certified by a Krawczyk interval
test.  A certified
solution then has to pass the polytope conditions: inertia (d, 1),
positive definite vertex submatrices, no parabolic subdiagram, and an
integer angle resolution pi/arccos(y/2) >= 7 for every y.

Dotted values are reconstructed in closed form when they satisfy a
polynomial of degree <= 4 over Q(sqrt5); a full set of closed forms can
be re-checked exactly in a tower of square-root extensions.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import sympy

from . import linalg
from .field import Q235, SQRT5, ExtElement, gram_entry, make_sqrt_extension

X_MAX = 500.0            # search bound for cosh of dotted lengths
X_BOUNDARY = 1.0 + 1e-4  # dotted entries stay strictly below -1
Y_LO, Y_HI = 1.8, 2.0    # open box for the weight-7 unknowns


class SolverTimeout(RuntimeError):
    """A matrix exceeded its solving budget; it must be reported as
    undecided, never dropped."""


class Undecided(RuntimeError):
    """Certification could not be completed at maximum precision."""


# ---------------------------------------------------------------------------
# symbolic matrices and minor systems


@dataclasses.dataclass(frozen=True)
class SymbolicGram:
    """Gram matrix with numeric entries for weights 2..6 and two kinds of
    unknowns: dotted x at disjoint pairs, -y/2 at weight-7 pairs.

    Unknown order is dotted first (sorted pairs), then sevens."""

    size: int
    weights: tuple            # ((i, j, w), ...) 1-based, angle weights 2..7
    dotted: tuple             # 0-based (i, j), unknowns x < -1
    sevens: tuple             # 0-based (i, j), unknowns -y/2
    base: np.ndarray          # float matrix, unknown entries left 0
    vertices: tuple = ()      # 0-based frozensets, elliptic vertex supports

    @property
    def n_unknowns(self):
        return len(self.dotted) + len(self.sevens)

    def fill(self, values):
        """Float matrix at an assignment (x..., y...)."""
        M = self.base.copy()
        nx = len(self.dotted)
        for k, (i, j) in enumerate(self.dotted):
            M[i, j] = M[j, i] = values[k]
        for k, (i, j) in enumerate(self.sevens):
            M[i, j] = M[j, i] = -values[nx + k] / 2
        return M

    def weight_of(self, i, j):
        """1-based lookup of the angle weight, None for dotted pairs."""
        key = (min(i, j), max(i, j))
        for a, b, w in self.weights:
            if (a, b) == key:
                return w
        return None


def symbolize(vector, layout, data):
    """SymbolicGram of a fully determined Coxeter vector in the given
    column layout; disjoint pairs of `data` become the dotted slots."""
    m = layout.m
    base = np.eye(m)
    weights, sevens = [], []
    for pair in layout.columns:
        w = int(vector[layout.index[pair]])
        if not 2 <= w <= 7:
            raise ValueError(f"weight {w} at pair {pair} outside 2..7")
        weights.append((pair[0], pair[1], w))
        i, j = pair[0] - 1, pair[1] - 1
        if w == 7:
            sevens.append((i, j))
        else:
            base[i, j] = base[j, i] = float(gram_entry(w).approx(120))
    dotted = tuple((a - 1, b - 1) for a, b in
                   sorted(tuple(sorted(p)) for p in data.disjoint_pairs))
    verts = tuple(frozenset(f - 1 for f in v) for v in data.vertices) \
        if hasattr(data, "vertices") else ()
    return SymbolicGram(m, tuple(weights), dotted, tuple(sevens), base, verts)


@dataclasses.dataclass
class MinorSystem:
    """Vanishing of all principal minors of size dim + 2, each scaled by
    2, plus the box constraints on the unknowns."""

    gram: SymbolicGram
    dim: int
    keep: np.ndarray          # (n_minors, dim + 2) principal index sets
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        k = self.keep
        w = k.shape[1]
        self._ix0 = k[:, :, None].repeat(w, 2)
        self._ix1 = k[:, None, :].repeat(w, 1)

    @property
    def n_unknowns(self):
        return self.gram.n_unknowns

    def residuals(self, pts):
        """(N, n_minors) array of 2 det(M_S) over a batch of points."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        g = self.gram
        M = np.broadcast_to(g.base, (pts.shape[0], g.size, g.size)).copy()
        nx = len(g.dotted)
        for k, (i, j) in enumerate(g.dotted):
            M[:, i, j] = M[:, j, i] = pts[:, k]
        for k, (i, j) in enumerate(g.sevens):
            M[:, i, j] = M[:, j, i] = -pts[:, nx + k] / 2
        return 2.0 * np.linalg.det(M[:, self._ix0, self._ix1])


def rank_conditions(sym: SymbolicGram, dim: int = 5) -> MinorSystem:
    """Minor system forcing rank <= dim + 1 on a size >= dim + 2 matrix."""
    order = dim + 2
    if sym.size < order:
        raise ValueError("matrix smaller than the required minor order")
    keep = np.array(list(itertools.combinations(range(sym.size), order)))
    nx, ny = len(sym.dotted), len(sym.sevens)
    lower = np.array([-X_MAX] * nx + [Y_LO] * ny)
    upper = np.array([-X_BOUNDARY] * nx + [Y_HI] * ny)
    return MinorSystem(sym, dim, keep, lower, upper)


# ---------------------------------------------------------------------------
# numeric search


def _seed_points(system, rng, budget=200_000):
    nx = len(system.gram.dotted)
    ny = len(system.gram.sevens)
    gx = -np.concatenate([np.linspace(1.02, 3.0, 8),
                          np.geomspace(3.5, X_MAX, 12)])
    gy = np.array([1.82, 1.9, 1.98])
    if len(gx) ** nx * len(gy) ** ny <= budget:
        return np.array(list(itertools.product(*([gx] * nx + [gy] * ny))))
    pts = np.empty((budget, nx + ny))
    pts[:, :nx] = -np.exp(rng.uniform(math.log(1.02), math.log(X_MAX),
                                      (budget, nx)))
    pts[:, nx:] = rng.uniform(Y_LO, Y_HI, (budget, ny))
    return pts


def _fd_jacobian(system, X, R):
    N, n = X.shape
    J = np.empty((N, R.shape[1], n))
    for k in range(n):
        h = 1e-7 * np.maximum(1.0, np.abs(X[:, k]))
        Xk = X.copy()
        Xk[:, k] += h
        J[:, :, k] = (system.residuals(Xk) - R) / h[:, None]
    return J


def _residual_scale(system, X):
    """Per-point tolerance scale: minors grow like the cube of the
    largest entry, so absolute float accuracy degrades with it."""
    mx = np.maximum(1.0, np.abs(X).max(axis=-1))
    return mx ** 3


@dataclasses.dataclass
class Solution:
    """One admissible root of a minor system."""

    values: np.ndarray            # float (x..., y...)
    refined: tuple                # decimal strings, high precision
    residual_bound: float         # max |minor| over the enclosure
    enclosure_radius: float
    certified_unique: bool        # Krawczyk contraction succeeded


def solve_system(system: MinorSystem, timeout: float = 30.0,
                 rng_seed: int = 0):
    """All roots of the minor system inside the open constraint box.

    Raises SolverTimeout when the budget is exhausted; the caller must
    record the matrix as undecided."""
    deadline = time.monotonic() + timeout
    n = system.n_unknowns
    if n == 0:
        r = np.abs(system.residuals(np.zeros((1, 0)))).max()
        if r < 1e-9:
            return [Solution(np.zeros(0), (), r, 0.0, True)]
        return []
    from scipy.optimize import least_squares
    rng = np.random.default_rng(rng_seed)
    seeds = _seed_points(system, rng)
    score = np.empty(seeds.shape[0])
    for a in range(0, seeds.shape[0], 50_000):
        sl = seeds[a:a + 50_000]
        score[a:a + 50_000] = np.abs(
            system.residuals(sl)).max(1) / _residual_scale(system, sl)
    # best-scoring seeds per magnitude stratum: minors grow like the
    # cube of the largest entry, so one global ranking drowns the basins
    # at large dotted values and pure top-k piles into a single basin
    mags = np.log(np.maximum(1.0001, np.abs(seeds).max(axis=1)))
    nbins = 8
    strata = np.minimum((mags / math.log(X_MAX) * nbins).astype(int),
                        nbins - 1)
    pick = []
    for b in range(nbins):
        idx = np.nonzero(strata == b)[0]
        if idx.size:
            pick += list(idx[np.argsort(score[idx])[:60]])
    if seeds.shape[0] > len(pick):
        pick += list(rng.choice(seeds.shape[0], size=min(
            80, seeds.shape[0] - len(pick)), replace=False))

    def F(p):
        return system.residuals(p[None, :])[0]

    raw = []
    since_new = 0
    for i, idx in enumerate(pick):
        if time.monotonic() > deadline:
            raise SolverTimeout("solve budget exhausted during search")
        if i >= 300 and since_new >= 250:
            break
        r = least_squares(F, seeds[idx], bounds=(system.lower, system.upper),
                          xtol=3e-14, ftol=3e-14, gtol=3e-14, max_nfev=400)
        good = np.abs(r.fun).max() < 1e-6 * _residual_scale(system, r.x)
        if good and not any(np.allclose(r.x, q, rtol=1e-5, atol=1e-5)
                            for q in raw):
            raw.append(r.x)
            since_new = 0
        else:
            since_new += 1
    sols = []
    for x in raw:
        if time.monotonic() > deadline:
            raise SolverTimeout("solve budget exhausted during refinement")
        sol = _certify_root(system, x)
        if sol is None:
            continue
        if not any(np.allclose(sol.values, s.values, rtol=1e-9, atol=1e-9)
                   for s in sols):
            sols.append(sol)
    sols.sort(key=lambda s: tuple(s.values))
    return sols


# ---------------------------------------------------------------------------
# high-precision refinement and interval certification


def _square_rows(system, x):
    """Indices of n minors whose gradients are maximally independent at
    x, by QR column pivoting on the transposed jacobian."""
    import scipy.linalg
    R0 = system.residuals(x[None, :])
    J = _fd_jacobian(system, x[None, :], R0)[0]      # (m, n)
    _, _, piv = scipy.linalg.qr(J.T, pivoting=True)
    return sorted(piv[:system.n_unknowns])


def _mp_entry(w):
    """High-precision value of an angle entry of weight w (2..6)."""
    return -mpmath.cospi(mpmath.mpf(1) / w)


def _mp_matrix(system, vals):
    g = system.gram
    M = mpmath.zeros(g.size)
    for i in range(g.size):
        M[i, i] = mpmath.mpf(1)
    for a, b, w in g.weights:
        if w != 7:
            M[a - 1, b - 1] = M[b - 1, a - 1] = _mp_entry(w)
    nx = len(g.dotted)
    for k, (i, j) in enumerate(g.dotted):
        M[i, j] = M[j, i] = vals[k]
    for k, (i, j) in enumerate(g.sevens):
        M[i, j] = M[j, i] = -vals[nx + k] / 2
    return M


def _mp_minor(M, rows):
    sub = mpmath.matrix(len(rows))
    for a, i in enumerate(rows):
        for b, j in enumerate(rows):
            sub[a, b] = M[i, j]
    return 2 * mpmath.det(sub)


def _mp_newton(system, x, rows, dps):
    """Newton iteration on the square subsystem at `dps` digits."""
    with mpmath.workdps(dps):
        n = system.n_unknowns
        vals = [mpmath.mpf(float(v)) for v in x]
        sets = [system.keep[r] for r in rows]
        h0 = mpmath.mpf(10) ** (-dps // 2)
        for _ in range(60):
            M = _mp_matrix(system, vals)
            F = mpmath.matrix([_mp_minor(M, s) for s in sets])
            J = mpmath.zeros(n)
            for k in range(n):
                step = h0 * max(1, abs(vals[k]))
                vk = list(vals)
                vk[k] += step
                Mk = _mp_matrix(system, vk)
                for r, s in enumerate(sets):
                    J[r, k] = (_mp_minor(Mk, s) - F[r]) / step
            try:
                dx = mpmath.lu_solve(J, -F)
            except ZeroDivisionError:
                return None
            for k in range(n):
                vals[k] += dx[k]
            if max(abs(d) for d in dx) < mpmath.mpf(10) ** (-dps + 12):
                break
        else:
            return None
        return vals


def _iv_det(rows):
    """Interval determinant by Gaussian elimination with midpoint
    pivoting; raises Undecided when a pivot interval straddles zero."""
    n = len(rows)
    A = [list(r) for r in rows]
    detv = mpmath.iv.mpf(1)
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(mpmath.mpf(A[r][c].mid)))
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            detv = -detv
        p = A[c][c]
        detv *= p
        if c == n - 1:
            break
        if 0 in p:
            # only division pivots must exclude zero; a singular matrix
            # legitimately ends with a zero-straddling final pivot
            raise Undecided("interval pivot straddles zero")
        for r in range(c + 1, n):
            f = A[r][c] / p
            for cc in range(c + 1, n):
                A[r][cc] -= f * A[c][cc]
    return detv


def _iv_matrix(system, box):
    g = system.gram
    one = mpmath.iv.mpf(1)
    M = [[one * 0 for _ in range(g.size)] for _ in range(g.size)]
    for i in range(g.size):
        M[i][i] = one
    for a, b, w in g.weights:
        if w != 7:
            v = -mpmath.iv.cos(mpmath.iv.pi / w)
            M[a - 1][b - 1] = M[b - 1][a - 1] = v
    nx = len(g.dotted)
    for k, (i, j) in enumerate(g.dotted):
        M[i][j] = M[j][i] = box[k]
    for k, (i, j) in enumerate(g.sevens):
        M[i][j] = M[j][i] = -box[nx + k] / 2
    return M


def _iv_det_expand(rows):
    """Division-free interval determinant (Laplace over column subsets);
    fallback when elimination meets a zero-straddling pivot."""
    n = len(rows)
    prev = {frozenset(): mpmath.iv.mpf(1)}
    for r in range(n):
        cur = {}
        for cols, val in prev.items():
            free = [c for c in range(n) if c not in cols]
            for i, c in enumerate(free):
                term = rows[r][c] * val * ((-1) ** i)
                key = cols | {c}
                cur[key] = cur[key] + term if key in cur else term
        prev = cur
    return prev[frozenset(range(n))]


def _iv_minor(M, rows):
    sub = [[M[i][j] for j in rows] for i in rows]
    try:
        return 2 * _iv_det(sub)
    except Undecided:
        return 2 * _iv_det_expand(sub)


def _iv_cofactor_sum(M, rows, pos):
    """d det(M_rows)/d u for a symmetric unknown at matrix position pos
    (both (i,j) and (j,i)): 2 times the (i,j) cofactor."""
    i, j = pos
    ri, rj = rows.index(i), rows.index(j)
    keep_r = [r for r in rows if r != i]
    keep_c = [c for c in rows if c != j]
    sub = [[M[a][b] for b in keep_c] for a in keep_r]
    sign = (-1) ** (ri + rj)
    return 2 * sign * _iv_det(sub)


def _certify_root(system, x, dps=80):
    """Refine x and certify a unique root nearby by a Krawczyk step on a
    square subsystem; returns a Solution or None."""
    rows = _square_rows(system, x)
    vals = _mp_newton(system, x, rows, dps)
    if vals is None:
        return None
    with mpmath.workdps(dps):
        # strict box constraints
        nx = len(system.gram.dotted)
        for k, v in enumerate(vals):
            if k < nx:
                if not (-X_MAX < v < -1):
                    return None
            elif not (Y_LO < v < Y_HI):
                return None
        scale = max(1.0, max(abs(float(v)) for v in vals)) ** 3
        sets = [list(system.keep[r]) for r in rows]
        n = system.n_unknowns
        radius = mpmath.mpf(10) ** (-dps + 30) * max(
            1, max(abs(v) for v in vals))
        ok = False
        old_iv_dps = mpmath.iv.dps
        mpmath.iv.dps = dps
        try:
            for _ in range(3):
                box = [mpmath.iv.mpf([str(v - radius), str(v + radius)])
                       for v in vals]
                mid = [mpmath.iv.mpf(str(v)) for v in vals]
                try:
                    ok = _krawczyk_contracts(system, sets, vals, box, mid,
                                             radius, n, nx)
                except Undecided:
                    ok = False
                if ok:
                    break
                radius = radius * 1000
            if not ok:
                return None
            # residual bound of the remaining minors over the box
            box = [mpmath.iv.mpf([str(v - radius), str(v + radius)])
                   for v in vals]
            Mb = _iv_matrix(system, box)
            bound = mpmath.mpf(0)
            for r in range(system.keep.shape[0]):
                try:
                    mv = _iv_minor(Mb, list(system.keep[r]))
                except Undecided:
                    return None
                hi = max(abs(mpmath.mpf(mv.a)), abs(mpmath.mpf(mv.b)))
                if 0 not in mv and hi > mpmath.mpf(10) ** (-dps + 40) * scale:
                    return None     # not a root of the full system
                bound = max(bound, hi)
        finally:
            mpmath.iv.dps = old_iv_dps
        refined = tuple(mpmath.nstr(v, dps - 10) for v in vals)
        return Solution(np.array([float(v) for v in vals]), refined,
                        float(bound), float(radius), True)


def _krawczyk_contracts(system, sets, vals, box, mid, radius, n, nx):
    """K(X) = m - Y F(m) + (I - Y J(X)) (X - m) strictly inside X."""
    Mm = _iv_matrix(system, mid)
    Fm = [_iv_minor(Mm, s) for s in sets]
    Mb = _iv_matrix(system, box)
    J = [[None] * n for _ in range(n)]
    g = system.gram
    for r, s in enumerate(sets):
        for k in range(n):
            pos = g.dotted[k] if k < nx else g.sevens[k - nx]
            if pos[0] not in s or pos[1] not in s:
                J[r][k] = mpmath.iv.mpf(0)
                continue
            # F = 2 det, entry derivative is 2 cof; sevens carry -1/2
            c = _iv_cofactor_sum(Mb, s, pos)
            J[r][k] = 2 * c if k < nx else -c
    # midpoint inverse in plain mp arithmetic
    Jmid = mpmath.matrix(n)
    for r in range(n):
        for k in range(n):
            Jmid[r, k] = mpmath.mpf(J[r][k].mid)
    try:
        Y = Jmid ** -1
    except ZeroDivisionError:
        raise Undecided("singular midpoint jacobian")
    inside = True
    for i in range(n):
        acc = mpmath.iv.mpf(str(vals[i]))
        for r in range(n):
            acc -= mpmath.iv.mpf(str(Y[i, r])) * Fm[r]
        for k in range(n):
            e = mpmath.iv.mpf(1) if i == k else mpmath.iv.mpf(0)
            s = e
            for r in range(n):
                s -= mpmath.iv.mpf(str(Y[i, r])) * J[r][k]
            acc += s * (box[k] - mid[k])
        if not (mpmath.mpf(box[i].a) < mpmath.mpf(acc.a)
                and mpmath.mpf(acc.b) < mpmath.mpf(box[i].b)):
            inside = False
    return inside


# ---------------------------------------------------------------------------
# closed forms over Q(sqrt5) and exact re-verification


# radicands in Q235 coordinate (bitmask) order: bit0 = sqrt2, bit1 =
# sqrt3, bit2 = sqrt5
_Q235_BASIS = (1, 2, 3, 6, 5, 10, 15, 30)


def _q235_value(e, dps):
    """mpf value of a Q235 element at roughly dps digits."""
    fracs = e.as_fraction_coords()
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for f, r in zip(fracs, _Q235_BASIS):
            total += mpmath.mpf(f.numerator) / f.denominator * mpmath.sqrt(r)
        return total


def _fit_q235(v, dps):
    """Exact Q235 element equal to v, or None.

    The relation is fitted on v rounded to `dps` digits and accepted
    only if it still holds 10 digits beyond, so v must carry at least
    dps + 20 correct digits; spurious pslq relations fail the margin."""
    with mpmath.workdps(dps):
        basis = [mpmath.sqrt(r) for r in _Q235_BASIS] + [+v]
        rel = mpmath.pslq(basis, maxcoeff=10**9, maxsteps=20000)
    if rel is None or rel[-1] == 0:
        return None
    den = -Fraction(int(rel[-1]))
    cand = Q235([Fraction(int(c)) / den for c in rel[:-1]])
    with mpmath.workdps(dps + 30):
        err = abs(_q235_value(cand, dps + 30) - v)
        if err < mpmath.mpf(10) ** (-dps - 10) * max(1, abs(v)):
            return cand
    return None


def _fit_q5_quadratic(v, dps):
    """(p, q) in Q(sqrt5)^2 with v*v + p*v + q = 0, or None; same
    precision contract as _fit_q235."""
    with mpmath.workdps(dps):
        s5 = mpmath.sqrt(5)
        vt = +v
        basis = [mpmath.mpf(1), vt, vt * vt, s5, s5 * vt, s5 * vt * vt]
        rel = mpmath.pslq(basis, maxcoeff=10**9, maxsteps=20000)
    if rel is None:
        return None
    a0, a1, a2, b0, b1, b2 = (Fraction(int(c)) for c in rel)
    lead = Q235.from_rational(a2) + Q235.from_rational(b2) * SQRT5
    if lead.is_zero():
        return None
    p = (Q235.from_rational(a1) + Q235.from_rational(b1) * SQRT5) / lead
    q = (Q235.from_rational(a0) + Q235.from_rational(b0) * SQRT5) / lead
    with mpmath.workdps(dps + 30):
        err = abs(v * v + _q235_value(p, dps + 30) * v
                  + _q235_value(q, dps + 30))
        if err < mpmath.mpf(10) ** (-dps - 10) * max(1, abs(v)) ** 2:
            return p, q
    return None


@dataclasses.dataclass(frozen=True)
class ClosedForm:
    """Structured radical form of one solved value.

    kind "element": value in Q235 (field `p` holds it).
    kind "sqrt":    value = sign * sqrt(p), p in Q235.
    kind "quadratic": value = (-p + sign * sqrt(disc)) / 2 over Q235.
    kind "biquadratic": value = sign * sqrt(w),
                        w = (-p + inner_sign * sqrt(disc)) / 2.
    """

    kind: str
    p: Q235
    disc: Q235 = None
    sign: int = 1
    inner_sign: int = 1

    def numeric(self, dps=60):
        with mpmath.workdps(dps):
            if self.kind == "element":
                return _q235_value(self.p, dps)
            if self.kind == "sqrt":
                return self.sign * mpmath.sqrt(_q235_value(self.p, dps))
            d = mpmath.sqrt(_q235_value(self.disc, dps))
            w = (-_q235_value(self.p, dps) + self.inner_sign * d) / 2
            if self.kind == "quadratic":
                return w
            return self.sign * mpmath.sqrt(w)

    def sympy_expr(self):
        def q(e):
            fr = e.as_fraction_coords()
            return sum(sympy.Rational(f) * sympy.sqrt(r)
                       for f, r in zip(fr, _Q235_BASIS))
        if self.kind == "element":
            return sympy.nsimplify(q(self.p))
        if self.kind == "sqrt":
            return self.sign * sympy.sqrt(sympy.nsimplify(q(self.p)))
        w = (-q(self.p) + self.inner_sign * sympy.sqrt(q(self.disc))) / 2
        w = sympy.nsimplify(w)
        if self.kind == "quadratic":
            return w
        return self.sign * sympy.sqrt(w)


def fit_closed_form(value, dps=45):
    """Closed form of a high-precision value over Q(sqrt2, sqrt3, sqrt5)
    and one or two square roots, or None.  Tries, in order: element of
    the base field, sqrt of one, root of a quadratic over Q(sqrt5), and
    sqrt of such a root (degree 4 with even terms)."""
    v = mpmath.mpf(value) if not isinstance(value, mpmath.mpf) else value
    e = _fit_q235(v, dps)
    if e is not None:
        return ClosedForm("element", e)
    sq = _fit_q235(v * v, dps)
    if sq is not None:
        return ClosedForm("sqrt", sq, sign=1 if v > 0 else -1)
    pq = _fit_q5_quadratic(v, dps)
    if pq is not None:
        p, q = pq
        disc = p * p - Q235.from_rational(Fraction(4)) * q
        mid = _q235_value(p, dps) / (-2)
        return ClosedForm("quadratic", p, disc,
                          inner_sign=1 if v > mid else -1)
    pq = _fit_q5_quadratic(v * v, dps)
    if pq is not None:
        p, q = pq
        disc = p * p - Q235.from_rational(Fraction(4)) * q
        mid = _q235_value(p, dps) / (-2)
        return ClosedForm("biquadratic", p, disc, sign=1 if v > 0 else -1,
                          inner_sign=1 if v * v > mid else -1)
    return None


# --- exact verification in a square-root tower


class _Tower:
    """Stack of square-root extensions over the base field.  A root is
    adjoined only when the radicand is not already a square in the
    current field (decided exactly by _field_sqrt), so every level is a
    genuine quadratic extension and the tower stays a field; a reducible
    adjunction would introduce zero divisors and break elimination."""

    def __init__(self):
        self.chain = []      # Extensions, bottom to top

    def lift(self, x):
        """Lift a Q235 or a chain element to the current top field."""
        start = 0
        if isinstance(x, ExtElement):
            for i, ext in enumerate(self.chain):
                if x.ext is ext:
                    start = i + 1
                    break
            else:
                raise ValueError("element does not live in this tower")
        cur = x
        for ext in self.chain[start:]:
            cur = ext.from_base(cur)
        return cur

    def sqrt(self, elem):
        """Positive square root of a nonnegative Q235 or chain element,
        adjoining a new level only when necessary."""
        x = self.lift(elem)
        direct = _field_sqrt(x)
        if direct is not None:
            return direct if direct.sign() >= 0 else -direct
        ext = make_sqrt_extension(x)
        self.chain.append(ext)
        return ext.gen()


def _field_sqrt(x):
    """Square root of x inside its own field, or None when x is not a
    square there.  x is a Q235 or an element of a square-root tower.

    Complete for such towers: a + b sqrt(r) is a square iff the norm
    a^2 - b^2 r is a square n^2 one level down and (a + n)/2 or
    (a - n)/2 is a square c^2 there, giving (c + b/(2c) sqrt(r))^2."""
    if isinstance(x, Q235):
        return _q235_sqrt(x)
    if x.is_zero():
        return x
    if x.sign() < 0:
        return None
    ext = x.ext
    r = -ext.minpoly[0]
    a, b = x.c
    if b.is_zero():
        s = _field_sqrt(a)
        if s is not None:
            return ext.from_base(s)
        s = _field_sqrt(a / r)
        if s is not None:
            return ext.element([ext.base_zero, s])
        return None
    n = _field_sqrt(a * a - b * b * r)
    if n is None:
        return None
    for half in (a + n, a - n):
        c = _field_sqrt(half / 2)
        if c is not None and not c.is_zero():
            return ext.element([c, b / (c * 2)])
    return None


def _q235_sqrt(e: Q235):
    """sqrt of a Q235 element inside Q235, or None."""
    if e.is_zero():
        return Q235.zero()
    if e.sign() < 0:
        return None
    with mpmath.workdps(80):
        val = mpmath.sqrt(_q235_value(e, 80))
    cand = _fit_q235(val, 50)
    if cand is not None and (cand * cand - e).is_zero():
        return cand if cand.sign() > 0 else -cand
    return None


def closed_form_exact(form: ClosedForm, tower: _Tower):
    """Tower element equal to a ClosedForm, extending the tower as
    needed.  The result lives at the tower's top level at return time;
    re-lift with tower.lift after further adjunctions."""
    if form.kind == "element":
        return form.p
    if form.kind == "sqrt":
        return tower.sqrt(form.p) * form.sign
    root = tower.sqrt(form.disc)
    w = (tower.lift(root) * form.inner_sign - tower.lift(form.p)) / 2
    if form.kind == "quadratic":
        return w
    return tower.sqrt(w) * form.sign


def exact_seven_entry(k: int, tower: _Tower):
    """Exact 2 cos(pi/k) in the tower when it is expressible with square
    roots; None otherwise (e.g. k = 7 needs a cubic)."""
    with mpmath.workdps(80):
        v = 2 * mpmath.cospi(mpmath.mpf(1) / k)
        form = fit_closed_form(v, dps=45)
    if form is None:
        return None
    return closed_form_exact(form, tower)


def verify_exact(system: MinorSystem, cosh_forms, seven_ks, dim=5):
    """Exact check that the closed forms solve the minor system and give
    inertia (dim, 1): all principal minors of sizes dim+2 .. size vanish
    and some principal (dim+1) submatrix has inertia (dim, 1).

    cosh_forms: one ClosedForm per dotted unknown (positive cosh value).
    seven_ks: resolved integer k per weight-7 unknown.
    Returns True / False; raises Undecided when a needed value has no
    square-root expression."""
    g = system.gram
    tower = _Tower()
    xs = [closed_form_exact(form, tower) for form in cosh_forms]
    ys = []
    for k in seven_ks:
        e = exact_seven_entry(int(k), tower)
        if e is None:
            raise Undecided(f"2cos(pi/{k}) needs a non-quadratic extension")
        ys.append(e)
    # re-lift everything to the final top field
    xs = [tower.lift(x) for x in xs]
    ys = [tower.lift(y) for y in ys]
    one = tower.lift(Q235.one())
    zero = tower.lift(Q235.zero())
    M = [[zero for _ in range(g.size)] for _ in range(g.size)]
    for i in range(g.size):
        M[i][i] = one
    for a, b, w in g.weights:
        if w != 7:
            M[a - 1][b - 1] = M[b - 1][a - 1] = tower.lift(gram_entry(w))
    for k, (i, j) in enumerate(g.dotted):
        M[i][j] = M[j][i] = -xs[k]
    for k, (i, j) in enumerate(g.sevens):
        M[i][j] = M[j][i] = -(ys[k] / 2)
    for order in range(dim + 2, g.size + 1):
        for rows in itertools.combinations(range(g.size), order):
            sub = [[M[i][j] for j in rows] for i in rows]
            if not linalg.det(sub).is_zero():
                return False
    # a nonsingular principal (dim+1)-submatrix with inertia (dim, 1)
    for rows in itertools.combinations(range(g.size), dim + 1):
        sub = [[M[i][j] for j in rows] for i in rows]
        if not linalg.det(sub).is_zero():
            sig = linalg.inertia(sub)
            return sig.as_pair() == (dim, 1) and sig.zero == 0
    return False


# ---------------------------------------------------------------------------
# certification


@dataclasses.dataclass
class GramCertificate:
    """A solved Gram matrix passing every polytope condition."""

    gram: SymbolicGram
    values: np.ndarray          # (x..., y...) floats
    refined: tuple              # decimal strings
    signature: tuple            # (positive, negative, zero)
    seven_resolutions: tuple    # integer k per weight-7 unknown
    cosh_forms: tuple           # ClosedForm or None per dotted unknown
    residual_bound: float
    enclosure_radius: float
    exact_verified: bool = False

    @property
    def dotted_values(self):
        """cosh of the dotted lengths (positive floats)."""
        return tuple(-v for v in self.values[:len(self.gram.dotted)])


_AFFINE_EIG_TOL = 1e-9


def _connected_subsets(adj, size):
    """All connected vertex subsets of size >= 2 (bitmask sweep)."""
    out = []
    for mask in range(3, 1 << size):
        nodes = [i for i in range(size) if mask >> i & 1]
        if len(nodes) < 2:
            continue
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if mask >> w & 1 and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) == len(nodes):
            out.append(frozenset(nodes))
    return out


def _parabolic_subdiagram(sym: SymbolicGram, M):
    """A connected principal subdiagram that is PSD and singular, or
    None.  Numeric prefilter, exact confirmation over the base field
    (affine diagrams only carry weights 2, 3, 4, 6)."""
    size = sym.size
    adj = [set() for _ in range(size)]
    for i in range(size):
        for j in range(size):
            if i != j and abs(M[i, j]) > 1e-12:
                adj[i].add(j)
    unknown_pairs = set(sym.dotted) | set(sym.sevens)
    for s in sorted(_connected_subsets(adj, size), key=lambda s: sorted(s)):
        rows = sorted(s)
        if len(rows) >= size:      # full diagram is the polytope itself
            continue
        sub = M[np.ix_(rows, rows)]
        ev = np.linalg.eigvalsh(sub)
        if ev[0] < -_AFFINE_EIG_TOL or ev[0] > _AFFINE_EIG_TOL:
            continue
        pairs = {(min(a, b), max(a, b)) for a, b in
                 itertools.combinations(rows, 2)}
        if pairs & unknown_pairs:
            raise Undecided("near-singular subdiagram with unknown entries")
        exact = [[gram_entry(sym.weight_of(i + 1, j + 1)) if i != j
                  else Q235.one() for j in rows] for i in rows]
        sig = linalg.inertia(exact)
        if sig.negative == 0 and sig.zero >= 1:
            return tuple(rows)
    return None


def certify(system: MinorSystem, solution: Solution, fit=True,
            exact=False):
    """GramCertificate for an admissible solution, or None on rejection.

    Checks, in order: integer angle resolution k >= 7 for every y,
    inertia (dim, 1) at high precision, positive definite vertex
    submatrices, and absence of parabolic subdiagrams.  Closed forms for
    the dotted values are fitted when `fit` and re-verified exactly in a
    square-root tower when `exact`."""
    g = system.gram
    nx = len(g.dotted)
    dps = 75   # refined strings carry ~70 digits
    with mpmath.workdps(dps):
        vals = [mpmath.mpf(s) for s in solution.refined] \
            if solution.refined else []
        # 1. seven resolutions
        ks = []
        for y in vals[nx:]:
            k = mpmath.pi / mpmath.acos(y / 2)
            ki = int(mpmath.nint(k))
            if ki < 7 or abs(k - ki) > mpmath.mpf(10) ** (-dps + 25):
                return None
            ks.append(ki)
        # 2. inertia (dim, 1) with the rest zero
        M = _mp_matrix(system, vals)
        E = mpmath.eigsy(M, eigvals_only=True)
        tol = mpmath.mpf(10) ** (-dps + 25)
        pos = sum(1 for e in E if e > tol)
        neg = sum(1 for e in E if e < -tol)
        zero = g.size - pos - neg
        if (pos, neg) != (system.dim, 1):
            return None
    Mf = g.fill(solution.values)
    # 3. elliptic vertices stay elliptic at the solved values
    for v in g.vertices:
        rows = sorted(v)
        ev = np.linalg.eigvalsh(Mf[np.ix_(rows, rows)])
        if ev[0] < 1e-8:
            return None
    # 4. no parabolic subdiagram
    if _parabolic_subdiagram(g, Mf) is not None:
        return None
    # 5. closed forms for the dotted lengths
    forms = [None] * nx
    if fit and solution.refined:
        with mpmath.workdps(dps):
            for k in range(nx):
                forms[k] = fit_closed_form(-mpmath.mpf(solution.refined[k]))
    cert = GramCertificate(
        gram=g, values=solution.values, refined=solution.refined,
        signature=(pos, neg, zero), seven_resolutions=tuple(ks),
        cosh_forms=tuple(forms), residual_bound=solution.residual_bound,
        enclosure_radius=solution.enclosure_radius)
    if exact and all(f is not None for f in forms):
        try:
            cert.exact_verified = verify_exact(
                system, cert.cosh_forms, cert.seven_resolutions, system.dim)
        except (Undecided, ArithmeticError):
            cert.exact_verified = False
    return cert


def solve_and_certify(vector, layout, data, dim=5, timeout=30.0, fit=True,
                      exact=False):
    """Full pipeline for one determined vector: symbolize, impose rank
    conditions, solve, certify.  Returns a list of certificates; raises
    SolverTimeout on budget exhaustion."""
    sym = symbolize(vector, layout, data)
    system = rank_conditions(sym, dim)
    sols = solve_system(system, timeout=timeout)
    out = []
    for s in sols:
        c = certify(system, s, fit=fit, exact=exact)
        if c is not None:
            out.append(c)
    return out
