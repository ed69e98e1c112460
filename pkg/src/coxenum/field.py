"""Exact arithmetic in the real field Q(sqrt2, sqrt3, sqrt5) and simple tower extensions.

Elements of the degree-8 field are stored as 8 rational coordinates over the
basis 1, sqrt2, sqrt3, sqrt5, sqrt6, sqrt10, sqrt15, sqrt30.  The basis is
indexed by bitmasks: bit0 ~ sqrt2, bit1 ~ sqrt3, bit2 ~ sqrt5, so that
e_a * e_b = r(a & b) * e_(a ^ b) with r(m) the product of the primes in m.

Signs are decided exactly: an element is zero iff all coordinates vanish
(the 8 square roots are linearly independent over Q), and a nonzero element's
sign is obtained from integer square-root approximations at increasing
precision.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpq, mpz

_PRIME = (2, 3, 5)


def _rad(mask: int) -> int:
    r = 1
    for b in range(3):
        if mask >> b & 1:
            r *= _PRIME[b]
    return r


_MASK_RAD = tuple(_rad(m) for m in range(8))

_ZERO8 = (mpq(0),) * 8


class Q235:
    """An element of Q(sqrt2, sqrt3, sqrt5)."""

    __slots__ = ("c", "_hash")

    def __init__(self, coords):
        self.c = tuple(coords)
        self._hash = None

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_rational(q) -> "Q235":
        c = [mpq(0)] * 8
        c[0] = mpq(q)
        return Q235(c)

    @staticmethod
    def sqrt_int(n: int) -> "Q235":
        """sqrt(n) for n in {1,2,3,5,6,10,15,30} (or a perfect multiple)."""
        for m in range(8):
            if _MASK_RAD[m] == n:
                c = [mpq(0)] * 8
                c[m] = mpq(1)
                return Q235(c)
        raise ValueError(f"sqrt({n}) is not in the field basis")

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Q235(tuple(a + b for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        return Q235(tuple(-a for a in self.c))

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Q235(tuple(a - b for a, b in zip(self.c, other.c)))

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = [mpq(0)] * 8
        sc = self.c
        oc = other.c
        for i in range(8):
            a = sc[i]
            if a == 0:
                continue
            for j in range(8):
                b = oc[j]
                if b == 0:
                    continue
                out[i ^ j] += a * b * _MASK_RAD[i & j]
        return Q235(out)

    __rmul__ = __mul__

    def conjugate(self, mask: int) -> "Q235":
        """Galois conjugate flipping the signs of the roots in `mask`."""
        return Q235(tuple(-a if (m & mask).bit_count() & 1 else a
                          for m, a in enumerate(self.c)))

    def inverse(self) -> "Q235":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        prod = Q235.one()
        for mask in range(1, 8):
            prod = prod * self.conjugate(mask)
        norm = (self * prod).c[0]
        # self * prod is rational (the field norm)
        return Q235(tuple(a / norm for a in prod.c))

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    # -- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return all(a == 0 for a in self.c)

    def is_rational(self) -> bool:
        return all(a == 0 for a in self.c[1:])

    def sign(self) -> int:
        if self.is_zero():
            return 0
        # integerize: common denominator
        den = mpz(1)
        for a in self.c:
            den = gmpy2.lcm(den, a.denominator)
        ints = [mpz(a * den) for a in self.c]
        bound = sum(abs(n) for n in ints)
        prec = 32
        while True:
            scale = mpz(1) << (2 * prec)
            s = mpz(0)
            for n, r in zip(ints, _MASK_RAD):
                if n:
                    s += n * gmpy2.isqrt(r * scale)
            # each isqrt under-approximates sqrt(r)*2^prec by < 1
            if abs(s) > bound:
                return 1 if s > 0 else -1
            prec *= 2

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.c)
        return self._hash

    def __lt__(self, other):
        return (self - _coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - _coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - _coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - _coerce(other)).sign() >= 0

    # -- numerics -------------------------------------------------------
    def __float__(self):
        return float(sum(float(a) * _SQRT_FLOAT[m]
                         for m, a in enumerate(self.c) if a != 0))

    def approx(self, prec_bits: int):
        """gmpy2.mpfr approximation at the requested working precision."""
        with gmpy2.context(precision=prec_bits):
            s = gmpy2.mpfr(0)
            for m, a in enumerate(self.c):
                if a != 0:
                    s += gmpy2.mpfr(a) * gmpy2.sqrt(gmpy2.mpfr(_MASK_RAD[m]))
            return s

    def as_fraction_coords(self):
        return tuple(Fraction(int(a.numerator), int(a.denominator))
                     for a in self.c)

    def __repr__(self):
        terms = []
        names = ("", "*r2", "*r3", "*r6", "*r5", "*r10", "*r15", "*r30")
        for m, a in enumerate(self.c):
            if a != 0:
                terms.append(f"{a}{names[m]}")
        return "Q235(" + (" + ".join(terms) if terms else "0") + ")"

    @staticmethod
    def zero() -> "Q235":
        return _Q_ZERO

    @staticmethod
    def one() -> "Q235":
        return _Q_ONE


_SQRT_FLOAT = tuple(r ** 0.5 for r in _MASK_RAD)


def _coerce(x):
    if isinstance(x, Q235):
        return x
    if isinstance(x, (int, Fraction)) or type(x).__name__ in ("mpq", "mpz"):
        return Q235.from_rational(x)
    return NotImplemented


_Q_ZERO = Q235(_ZERO8)
_Q_ONE = Q235.from_rational(1)

SQRT2 = Q235.sqrt_int(2)
SQRT3 = Q235.sqrt_int(3)
SQRT5 = Q235.sqrt_int(5)

HALF = Q235.from_rational(mpq(1, 2))

# -cos(pi/k) for the finite Coxeter weights 2..6
_GRAM_ENTRY = {
    2: Q235.zero(),
    3: Q235.from_rational(mpq(-1, 2)),
    4: SQRT2 * Q235.from_rational(mpq(-1, 2)),
    5: (Q235.one() + SQRT5) * Q235.from_rational(mpq(-1, 4)),
    6: SQRT3 * Q235.from_rational(mpq(-1, 2)),
}


def gram_entry(weight: int) -> Q235:
    """Exact Gram-matrix entry -cos(pi/weight) for weights 2..6."""
    try:
        return _GRAM_ENTRY[weight]
    except KeyError:
        raise ValueError(f"weight {weight} has no exact entry in this field")


# ----------------------------------------------------------------------
# Simple tower extensions (used for cos(pi/7) and nested square roots).
# ----------------------------------------------------------------------

class Extension:
    """A simple extension base(theta) with monic minimal polynomial over base.

    `minpoly` lists the non-leading coefficients c0..c_{d-1} of
    x^d + c_{d-1} x^{d-1} + ... + c0, as elements of the base structure
    (Q235 or another Extension's elements).  `root_approx(prec)` must return
    a gmpy2.mpfr approximation of the chosen real root.
    """

    def __init__(self, minpoly, root_approx, name="theta"):
        self.minpoly = tuple(minpoly)
        self.degree = len(minpoly)
        self.root_approx = root_approx
        self.name = name
        base_zero = minpoly[0] * 0
        self.base_zero = base_zero
        self.base_one = base_zero + 1

    def element(self, coeffs) -> "ExtElement":
        coeffs = list(coeffs)
        if len(coeffs) < self.degree:
            coeffs += [self.base_zero] * (self.degree - len(coeffs))
        return ExtElement(self, tuple(coeffs))

    def zero(self):
        return self.element([])

    def one(self):
        return self.element([self.base_one])

    def gen(self):
        return self.element([self.base_zero, self.base_one])

    def from_base(self, x):
        return self.element([self.base_zero + x])


class ExtElement:
    __slots__ = ("ext", "c")

    def __init__(self, ext: Extension, coeffs):
        self.ext = ext
        self.c = coeffs

    def _lift(self, other):
        if isinstance(other, ExtElement):
            if other.ext is not self.ext:
                raise TypeError("mixing elements of different extensions")
            return other
        return self.ext.from_base(self.ext.base_zero + other)

    def __add__(self, other):
        o = self._lift(other)
        return ExtElement(self.ext, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return ExtElement(self.ext, tuple(-a for a in self.c))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        d = self.ext.degree
        prod = [self.ext.base_zero] * (2 * d - 1)
        for i, a in enumerate(self.c):
            if _is_zero(a):
                continue
            for j, b in enumerate(o.c):
                if _is_zero(b):
                    continue
                prod[i + j] = prod[i + j] + a * b
        # reduce modulo minpoly
        mp = self.ext.minpoly
        for k in range(2 * d - 2, d - 1, -1):
            lead = prod[k]
            if _is_zero(lead):
                continue
            for i, ci in enumerate(mp):
                prod[k - d + i] = prod[k - d + i] - lead * ci
        return ExtElement(self.ext, tuple(prod[:d]))

    __rmul__ = __mul__

    def inverse(self):
        # extended Euclid in base[x] modulo minpoly
        d = self.ext.degree
        mp = list(self.ext.minpoly) + [self.ext.base_one]
        r0 = [c for c in mp]
        r1 = list(self.c)
        s0 = [self.ext.base_zero]
        s1 = [self.ext.base_one]
        while True:
            r1 = _poly_trim(r1, self.ext.base_zero)
            if not r1:
                raise ZeroDivisionError("inverse of zero extension element")
            if len(r1) == 1:
                inv = _base_inverse(r1[0])
                coeffs = [c * inv for c in s1]
                return self.ext.element(coeffs)
            q, rem = _poly_divmod(r0, r1, self.ext.base_zero)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1, self.ext.base_zero),
                                   self.ext.base_zero)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def is_zero(self):
        return all(_is_zero(a) for a in self.c)

    def sign(self):
        if self.is_zero():
            return 0
        prec = 96
        while prec <= 60000:
            val = self.approx(prec)
            # heuristic safety margin: demand clearance of rounding noise
            with gmpy2.context(precision=prec):
                if abs(val) > gmpy2.mpfr(2) ** (-(prec // 2)):
                    return 1 if val > 0 else -1
            prec *= 2
        raise ArithmeticError("sign undecided at maximum precision")

    def approx(self, prec_bits: int):
        with gmpy2.context(precision=prec_bits):
            t = self.root_value(prec_bits)
            s = gmpy2.mpfr(0)
            for a in reversed(self.c):
                s = s * t + _approx(a, prec_bits)
            return s

    def root_value(self, prec_bits: int):
        return self.ext.root_approx(prec_bits)

    def __float__(self):
        return float(self.approx(96))

    def __eq__(self, other):
        try:
            return (self - other).is_zero()
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((id(self.ext), self.c))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __repr__(self):
        return f"ExtElement({self.ext.name}; {self.c})"


def _is_zero(a):
    if isinstance(a, (Q235, ExtElement)):
        return a.is_zero()
    return a == 0


def _approx(a, prec_bits):
    if isinstance(a, (Q235, ExtElement)):
        return a.approx(prec_bits)
    with gmpy2.context(precision=prec_bits):
        return gmpy2.mpfr(a)


def _base_inverse(a):
    if isinstance(a, (Q235, ExtElement)):
        return a.inverse()
    return 1 / mpq(a)


def _poly_trim(p, zero):
    while p and _is_zero(p[-1]):
        p = p[:-1]
    return list(p)


def _poly_sub(a, b, zero):
    n = max(len(a), len(b))
    a = list(a) + [zero] * (n - len(a))
    b = list(b) + [zero] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _poly_mul(a, b, zero):
    out = [zero] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if _is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _poly_divmod(num, den, zero):
    num = _poly_trim(num, zero)
    den = _poly_trim(den, zero)
    q = [zero] * max(0, len(num) - len(den) + 1)
    inv_lead = _base_inverse(den[-1])
    r = list(num)
    while len(r) >= len(den) and r:
        r = _poly_trim(r, zero)
        if len(r) < len(den):
            break
        coeff = r[-1] * inv_lead
        deg = len(r) - len(den)
        q[deg] = q[deg] + coeff
        for i, dc in enumerate(den):
            r[deg + i] = r[deg + i] - coeff * dc
        r = r[:-1]
    return q, _poly_trim(r, zero)


def _cos7_root(prec_bits):
    with gmpy2.context(precision=prec_bits):
        return 2 * gmpy2.cos(gmpy2.const_pi() / 7)


#: Q(sqrt2,sqrt3,sqrt5)(t) with t = 2*cos(pi/7), t^3 - t^2 - 2t + 1 = 0.
FIELD_WITH_COS7 = Extension(
    [Q235.one(), Q235.from_rational(-2), -Q235.one()],
    _cos7_root,
    name="2cos(pi/7)",
)


def two_cos_pi_over(k: int):
    """2*cos(pi/k) as an exact element where representable.

    Returns a Q235 for k in {2,...,6} (and 1), the cos(pi/7) extension
    generator for k = 7, otherwise raises.
    """
    if 2 <= k <= 6:
        return gram_entry(k) * Q235.from_rational(-2)
    if k == 7:
        return FIELD_WITH_COS7.gen()
    raise ValueError(f"2cos(pi/{k}) not available exactly here")


def minimal_polynomial_2cos(k: int):
    """Integer coefficients (c0..c_{d-1}, monic) of 2cos(pi/k) over Q.

    Used when certifying that a weight->=7 unknown resolves to an integer
    dihedral order.  2cos(pi/k) is an algebraic integer: it equals
    zeta + 1/zeta for zeta = exp(i pi / k), a primitive 2k-th root of unity.
    """
    import sympy

    x = sympy.symbols("x")
    val = 2 * sympy.cos(sympy.pi / k)
    poly = sympy.minimal_polynomial(val, x)
    coeffs = sympy.Poly(poly, x).all_coeffs()
    lead = coeffs[0]
    assert lead == 1
    return [int(c) for c in reversed(coeffs[1:])]


def make_sqrt_extension(base_elem, approx_fn=None, name=None):
    """Extension adjoining sqrt(base_elem) for a positive base element."""
    if name is None:
        name = "sqrt"
    zero = base_elem * 0

    def root(prec_bits):
        with gmpy2.context(precision=prec_bits):
            return gmpy2.sqrt(_approx(base_elem, prec_bits))

    return Extension([-base_elem, zero], approx_fn or root, name=name)
