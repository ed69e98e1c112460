"""Exact algebra surface: field elements, signatures, minor tests.

Thin facade over the field and linalg internals so the solving layers
depend on one import.  AlgebraicNumber is the degree-8 real field
generated by sqrt(2), sqrt(3), sqrt(5); every Gram entry of weight 2..6
lives here, while weight >= 7 entries and dotted entries stay symbolic
until solved.
"""

from __future__ import annotations

from .field import (  # noqa: F401
    Q235 as AlgebraicNumber,
    SQRT2,
    SQRT3,
    SQRT5,
    Extension,
    ExtElement,
    FIELD_WITH_COS7,
    gram_entry,
    make_sqrt_extension,
    minimal_polynomial_2cos,
    two_cos_pi_over,
)
from .linalg import (  # noqa: F401
    Signature,
    charpoly_trailing_coeffs,
    det,
    inertia as signature_exact,
    is_positive_definite,
    is_positive_semidefinite,
    principal_minor,
    submatrix,
)


def charpoly_signature_test(M):
    """Signature decision for a matrix known to have at least rank-1
    fewer... precisely: with >= size-2 positive eigenvalues guaranteed
    by vertex ellipticity.  det < 0 forces (size-1, 1); det = 0 with
    the next characteristic coefficient negative forces one negative
    and one zero eigenvalue; anything else is rejected.

    Returns a Signature or None for rejected.
    """
    n = len(M)
    c0, c1 = charpoly_trailing_coeffs(M)
    d = c0 if n % 2 == 0 else -c0
    enm1 = c1 if (n - 1) % 2 == 0 else -c1
    if d.sign() < 0:
        return Signature(n - 1, 1, 0)
    if d.sign() == 0 and enm1.sign() < 0:
        return Signature(n - 2, 1, 1)
    return None
