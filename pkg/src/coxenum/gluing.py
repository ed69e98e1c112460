"""Orthogonal-base simplicial prisms and end gluing.

A compact simplicial prism (4-simplex x interval, 7 facets) with one end
orthogonal to all five sides can be glued onto any certified matrix
whose basis facet b is orthogonal to a simplex S of five facets: b and
the orthogonal base are removed, the prism sides continue the facets of
S, and the far end becomes the replacement facet.  The glued matrix
keeps the combinatorial type, so iterating over all certificates,
basis pairs and prisms closes the classification of one polytope.

Matching is by exact diagram isomorphism between the interface simplex
diagrams (weight-7 marks compared through their resolved angles);
dotted entries of a glued matrix are re-solved from scratch rather than
transported.
"""

from __future__ import annotations

import dataclasses
import itertools

from . import gram
from .pasting import column_layout, dedup_by_symmetry, run_enumeration
from .polytopes import CombinatorialPolytope, compute_data

SIDES = (1, 2, 3, 4, 5)
FAR_END = 6
BASE = 7


def prism5() -> CombinatorialPolytope:
    """4-simplex x interval: sides 1..5, far end 6, orthogonal base 7."""
    verts = [frozenset(t) | {e}
             for t in itertools.combinations(SIDES, 4)
             for e in (FAR_END, BASE)]
    return CombinatorialPolytope(5, 7, tuple(verts))


@dataclasses.dataclass(frozen=True)
class OrthogonalPrism:
    """A certified prism Gram matrix whose base is orthogonal to every
    side.  base_diagram is the rank-5 simplex diagram shared by the base
    and the gluing interface; end_weights are the far-end angles."""

    certificate: gram.GramCertificate

    @property
    def base_diagram(self):
        """5x5 angle tokens among the sides (resolved k for marks)."""
        return tuple(tuple(0 if i == j else
                           _angle_token(self.certificate, i, j)
                           for j in SIDES) for i in SIDES)

    @property
    def end_weights(self):
        """Raw weight (2..7) between each side and the far end."""
        return tuple(self.certificate.gram.weight_of(i, FAR_END)
                     for i in SIDES)

    @property
    def lengths(self):
        return self.certificate.dotted_values


def _angle_token(cert: gram.GramCertificate, i, j):
    """Comparable angle label for a non-dotted pair: the weight, with
    weight-7 marks replaced by their certified integer resolution."""
    w = cert.gram.weight_of(i, j)
    if w != 7:
        return w
    key = (min(i, j) - 1, max(i, j) - 1)
    return cert.seven_resolutions[cert.gram.sevens.index(key)]


def enumerate_orthogonal_prisms(timeout: float = 30.0, fit: bool = True):
    """All certified compact prisms with an orthogonal base.

    Runs the pasting pipeline on the prism type with every (base, side)
    pair pinned to weight 2; the simplex saving filter forces a rank-5
    Lanner diagram on the sides.  Deduplication is restricted to the
    symmetries fixing the base, so side relabelings of one prism
    collapse but the two ends are not exchanged.
    """
    P = prism5()
    data = compute_data(P)
    layout = column_layout(P, data)
    rows = run_enumeration(P, data, approach="basis",
                           basis_choice=(BASE, frozenset(SIDES)),
                           dedup=False)
    stab = [p for p in data.symmetry if p[BASE - 1] == BASE]
    rows = dedup_by_symmetry(rows, stab, layout)
    prisms = []
    for vec in rows:
        for cert in gram.solve_and_certify(vec, layout, data,
                                           timeout=timeout, fit=fit):
            prisms.append(OrthogonalPrism(cert))
    prisms.sort(key=lambda p: (p.base_diagram, p.end_weights, p.lengths))
    return prisms


# ---------------------------------------------------------------------------
# gluing one prism onto one certificate


@dataclasses.dataclass(frozen=True)
class GluedCandidate:
    """A 9-facet Coxeter vector obtained by replacing a basis facet with
    a prism's far end; dotted entries are left for re-solving."""

    vector: tuple             # weights in column-layout order
    basis_facet: int          # the facet b that was replaced
    simplex: frozenset        # the interface facets S
    matching: tuple           # side i of the prism -> matching[i-1] in S


def _simplex_diagram(cert: gram.GramCertificate, S):
    facets = sorted(S)
    return tuple(tuple(0 if a == b else _angle_token(cert, a, b)
                       for b in facets) for a in facets)


def _diagram_matchings(prism: OrthogonalPrism, cert, S):
    """All bijections sides -> S carrying the prism's base diagram onto
    the diagram induced on S (exact, resolved angles included)."""
    facets = sorted(S)
    pd = prism.base_diagram
    cd = _simplex_diagram(cert, S)
    out = []
    for perm in itertools.permutations(range(5)):
        if all(pd[i][j] == cd[perm[i]][perm[j]]
               for i in range(5) for j in range(i + 1, 5)):
            out.append(tuple(facets[perm[i]] for i in range(5)))
    return out


def glue(basis: gram.GramCertificate, prism: OrthogonalPrism,
         layout, data):
    """All glued candidates of one certificate with one prism.

    A gluing site is an l5_basis pair (b, S) whose facet b is orthogonal
    to all of S in the certificate; the candidates enumerate the diagram
    matchings of the interface.  Empty when no site matches.
    """
    out = []
    for b, S in sorted(data.l_basis, key=lambda t: (t[0], sorted(t[1]))):
        if any(basis.gram.weight_of(b, s) != 2 for s in S):
            continue
        for matching in _diagram_matchings(prism, basis, S):
            new = {}
            for k, s in enumerate(matching):
                new[(min(b, s), max(b, s))] = prism.end_weights[k]
            vec = tuple(new.get(pair, basis.gram.weight_of(*pair))
                        for pair in layout.columns)
            out.append(GluedCandidate(vec, b, frozenset(S), matching))
    return out


# ---------------------------------------------------------------------------
# closure over a polytope


def canonical_vector(vec, symmetry, layout):
    """Lexicographically minimal relabeling of a weight vector."""
    idx = layout.index
    best = tuple(vec)
    for perm in symmetry:
        cand = [0] * len(layout.columns)
        for k, (i, j) in enumerate(layout.columns):
            a, b = perm[i - 1], perm[j - 1]
            cand[idx[(min(a, b), max(a, b))]] = vec[k]
        cand = tuple(cand)
        if cand < best:
            best = cand
    return best


def certificate_key(cert: gram.GramCertificate, symmetry):
    """Canonical form of angles plus dotted lengths under relabeling;
    two certificates with equal keys describe the same polytope."""
    m = cert.gram.size
    tok = {}
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            w = cert.gram.weight_of(i, j)
            tok[(i, j)] = ("a", _angle_token(cert, i, j)) \
                if w is not None else None
    for k, (i, j) in enumerate(cert.gram.dotted):
        tok[(i + 1, j + 1)] = ("d", f"{cert.dotted_values[k]:.10f}")
    best = None
    for perm in symmetry:
        cand = tuple(tok[tuple(sorted((perm[i - 1], perm[j - 1])))]
                     for i in range(1, m + 1) for j in range(i + 1, m + 1))
        if best is None or cand < best:
            best = cand
    return best


@dataclasses.dataclass
class ClosureResult:
    certificates: list        # all certified Gram matrices, basis first
    undecided: list           # (vector, provenance) pairs that timed out
    rounds: int


def gluing_closure(data, layout, basis_certs, prisms,
                   timeout: float = 30.0, fit: bool = True,
                   exact: bool = False) -> ClosureResult:
    """Fixed point of gluing over one combinatorial type.

    Starts from the basis certificates, repeatedly glues every prism at
    every orthogonal site of every known certificate, re-solves the new
    vectors, and stops when a round adds nothing.  Solver timeouts are
    collected, never dropped.
    """
    known = {}
    for c in basis_certs:
        known.setdefault(certificate_key(c, data.symmetry), c)
    solved_vectors = set()
    undecided = []
    frontier = list(known.values())
    rounds = 0
    while frontier:
        rounds += 1
        new_certs = []
        for cert in frontier:
            for prism in prisms:
                for cand in glue(cert, prism, layout, data):
                    cvec = canonical_vector(cand.vector, data.symmetry,
                                            layout)
                    if cvec in solved_vectors:
                        continue
                    solved_vectors.add(cvec)
                    try:
                        sols = gram.solve_and_certify(
                            cvec, layout, data, timeout=timeout,
                            fit=fit, exact=exact)
                    except gram.SolverTimeout:
                        undecided.append((cvec, (cand.basis_facet,
                                                 sorted(cand.simplex))))
                        continue
                    for c in sols:
                        key = certificate_key(c, data.symmetry)
                        if key not in known:
                            known[key] = c
                            new_certs.append(c)
        frontier = new_certs
    return ClosureResult(list(known.values()), undecided, rounds)
