"""Numbered access to the 9-facet combinatorial types.

The simple 5-polytopes with 9 facets are conventionally numbered P_1 ..
P_322 after the Fukuda-Miyata-Moriyama census of their simplicial duals.
The shipped catalog (catalog.load_catalog) stores one representative per
combinatorial type in a neutral order, so the census numbers have to be
re-attached.  The mapping in data/labels.txt covers every number this
pipeline references; it was pinned as follows and is re-checkable with
the functions below:

* P_312 is the thrice-truncated 5-simplex (its dual sphere is the
  boundary of the 5-simplex with three facets stacked) and P_322 has a
  known incidence line; P_319 is the remaining type with 6 disjoint
  facet pairs.
* Within the groups of 5, 4, and 3 disjoint pairs, types are separated
  by l5_basis emptiness, prism/duoprism embedding counts, and the
  (pairwise distinct) nonzero counts of basis-approach SEILper vectors.
* P_10 is additionally pinned by a facet relabeling whose ascending
  vertex-chunk list starts with 15 known chunks; all such relabelings
  give one and the same chunk list, which data/labels.txt stores.
* P_2 is the single type of its group left after all of the above.

Numbers never referenced by the pipeline (all with zero SEILper count)
are left unmapped.
"""

from __future__ import annotations

import pathlib
from functools import lru_cache

from .polytopes import CombinatorialPolytope, parse_polytope_line

_LABELS_FILE = pathlib.Path(__file__).parent / "data" / "labels.txt"


@lru_cache(maxsize=1)
def load_labels() -> dict:
    """Census number -> incidence line, for every number the pipeline
    references.  P_322 and P_10 carry their conventional facet
    labelings; other entries use the catalog representative's."""
    out = {}
    for line in _LABELS_FILE.read_text().splitlines():
        if line.strip():
            k, incidence = line.split("\t")
            out[int(k)] = incidence
    return out


def polytope(number: int) -> CombinatorialPolytope:
    lines = load_labels()
    if number not in lines:
        raise KeyError(f"P_{number} is not in the shipped label map")
    return parse_polytope_line(lines[number])


def thrice_truncated_simplex() -> CombinatorialPolytope:
    """Combinatorial type of P_312: stack three facets of the boundary
    of the 5-simplex (dually: truncate three vertices)."""
    base = [frozenset(range(1, 7)) - {i} for i in (1, 2, 3, 4, 5, 6)]
    facs = list(base[3:])
    for new, F in zip((7, 8, 9), base[:3]):
        for x in F:
            facs.append((F - {x}) | {new})
    return CombinatorialPolytope(5, 9, tuple(facs))
