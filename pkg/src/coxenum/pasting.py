"""Block-pasting enumeration of potential Coxeter vectors.

Rows live in a fixed column layout (all facet pairs except disjoint
ones, lexicographic).  Each vertex contributes a block of elliptic
rank-d vectors scattered into its pair columns; blocks are joined on the
columns determined by both sides, and saving/killing filters fire at the
first layer where their positions are fully determined.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import diagrams
from .polytopes import CombinatorialData, CombinatorialPolytope

INF_MARK = diagrams.INF_MARK  # value 8: pair of disjoint facets


@dataclass(frozen=True)
class ColumnLayout:
    m: int
    columns: tuple            # (i, j) pairs, i < j, disjoint pairs excluded

    @property
    def index(self):
        return {p: k for k, p in enumerate(self.columns)}

    def cols_of(self, facet_subset):
        """Column indices of all pairs inside the subset; None entries
        for disjoint (excluded) pairs."""
        idx = self.index
        return [idx.get(p) for p in _pairs(facet_subset)]


def _pairs(subset):
    s = sorted(subset)
    return [(a, b) for a, b in itertools.combinations(s, 2)]


def column_layout(P: CombinatorialPolytope, data: CombinatorialData) -> ColumnLayout:
    cols = [(i, j)
            for i in range(1, P.num_facets + 1)
            for j in range(i + 1, P.num_facets + 1)
            if frozenset((i, j)) not in data.disjoint_pairs]
    return ColumnLayout(P.num_facets, tuple(cols))


@dataclass
class Block:
    layout: ColumnLayout
    rows: np.ndarray          # (n, len(columns)) uint8; 0 = undetermined
    determined: frozenset     # column indices with values

    @property
    def nrows(self):
        return self.rows.shape[0]


def build_block(chunk, pre_block, layout: ColumnLayout) -> Block:
    """Scatter each pre-block vector into the chunk's pair columns."""
    cols = layout.cols_of(chunk)
    if any(c is None for c in cols):
        raise ValueError(f"chunk {sorted(chunk)} touches a disjoint pair")
    vecs = np.asarray(sorted(pre_block), dtype=np.uint8)
    rows = np.zeros((len(vecs), len(layout.columns)), dtype=np.uint8)
    rows[:, cols] = vecs
    return Block(layout, rows, frozenset(cols))


def _pack(rows, cols):
    """Base-8 packing of the selected columns into uint64 keys."""
    acc = np.zeros(rows.shape[0], dtype=np.uint64)
    for c in cols:
        acc = (acc << np.uint64(3)) | rows[:, c].astype(np.uint64)
    return acc


def _pack_tuples(tuples, width_bits=3):
    arr = np.asarray(sorted(tuples), dtype=np.uint64)
    acc = np.zeros(arr.shape[0], dtype=np.uint64)
    for k in range(arr.shape[1]):
        acc = (acc << np.uint64(width_bits)) | arr[:, k]
    return np.unique(acc)


def paste(b1: Block, b2: Block, slice_rows: int = 2_000_000,
          row_budget: int | None = None) -> Block:
    """Hash-join on the commonly determined columns; off-key values are
    merged (at most one side is nonzero per column)."""
    key = sorted(b1.determined & b2.determined)
    k2 = _pack(b2.rows, key)
    order = np.argsort(k2, kind="stable")
    k2s = k2[order]
    pieces = []
    total = 0
    for start in range(0, b1.nrows, slice_rows):
        sl = b1.rows[start:start + slice_rows]
        k1 = _pack(sl, key)
        lo = np.searchsorted(k2s, k1, side="left")
        hi = np.searchsorted(k2s, k1, side="right")
        counts = hi - lo
        n = int(counts.sum())
        if n == 0:
            continue
        left_idx = np.repeat(np.arange(sl.shape[0]), counts)
        offsets = np.repeat(lo, counts) + (
            np.arange(n) - np.repeat(np.cumsum(counts) - counts, counts))
        right_idx = order[offsets]
        merged = np.maximum(sl[left_idx], b2.rows[right_idx])
        pieces.append(merged)
        total += n
        if row_budget is not None and total > row_budget:
            raise MemoryError(
                f"paste exceeded row budget ({total} > {row_budget})")
    if pieces:
        rows = np.concatenate(pieces) if len(pieces) > 1 else pieces[0]
    else:
        rows = np.zeros((0, b1.rows.shape[1]), dtype=np.uint8)
    return Block(b1.layout, rows, b1.determined | b2.determined)


# ----------------------------------------------------------------------
# filters
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FilterRule:
    kind: str                  # "saving" | "killing" | "square"
    subset: tuple              # facet indices
    dataset_name: str
    layer: int                 # fires after pasting this block index (0-based)
    cols: tuple                # layout column indices of the subset's pairs


def schedule_filters(P, data: CombinatorialData, layout: ColumnLayout,
                     chunk_order, use_l5: bool = True) -> list:
    """Assign each saving/killing condition to the first layer where all
    of its pair columns are determined."""
    det = set()
    layer_of_cols = {}
    for li, chunk in enumerate(chunk_order):
        det |= {c for c in layout.cols_of(chunk)}
        layer_of_cols[li] = frozenset(det)

    def first_layer(cols):
        for li in range(len(chunk_order)):
            if set(cols) <= layer_of_cols[li]:
                return li
        return None

    rules = []

    def add(kind, subset, dataset_name):
        cols = layout.cols_of(subset)
        if any(c is None for c in cols):
            if kind == "saving":
                raise ValueError(
                    f"saving subset {sorted(subset)} has a disjoint pair")
            return  # killing sets never contain disjoint pairs by definition
        li = first_layer(cols)
        if li is None:
            return  # columns never all determined: condition cannot fire
        rules.append(FilterRule(kind, tuple(sorted(subset)), dataset_name,
                                li, tuple(cols)))

    if use_l5:
        for sub in data.l4:
            add("saving", sub, "L4")
        for sub in data.l5:
            add("saving", sub, "L5")
    for sub in data.s3:
        add("killing", sub, "S3")
    for sub in data.s4:
        add("killing", sub, "S4")
    for sub in data.s5:
        add("killing", sub, "S5")
    for sub in data.e3:
        add("killing", sub, "E3")
    for sub in data.e4:
        add("killing", sub, "E4")
    for sub in data.e5:
        add("killing", sub, "E5")
    for sub in data.se6:
        add("killing", sub, "S6")
        add("killing", sub, "E6")
    for sub in data.se7:
        add("killing", sub, "S7")
        add("killing", sub, "E7")
    for sub in data.i2:
        sides = [p for p in _pairs(sub)
                 if frozenset(p) not in data.disjoint_pairs]
        cols = [layout.index[p] for p in sides]
        li = first_layer(cols)
        if li is not None:
            rules.append(FilterRule("square", tuple(sorted(sub)), "I2",
                                    li, tuple(cols)))
    rules.sort(key=lambda r: (r.layer, r.kind, r.subset))
    return rules


_DATASET_PACKED = {}


def _dataset_packed(name: str) -> np.ndarray:
    if name not in _DATASET_PACKED:
        _DATASET_PACKED[name] = _pack_tuples(diagrams.dataset(name))
    return _DATASET_PACKED[name]


def apply_rule(rows: np.ndarray, rule: FilterRule) -> np.ndarray:
    if rule.kind == "square":
        # Euclidean square: all four sides orthogonal is impossible
        mask = np.ones(rows.shape[0], dtype=bool)
        for c in rule.cols:
            mask &= rows[:, c] == 2
        return rows[~mask]
    packed = _pack(rows, rule.cols)
    table = _dataset_packed(rule.dataset_name)
    pos = np.searchsorted(table, packed)
    pos[pos == table.shape[0]] = 0
    member = table[pos] == packed
    keep = member if rule.kind == "saving" else ~member
    return rows[keep]


# ----------------------------------------------------------------------
# symmetry dedup and the main driver
# ----------------------------------------------------------------------

def _rows_less(a, b):
    """Vectorized lexicographic a < b per row."""
    less = np.zeros(a.shape[0], dtype=bool)
    decided = np.zeros(a.shape[0], dtype=bool)
    for c in range(a.shape[1]):
        lt = (a[:, c] < b[:, c]) & ~decided
        gt = (a[:, c] > b[:, c]) & ~decided
        less |= lt
        decided |= lt | gt
    return less


def symmetry_column_maps(symmetry, layout: ColumnLayout):
    """Column permutation per group element: new[k] = old[map[k]]."""
    idx = layout.index
    maps = []
    for perm in symmetry:
        cmap = []
        for (i, j) in layout.columns:
            a, b = perm[i - 1], perm[j - 1]
            cmap.append(idx[(min(a, b), max(a, b))])
        maps.append(cmap)
    return maps


def dedup_by_symmetry(rows: np.ndarray, symmetry, layout: ColumnLayout) -> np.ndarray:
    """Keep the lexicographically minimal representative per orbit."""
    if rows.shape[0] == 0:
        return rows
    best = rows.copy()
    for cmap in symmetry_column_maps(symmetry, layout):
        cand = rows[:, cmap]
        take = _rows_less(cand, best)
        best[take] = cand[take]
    return np.unique(best, axis=0)


@dataclass
class PasteTrace:
    chunks: list = field(default_factory=list)
    row_counts: list = field(default_factory=list)


def chunk_list(P: CombinatorialPolytope):
    """Vertex chunks in ascending lexicographic order (the published
    order); each chunk is a sorted facet tuple."""
    return sorted(tuple(sorted(v)) for v in P.vertices)


def run_enumeration(P: CombinatorialPolytope, data: CombinatorialData,
                    approach: str = "basis", use_filters: bool = True,
                    chunk_order=None, pre_block=None, basis_choice=None,
                    row_budget: int | None = None, trace: PasteTrace | None = None,
                    dedup: bool = True, use_l5: bool | None = None) -> np.ndarray:
    """Paste all blocks with scheduled filters; returns the final rows
    (SEILper vectors when filters and dedup are on)."""
    layout = column_layout(P, data)
    chunks = list(chunk_order) if chunk_order is not None else chunk_list(P)
    if pre_block is None:
        pre_block = diagrams.dataset(f"S{P.dim}")
    if use_l5 is None:
        use_l5 = approach == "basis"
    rules = (schedule_filters(P, data, layout, chunks, use_l5=use_l5)
             if use_filters else [])
    pinned = []
    if approach == "basis":
        basis = sorted(data.l_basis)
        if basis_choice is not None:
            basis = [basis_choice]
        for b, S in basis:
            for s in sorted(S):
                pinned.append((min(b, s), max(b, s)))
    pinned_cols = sorted({layout.index[p] for p in pinned})

    def pin(block: Block) -> Block:
        cols = [c for c in pinned_cols if c in block.determined]
        rows = block.rows
        for c in cols:
            rows = rows[rows[:, c] == 2]
        return Block(layout, rows, block.determined)

    acc = None
    for li, chunk in enumerate(chunks):
        blk = pin(build_block(chunk, pre_block, layout))
        acc = blk if acc is None else paste(acc, blk, row_budget=row_budget)
        for rule in rules:
            if rule.layer == li:
                acc.rows = apply_rule(acc.rows, rule)
        if trace is not None:
            trace.chunks.append(chunk)
            trace.row_counts.append(acc.nrows)
    rows = acc.rows
    if dedup:
        rows = dedup_by_symmetry(rows, data.symmetry, layout)
    return rows


def rows_to_vectors(rows: np.ndarray) -> set:
    return {tuple(int(x) for x in r) for r in rows}
