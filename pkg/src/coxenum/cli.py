"""Pipeline orchestration: staged runs with checkpoints, reporting,
certificate files and diagram export.

Stages run in the fixed order ingest, libgen, enumerate, solve, glue,
report, verify.  A run may select any contiguous block of stages; the
stages before the block must already have checkpoints on disk, so the
executed-plus-checkpointed part is always a prefix of the pipeline.
Every checkpoint records a content hash of the checkpoint it consumed,
and resuming refuses to build on an intermediate whose hash no longer
matches (stale or hand-edited files fail loudly instead of corrupting
a multi-hour run).

The default polytope set is the six 9-facet types that admit compact
realizations; anything slower (the full census sweep, P_2, P_10 deep
traces) sits behind the --heavy flag.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import pathlib
import pickle
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import diagrams, gram
from .fuchsian import apply_intersection_filter, build_fuchsian_sets
from .gluing import enumerate_orthogonal_prisms, gluing_closure
from .labels import load_labels, polytope
from .pasting import column_layout, run_enumeration
from .polytopes import PATTERNS, compute_data, find_pattern_embeddings, \
    parse_polytope_line

STAGES = ("ingest", "libgen", "enumerate", "solve", "glue", "report",
          "verify")

DEFAULT_POLYTOPES = (284, 302, 312, 313, 319, 322)

# types whose default-config stages finish in minutes on one core;
# everything else needs --heavy
FAST_POLYTOPES = frozenset({254, 280, 284, 302, 311, 312, 313, 319, 322})


class InputError(Exception):
    """Bad configuration or missing/ill-formed input."""


class CheckpointError(Exception):
    """Missing checkpoint or content-hash mismatch on resume."""


@dataclasses.dataclass(frozen=True)
class PipelineConfig:
    input: str | None = None          # polytope file; None = shipped labels
    stages: tuple = STAGES
    polytopes: tuple = DEFAULT_POLYTOPES
    approach: str = "basis"
    max_weight: int = 7
    timeout: float = 30.0
    row_budget: int | None = None
    workers: int = 1
    output_dir: str = "out"
    heavy: bool = False

    def validate(self):
        if self.timeout <= 0:
            raise InputError("timeout must be positive")
        if self.approach not in ("basis", "direct"):
            raise InputError(f"unknown approach {self.approach!r}")
        if not 2 <= self.max_weight <= 7:
            raise InputError("max_weight must be in 2..7")
        if not self.stages:
            raise InputError("no stages selected")
        idx = []
        for s in self.stages:
            if s not in STAGES:
                raise InputError(f"unknown stage {s!r}")
            idx.append(STAGES.index(s))
        if idx != sorted(idx) or idx != list(range(idx[0], idx[-1] + 1)):
            raise InputError("stages must be contiguous and in pipeline "
                             "order: " + " ".join(STAGES))
        if not self.heavy:
            slow = [n for n in self.polytopes if n not in FAST_POLYTOPES]
            if slow:
                raise InputError(
                    "polytopes %s need --heavy (multi-hour runs)"
                    % ",".join(map(str, slow)))


@dataclasses.dataclass
class RunReport:
    counts: dict          # num -> {"seilper", "post_filter", "certificates"}
    timings: dict         # stage -> seconds
    undecided: list       # (num, vector, provenance) that hit the timeout
    manifests: dict       # dataset name -> (classes, vectors, sha256)

    @property
    def complete(self):
        """No undecided vectors: the certificate list is the whole
        classification for the polytopes run."""
        return not self.undecided

    def total_certificates(self):
        return sum(c["certificates"] for c in self.counts.values())


# ---------------------------------------------------------------------------
# checkpoints


def _checkpoint_path(config, stage):
    return pathlib.Path(config.output_dir) / "checkpoints" / f"{stage}.pkl"


def _stage_fingerprint(config, stage):
    """Config fields that invalidate a stage's checkpoint when changed."""
    keys = {"ingest": ("input", "polytopes", "heavy"),
            "libgen": (),
            "enumerate": ("approach", "max_weight", "row_budget"),
            "solve": ("timeout",),
            "glue": ("timeout",),
            "report": (),
            "verify": ()}[stage]
    return {k: getattr(config, k) for k in keys}


def _write_checkpoint(config, stage, payload, upstream_hash):
    path = _checkpoint_path(config, stage)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = pickle.dumps({"stage": stage,
                         "fingerprint": _stage_fingerprint(config, stage),
                         "upstream": upstream_hash,
                         "payload": payload}, protocol=4)
    path.write_bytes(blob)
    return hashlib.sha256(blob).hexdigest()


def _read_checkpoint(config, stage, upstream_hash):
    path = _checkpoint_path(config, stage)
    if not path.exists():
        raise CheckpointError(f"missing checkpoint for stage {stage!r}; "
                              "run it first")
    blob = path.read_bytes()
    rec = pickle.loads(blob)
    if rec["fingerprint"] != _stage_fingerprint(config, stage):
        raise CheckpointError(
            f"checkpoint {stage!r} was produced under a different "
            "configuration; delete it or rerun the stage")
    if upstream_hash is not None and rec["upstream"] != upstream_hash:
        raise CheckpointError(
            f"checkpoint {stage!r} no longer matches its input "
            "(content hash changed); rerun the stage")
    return rec["payload"], hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# stages


def _stage_ingest(config, _upstream):
    if config.input is None:
        lines = load_labels()
    else:
        lines = {}
        try:
            text = pathlib.Path(config.input).read_text()
        except OSError as e:
            raise InputError(f"cannot read {config.input}: {e}")
        for line in text.splitlines():
            if line.strip():
                num, incidence = line.split("\t", 1)
                lines[int(num)] = incidence
    out = {}
    for num in config.polytopes:
        if num not in lines:
            raise InputError(f"P_{num} not present in the input")
        P = parse_polytope_line(lines[num])
        if P.dim != 5:
            raise InputError(f"P_{num} is not 5-dimensional")
        out[num] = lines[num]
    return out


def _dataset_manifest(name):
    rows = sorted(diagrams.dataset(name))
    h = hashlib.sha256()
    for r in rows:
        h.update(bytes(r))
    classes = len(diagrams.enumerate_class(
        diagrams.dataset_rank(name),
        {"S": "elliptic", "E": "parabolic_connected",
         "L": "lanner"}.get(name[0]))) if name[0] in "SEL" else \
        diagrams.DATASET_TABLE[name][0]
    return classes, len(rows), h.hexdigest()


def _stage_libgen(config, _payload):
    return {name: _dataset_manifest(name) for name in diagrams.DATASET_TABLE}


def _polytope_context(incidence):
    P = parse_polytope_line(incidence)
    data = compute_data(P)
    return P, data, column_layout(P, data)


def _stage_enumerate(config, ingested):
    sets = None
    out = {}
    for num, incidence in ingested.items():
        t0 = time.monotonic()
        P, data, layout = _polytope_context(incidence)
        rows = run_enumeration(P, data, approach=config.approach,
                               row_budget=config.row_budget)
        seilper = rows.shape[0]
        if config.max_weight < 7:
            keep = (rows <= config.max_weight).all(axis=1)
            rows = rows[keep]
        if config.approach == "direct":
            embeddings = {p: find_pattern_embeddings(P, p)
                          for p in sorted(PATTERNS)}
            embeddings = {p: e for p, e in embeddings.items() if e}
            if embeddings:
                if sets is None:
                    sets = build_fuchsian_sets()
                rows = apply_intersection_filter(rows, data, layout,
                                                 embeddings, sets)
        vectors = sorted(tuple(int(w) for w in r) for r in rows)
        out[num] = {"incidence": incidence, "seilper": seilper,
                    "post_filter": len(vectors), "vectors": vectors,
                    "seconds": time.monotonic() - t0}
    return out


def _stage_solve(config, enumerated):
    out = {}
    for num, rec in enumerated.items():
        t0 = time.monotonic()
        _, data, layout = _polytope_context(rec["incidence"])

        def solve_one(vec):
            try:
                return vec, gram.solve_and_certify(
                    vec, layout, data, timeout=config.timeout)
            except gram.SolverTimeout:
                return vec, None

        certs, undecided = [], []
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            for vec, res in pool.map(solve_one, rec["vectors"]):
                if res is None:
                    undecided.append((vec, "solve"))
                else:
                    certs.extend(res)
        out[num] = dict(rec, certificates=certs, undecided=undecided,
                        seconds=time.monotonic() - t0)
    return out


def _stage_glue(config, solved):
    if config.approach != "basis":
        return {"prisms": 0, "polytopes": solved}
    prisms = enumerate_orthogonal_prisms(timeout=config.timeout)
    out = {}
    for num, rec in solved.items():
        t0 = time.monotonic()
        _, data, layout = _polytope_context(rec["incidence"])
        res = gluing_closure(data, layout, rec["certificates"], prisms,
                             timeout=config.timeout)
        undecided = rec["undecided"] + \
            [(vec, f"glue:{prov}") for vec, prov in res.undecided]
        out[num] = dict(rec, certificates=res.certificates,
                        undecided=undecided, rounds=res.rounds,
                        seconds=rec["seconds"] + time.monotonic() - t0)
    return {"prisms": len(prisms), "polytopes": out}


def _stage_report(config, glued, manifests, timings):
    polys = glued["polytopes"]
    counts = {num: {"seilper": rec["seilper"],
                    "post_filter": rec["post_filter"],
                    "certificates": len(rec["certificates"])}
              for num, rec in polys.items()}
    undecided = [(num, vec, prov) for num, rec in polys.items()
                 for vec, prov in rec["undecided"]]
    report = RunReport(counts, dict(timings), undecided, manifests)

    out_dir = pathlib.Path(config.output_dir)
    cert_dir = out_dir / "certificates"
    cert_dir.mkdir(parents=True, exist_ok=True)
    for num, rec in polys.items():
        for k, cert in enumerate(rec["certificates"], 1):
            (cert_dir / f"P_{num}_{k}.txt").write_text(
                certificate_text(cert, f"P_{num} certificate {k}"))
    all_certs = [(f"P_{num}_{k}", cert)
                 for num, rec in polys.items()
                 for k, cert in enumerate(rec["certificates"], 1)]
    for fmt in ("text", "dot"):
        export_diagrams(all_certs, fmt, out_dir / "diagrams")

    (out_dir / "report.txt").write_text(report_text(report))
    (out_dir / "report.json").write_text(json.dumps(
        {"counts": {str(n): c for n, c in report.counts.items()},
         "timings": report.timings,
         "undecided": [[n, list(v), p] for n, v, p in report.undecided],
         "manifests": report.manifests,
         "total_certificates": report.total_certificates(),
         "complete": report.complete}, indent=2) + "\n")
    return report


def _stage_verify(config, glued):
    polys = glued["polytopes"]
    total = sum(len(rec["certificates"]) for rec in polys.values())
    if total == 0:
        raise InputError("nothing to verify")
    out = {}
    for num, rec in polys.items():
        results = []
        for cert in rec["certificates"]:
            system = gram.rank_conditions(cert.gram)
            if None in cert.cosh_forms:
                results.append("no closed form")
                continue
            try:
                ok = gram.verify_exact(system, cert.cosh_forms,
                                       cert.seven_resolutions)
                results.append("exact" if ok else "FAILED")
            except gram.Undecided as e:
                results.append(f"undecided: {e}")
        out[num] = results
    return out


# ---------------------------------------------------------------------------
# output formats


def certificate_text(cert, title):
    """Structured text for one certified Gram matrix: Coxeter matrix,
    resolved marks, and dotted values with decimal, closed form and
    enclosure width."""
    g = cert.gram
    m = g.size
    lines = [title, "",
             "coxeter matrix (* = dotted pair):"]
    for i in range(1, m + 1):
        row = []
        for j in range(1, m + 1):
            if i == j:
                row.append("1")
            else:
                w = g.weight_of(i, j)
                row.append("*" if w is None else str(w))
        lines.append("  " + " ".join(f"{c:>2}" for c in row))
    if g.sevens:
        lines.append("")
        lines.append("weight-7 resolutions:")
        for (i, j), k in zip(g.sevens, cert.seven_resolutions):
            lines.append(f"  m({i + 1},{j + 1}) = {k}")
    if g.dotted:
        lines.append("")
        lines.append("dotted entries, cosh of the length:")
        for k, (i, j) in enumerate(g.dotted):
            val = cert.dotted_values[k]
            form = cert.cosh_forms[k]
            s = f"  ({i + 1},{j + 1}) = {val:.12f}"
            if form is not None:
                s += f" = {form.sympy_expr()}"
            lines.append(s)
        lines.append(f"  enclosure radius {cert.enclosure_radius:.3e}, "
                     f"residual bound {cert.residual_bound:.3e}")
    lines.append("")
    lines.append(f"signature {cert.signature}, exact_verified="
                 f"{cert.exact_verified}")
    return "\n".join(lines) + "\n"


def _diagram_edges(cert):
    """(i, j, weight-or-None, length-or-None) for every drawn edge:
    weight-2 pairs are omitted, weight-3 edges carry no label."""
    g = cert.gram
    out = []
    for i in range(1, g.size + 1):
        for j in range(i + 1, g.size + 1):
            w = g.weight_of(i, j)
            if w is None:
                k = g.dotted.index((i - 1, j - 1))
                out.append((i, j, None, cert.dotted_values[k]))
            elif w == 7:
                key = (i - 1, j - 1)
                out.append((i, j,
                            cert.seven_resolutions[g.sevens.index(key)],
                            None))
            elif w >= 3:
                out.append((i, j, w, None))
    return out


def export_diagrams(named_certs, fmt, out_dir):
    """One diagram file per certificate; nodes are facets, solid edges
    carry the angle weight (3 unlabeled, 2 omitted), dotted edges the
    length.  Formats: text, dot."""
    if fmt not in ("text", "dot"):
        raise InputError(f"unknown diagram format {fmt!r}")
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, cert in named_certs:
        edges = _diagram_edges(cert)
        if fmt == "text":
            lines = [f"diagram {name} ({cert.gram.size} nodes)"]
            for i, j, w, length in edges:
                if length is not None:
                    lines.append(f"  {i} .. {j}  cosh = {length:.12f}")
                elif w == 3:
                    lines.append(f"  {i} -- {j}")
                else:
                    lines.append(f"  {i} -- {j}  [{w}]")
            text = "\n".join(lines) + "\n"
            path = out_dir / f"{name}.txt"
        else:
            lines = [f'graph "{name}" {{']
            for i in range(1, cert.gram.size + 1):
                lines.append(f"  {i};")
            for i, j, w, length in edges:
                if length is not None:
                    lines.append(f'  {i} -- {j} [style=dotted, '
                                 f'label="{length:.6f}"];')
                elif w == 3:
                    lines.append(f"  {i} -- {j};")
                else:
                    lines.append(f'  {i} -- {j} [label="{w}"];')
            lines.append("}")
            text = "\n".join(lines) + "\n"
            path = out_dir / f"{name}.dot"
        path.write_text(text)
        paths.append(path)
    return paths


def report_text(report):
    lines = ["pipeline report", ""]
    lines.append(f"{'polytope':>9} {'seilper':>8} {'filtered':>9} "
                 f"{'certified':>10}")
    for num in sorted(report.counts):
        c = report.counts[num]
        lines.append(f"{'P_%d' % num:>9} {c['seilper']:>8} "
                     f"{c['post_filter']:>9} {c['certificates']:>10}")
    lines.append("")
    lines.append(f"total certificates: {report.total_certificates()}")
    lines.append("undecided vectors: %d%s" % (
        len(report.undecided),
        "" if report.undecided else " (classification complete)"))
    for num, vec, prov in report.undecided:
        lines.append(f"  P_{num} {prov}: {vec}")
    lines.append("")
    lines.append("stage timings (s): " + ", ".join(
        f"{k}={v:.1f}" for k, v in report.timings.items()))
    lines.append("dataset manifests:")
    for name in sorted(report.manifests):
        cls, vecs, digest = report.manifests[name]
        lines.append(f"  {name}: {cls} classes, {vecs} vectors, "
                     f"sha256 {digest[:16]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# driver


def run(config: PipelineConfig) -> RunReport | None:
    """Execute the selected stages, checkpointing between them.

    Returns the RunReport when the report stage runs, else None.
    Stages before the selected block are loaded from checkpoints and
    hash-verified rather than recomputed.
    """
    config.validate()
    first = STAGES.index(config.stages[0])
    last = STAGES.index(config.stages[-1])
    timings = {}
    payloads = {}
    hashes = {None: None}
    prev = None
    report = None
    for stage in STAGES[:last + 1]:
        if STAGES.index(stage) < first:
            payloads[stage], hashes[stage] = _read_checkpoint(
                config, stage, hashes.get(prev))
            prev = stage
            continue
        t0 = time.monotonic()
        if stage == "ingest":
            payload = _stage_ingest(config, None)
        elif stage == "libgen":
            payload = _stage_libgen(config, payloads["ingest"])
        elif stage == "enumerate":
            payload = _stage_enumerate(config, payloads["ingest"])
        elif stage == "solve":
            payload = _stage_solve(config, payloads["enumerate"])
        elif stage == "glue":
            payload = _stage_glue(config, payloads["solve"])
        elif stage == "report":
            for need in ("libgen", "glue"):
                if need not in payloads:
                    payloads[need], hashes[need] = _read_checkpoint(
                        config, need, None)
            timings["report"] = 0.0
            report = _stage_report(config, payloads["glue"],
                                   payloads["libgen"], timings)
            payload = dataclasses.asdict(report)
        else:
            if "glue" not in payloads:
                payloads["glue"], hashes["glue"] = _read_checkpoint(
                    config, "glue", None)
            payload = _stage_verify(config, payloads["glue"])
        timings[stage] = time.monotonic() - t0
        payloads[stage] = payload
        hashes[stage] = _write_checkpoint(config, stage, payload,
                                          hashes.get(prev))
        prev = stage
    return report


def _parse_args(argv):
    ap = argparse.ArgumentParser(
        prog="coxenum",
        description="Enumerate compact hyperbolic Coxeter 5-polytopes "
                    "with 9 facets.")
    ap.add_argument("--input", help="polytope file (number<TAB>incidence "
                    "per line); default: shipped census labels")
    ap.add_argument("--stages", default=",".join(STAGES),
                    help="comma-separated contiguous stage block "
                         f"({' '.join(STAGES)})")
    ap.add_argument("--polytopes", default=",".join(
        str(n) for n in DEFAULT_POLYTOPES),
        help="comma-separated census numbers")
    ap.add_argument("--approach", choices=("basis", "direct"),
                    default="basis")
    ap.add_argument("--max-weight", type=int, default=7)
    ap.add_argument("--timeout", type=float, default=30.0,
                    help="solver budget per vector, seconds")
    ap.add_argument("--row-budget", type=int,
                    help="abort pastes above this row count")
    ap.add_argument("--workers", type=int,
                    default=int(os.environ.get("COXENUM_WORKERS", "1")))
    ap.add_argument("--output-dir",
                    default=os.environ.get("COXENUM_OUTPUT_DIR", "out"))
    ap.add_argument("--heavy", action="store_true",
                    help="allow polytopes whose runs take hours to days")
    a = ap.parse_args(argv)
    try:
        polys = tuple(int(x) for x in a.polytopes.split(",") if x)
    except ValueError:
        raise InputError(f"bad polytope list {a.polytopes!r}")
    return PipelineConfig(
        input=a.input, stages=tuple(a.stages.split(",")),
        polytopes=polys, approach=a.approach, max_weight=a.max_weight,
        timeout=a.timeout, row_budget=a.row_budget, workers=a.workers,
        output_dir=a.output_dir, heavy=a.heavy)


def main(argv=None) -> int:
    """Entry point: exit 0 on success, 2 when undecided vectors remain,
    3 on input or checkpoint errors."""
    try:
        config = _parse_args(sys.argv[1:] if argv is None else argv)
        report = run(config)
    except (InputError, CheckpointError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    if report is not None:
        print(report_text(report), end="")
        if not report.complete:
            return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
