"""Versioned on-disk documents (plans, counts, reports) and report rendering.

Three JSON document kinds, each carrying a ``schema_version`` tag:
``qdw-plan/1`` (an ExperimentPlan), ``qdw-counts/1`` (raw per-job counts
plus the angles and a free-form platform label), and ``qdw-report/1`` (the
analysis result).  Floats are serialized with Python's shortest-round-trip
repr, so nothing is lost at the 1e-12 level the witness cares about.  A
flat CSV table (one row per job and cell) can be imported as a counts
document; that converter is the intended adaptation point for vendor
exports, since every vendor names these things differently.

Loaders raise :class:`DocumentError` with the file path and the offending
field or cell spelled out.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import kernels
from .montecarlo import (DriftSpec, ExperimentPlan, JobCounts, N_CELLS,
                         NoiseSpec, empirical_F)
from .noise import ReadoutConfusion
from .render import svg_heatmap, svg_job_scatter, svg_viviani
from .witness import (AngleConfig, MATRIX_SIZE, ProbMatrix, SAMPLED_ROWS,
                      WitnessResult, analyze_per_job, analyze_pooled,
                      determinant, witness_sigma)

SCHEMA_PLAN = "qdw-plan/1"
SCHEMA_COUNTS = "qdw-counts/1"
SCHEMA_REPORT = "qdw-report/1"

DEFAULT_THRESHOLD = 5.0


class DocumentError(ValueError):
    """A document failed to parse or violated an invariant."""


def _fail(path, msg):
    raise DocumentError(f"{path}: {msg}")


def _need(mapping, key, path, where=""):
    if not isinstance(mapping, dict):
        _fail(path, f"{where or 'document'} must be an object")
    if key not in mapping:
        loc = f"{where}.{key}" if where else key
        _fail(path, f"missing field {loc}")
    return mapping[key]


def _read_json(path):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"{path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(
            f"{path}: not valid JSON (line {e.lineno}, column {e.colno})"
        ) from e


def _write_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _angles_to_json(angles):
    return {"beta": list(angles.beta), "phi": list(angles.phi)}


def _angles_from_json(obj, path, where):
    beta = _need(obj, "beta", path, where)
    phi = _need(obj, "phi", path, where)
    try:
        return AngleConfig(beta, phi)
    except (TypeError, ValueError) as e:
        _fail(path, f"{where}: {e}")


# ---------------------------------------------------------------- plans

def save_plan(plan, path):
    noise = plan.noise
    doc = {
        "schema_version": SCHEMA_PLAN,
        "jobs": plan.jobs,
        "shots": plan.shots,
        "repetitions": plan.repetitions,
        "angles": _angles_to_json(plan.angle_config),
        "noise": {
            "kind": noise.kind,
            "depolarizing": noise.depolarizing,
            "amplitude_damping": noise.amplitude_damping,
            "phase_damping": noise.phase_damping,
            "readout": (None if noise.readout is None else
                        {"eps0": noise.readout.eps0,
                         "eps1": noise.readout.eps1}),
            "epsilon": noise.epsilon,
            "leak_weight": noise.leak_weight,
            "leak_response": (None if noise.leak_response is None
                              else list(noise.leak_response)),
        },
        "shuffle_seed": plan.shuffle_seed,
        "drift": {
            "kind": plan.drift.kind,
            "magnitude": plan.drift.magnitude,
            "target": plan.drift.target,
        },
    }
    _write_json(doc, path)


def load_plan(path):
    doc = _read_json(path)
    schema = _need(doc, "schema_version", path)
    if schema != SCHEMA_PLAN:
        _fail(path, f"unknown schema_version {schema!r} (expected {SCHEMA_PLAN})")
    angles = _angles_from_json(_need(doc, "angles", path), path, "angles")
    nd = _need(doc, "noise", path)
    ro = nd.get("readout")
    try:
        readout = None if ro is None else ReadoutConfusion(
            _need(ro, "eps0", path, "noise.readout"),
            _need(ro, "eps1", path, "noise.readout"),
        )
        noise = NoiseSpec(
            kind=_need(nd, "kind", path, "noise"),
            depolarizing=nd.get("depolarizing", 0.0),
            amplitude_damping=nd.get("amplitude_damping", 0.0),
            phase_damping=nd.get("phase_damping", 0.0),
            readout=readout,
            epsilon=nd.get("epsilon", 0.0),
            leak_weight=nd.get("leak_weight", 0.0),
            leak_response=nd.get("leak_response"),
        )
        dd = doc.get("drift") or {"kind": "none"}
        drift = DriftSpec(
            kind=dd.get("kind", "none"),
            magnitude=dd.get("magnitude", 0.0),
            target=dd.get("target", "both"),
        )
        return ExperimentPlan(
            jobs=_need(doc, "jobs", path),
            shots=_need(doc, "shots", path),
            repetitions=_need(doc, "repetitions", path),
            angle_config=angles,
            noise=noise,
            shuffle_seed=_need(doc, "shuffle_seed", path),
            drift=drift,
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, DocumentError):
            raise
        raise DocumentError(f"{path}: {e}") from e


# ---------------------------------------------------------------- counts

@dataclass(frozen=True)
class CountsDocument:
    """Raw counts with their settings and origin label."""

    platform_label: str
    angle_config: AngleConfig
    jobs: tuple
    provenance: dict

    def __init__(self, platform_label, angle_config, jobs, provenance=None):
        jobs = tuple(jobs)
        if not jobs:
            raise ValueError("jobs list must not be empty")
        for job in jobs:
            if not isinstance(job, JobCounts):
                raise TypeError("jobs must be JobCounts instances")
        if not isinstance(angle_config, AngleConfig):
            raise TypeError("angle_config must be an AngleConfig")
        object.__setattr__(self, "platform_label", str(platform_label))
        object.__setattr__(self, "angle_config", angle_config)
        object.__setattr__(self, "jobs", jobs)
        object.__setattr__(self, "provenance", dict(provenance or {}))


def save_counts(doc, path):
    out = {
        "schema_version": SCHEMA_COUNTS,
        "platform_label": doc.platform_label,
        "angles": _angles_to_json(doc.angle_config),
        "provenance": doc.provenance,
        "jobs": [
            {
                "job_index": job.job_index,
                "seed": job.seed,
                "circuit_order": list(job.circuit_order),
                "successes": [[int(x) for x in row] for row in job.successes],
                "totals": [[int(x) for x in row] for row in job.totals],
            }
            for job in doc.jobs
        ],
    }
    _write_json(out, path)


def _cells_from_json(obj, path, where):
    if (not isinstance(obj, list)) or len(obj) != SAMPLED_ROWS:
        _fail(path, f"{where}: expected {SAMPLED_ROWS} rows")
    for k, row in enumerate(obj):
        if (not isinstance(row, list)) or len(row) != MATRIX_SIZE:
            got = len(row) if isinstance(row, list) else "non-list"
            _fail(path, f"{where}: row k={k + 1} expected {MATRIX_SIZE} "
                        f"cells, got {got} (cell ({k + 1}, "
                        f"{(len(row) if isinstance(row, list) else 0) + 1}) "
                        "missing)")
    return obj


def load_counts(path):
    doc = _read_json(path)
    schema = _need(doc, "schema_version", path)
    if schema != SCHEMA_COUNTS:
        _fail(path, f"unknown schema_version {schema!r} "
                    f"(expected {SCHEMA_COUNTS})")
    angles = _angles_from_json(_need(doc, "angles", path), path, "angles")
    raw_jobs = _need(doc, "jobs", path)
    if not isinstance(raw_jobs, list) or not raw_jobs:
        _fail(path, "jobs: must be a non-empty list")
    jobs = []
    for i, rj in enumerate(raw_jobs):
        where = f"jobs[{i}]"
        succ = _cells_from_json(_need(rj, "successes", path, where),
                                path, f"{where}.successes")
        tot = _cells_from_json(_need(rj, "totals", path, where),
                               path, f"{where}.totals")
        order = rj.get("circuit_order", list(range(N_CELLS)))
        try:
            jobs.append(JobCounts(
                job_index=_need(rj, "job_index", path, where),
                successes=succ,
                totals=tot,
                circuit_order=order,
                seed=rj.get("seed", 0),
            ))
        except (TypeError, ValueError) as e:
            raise DocumentError(f"{path}: {where}: {e}") from e
    try:
        return CountsDocument(
            platform_label=doc.get("platform_label", "unlabeled"),
            angle_config=angles,
            jobs=jobs,
            provenance=doc.get("provenance") or {},
        )
    except (TypeError, ValueError) as e:
        raise DocumentError(f"{path}: {e}") from e


_TABLE_FIELDS = ("job_index", "k", "j", "successes", "total")


def load_counts_table(path, angles=None, platform_label=None):
    """Import counts from a flat CSV table.

    Expected header: ``job_index,k,j,successes,total`` with k in 1..4 and
    j in 1..5.  Every job must cover all 20 cells exactly once.  The
    shuffle order is not part of the table; imported jobs carry the
    identity circuit order and seed 0.  ``angles`` defaults to the
    standard setting (they matter only for figure rendering, not for the
    witness arithmetic).
    """
    from .witness import default_angles

    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"{path}: {e}") from e
    reader = csv.DictReader(text.splitlines())
    header = set(reader.fieldnames or ())
    missing = [f for f in _TABLE_FIELDS if f not in header]
    if missing:
        _fail(path, f"missing column(s): {', '.join(missing)}")
    cells = {}
    for line_no, row in enumerate(reader, start=2):
        try:
            ji = int(row["job_index"])
            k = int(row["k"])
            j = int(row["j"])
            succ = int(row["successes"])
            tot = int(row["total"])
        except (TypeError, ValueError):
            _fail(path, f"line {line_no}: non-integer value")
        if not 1 <= k <= SAMPLED_ROWS:
            _fail(path, f"line {line_no}: k={k} outside 1..{SAMPLED_ROWS}")
        if not 1 <= j <= MATRIX_SIZE:
            _fail(path, f"line {line_no}: j={j} outside 1..{MATRIX_SIZE}")
        key = (ji, k, j)
        if key in cells:
            _fail(path, f"line {line_no}: duplicate cell ({k}, {j}) "
                        f"for job {ji}")
        cells[key] = (succ, tot)
    if not cells:
        _fail(path, "no data rows")
    jobs = []
    for ji in sorted({ji for ji, _, _ in cells}):
        succ = np.zeros((SAMPLED_ROWS, MATRIX_SIZE), dtype=np.int64)
        tot = np.zeros((SAMPLED_ROWS, MATRIX_SIZE), dtype=np.int64)
        for k in range(1, SAMPLED_ROWS + 1):
            for j in range(1, MATRIX_SIZE + 1):
                if (ji, k, j) not in cells:
                    _fail(path, f"job {ji}: cell ({k}, {j}) missing")
                succ[k - 1][j - 1], tot[k - 1][j - 1] = cells[(ji, k, j)]
        try:
            jobs.append(JobCounts(ji, succ, tot,
                                  tuple(range(N_CELLS)), 0))
        except ValueError as e:
            raise DocumentError(f"{path}: job {ji}: {e}") from e
    return CountsDocument(
        platform_label=platform_label or p.stem,
        angle_config=angles or default_angles(),
        jobs=jobs,
        provenance={"imported_from": p.name},
    )


# ---------------------------------------------------------------- reports

@dataclass(frozen=True)
class ReportDocument:
    """Complete analysis of one counts document."""

    platform_label: str
    angle_config: AngleConfig
    threshold: float
    verdict: str
    scheme_per_job: Optional[WitnessResult]
    scheme_pooled: WitnessResult
    per_job_w: tuple
    prob_matrix_pooled: ProbMatrix
    provenance: dict


def verdict_for(results, threshold):
    """fail iff any scheme's |z| exceeds the threshold (pure function)."""
    threshold = float(threshold)
    if not threshold > 0.0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    for r in results:
        if r is not None and abs(r.z) > threshold:
            return "fail"
    return "pass"


def build_report(doc, threshold=DEFAULT_THRESHOLD, provenance=None):
    """Run both analysis schemes on a counts document.

    The per-job scheme needs at least two jobs; on single-job documents it
    is omitted and the verdict rests on the pooled scheme alone.
    """
    from . import __version__

    jobs = list(doc.jobs)
    per_job = []
    mats = []
    per_job_t = []
    for job in jobs:
        f = empirical_F(job)
        mats.append(f)
        t_nominal = int(round(float(job.totals.mean())))
        per_job_t.append(t_nominal)
        per_job.append((job.job_index, determinant(f),
                        witness_sigma(f, job.totals)))
    scheme_i = (analyze_per_job(mats, per_job_t) if len(jobs) >= 2 else None)
    scheme_ii = analyze_pooled(jobs)
    pooled_f = empirical_F(jobs)
    prov = {
        "package_version": __version__,
        "kernel_backend": kernels.backend_name,
    }
    prov.update(doc.provenance)
    prov.update(provenance or {})
    return ReportDocument(
        platform_label=doc.platform_label,
        angle_config=doc.angle_config,
        threshold=float(threshold),
        verdict=verdict_for((scheme_i, scheme_ii), threshold),
        scheme_per_job=scheme_i,
        scheme_pooled=scheme_ii,
        per_job_w=tuple(per_job),
        prob_matrix_pooled=pooled_f,
        provenance=prov,
    )


def _result_to_json(r):
    if r is None:
        return None
    return {"scheme": r.scheme, "w": r.w, "sigma": r.sigma, "z": r.z,
            "t_total": r.t_total}


def _result_from_json(obj, path, where):
    if obj is None:
        return None
    return WitnessResult(
        w=float(_need(obj, "w", path, where)),
        sigma=float(_need(obj, "sigma", path, where)),
        z=float(_need(obj, "z", path, where)),
        scheme=str(_need(obj, "scheme", path, where)),
        t_total=int(_need(obj, "t_total", path, where)),
    )


def save_report(report, path):
    out = {
        "schema_version": SCHEMA_REPORT,
        "platform_label": report.platform_label,
        "angles": _angles_to_json(report.angle_config),
        "threshold_sigma": report.threshold,
        "verdict": report.verdict,
        "scheme_per_job": _result_to_json(report.scheme_per_job),
        "scheme_pooled": _result_to_json(report.scheme_pooled),
        "per_job": [
            {"job_index": i, "w": w, "sigma": s}
            for i, w, s in report.per_job_w
        ],
        "prob_matrix_pooled": [
            [float(x) for x in row] for row in report.prob_matrix_pooled.entries
        ],
        "provenance": report.provenance,
    }
    _write_json(out, path)


def load_report(path):
    doc = _read_json(path)
    schema = _need(doc, "schema_version", path)
    if schema != SCHEMA_REPORT:
        _fail(path, f"unknown schema_version {schema!r} "
                    f"(expected {SCHEMA_REPORT})")
    angles = _angles_from_json(_need(doc, "angles", path), path, "angles")
    try:
        pooled = ProbMatrix(_need(doc, "prob_matrix_pooled", path),
                            check_range=False)
        per_job = tuple(
            (int(_need(rj, "job_index", path, f"per_job[{i}]")),
             float(_need(rj, "w", path, f"per_job[{i}]")),
             float(_need(rj, "sigma", path, f"per_job[{i}]")))
            for i, rj in enumerate(_need(doc, "per_job", path))
        )
        return ReportDocument(
            platform_label=doc.get("platform_label", "unlabeled"),
            angle_config=angles,
            threshold=float(_need(doc, "threshold_sigma", path)),
            verdict=str(_need(doc, "verdict", path)),
            scheme_per_job=_result_from_json(doc.get("scheme_per_job"),
                                             path, "scheme_per_job"),
            scheme_pooled=_result_from_json(_need(doc, "scheme_pooled", path),
                                            path, "scheme_pooled"),
            per_job_w=per_job,
            prob_matrix_pooled=pooled,
            provenance=doc.get("provenance") or {},
        )
    except DocumentError:
        raise
    except (TypeError, ValueError) as e:
        raise DocumentError(f"{path}: {e}") from e


def _dominant_z(report):
    zs = [r.z for r in (report.scheme_per_job, report.scheme_pooled)
          if r is not None]
    return max(zs, key=abs)


def format_verdict_line(report):
    return f"{report.verdict} (z = {_dominant_z(report):.1f})"


def _text_report(report):
    lines = []
    lines.append("dimension-witness report")
    lines.append(f"platform: {report.platform_label}")
    lines.append(f"threshold: {report.threshold:g} sigma")
    lines.append(f"verdict: {format_verdict_line(report)}")
    lines.append("")
    beta = ", ".join(f"{b:.6f}" for b in report.angle_config.beta)
    phi = ", ".join(f"{f:.6f}" for f in report.angle_config.phi)
    lines.append(f"preparation angles (rad): {beta}")
    lines.append(f"measurement angles (rad): {phi}")
    lines.append("")
    lines.append("pooled probability matrix (rows k=1..4 then ones row; "
                 "columns j=1..5)")
    for row in report.prob_matrix_pooled.entries:
        lines.append("  " + "  ".join(f"{v:10.6f}" for v in row))
    lines.append("")
    lines.append(f"{'scheme':<10} {'W':>14} {'sigma':>13} {'z':>9} "
                 f"{'T/cell':>12}")
    for r in (report.scheme_per_job, report.scheme_pooled):
        if r is None:
            continue
        name = "per-job" if r.scheme == "per_job" else "pooled"
        lines.append(f"{name:<10} {r.w:>14.6e} {r.sigma:>13.6e} "
                     f"{r.z:>9.2f} {r.t_total:>12d}")
    lines.append("")
    lines.append("per-job witness values")
    lines.append(f"{'job':<6} {'W':>14} {'sigma':>13}")
    for i, w, s in report.per_job_w:
        lines.append(f"{i:<6d} {w:>14.6e} {s:>13.6e}")
    return "\n".join(lines) + "\n"


def render_report(report, out_dir):
    """Write the text table and the three SVG figures; returns the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DocumentError(f"{out_dir}: cannot create output directory: {e}")
    label = report.platform_label
    written = []
    targets = (
        ("report.txt", _text_report(report)),
        ("fmatrix.svg", svg_heatmap(report.prob_matrix_pooled.entries,
                                    title=f"pooled F ({label})")),
        ("jobs.svg", svg_job_scatter(report.per_job_w,
                                     pooled_w=report.scheme_pooled.w,
                                     title=f"witness per job ({label})")),
        ("viviani.svg", svg_viviani(report.angle_config)),
    )
    for name, content in targets:
        p = out / name
        try:
            p.write_text(content, encoding="utf-8")
        except OSError as e:
            raise DocumentError(f"{p}: cannot write: {e}")
        written.append(p)
    return written
