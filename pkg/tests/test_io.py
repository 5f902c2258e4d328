import json
import math

import numpy as np
import pytest

from dimwitness.io import (
    CountsDocument,
    DocumentError,
    ReportDocument,
    build_report,
    format_verdict_line,
    load_counts,
    load_counts_table,
    load_plan,
    load_report,
    render_report,
    save_counts,
    save_plan,
    save_report,
    verdict_for,
)
from dimwitness.montecarlo import (
    DriftSpec,
    ExperimentPlan,
    JobCounts,
    NoiseSpec,
    simulate_counts,
)
from dimwitness.noise import ReadoutConfusion
from dimwitness.witness import WitnessResult, default_angles


def sample_plan():
    noise = NoiseSpec(kind="channels", depolarizing=0.05,
                      readout=ReadoutConfusion(0.01, 0.02))
    drift = DriftSpec(kind="linear", magnitude=0.003, target="measurement")
    return ExperimentPlan(jobs=4, shots=250, repetitions=2,
                          angle_config=default_angles(), noise=noise,
                          shuffle_seed=99, drift=drift)


def sample_counts_doc():
    plan = ExperimentPlan(jobs=3, shots=400, repetitions=1,
                          angle_config=default_angles(), shuffle_seed=11)
    return CountsDocument(platform_label="simulator",
                          angle_config=plan.angle_config,
                          jobs=simulate_counts(plan),
                          provenance={"origin": "unit-test"})


def test_plan_round_trip(tmp_path):
    plan = sample_plan()
    path = tmp_path / "plan.json"
    save_plan(plan, path)
    back = load_plan(path)
    assert back.jobs == plan.jobs
    assert back.shots == plan.shots
    assert back.repetitions == plan.repetitions
    assert back.shuffle_seed == plan.shuffle_seed
    assert back.angle_config == plan.angle_config
    assert back.noise == plan.noise
    assert back.drift == plan.drift


def test_plan_unknown_schema(tmp_path):
    path = tmp_path / "plan.json"
    path.write_text(json.dumps({"schema_version": "qdw-plan/9"}))
    with pytest.raises(DocumentError):
        load_plan(path)


def test_plan_missing_field_is_named(tmp_path):
    plan = sample_plan()
    path = tmp_path / "plan.json"
    save_plan(plan, path)
    obj = json.loads(path.read_text())
    del obj["shots"]
    path.write_text(json.dumps(obj))
    with pytest.raises(DocumentError) as err:
        load_plan(path)
    assert "shots" in str(err.value)


def test_plan_missing_file():
    with pytest.raises(DocumentError):
        load_plan("/nonexistent/plan.json")


def test_counts_round_trip(tmp_path):
    doc = sample_counts_doc()
    path = tmp_path / "counts.json"
    save_counts(doc, path)
    back = load_counts(path)
    assert back.platform_label == doc.platform_label
    assert back.angle_config == doc.angle_config
    assert back.provenance["origin"] == "unit-test"
    assert len(back.jobs) == len(doc.jobs)
    for a, b in zip(doc.jobs, back.jobs):
        assert a.job_index == b.job_index
        assert np.array_equal(a.successes, b.successes)
        assert np.array_equal(a.totals, b.totals)
        assert a.circuit_order == b.circuit_order
        assert a.seed == b.seed


def test_counts_require_jobs():
    with pytest.raises(ValueError):
        CountsDocument("x", default_angles(), jobs=())


def test_counts_missing_cell_is_located(tmp_path):
    doc = sample_counts_doc()
    path = tmp_path / "counts.json"
    save_counts(doc, path)
    obj = json.loads(path.read_text())
    del obj["jobs"][1]["successes"][2][3]
    path.write_text(json.dumps(obj))
    with pytest.raises(DocumentError) as err:
        load_counts(path)
    assert "jobs[1]" in str(err.value)


def test_counts_bad_cell_value(tmp_path):
    doc = sample_counts_doc()
    path = tmp_path / "counts.json"
    save_counts(doc, path)
    obj = json.loads(path.read_text())
    obj["jobs"][0]["successes"][0][0] = obj["jobs"][0]["totals"][0][0] + 5
    path.write_text(json.dumps(obj))
    with pytest.raises(DocumentError):
        load_counts(path)


CSV_HEADER = "job_index,k,j,successes,total\n"


def csv_body(n_jobs=2, succ=30, tot=100):
    lines = []
    for ji in range(n_jobs):
        for k in range(1, 5):
            for j in range(1, 6):
                lines.append(f"{ji},{k},{j},{succ},{tot}")
    return CSV_HEADER + "\n".join(lines) + "\n"


def test_csv_import(tmp_path):
    path = tmp_path / "run7.csv"
    path.write_text(csv_body())
    doc = load_counts_table(path)
    assert doc.platform_label == "run7"
    assert len(doc.jobs) == 2
    assert np.all(doc.jobs[0].successes == 30)
    assert np.all(doc.jobs[0].totals == 100)
    assert doc.jobs[0].circuit_order == tuple(range(20))
    assert doc.provenance["imported_from"].endswith("run7.csv")


def test_csv_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("job_index,k,j,successes\n0,1,1,5\n")
    with pytest.raises(DocumentError) as err:
        load_counts_table(path)
    assert "total" in str(err.value)


def test_csv_out_of_range_k(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(CSV_HEADER + "0,5,1,10,100\n")
    with pytest.raises(DocumentError) as err:
        load_counts_table(path)
    assert "line 2" in str(err.value)


def test_csv_duplicate_cell(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(CSV_HEADER + "0,1,1,10,100\n0,1,1,11,100\n")
    with pytest.raises(DocumentError) as err:
        load_counts_table(path)
    assert "duplicate" in str(err.value) and "line 3" in str(err.value)


def test_csv_missing_cell(tmp_path):
    path = tmp_path / "bad.csv"
    body = csv_body(n_jobs=1)
    trimmed = "\n".join(body.splitlines()[:-1]) + "\n"  # drop cell (4, 5)
    path.write_text(trimmed)
    with pytest.raises(DocumentError) as err:
        load_counts_table(path)
    assert "(4, 5)" in str(err.value)


def test_csv_non_integer(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(CSV_HEADER + "0,1,1,ten,100\n")
    with pytest.raises(DocumentError) as err:
        load_counts_table(path)
    assert "line 2" in str(err.value)


def test_verdict_logic():
    ok = WitnessResult(w=1e-6, sigma=1e-5, z=0.1, scheme="pooled",
                       t_total=1000)
    bad = WitnessResult(w=1e-3, sigma=1e-5, z=100.0, scheme="pooled",
                        t_total=1000)
    assert verdict_for([ok], 5.0) == "pass"
    assert verdict_for([ok, bad], 5.0) == "fail"
    assert verdict_for([None, ok], 5.0) == "pass"
    assert verdict_for([], 5.0) == "pass"
    with pytest.raises(ValueError):
        verdict_for([ok], 0.0)


def test_verdict_threshold_is_exclusive():
    r = WitnessResult(w=1.0, sigma=0.2, z=5.0, scheme="pooled", t_total=10)
    assert verdict_for([r], 5.0) == "pass"  # |z| must exceed the threshold


def test_hardware_summary_arithmetic():
    # Worked example with superconducting-device numbers: the pooled
    # witness came out at -29.8e-5 with sigma 2.3e-5.
    w, sigma = -29.8e-5, 2.3e-5
    z = w / sigma
    res = WitnessResult(w=w, sigma=sigma, z=z, scheme="pooled",
                        t_total=10_000_000)
    assert abs(z - (-12.96)) < 0.05
    assert verdict_for([res], 5.0) == "fail"


def test_build_report_two_schemes(tmp_path):
    doc = sample_counts_doc()
    report = build_report(doc, threshold=5.0)
    assert report.verdict in ("pass", "fail")
    assert report.scheme_per_job is not None
    assert report.scheme_per_job.scheme == "per_job"
    assert report.scheme_pooled.scheme == "pooled"
    assert len(report.per_job_w) == 3
    assert report.provenance["origin"] == "unit-test"
    assert report.provenance["kernel_backend"] in ("python", "compiled")
    assert report.threshold == 5.0


def test_build_report_single_job_omits_per_job_scheme():
    plan = ExperimentPlan(jobs=1, shots=500, repetitions=1,
                          angle_config=default_angles(), shuffle_seed=3)
    doc = CountsDocument("simulator", plan.angle_config,
                         simulate_counts(plan))
    report = build_report(doc)
    assert report.scheme_per_job is None
    assert report.verdict in ("pass", "fail")


def test_report_round_trip(tmp_path):
    report = build_report(sample_counts_doc(), threshold=4.5,
                          provenance={"note": "rt"})
    path = tmp_path / "report.json"
    save_report(report, path)
    back = load_report(path)
    assert back.verdict == report.verdict
    assert back.threshold == 4.5
    assert back.scheme_pooled.w == report.scheme_pooled.w
    assert back.scheme_pooled.sigma == report.scheme_pooled.sigma
    assert back.scheme_per_job.z == report.scheme_per_job.z
    assert back.per_job_w == report.per_job_w
    assert back.provenance["note"] == "rt"
    assert np.array_equal(np.array(back.prob_matrix_pooled.entries),
                          np.array(report.prob_matrix_pooled.entries))


def test_report_unknown_schema(tmp_path):
    path = tmp_path / "report.json"
    path.write_text(json.dumps({"schema_version": "nope/1"}))
    with pytest.raises(DocumentError):
        load_report(path)


def test_format_verdict_line():
    res = WitnessResult(w=-29.8e-5, sigma=2.3e-5, z=-29.8e-5 / 2.3e-5,
                        scheme="pooled", t_total=10_000_000)
    report = ReportDocument(
        platform_label="nairobi", angle_config=default_angles(),
        threshold=5.0, verdict=verdict_for([res], 5.0),
        scheme_per_job=None, scheme_pooled=res, per_job_w=(),
        prob_matrix_pooled=build_report(sample_counts_doc()).prob_matrix_pooled,
        provenance={})
    assert format_verdict_line(report) == "fail (z = -13.0)"


def test_render_report_writes_files(tmp_path):
    report = build_report(sample_counts_doc())
    out = tmp_path / "rendered"
    paths = render_report(report, out)
    names = sorted(p.name for p in paths)
    assert names == ["fmatrix.svg", "jobs.svg", "report.txt", "viviani.svg"]
    text = (out / "report.txt").read_text()
    assert report.verdict in text
    assert "pooled" in text
    svg = (out / "fmatrix.svg").read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    # the ideal matrix has an exact-zero cell; the heatmap must print it
    assert ">0<" in svg
    jobs_svg = (out / "jobs.svg").read_text()
    assert jobs_svg.count("<circle") >= len(report.per_job_w)
    viv = (out / "viviani.svg").read_text()
    assert "<ellipse" in viv or "<circle" in viv


def test_render_report_unwritable_dir(tmp_path):
    report = build_report(sample_counts_doc())
    blocker = tmp_path / "blocked"
    blocker.write_text("a file, not a directory")
    with pytest.raises(DocumentError):
        render_report(report, blocker)


def test_saved_documents_end_with_newline(tmp_path):
    plan = sample_plan()
    p1 = tmp_path / "plan.json"
    save_plan(plan, p1)
    assert p1.read_text().endswith("\n")
