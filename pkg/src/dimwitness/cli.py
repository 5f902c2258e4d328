"""Command-line entry point.

Subcommands: simulate (plan file -> counts file), analyze (counts file ->
report + figures), optimize-angles, report (re-render a saved report), and
selftest.  Exit codes are part of the interface: 0 success or verdict pass,
1 usage error, 2 data error, 3 witness verdict fail (or a failed selftest),
so shell pipelines can gate on certification directly.

When --out is omitted, the directory named by the DIMWITNESS_OUT
environment variable is used.
"""

import argparse
import hashlib
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import io as iodocs
from . import kernels, montecarlo, optimizer, witness
from .witness import AngleConfig, default_angles

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERDICT = 3

ENV_OUT = "DIMWITNESS_OUT"


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; this interface reserves 2 for
    data errors, so remap usage failures to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sha256(path):
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def _default_out(required_name=None):
    base = os.environ.get(ENV_OUT, "").strip()
    if not base:
        return None
    return str(Path(base) / required_name) if required_name else base


def _resolve_out(args, name=None):
    out = getattr(args, "out", None) or _default_out(name)
    if out is None:
        print("error: --out is required (or set DIMWITNESS_OUT)",
              file=sys.stderr)
        return None
    return out


def cmd_simulate(args):
    out = _resolve_out(args, "counts.json")
    if out is None:
        return EXIT_USAGE
    plan = iodocs.load_plan(args.plan)
    if args.seed is not None:
        plan = montecarlo.ExperimentPlan(
            jobs=plan.jobs, shots=plan.shots, repetitions=plan.repetitions,
            angle_config=plan.angle_config, noise=plan.noise,
            shuffle_seed=args.seed, drift=plan.drift,
        )
    print(f"plan: {plan.jobs} job(s) x {plan.shots} shot(s) x "
          f"{plan.repetitions} repetition(s) -> T_total = {plan.t_total} "
          "samples per cell")
    started = time.perf_counter()
    jobs = montecarlo.simulate_counts(plan, workers=args.jobs_parallel)
    for job in jobs:
        print(f"job {job.job_index + 1}/{plan.jobs}: "
              f"{int(job.totals[0][0])} samples/cell, seed {job.seed}")
    from . import __version__
    doc = iodocs.CountsDocument(
        platform_label="simulator",
        angle_config=plan.angle_config,
        jobs=jobs,
        provenance={
            "package_version": __version__,
            "kernel_backend": kernels.backend_name,
            "plan_sha256": _sha256(args.plan),
            "shuffle_seed": plan.shuffle_seed,
        },
    )
    iodocs.save_counts(doc, out)
    elapsed = time.perf_counter() - started
    print(f"wrote {out} ({len(jobs)} job(s), {elapsed:.2f}s)")
    return EXIT_OK


def cmd_analyze(args):
    out_dir = _resolve_out(args)
    if out_dir is None:
        return EXIT_USAGE
    src = Path(args.counts)
    if src.suffix.lower() == ".csv":
        doc = iodocs.load_counts_table(src)
    else:
        doc = iodocs.load_counts(src)
    report = iodocs.build_report(
        doc, threshold=args.threshold_sigma,
        provenance={"counts_file": src.name, "counts_sha256": _sha256(src)},
    )
    written = iodocs.render_report(report, out_dir)
    iodocs.save_report(report, Path(out_dir) / "report.json")
    for r in (report.scheme_per_job, report.scheme_pooled):
        if r is None:
            continue
        name = "per-job" if r.scheme == "per_job" else "pooled "
        print(f"{name}: W = {r.w:+.6e}  sigma = {r.sigma:.6e}  "
              f"z = {r.z:+.2f}  (T/cell = {r.t_total})")
    print(f"verdict: {iodocs.format_verdict_line(report)} at threshold "
          f"{report.threshold:g} sigma")
    print(f"wrote report.json and {len(written)} file(s) to {out_dir}")
    return EXIT_VERDICT if report.verdict == "fail" else EXIT_OK


def cmd_optimize(args):
    constraint = ("viviani_paired" if args.constraint == "paired"
                  else "free")
    if args.init == "default":
        init = default_angles()
    else:
        rng = np.random.default_rng(args.seed)
        beta = rng.uniform(-math.pi, math.pi, 5)
        if constraint == "viviani_paired":
            phi = [-b for b in beta[:4]]
        else:
            phi = rng.uniform(-math.pi, math.pi, 4)
        init = AngleConfig(beta, phi)
    base = optimizer.sensitivity(init)
    print(f"initial objective (adjugate Frobenius norm): "
          f"{base.adj_frobenius:.9f}")
    result = optimizer.optimize_angles(init, budget=args.budget,
                                       constraint=constraint)
    print(f"best objective:                              "
          f"{result.adj_frobenius:.9f}")
    beta = ", ".join(f"{b:+.6f}" for b in result.angles.beta)
    phi = ", ".join(f"{f:+.6f}" for f in result.angles.phi)
    print(f"beta: {beta}")
    print(f"phi:  {phi}")
    print(f"predicted witness sigma at T=10^6: "
          f"{result.predicted_sigma_at_t:.3e}")
    out = getattr(args, "out", None) or _default_out("angles.json")
    if out:
        iodocs._write_json({
            "schema_version": "qdw-angles/1",
            "constraint": constraint,
            "budget": args.budget,
            "beta": list(result.angles.beta),
            "phi": list(result.angles.phi),
            "adj_frobenius": result.adj_frobenius,
            "adj_min_abs": result.adj_min_abs,
            "predicted_sigma_at_t": result.predicted_sigma_at_t,
        }, out)
        print(f"wrote {out}")
    return EXIT_OK


def cmd_report(args):
    out_dir = _resolve_out(args)
    if out_dir is None:
        return EXIT_USAGE
    report = iodocs.load_report(args.report)
    written = iodocs.render_report(report, out_dir)
    print(f"verdict: {iodocs.format_verdict_line(report)}")
    print(f"wrote {len(written)} file(s) to {out_dir}")
    return EXIT_VERDICT if report.verdict == "fail" else EXIT_OK


# ---------------------------------------------------------------- selftest

def _check_unitarity():
    from .core import make_s_theta

    rng = np.random.default_rng(101)
    worst = 0.0
    for theta in rng.uniform(-math.pi, math.pi, 200):
        m = make_s_theta(theta).matrix
        worst = max(worst, float(np.max(np.abs(m @ m.conj().T - np.eye(2)))))
    return worst, 1e-12


def _check_det_reference():
    rng = np.random.default_rng(202)
    worst = 0.0
    eye = np.eye(5)
    worst = max(worst, abs(witness.determinant(eye) - 1.0))
    for _ in range(50):
        m = rng.uniform(0.0, 1.0, (5, 5))
        worst = max(worst, abs(witness.determinant(m) - np.linalg.det(m)))
    return worst, 1e-10


def _check_null():
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(400):
        angles = AngleConfig(rng.uniform(-math.pi, math.pi, 5),
                             rng.uniform(-math.pi, math.pi, 4))
        worst = max(worst, abs(witness.determinant(
            witness.ideal_prob_matrix(angles))))
    return worst, 1e-12


def _check_row_shift():
    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(100):
        m = np.ones((5, 5))
        m[:4] = rng.uniform(0.0, 1.0, (4, 5))
        shifted = m.copy()
        shifted[:4] += rng.uniform(-0.3, 0.3, 4).reshape(4, 1)
        worst = max(worst, abs(witness.determinant(shifted)
                               - witness.determinant(m)))
    return worst, 1e-10


def _check_adjugate_identity():
    rng = np.random.default_rng(505)
    worst = 0.0
    for _ in range(100):
        m = rng.uniform(0.0, 1.0, (5, 5))
        d = witness.determinant(m)
        worst = max(worst, float(np.max(np.abs(
            m @ witness.adjugate(m) - d * np.eye(5)))))
    return worst, 1e-10


def _check_sigma_calibration():
    t = 2500
    runs = 200
    angles = default_angles()
    analytic = witness.witness_sigma(witness.ideal_prob_matrix(angles), t)
    ws = []
    for i in range(runs):
        plan = montecarlo.ExperimentPlan(
            jobs=1, shots=t, repetitions=1, angle_config=angles,
            shuffle_seed=9000 + i,
        )
        counts = montecarlo.simulate_counts(plan)
        ws.append(witness.determinant(montecarlo.empirical_F(counts)))
    ratio = float(np.std(ws, ddof=1) / analytic)
    # pass margin expressed as distance of the ratio from 1
    return abs(ratio - 1.0), 0.2


def _check_backends():
    if kernels.backend_name != "compiled":
        return None
    from . import _kernels_py
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(50):
        m = rng.uniform(0.0, 1.0, (5, 5))
        worst = max(worst, abs(kernels.det5(m) - _kernels_py.det5(m)))
        worst = max(worst, float(np.max(np.abs(
            kernels.adjugate5(m) - _kernels_py.adjugate5(m)))))
    a = rng.uniform(-math.pi, math.pi, 9)
    worst = max(worst, abs(kernels.adj_frobenius(a[:5], a[5:])
                           - _kernels_py.adj_frobenius(a[:5], a[5:])))
    return worst, 1e-13


_SELFTEST_CHECKS = (
    ("phase-gate unitarity", _check_unitarity),
    ("determinant vs LU cross-check", _check_det_reference),
    ("witness null over random settings", _check_null),
    ("row-shift invariance", _check_row_shift),
    ("adjugate identity", _check_adjugate_identity),
    ("sigma calibration (reduced scale)", _check_sigma_calibration),
    ("kernel backend agreement", _check_backends),
)


def cmd_selftest(_args):
    print(f"kernel backend: {kernels.backend_name}")
    failures = 0
    started = time.perf_counter()
    for name, fn in _SELFTEST_CHECKS:
        outcome = fn()
        if outcome is None:
            print(f"SKIP {name:<36} (single backend)")
            continue
        margin, tol = outcome
        ok = margin <= tol
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{status} {name:<36} margin {margin:.3e} (tol {tol:g})")
    elapsed = time.perf_counter() - started
    print(f"{len(_SELFTEST_CHECKS)} checks in {elapsed:.1f}s, "
          f"{failures} failure(s)")
    return EXIT_VERDICT if failures else EXIT_OK


def _build_parser():
    parser = _Parser(
        prog="dimwitness",
        description="Determinant dimension-witness test: simulate counts, "
                    "analyze recorded counts, tune angle sensitivity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run an experiment plan")
    p_sim.add_argument("--plan", required=True, help="plan JSON file")
    p_sim.add_argument("--out", help="output counts file "
                       "(default: $DIMWITNESS_OUT/counts.json)")
    p_sim.add_argument("--seed", type=int, default=None,
                       help="override the plan's shuffle_seed")
    p_sim.add_argument("--jobs-parallel", type=int, default=1,
                       metavar="N", help="simulate jobs in N processes "
                       "(default 1; results are identical)")
    p_sim.set_defaults(func=cmd_simulate)

    p_an = sub.add_parser("analyze", help="analyze a counts file")
    p_an.add_argument("--counts", required=True,
                      help="counts JSON document, or a CSV table "
                      "(job_index,k,j,successes,total)")
    p_an.add_argument("--out", help="output directory "
                      "(default: $DIMWITNESS_OUT)")
    p_an.add_argument("--threshold-sigma", type=float,
                      default=iodocs.DEFAULT_THRESHOLD,
                      help="verdict threshold in sigma units (default 5)")
    p_an.set_defaults(func=cmd_analyze)

    p_opt = sub.add_parser("optimize-angles",
                           help="search angle settings for sensitivity")
    p_opt.add_argument("--init", choices=("default", "random"),
                       default="default", help="starting configuration")
    p_opt.add_argument("--seed", type=int, default=0,
                       help="seed for --init random")
    p_opt.add_argument("--budget", type=int, default=10000,
                       help="objective evaluation budget (default 10000)")
    p_opt.add_argument("--constraint", choices=("paired", "free"),
                       default="paired",
                       help="paired enforces phi_k = -beta_k")
    p_opt.add_argument("--out", help="write the best angles as JSON")
    p_opt.set_defaults(func=cmd_optimize)

    p_rep = sub.add_parser("report", help="re-render a saved report")
    p_rep.add_argument("--report", required=True, help="report JSON file")
    p_rep.add_argument("--out", help="output directory "
                       "(default: $DIMWITNESS_OUT)")
    p_rep.set_defaults(func=cmd_report)

    p_st = sub.add_parser("selftest",
                          help="run the numeric invariant suite")
    p_st.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except iodocs.DocumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
