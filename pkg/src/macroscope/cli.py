"""Command-line front end: JSON in, JSON/CSV out.

Exit codes: 0 success, 2 malformed input (schema), 3 violated precondition
(e.g. singular prior), 4 internal consistency failure.  Every command is
deterministic given its inputs and --seed.
"""

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor

from . import io
from .correlations import observational_discord
from .entropy import (
    EntropyValue,
    observational_deficit,
    observational_entropy,
    von_neumann_entropy,
)
from .errors import ConsistencyError, MacroscopeError, SchemaError, TheoremViolation
from .evolution import evolve_trajectory, macroscopic_initial_state
from .linalg import DEFAULT_TOL
from .mppp import MacroReport, compute_mppp, frame_payload, macro_test
from .quantum import maximally_mixed
from .resources import (
    classify_channel,
    scenario_asymmetry,
    scenario_athermality,
    scenario_coherence,
)

EPILOG = """\
exit codes:
  0  success
  2  malformed JSON or schema violation (diagnostic names file and field)
  3  precondition violated (singular prior, dimension mismatch, ...)
  4  internal consistency failure (conditions proved equivalent disagreed)
"""


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _ev_json(value: EntropyValue) -> dict:
    return {
        "bits": float(value.value) if value.finite else None,
        "finite": bool(value.finite),
    }


def _macro_report_json(report: MacroReport) -> dict:
    return {
        "deficit": _ev_json(report.deficit),
        "deficit_zero": report.deficit_zero,
        "cg_fixed": report.cg_fixed,
        "cg_residual": report.cg_residual,
        "rdm_fixed": report.rdm_fixed,
        "rdm_residual": report.rdm_residual,
        "coefficients": list(report.coefficients) if report.coefficients else None,
        "fit_residual": report.fit_residual,
        "verdict": report.verdict,
    }


def _flatten(prefix: str, obj, rows: list):
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(f"{prefix}.{key}" if prefix else key, obj[key], rows)
    elif isinstance(obj, list):
        for i, item in enumerate(obj):
            _flatten(f"{prefix}[{i}]", item, rows)
    elif isinstance(obj, bool):
        rows.append((prefix, "1" if obj else "0"))
    elif isinstance(obj, (int, float)):
        rows.append((prefix, _fmt(obj)))
    elif obj is None:
        rows.append((prefix, ""))
    else:
        rows.append((prefix, str(obj)))


def _append_csv(path: str, command: str, source: str, result: dict):
    rows = []
    _flatten("", result, rows)
    new_file = True
    try:
        with open(path) as fh:
            new_file = fh.read(1) == ""
    except FileNotFoundError:
        pass
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(["command", "source", "field", "value"])
        for field, value in rows:
            writer.writerow([command, source, field, value])


def _emit(args, result):
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _run_many(paths, worker, jobs: int):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, paths))
    return [worker(p) for p in paths]


def _finish_states(args, command: str, results: list[tuple[str, dict]]):
    if args.csv:
        for source, res in results:
            _append_csv(args.csv, command, source, res)
    payload = [dict(res, source=src) for src, res in results]
    _emit(args, payload[0] if len(payload) == 1 else payload)


# ---------------------------------------------------------------------------
# commands


def cmd_mppp(args) -> int:
    povm = io.povm_from_json(io.load_json(args.povm), args.povm, DEFAULT_TOL)
    prior = io.state_from_json(io.load_json(args.prior), args.prior, DEFAULT_TOL)
    frame = compute_mppp(povm, prior, DEFAULT_TOL, zero_tol=args.tol)
    _emit(args, frame_payload(frame))
    return 0


def cmd_entropy(args) -> int:
    povm = io.povm_from_json(io.load_json(args.povm), args.povm, DEFAULT_TOL)

    def worker(path):
        rho = io.state_from_json(io.load_json(path), path, DEFAULT_TOL)
        uniform = maximally_mixed(rho.dim)
        return path, {
            "observational_entropy": _ev_json(observational_entropy(rho, povm)),
            "von_neumann_entropy": _ev_json(von_neumann_entropy(rho)),
            "deficit_uniform": _ev_json(observational_deficit(rho, uniform, povm)),
        }

    _finish_states(args, "entropy", _run_many(args.state, worker, args.jobs))
    return 0


def cmd_deficit(args) -> int:
    povm = io.povm_from_json(io.load_json(args.povm), args.povm, DEFAULT_TOL)
    prior = io.state_from_json(io.load_json(args.prior), args.prior, DEFAULT_TOL)

    def worker(path):
        rho = io.state_from_json(io.load_json(path), path, DEFAULT_TOL)
        return path, {"deficit": _ev_json(observational_deficit(rho, prior, povm))}

    _finish_states(args, "deficit", _run_many(args.state, worker, args.jobs))
    return 0


def cmd_macro_test(args) -> int:
    povm = io.povm_from_json(io.load_json(args.povm), args.povm, DEFAULT_TOL)
    prior = io.state_from_json(io.load_json(args.prior), args.prior, DEFAULT_TOL)
    frame = compute_mppp(povm, prior, DEFAULT_TOL, zero_tol=args.tol)

    def worker(path):
        rho = io.state_from_json(io.load_json(path), path, DEFAULT_TOL)
        return path, _macro_report_json(macro_test(rho, frame))

    _finish_states(args, "macro-test", _run_many(args.state, worker, args.jobs))
    return 0


def cmd_classify(args) -> int:
    povm = io.povm_from_json(io.load_json(args.povm), args.povm, DEFAULT_TOL)
    prior = io.state_from_json(io.load_json(args.prior), args.prior, DEFAULT_TOL)
    frame = compute_mppp(povm, prior, DEFAULT_TOL, zero_tol=args.tol)

    def worker(path):
        channel = io.channel_from_json(io.load_json(path), path)
        c = classify_channel(channel, frame)
        return path, {
            "cco": c.is_cco,
            "rco": c.is_rco,
            "mno": c.is_mno,
            "residuals": {
                "cco": c.cco_residual,
                "rco": c.rco_residual,
                "mno": c.mno_residual,
            },
        }

    _finish_states(args, "classify", _run_many(args.channel, worker, args.jobs))
    return 0


def cmd_discord(args) -> int:
    povm = io.povm_from_json(io.load_json(args.povm), args.povm, DEFAULT_TOL)
    dims = (args.dims[0], args.dims[1])

    def worker(path):
        rho = io.state_from_json(io.load_json(path), path, DEFAULT_TOL)
        rep = observational_discord(rho, povm, dims)
        return path, {
            "total_mi": _ev_json(rep.total_mi),
            "measured_mi": _ev_json(rep.measured_mi),
            "discord": _ev_json(rep.discord),
            "vanishing": rep.vanishing,
            "structure": _macro_report_json(rep.structure) if rep.structure else None,
        }

    _finish_states(args, "discord", _run_many(args.state, worker, args.jobs))
    return 0


def cmd_evolve(args) -> int:
    povm = io.povm_from_json(io.load_json(args.povm), args.povm, DEFAULT_TOL)
    prior = io.state_from_json(io.load_json(args.prior), args.prior, DEFAULT_TOL)
    hamiltonian = io.hamiltonian_from_json(
        io.load_json(args.hamiltonian), args.hamiltonian
    )
    if (args.initial_p is None) == (args.initial_state is None):
        raise MacroscopeError("give exactly one of --initial-p / --initial-state")
    if args.initial_p is not None:
        frame = compute_mppp(povm, prior, DEFAULT_TOL, zero_tol=args.tol)
        weights = [float(w) for w in args.initial_p.split(",")]
        initial = macroscopic_initial_state(frame, weights)
    else:
        initial = io.state_from_json(
            io.load_json(args.initial_state), args.initial_state, DEFAULT_TOL
        )
    points = evolve_trajectory(povm, hamiltonian, initial, args.t_max, args.steps)

    header = ["t", "von_neumann_bits", "observational_entropy_bits", "deficit_uniform_bits"]
    rows = [
        [_fmt(p.t), _fmt(p.von_neumann_bits), _fmt(p.observational_entropy_bits),
         _fmt(p.deficit_uniform_bits)]
        for p in points
    ]
    if args.output:
        with open(args.output, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
    if args.plot is not False:
        from .plotting import render_trajectory_figure

        target = args.plot
        if target is None:
            stem = args.output.rsplit(".", 1)[0] if args.output else "trajectory"
            target = stem + ".png"
        render_trajectory_figure(points, target)
    return 0


def cmd_scenario(args) -> int:
    if args.kind == "coherence":
        frame = scenario_coherence(args.dim)
    elif args.kind == "athermality":
        if not args.hamiltonian or not args.povm:
            raise MacroscopeError("athermality needs --hamiltonian and --povm")
        hamiltonian = io.hamiltonian_from_json(
            io.load_json(args.hamiltonian), args.hamiltonian
        )
        povm = io.povm_from_json(io.load_json(args.povm), args.povm, DEFAULT_TOL)
        frame = scenario_athermality(hamiltonian, args.beta, povm)
    else:
        if not args.unitaries:
            raise MacroscopeError("asymmetry needs --unitaries")
        payload = io.load_json(args.unitaries)
        if not isinstance(payload, list):
            raise SchemaError("expected a list of matrices", location=args.unitaries)
        mats = [
            io.matrix_from_json(m, f"{args.unitaries}[{i}]")
            for i, m in enumerate(payload)
        ]
        frame = scenario_asymmetry(mats, seed=args.seed)
    result = {
        "povm": io.povm_to_json(frame.povm),
        "prior": io.state_to_json(frame.prior),
        **frame_payload(frame),
    }
    _emit(args, result)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macroscope",
        description="Macroscopic-state structure of finite quantum systems under "
        "a fixed measurement and prior.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the result to this file instead of stdout")
    common.add_argument("--csv", help="append flattened numeric results to this CSV file")
    common.add_argument("--tol", type=float, default=None,
                        help="relative tolerance for the partition zero tests")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized subcommands")
    common.add_argument("--jobs", type=int, default=1,
                        help="process multiple input files in parallel")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mppp", parents=[common],
                       help="partition, maximal projective post-processing, and RDM")
    p.add_argument("--povm", required=True)
    p.add_argument("--prior", required=True)
    p.set_defaults(func=cmd_mppp)

    p = sub.add_parser("entropy", parents=[common],
                       help="observational and von Neumann entropy of states")
    p.add_argument("--state", nargs="+", required=True)
    p.add_argument("--povm", required=True)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("deficit", parents=[common],
                       help="observational deficit against a prior")
    p.add_argument("--state", nargs="+", required=True)
    p.add_argument("--povm", required=True)
    p.add_argument("--prior", required=True)
    p.set_defaults(func=cmd_deficit)

    p = sub.add_parser("macro-test", parents=[common],
                       help="test the four equivalent macroscopicity conditions")
    p.add_argument("--state", nargs="+", required=True)
    p.add_argument("--povm", required=True)
    p.add_argument("--prior", required=True)
    p.set_defaults(func=cmd_macro_test)

    p = sub.add_parser("classify", parents=[common],
                       help="CCO/RCO/MNO membership of channels")
    p.add_argument("--channel", nargs="+", required=True)
    p.add_argument("--povm", required=True)
    p.add_argument("--prior", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("discord", parents=[common],
                       help="observational discord of bipartite states")
    p.add_argument("--state", nargs="+", required=True)
    p.add_argument("--povm", required=True, help="POVM on subsystem A")
    p.add_argument("--dims", nargs=2, type=int, required=True, metavar=("DA", "DB"))
    p.set_defaults(func=cmd_discord)

    p = sub.add_parser("evolve", parents=[common],
                       help="entropy growth along unitary evolution (CSV report)")
    p.add_argument("--povm", required=True)
    p.add_argument("--prior", required=True)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--initial-p", help="comma-separated block weights of a macroscopic initial state")
    p.add_argument("--initial-state", help="JSON state file for the initial state")
    p.add_argument("--plot", nargs="?", default=False, const=None,
                   help="also render the entropy curves to a figure file "
                        "(default: CSV stem + .png)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("scenario", parents=[common],
                       help="fixtures reducing to known resource theories")
    p.add_argument("kind", choices=["coherence", "athermality", "asymmetry"])
    p.add_argument("--dim", type=int, default=2, help="dimension (coherence)")
    p.add_argument("--hamiltonian", help="Hamiltonian JSON (athermality)")
    p.add_argument("--beta", type=float, default=1.0, help="inverse temperature (athermality)")
    p.add_argument("--povm", help="POVM JSON (athermality)")
    p.add_argument("--unitaries", help="JSON list of unitary matrices (asymmetry)")
    p.set_defaults(func=cmd_scenario)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except (TheoremViolation, ConsistencyError) as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 4
    except (MacroscopeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
