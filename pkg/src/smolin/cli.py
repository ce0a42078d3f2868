"""smolin: command-line front end.

Usage:
    smolin state --p 0.49 --out rho.json
    smolin simulate --p 0.49 --source-model fitted --counts 38000 --seed 1 --out sim/
    smolin analyze --counts table1
    smolin analyze --counts table3 --mc 500 --seed 7
    smolin analyze --state rho.json --target-p 0.49
    smolin unlock --p 0.49 --counts 40000 --mc 500 --seed 3 --out unlock/
    smolin mc --counts table3 --statistic tangle --iterations 500 --seed 1
    smolin reproduce --out repro/

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, io
from .errors import NumericalError, ValidationError
from .mle import check_informationally_complete, mle_reconstruct
from .montecarlo import STATISTICS, McConfig, monte_carlo
from .reproduce import reproduce
from .states import SourceModel, fitted_source_models, noisy_smolin, source_state
from .tomography import (
    basis_settings,
    find_witness_tables,
    overcomplete_settings,
    simulate_counts,
    witness_from_counts,
    witness_settings,
)
from .unlocking import BellProjectionSpec, simulate_unlocking_run

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _load_sources(spec: str | None):
    """``None``/``ideal`` -> ideal pair; ``fitted`` -> fitted colored models; else a JSON file or literal.

    A JSON object either describes one model used for both sources, or has
    keys ``source1`` and ``source2``.
    """
    if spec in (None, "ideal"):
        return SourceModel(), SourceModel()
    if spec == "fitted":
        return fitted_source_models(1), fitted_source_models(2)
    text = Path(spec).read_text() if Path(spec).exists() else spec
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"--source-model is neither a file nor JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("--source-model JSON must be an object")
    if "source1" in data or "source2" in data:
        return SourceModel.from_dict(data.get("source1", {})), SourceModel.from_dict(data.get("source2", {}))
    model = SourceModel.from_dict(data)
    return model, model


def _emit(obj, fmt: str, out=None) -> None:
    if fmt == "json":
        text = json.dumps(obj, indent=1, default=_json_default) + "\n"
    else:
        rows = _flatten(obj)
        buf = [f"{k},{v}" for k, v in rows]
        text = "key,value\n" + "\n".join(buf) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serialisable: {type(o)}")


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), "" if obj is None else obj


def _out_dir(path) -> Path:
    d = Path(path)
    d.mkdir(parents=True, exist_ok=True)
    return d


# --- commands ---------------------------------------------------------------------


def cmd_state(args) -> int:
    rho = noisy_smolin(args.p)
    io.write_density_matrix(args.out, rho)
    return 0


def cmd_simulate(args) -> int:
    sources = _load_sources(args.source_model)
    rho = source_state(args.p, *sources)
    settings = {
        "full": basis_settings(4),
        "overcomplete": overcomplete_settings(4),
        "witness": witness_settings(),
    }[args.mode]
    tables = simulate_counts(rho, settings, args.counts, np.random.default_rng(args.seed))
    out = _out_dir(args.out)
    ext = "json" if args.format == "json" else "csv"
    io.write_counts(out / f"counts_{args.mode}.{ext}", tables, args.format, p=args.p, seed=args.seed)
    return 0


def _analysis_report(tables, target, mc_iterations, seed, workers) -> dict:
    report = {}
    witness = find_witness_tables(tables)
    if witness is not None:
        w, s = witness_from_counts(*witness)
        report["witness_sum"] = {"value": w, "sigma": s}
    try:
        check_informationally_complete(tables)
    except NumericalError:
        if witness is None:
            raise
        return report

    rho = mle_reconstruct(tables)
    base = analysis.analyze_state(rho, target).to_dict()
    base.pop("witness_sum")
    if mc_iterations:
        names = ["min_pt_eig"]
        if base["n_qubits"] == 4:
            names.append("witness")
        if base["n_qubits"] == 2:
            names.append("tangle")
        if target is not None:
            names.append("fidelity")
        mc = monte_carlo(tables, names, McConfig(mc_iterations, seed, workers), target=target)
        key = {"min_pt_eig": "min_pt_eig", "witness": "witness", "tangle": "tangle", "fidelity": "fidelity_with_target"}
        for name, res in mc.items():
            base[key[name]]["sigma"] = res.std
        base["mc_histograms"] = {k: v.to_dict() for k, v in mc.items()}
    report.update(base)
    report["rho"] = io.density_matrix_to_dict(rho)
    return report


def cmd_analyze(args) -> int:
    target = None if args.target_p is None else noisy_smolin(args.target_p)
    if args.state:
        rho = io.read_density_matrix(args.state)
        report = analysis.analyze_state(rho, target).to_dict()
    else:
        tables = io.read_counts(args.counts)
        report = _analysis_report(tables, target, args.mc, args.seed, args.workers)
    _emit(report, args.format, args.report)
    return 0


def cmd_unlock(args) -> int:
    sources = _load_sources(args.source_model)
    spec = BellProjectionSpec(tuple(args.parties), args.mu, args.visibility, args.chi)
    tables = simulate_unlocking_run(args.p, sources, spec, args.counts, args.seed)
    out = _out_dir(args.out)
    ext = "json" if args.format == "json" else "csv"
    io.write_counts(out / f"unlock_counts.{ext}", tables, args.format, p=args.p, seed=args.seed)
    report = _analysis_report(tables, None, args.mc, args.seed, args.workers)
    _emit(report, "json", out / "unlock_report.json")
    _emit({k: report[k] for k in ("tangle", "min_pt_eig", "min_pt_cut")}, args.format)
    return 0


def cmd_mc(args) -> int:
    tables = io.read_counts(args.counts)
    target = None if args.target_p is None else noisy_smolin(args.target_p)
    res = monte_carlo(tables, [args.statistic], McConfig(args.iterations, args.seed, args.workers), target=target)
    res = res[args.statistic]
    if args.format == "csv":
        lines = ["bin_left,bin_right,count"]
        for i, c in enumerate(res.hist):
            lines.append(f"{res.bin_edges[i]!r},{res.bin_edges[i + 1]!r},{int(c)}")
        text = "\n".join(lines) + "\n"
        if args.report:
            Path(args.report).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(res.to_dict(include_samples=args.samples), "json", args.report)
    return 0


def cmd_reproduce(args) -> int:
    summary = reproduce(args.out, mc_iterations=args.mc_iterations, seed=args.seed, workers=args.workers)
    _emit({"out": str(args.out), "table1": summary["table1"], "table3": summary["table3"]}, "json")
    return 0


# --- parser -----------------------------------------------------------------------


def _prob(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{v} is outside [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smolin", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, counts_default=None, seed=True, fmt=True):
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if fmt:
            p.add_argument("--format", choices=("json", "csv"), default="json" if counts_default is None else "csv")

    p = sub.add_parser("state", help="write the noisy Smolin density matrix as JSON")
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--out", required=True, help="output JSON file")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("simulate", help="simulate four-qubit count tables")
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--counts", type=float, default=38_000.0, help="mean counts per basis setting")
    p.add_argument("--source-model", default=None, help="'ideal', 'fitted', or a JSON file/literal")
    p.add_argument("--mode", choices=("full", "overcomplete", "witness"), default="full")
    p.add_argument("--out", required=True, help="output directory")
    common(p, counts_default=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="certify a state file or count tables")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help="density-matrix JSON file")
    src.add_argument("--counts", help="count file (.csv/.json) or bundled name: table1, table3")
    p.add_argument("--target-p", type=_prob, default=None)
    p.add_argument("--mc", type=int, default=0, help="Monte-Carlo iterations for error bars")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report", default=None, help="write the report here instead of stdout")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("unlock", help="simulate Bell projection of two parties and analyse the rest")
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--counts", type=float, default=40_000.0, help="mean counts per basis setting")
    p.add_argument("--source-model", default=None)
    p.add_argument("--parties", type=int, nargs=2, default=(0, 2))
    p.add_argument("--mu", type=int, choices=(0, 1, 2, 3), default=3)
    p.add_argument("--visibility", type=_prob, default=1.0)
    p.add_argument("--chi", type=float, default=None)
    p.add_argument("--mc", type=int, default=500)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_unlock)

    p = sub.add_parser("mc", help="Monte-Carlo distribution of one statistic")
    p.add_argument("--counts", required=True)
    p.add_argument("--statistic", choices=STATISTICS, required=True)
    p.add_argument("--target-p", type=_prob, default=None)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--samples", action="store_true", help="include raw samples in JSON output")
    p.add_argument("--report", default=None)
    common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("reproduce", help="write theory curves, simulated scan and data re-analysis")
    p.add_argument("--out", required=True)
    p.add_argument("--mc-iterations", type=int, default=200)
    p.add_argument("--seed", type=int, default=2011)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
