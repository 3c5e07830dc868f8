"""``graphsim`` command-line front end.

Exit codes: 0 success, 2 config error, 3 computation error, 4 acceptance failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Optional

from .comb import coverage_report, pump_comb_graph
from .dynamics import EvolutionSpec, evolve_vacuum
from .errors import ComputationError, ConfigError, InvalidArgument
from .graphs import spectrum
from .heterodyne import DetectionPlan, channel_frequency, measured_variance
from .reproduce import TOLERANCES, reproduce_paper
from .scenario import Scenario, build_graph, comb_from_config, run_scenario, write_table

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_ACCEPTANCE = 0, 2, 3, 4


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _graph_only(cfg: dict):
    return build_graph(cfg["graph"] if "graph" in cfg else cfg)


def cmd_spectrum(args, cfg) -> str:
    g, _ = _graph_only(cfg)
    sp = spectrum(g)
    if args.format == "json":
        return json.dumps({"n": g.n_modes, "method": sp.method, "eigenvalues": sp.eigenvalues.tolist(),
                           "eigenvectors": sp.eigenvectors.tolist()}, indent=2) + "\n"
    return write_table(["index", "eigenvalue"], [[i, float(v)] for i, v in enumerate(sp.eigenvalues)])


def cmd_evolve(args, cfg) -> str:
    res = run_scenario(Scenario.from_dict(cfg))
    return res.to_json() + "\n" if args.format == "json" else res.to_csv()


def cmd_witness(args, cfg) -> str:
    cfg = dict(cfg, witness=True)
    cfg.setdefault("observables", ["Psum"])
    res = run_scenario(Scenario.from_dict(cfg))
    if args.format == "json":
        return json.dumps([{"tau": t, **w.to_dict()} for t, w in res.witnesses], indent=2) + "\n"
    header = ["tau", "pair", "var_x_diff", "var_p_sum", "combined", "bound", "violated"]
    rows = [[t, *row] for t, w in res.witnesses for row in w.rows()]
    return write_table(header, rows)


def cmd_comb(args, cfg) -> str:
    grid, window = comb_from_config(cfg.get("comb", cfg))
    report = coverage_report(grid, window)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            A = pump_comb_graph(grid, window).weights
        except InvalidArgument as exc:
            raise ConfigError(str(exc), "comb") from exc
    if args.format == "json":
        return json.dumps({"adjacency": A.tolist(), "coverage": report.to_dict()}, indent=2) + "\n"
    idx = report.signal_indices
    rows = [[j, *[int(v) for v in row]] for j, row in zip(idx, A)]
    return write_table(["signal", *map(str, idx)], rows)


def cmd_detect(args, cfg) -> str:
    g, comb_grid = _graph_only(cfg)
    try:
        plan = DetectionPlan.from_dict(cfg["plan"])
    except KeyError as exc:
        raise ConfigError("missing key", f"plan.{exc.args[0]}" if "plan" in cfg else "plan") from exc
    except (InvalidArgument, TypeError, ValueError) as exc:
        raise ConfigError(str(exc), "plan") from exc
    grid = comb_from_config(cfg["grid"], "grid")[0] if "grid" in cfg else comb_grid
    if grid is None:
        raise ConfigError("missing key", "grid")
    tau = cfg.get("tau", 0.0)
    try:
        state = evolve_vacuum(g, EvolutionSpec(float(tau), cfg.get("method", "analytic")))
        res = measured_variance(state, plan, grid, cfg.get("state_indices"))
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from exc
    b2 = plan.lo_amplitude ** 2
    if args.format == "json":
        return json.dumps({
            "tau": tau, "raw": res.raw, "normalized": res.normalized, "state_part": res.state_part,
            "vacuum_part": res.vacuum_part,
            "channels": [{"channel": j, "freq_over_Omega": channel_frequency(j), "variance_contribution": b2 * v}
                         for j, v in res.channels.items()],
        }, indent=2) + "\n"
    rows = [[j, channel_frequency(j), b2 * v] for j, v in res.channels.items()]
    rows.append(["total", "", res.raw])
    return write_table(["channel", "freq_over_Omega", "variance_contribution"], rows)


def cmd_reproduce(args, cfg) -> int:
    tolerances = (cfg or {}).get("tolerances", cfg or {})
    unknown = set(tolerances) - set(TOLERANCES)
    if unknown:
        raise ConfigError(f"unknown criteria {sorted(unknown)}", "tolerances")
    out = args.out if args.out not in (None, "-") else "reproduce_out"
    results = reproduce_paper(out, tolerances)
    for r in results:
        print(r.line())
    failed = [r.key for r in results if not r.passed]
    if failed:
        print("failing criteria: " + ", ".join(failed), file=sys.stderr)
        return EXIT_ACCEPTANCE
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "witness": cmd_witness,
    "comb": cmd_comb,
    "detect": cmd_detect,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphsim", description="Squeezing graph states and heterodyne multiplexing")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*COMMANDS, "reproduce"):
        p = sub.add_parser(name)
        if name == "comb":
            p.add_argument("action", nargs="?", choices=["build"], default="build")
        p.add_argument("--config", required=(name != "reproduce"), help="JSON config file")
        p.add_argument("--out", default=None, help="output file (directory for reproduce); stdout if omitted")
        p.add_argument("--format", choices=["csv", "json"], default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args.config) if args.config else None
        if args.command == "reproduce":
            return cmd_reproduce(args, cfg)
        if args.format is None:
            args.format = (cfg.get("output") or {}).get("format", "csv") if isinstance(cfg, dict) else "csv"
        if args.out is None and isinstance(cfg, dict):
            args.out = (cfg.get("output") or {}).get("path")
        _emit(COMMANDS[args.command](args, cfg), args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ComputationError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
