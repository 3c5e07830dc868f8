"""Scenario configs and the variance sweep they drive.

A scenario is a JSON object::

    {
      "graph": {"builder": "ghz", "n": 3},        # or {"n": 2, "weights": [[..]]}
                                                  # or {"comb": {<comb config>}}
      "tau": [0, 0.5, 1],
      "observables": ["Psum", "Xdiff:1,2", "het"],
      "method": "analytic",                      # optional
      "detection": {"plan": {...}, "grid": {...}},  # needed by "het"
      "witness": false, "bound": 4.0,            # optional
      "output": {"path": "sweep.csv", "format": "csv"}
    }

A comb config is ``{"omega0", "spacing", "signals", "pumps", "window": [lo, hi]}``
with an optional ``"fsr_matched"`` flag.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .comb import ModeGrid, PhaseMatchWindow, pump_comb_graph
from .dynamics import METHODS, EvolutionSpec, evolve_vacuum, squeezing_db, variance
from .errors import ComputationError, ConfigError, InvalidArgument
from .graphs import InteractionGraph, allones_graph, ghz_graph, vlb_graph
from .heterodyne import DetectionPlan, measured_observable, measured_variance
from .witnesses import DEFAULT_BOUND, WitnessReport, amplitude_diff_form, ghz_witness, phase_sum_form

__all__ = [
    "BUILDERS",
    "Scenario",
    "ScenarioResult",
    "build_graph",
    "comb_from_config",
    "parse_observable",
    "run_scenario",
    "format_value",
    "write_table",
]

BUILDERS = {"ghz": ghz_graph, "vlb": vlb_graph, "allones": allones_graph}
FORMATS = ("csv", "json")
SWEEP_HEADER = ["tau", "observable", "variance", "squeezing_db"]

_XDIFF = re.compile(r"^Xdiff:(\d+),(\d+)$")


def format_value(v: Any) -> str:
    """CSV cell text; floats carry 12 significant digits."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def write_table(header: List[str], rows: List[List[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _require(data: dict, key: str, path: str):
    if not isinstance(data, dict):
        raise ConfigError("expected an object", path)
    if key not in data:
        raise ConfigError("missing key", f"{path}.{key}" if path else key)
    return data[key]


def comb_from_config(data: dict, path: str = "comb") -> Tuple[ModeGrid, PhaseMatchWindow]:
    try:
        grid = ModeGrid(
            float(data.get("omega0", 0.0)),
            float(data.get("spacing", 1.0)),
            tuple(_require(data, "signals", path)),
            tuple(data.get("pumps", ())),
            bool(data.get("fsr_matched", True)),
        )
        window = data.get("window")
        win = PhaseMatchWindow.unbounded() if window is None else PhaseMatchWindow(int(window[0]), int(window[1]))
    except ConfigError:
        raise
    except (InvalidArgument, TypeError, ValueError, IndexError) as exc:
        raise ConfigError(str(exc), path) from exc
    return grid, win


def build_graph(spec: dict, path: str = "graph") -> Tuple[InteractionGraph, Optional[ModeGrid]]:
    """Resolve a graph spec; comb specs also return the grid restricted to in-window signals."""
    if not isinstance(spec, dict):
        raise ConfigError("expected an object", path)
    try:
        if "builder" in spec:
            name = spec["builder"]
            if name not in BUILDERS:
                raise ConfigError(f"unknown builder {name!r}; expected one of {sorted(BUILDERS)}", f"{path}.builder")
            return BUILDERS[name](int(_require(spec, "n", path))), None
        if "weights" in spec:
            return InteractionGraph.from_dict({"n": spec.get("n", len(spec["weights"])), "weights": spec["weights"]}), None
        if "comb" in spec:
            grid, win = comb_from_config(spec["comb"], f"{path}.comb")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                g = pump_comb_graph(grid, win)
            kept = tuple(j for j in grid.signal_indices if j in win)
            return g, ModeGrid(grid.omega0, grid.spacing, kept, grid.pump_indices, grid.fsr_matched)
    except ConfigError:
        raise
    except (InvalidArgument, TypeError, ValueError) as exc:
        raise ConfigError(str(exc), path) from exc
    raise ConfigError("graph needs one of 'builder', 'weights' or 'comb'", path)


def parse_observable(name: str, n: int, path: str = "observables"):
    """Resolve ``Psum`` / ``Xdiff:k,l`` into a form; ``het`` is returned as the string."""
    if name == "Psum":
        return phase_sum_form(n)
    if name == "het":
        return name
    m = _XDIFF.match(name)
    if m:
        try:
            return amplitude_diff_form(n, int(m.group(1)), int(m.group(2)))
        except InvalidArgument as exc:
            raise ConfigError(str(exc), path) from exc
    raise ConfigError(f"unknown observable {name!r}", path)


@dataclass(frozen=True)
class Scenario:
    graph_spec: dict
    tau_grid: Tuple[float, ...]
    observables: Tuple[str, ...]
    detection: Optional[dict] = None
    method: str = "analytic"
    witness: bool = False
    bound: float = DEFAULT_BOUND
    output_path: Optional[str] = None
    output_format: str = "csv"

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict):
            raise ConfigError("scenario must be a JSON object")
        known = {"graph", "tau", "observables", "detection", "method", "witness", "bound", "output"}
        for key in data:
            if key not in known:
                raise ConfigError("unknown key", key)
        graph = _require(data, "graph", "")
        taus = _require(data, "tau", "")
        if not isinstance(taus, list):
            taus = [taus]
        try:
            taus = tuple(float(t) for t in taus)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), "tau") from exc
        if not taus:
            raise ConfigError("tau grid is empty", "tau")
        if any(not math.isfinite(t) or t < 0 for t in taus):
            raise ConfigError("tau values must be finite and >= 0", "tau")
        if list(taus) != sorted(taus):
            raise ConfigError("tau grid must be sorted", "tau")
        obs = data.get("observables", ["Psum"])
        if not isinstance(obs, list) or not all(isinstance(o, str) for o in obs):
            raise ConfigError("expected a list of names", "observables")
        method = data.get("method", "analytic")
        if method not in METHODS:
            raise ConfigError(f"expected one of {METHODS}", "method")
        out = data.get("output", {}) or {}
        fmt = out.get("format", "csv")
        if fmt not in FORMATS:
            raise ConfigError(f"expected one of {FORMATS}", "output.format")
        detection = data.get("detection")
        if "het" in obs and detection is None and "comb" not in graph:
            raise ConfigError("'het' needs a detection plan", "detection")
        s = cls(
            graph_spec=graph,
            tau_grid=taus,
            observables=tuple(obs),
            detection=detection,
            method=method,
            witness=bool(data.get("witness", False)),
            bound=float(data.get("bound", DEFAULT_BOUND)),
            output_path=out.get("path"),
            output_format=fmt,
        )
        s.resolve()
        return s

    def to_dict(self) -> dict:
        d = {
            "graph": self.graph_spec,
            "tau": list(self.tau_grid),
            "observables": list(self.observables),
            "method": self.method,
            "witness": self.witness,
            "bound": self.bound,
            "output": {"format": self.output_format},
        }
        if self.output_path is not None:
            d["output"]["path"] = self.output_path
        if self.detection is not None:
            d["detection"] = self.detection
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def resolve(self):
        """Build the graph, the named forms and the detection setup; raises ConfigError."""
        g, comb_grid = build_graph(self.graph_spec)
        forms = {name: parse_observable(name, g.n_modes) for name in self.observables}
        plan = grid = None
        if "het" in forms:
            det = self.detection or {}
            try:
                plan = DetectionPlan.from_dict(_require(det, "plan", "detection"))
            except (KeyError, TypeError, ValueError, InvalidArgument) as exc:
                raise ConfigError(str(exc), "detection.plan") from exc
            if "grid" in det:
                grid, _ = comb_from_config(det["grid"], "detection.grid")
            elif comb_grid is not None:
                grid = comb_grid
            else:
                raise ConfigError("missing key", "detection.grid")
            if len(grid.signal_indices) != g.n_modes:
                raise ConfigError(
                    f"grid has {len(grid.signal_indices)} signals, graph has {g.n_modes} modes", "detection.grid"
                )
            try:
                measured_observable(plan, grid)
            except InvalidArgument as exc:
                raise ConfigError(str(exc), "detection.plan") from exc
        return g, forms, plan, grid


@dataclass
class ScenarioResult:
    rows: List[List[Any]]
    header: List[str]
    witnesses: List[Tuple[float, WitnessReport]] = field(default_factory=list)

    def to_csv(self) -> str:
        return write_table(self.header, self.rows)

    def to_json(self) -> str:
        out: Dict[str, Any] = {"rows": [dict(zip(self.header, r)) for r in self.rows]}
        if self.witnesses:
            out["witnesses"] = [{"tau": t, **w.to_dict()} for t, w in self.witnesses]
        return json.dumps(out, indent=2)


def run_scenario(s: Scenario) -> ScenarioResult:
    """One row per ``(tau, observable)`` in config order.

    Raises:
        ConfigError: unresolvable config.
        ComputationError: a variance could not be evaluated.
    """
    g, forms, plan, grid = s.resolve()
    header = list(SWEEP_HEADER) + (["witness_violated"] if s.witness else [])
    rows, witnesses = [], []
    for tau in s.tau_grid:
        try:
            state = evolve_vacuum(g, EvolutionSpec(tau, s.method))
            report = ghz_witness(state, s.bound) if s.witness else None
            for name, f in forms.items():
                if f == "het":
                    res = measured_variance(state, plan, grid)
                    vac = measured_observable(plan, grid).form.vacuum_variance()
                    var, db = res.normalized, 10 * math.log10(res.normalized / vac)
                else:
                    var, db = variance(state, f), squeezing_db(state, f)
                row = [tau, name, var, db]
                if report is not None:
                    row.append(report.all_violated)
                rows.append(row)
        except (ComputationError, InvalidArgument) as exc:
            raise ComputationError(f"tau={tau}: {exc}") from exc
        if report is not None:
            witnesses.append((tau, report))
    return ScenarioResult(rows, header, witnesses)
