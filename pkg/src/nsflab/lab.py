"""Scenario configuration, the end-to-end experiment pipeline, persistence.

A scenario is a single JSON document; unknown keys are rejected so that
config files remain trustworthy experiment records.  Each run writes a
diagnostics CSV (fixed column contract) and a JSON report enumerating the
measured stability properties.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (BoundaryContaminationError, ConfigError, NSFLabError,
                     PositivityError, StateFormatError, WaveSeparationError)
from .gas import GasParams, ThermoState, pressure
from .profiles import CompositeWave, shock_profile_from_pattern, solve_contact_wave
from .riemann import build_pattern
from .solver import (Field, Grid, PerturbationSpec, SolverConfig,
                     check_boundary_contamination, make_initial_data, stable_dt)
from .stability import DiagnosticsRecord, ShiftState, coupled_step, diagnostics

CSV_COLUMNS = DiagnosticsRecord.CSV_COLUMNS

PROPERTY_NAMES = (
    "entropy_decay",
    "wave_separation",
    "shift_sublinearity",
    "bound_shape",
    "boundary_contamination",
    "positivity",
)

_ZERO_FLOOR = 1e-14
_TRANSIENT_SLACK = 1.2
_SUBLINEAR_FRACTION = 0.2
_BOUND_SHAPE_K = 50.0


def _require_keys(d: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")
    missing = required - set(d)
    if missing:
        raise ConfigError(f"missing key(s) {sorted(missing)} in {where}")


@dataclass
class ScenarioConfig:
    gas: GasParams
    right_state: ThermoState
    delta1: float
    deltaC: float
    delta3: float
    grid: Grid
    t_end: float
    contact_increasing: bool = True
    cfl: float = 0.4
    positivity_floor: float = 1e-10
    perturbation: PerturbationSpec | None = None
    output_every: int = 1
    output_dir: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.output_every < 1:
            raise ConfigError(f"output_every must be >= 1, got {self.output_every}")
        if min(self.delta1, self.deltaC, self.delta3) < 0:
            raise ConfigError("amplitudes must be nonnegative")
        if not self.t_end > 0:
            raise ConfigError("t_end must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        _require_keys(
            d,
            allowed={"gas", "right_state", "amplitudes", "contact_increasing",
                     "grid", "solver", "perturbation", "t_end", "output_every",
                     "output_dir", "seed"},
            required={"gas", "right_state", "amplitudes", "grid", "t_end"},
            where="scenario",
        )
        _require_keys(d["gas"], {"R", "gamma", "mu", "kappa"},
                      {"R", "gamma", "mu", "kappa"}, "gas")
        _require_keys(d["right_state"], {"v", "u", "theta"}, {"v", "u", "theta"},
                      "right_state")
        _require_keys(d["amplitudes"], {"delta1", "deltaC", "delta3"},
                      {"delta1", "deltaC", "delta3"}, "amplitudes")
        _require_keys(d["grid"], {"x_min", "x_max", "n"}, {"x_min", "x_max", "n"},
                      "grid")
        solver = d.get("solver", {})
        _require_keys(solver, {"cfl", "positivity_floor"}, set(), "solver")
        pert = d.get("perturbation")
        if pert is not None:
            _require_keys(pert, {"amplitude", "center", "width", "components"},
                          {"amplitude"}, "perturbation")
            pert = PerturbationSpec(
                amplitude=float(pert["amplitude"]),
                center=float(pert.get("center", 0.0)),
                width=float(pert.get("width", 1.0)),
                components=tuple(pert.get("components", ("v", "u", "theta"))),
            )
        return cls(
            gas=GasParams(float(d["gas"]["R"]), float(d["gas"]["gamma"]),
                          float(d["gas"]["mu"]), float(d["gas"]["kappa"])),
            right_state=ThermoState(float(d["right_state"]["v"]),
                                    float(d["right_state"]["u"]),
                                    float(d["right_state"]["theta"])),
            delta1=float(d["amplitudes"]["delta1"]),
            deltaC=float(d["amplitudes"]["deltaC"]),
            delta3=float(d["amplitudes"]["delta3"]),
            contact_increasing=bool(d.get("contact_increasing", True)),
            grid=Grid(float(d["grid"]["x_min"]), float(d["grid"]["x_max"]),
                      int(d["grid"]["n"])),
            cfl=float(solver.get("cfl", 0.4)),
            positivity_floor=float(solver.get("positivity_floor", 1e-10)),
            perturbation=pert,
            t_end=float(d["t_end"]),
            output_every=int(d.get("output_every", 1)),
            output_dir=d.get("output_dir"),
            seed=int(d.get("seed", 0)),
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "ScenarioConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise ConfigError(f"invalid JSON in {path}: {e}") from e
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = {
            "gas": {"R": self.gas.R, "gamma": self.gas.gamma,
                    "mu": self.gas.mu, "kappa": self.gas.kappa},
            "right_state": {"v": self.right_state.v, "u": self.right_state.u,
                            "theta": self.right_state.theta},
            "amplitudes": {"delta1": self.delta1, "deltaC": self.deltaC,
                           "delta3": self.delta3},
            "contact_increasing": self.contact_increasing,
            "grid": {"x_min": self.grid.x_min, "x_max": self.grid.x_max,
                     "n": self.grid.n},
            "solver": {"cfl": self.cfl, "positivity_floor": self.positivity_floor},
            "perturbation": None,
            "t_end": self.t_end,
            "output_every": self.output_every,
            "output_dir": self.output_dir,
            "seed": self.seed,
        }
        if self.perturbation is not None:
            d["perturbation"] = {
                "amplitude": self.perturbation.amplitude,
                "center": self.perturbation.center,
                "width": self.perturbation.width,
                "components": list(self.perturbation.components),
            }
        return d

    def scenario_id(self) -> str:
        physics = self.to_dict()
        physics.pop("output_dir")
        blob = json.dumps(physics, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    @property
    def delta0(self) -> float:
        return self.delta1 + self.deltaC + self.delta3


def reference_config(output_dir: str | None = None) -> ScenarioConfig:
    """The standard experiment: gamma = 5/3 monatomic gas, unit transport
    coefficients, two 0.1-shocks and a 0.05-contact, 1e-2 bump.

    The bump perturbs the temperature only.  At these transport
    coefficients the shock layers are wide, so a same-sign velocity kick
    would still be relaxing at t = 20; the temperature bump drives the
    shifts opposite to the slow interaction drift and the rates settle
    near zero well within the horizon.
    """
    return ScenarioConfig(
        gas=GasParams(1.0, 5.0 / 3.0, 1.0, 1.0),
        right_state=ThermoState(1.0, 0.0, 1.0),
        delta1=0.1, deltaC=0.05, delta3=0.1,
        grid=Grid(-160.0, 160.0, 2048),
        t_end=20.0,
        perturbation=PerturbationSpec(amplitude=1e-2, center=0.0, width=4.0,
                                      components=("theta",)),
        output_every=20,
        output_dir=output_dir,
    )


@dataclass
class PropertyResult:
    passed: bool
    codes: list[str] = field(default_factory=list)
    detail: str = ""

    def as_dict(self) -> dict:
        return {"passed": self.passed, "codes": self.codes, "detail": self.detail}


@dataclass
class RunReport:
    scenario_id: str
    config: dict
    properties: dict[str, PropertyResult]
    final: dict | None
    manifest: list[str]
    sigma1: float | None = None
    sigma3: float | None = None
    K_obs: float | None = None
    error: dict | None = None

    @property
    def all_pass(self) -> bool:
        return self.error is None and all(p.passed for p in self.properties.values())

    def as_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "config": self.config,
            "all_pass": self.all_pass,
            "properties": {k: v.as_dict() for k, v in self.properties.items()},
            "final": self.final,
            "manifest": self.manifest,
            "sigma1": self.sigma1,
            "sigma3": self.sigma3,
            "K_obs": self.K_obs,
            "error": self.error,
        }


def build_composite(cfg: ScenarioConfig) -> CompositeWave:
    g = cfg.gas
    pattern = build_pattern(cfg.right_state, cfg.delta1, cfg.deltaC, cfg.delta3,
                            g, cfg.contact_increasing)
    shock1 = shock_profile_from_pattern(pattern, 1, g) if cfg.delta1 > 0 else None
    shock3 = shock_profile_from_pattern(pattern, 3, g) if cfg.delta3 > 0 else None
    contact = solve_contact_wave(pattern.mid_left.theta, pattern.mid_right.theta,
                                 pressure(pattern.mid_left, g),
                                 pattern.mid_left.u, g)
    return CompositeWave(pattern, shock1, shock3, contact, g)


def format_float(x: float) -> str:
    return repr(float(x))


def write_diagnostics_csv(path: Path, records: list[DiagnosticsRecord]) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for rec in records:
        lines.append(",".join(format_float(v) for v in rec.row()))
    path.write_text("\n".join(lines) + "\n")


def evaluate_properties(records: list[DiagnosticsRecord], cfg: ScenarioConfig,
                        sigma1: float, sigma3: float):
    """Pass/fail per measured stability property, from the recorded ticks."""
    props: dict[str, PropertyResult] = {}
    t = np.array([r.t for r in records])
    E = np.array([r.E_rel for r in records])
    E0 = E[0]

    # entropy decay with bounded transient
    codes = []
    if not (E[-1] < E0 or np.max(E) <= _ZERO_FLOOR):
        codes.append("ENTROPY_FINAL_NOT_BELOW_INITIAL")
    if not (np.max(E) <= _TRANSIENT_SLACK * E0 + _ZERO_FLOOR):
        codes.append("ENTROPY_TRANSIENT_EXCEEDED")
    props["entropy_decay"] = PropertyResult(
        not codes, codes,
        f"E_rel(0)={E0:.6e}, E_rel(end)={E[-1]:.6e}, max={np.max(E):.6e}",
    )

    # wave separation at every recorded tick with t > 0
    X1 = np.array([r.X1 for r in records])
    X3 = np.array([r.X3 for r in records])
    pos = t > 0
    sep_ok = bool(
        np.all(X1[pos] + sigma1 * t[pos] <= sigma1 * t[pos] / 2.0)
        and np.all(X3[pos] + sigma3 * t[pos] >= sigma3 * t[pos] / 2.0)
    )
    props["wave_separation"] = PropertyResult(
        sep_ok, [] if sep_ok else ["SEPARATION_VIOLATED"],
        "X1+s1*t <= s1*t/2 and X3+s3*t >= s3*t/2 at every tick",
    )

    # shift sublinearity
    codes = []
    for name, xd, xs, delta in (("X1", [r.Xdot1 for r in records], X1, cfg.delta1),
                                ("X3", [r.Xdot3 for r in records], X3, cfg.delta3)):
        if delta == 0:
            continue
        xd = np.abs(np.array(xd))
        if not xd[-1] <= _SUBLINEAR_FRACTION * np.max(xd) + _ZERO_FLOOR:
            codes.append(f"SHIFT_RATE_NOT_DECAYED_{name}")
        late = pos & (t >= t[-1] / 2.0)
        ratio = np.abs(xs[late]) / t[late]
        if np.any(np.diff(ratio) > 1e-9 * np.abs(ratio[:-1]) + 1e-12):
            codes.append(f"SHIFT_RATIO_NOT_DECREASING_{name}")
    props["shift_sublinearity"] = PropertyResult(
        not codes, codes, "|Xdot| decayed and |X|/t decreasing on the last half",
    )

    # integrated bound shape
    integrand = np.array([
        cfg.delta1 * r.Xdot1 ** 2 + cfg.delta3 * r.Xdot3 ** 2
        + r.G1S + r.G3S + r.Du1 + r.Dth1
        for r in records
    ])
    cumulative = np.concatenate(
        ([0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(t)))
    )
    denom = E0 + math.sqrt(cfg.delta0)
    if denom <= _ZERO_FLOOR:
        K_obs = 0.0 if np.max(E + cumulative) <= _ZERO_FLOOR else math.inf
    else:
        K_obs = float(np.max(E + cumulative) / denom)
    ok = K_obs <= _BOUND_SHAPE_K
    props["bound_shape"] = PropertyResult(
        ok, [] if ok else ["BOUND_SHAPE_K_EXCEEDED"], f"K_obs={K_obs:.3f}",
    )
    return props, K_obs


def run_scenario(cfg: ScenarioConfig, out_root: str | Path | None = None) -> RunReport:
    """Execute the full pipeline and persist diagnostics + report.

    Construction failures and in-run monitor trips are captured in the
    report (stage-tagged); the diagnostics CSV holds whatever ticks were
    completed and is written in one shot, never left half-formed.
    """
    g = cfg.gas
    sid = cfg.scenario_id()
    out_root = Path(out_root) if out_root is not None else Path(
        os.environ.get("NSFLAB_OUTPUT_ROOT", ".")
    )
    run_dir = out_root / (cfg.output_dir or f"runs/{sid}")
    run_dir.mkdir(parents=True, exist_ok=True)

    records: list[DiagnosticsRecord] = []
    error = None
    sigma1 = sigma3 = None
    stage = "pattern"
    try:
        comp = build_composite(cfg)
        sigma1, sigma3 = comp.pattern.sigma1, comp.pattern.sigma3
        stage = "initial_data"
        f = make_initial_data(comp, cfg.grid, g, cfg.perturbation)
        scfg = SolverConfig(bc_left=comp.pattern.left, bc_right=comp.pattern.right,
                            cfl=cfg.cfl, t_end=cfg.t_end,
                            positivity_floor=cfg.positivity_floor)
        stage = "evolve"
        shifts = ShiftState()
        records.append(diagnostics(f, comp, shifts, g))
        check_boundary_contamination(f, (scfg.bc_left, scfg.bc_right))
        step_index = 0
        while f.t < cfg.t_end:
            dt = min(stable_dt(f, g, scfg), cfg.t_end - f.t)
            f, shifts = coupled_step(f, shifts, comp, g, scfg, dt)
            step_index += 1
            if step_index % cfg.output_every == 0 or f.t >= cfg.t_end:
                records.append(diagnostics(f, comp, shifts, g))
                check_boundary_contamination(f, (scfg.bc_left, scfg.bc_right))
    except NSFLabError as e:
        error = {"stage": stage, "type": type(e).__name__, "message": str(e)}

    if records:
        if error is None:
            props, K_obs = evaluate_properties(records, cfg, sigma1, sigma3)
        else:
            props = {name: PropertyResult(False, ["RUN_ABORTED"], error["message"])
                     for name in PROPERTY_NAMES[:4]}
            K_obs = None
    else:
        props = {name: PropertyResult(False, ["RUN_ABORTED"], "no ticks recorded")
                 for name in PROPERTY_NAMES[:4]}
        K_obs = None

    bc_failed = error is not None and error["type"] == "BoundaryContaminationError"
    props["boundary_contamination"] = PropertyResult(
        not bc_failed, ["BOUNDARY_CONTAMINATED"] if bc_failed else [],
        "far-field margin stayed within 1e-6",
    )
    pos_failed = error is not None and error["type"] == "PositivityError"
    props["positivity"] = PropertyResult(
        not pos_failed, ["POSITIVITY_LOST"] if pos_failed else [],
        "v and theta stayed above the floor",
    )

    csv_path = run_dir / "diagnostics.csv"
    write_diagnostics_csv(csv_path, records)
    final = dict(zip(CSV_COLUMNS, records[-1].row())) if records else None
    report = RunReport(
        scenario_id=sid, config=cfg.to_dict(), properties=props, final=final,
        manifest=["diagnostics.csv", "report.json"],
        sigma1=sigma1, sigma3=sigma3, K_obs=K_obs, error=error,
    )
    (run_dir / "report.json").write_text(json.dumps(report.as_dict(), indent=2,
                                                    sort_keys=True) + "\n")
    return report


def _set_axis(d: dict, axis: str, value) -> None:
    parts = axis.split(".")
    node = d
    for p in parts[:-1]:
        if not isinstance(node, dict) or p not in node:
            raise ConfigError(f"sweep axis {axis!r} not found in config")
        node = node[p]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node or isinstance(node[leaf], (dict, list)):
        raise ConfigError(f"sweep axis {axis!r} must name a scalar config field")
    node[leaf] = value


def _sweep_one(args):
    cfg_dict, out_root = args
    cfg = ScenarioConfig.from_dict(cfg_dict)
    return run_scenario(cfg, out_root)


def sweep(cfg: ScenarioConfig, axis: str, values, out_root=None, workers: int | None = None):
    """Independent runs over one scalar config axis; failures are recorded
    per run and the sweep continues.  Returns (reports, summary path)."""
    out_root = Path(out_root) if out_root is not None else Path(
        os.environ.get("NSFLAB_OUTPUT_ROOT", ".")
    )
    base_dir = cfg.output_dir or f"sweeps/{cfg.scenario_id()}"
    jobs = []
    for value in values:
        d = cfg.to_dict()
        _set_axis(d, axis, value)
        d["output_dir"] = f"{base_dir}/{axis.replace('.', '_')}={format_float(value)}"
        jobs.append((d, out_root))
    reports: list[RunReport] = []
    if jobs:
        workers = workers or min(4, len(jobs))
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(_sweep_one, jobs))
        else:
            reports = [_sweep_one(j) for j in jobs]

    summary_dir = out_root / base_dir
    summary_dir.mkdir(parents=True, exist_ok=True)
    lines = ["axis,value,scenario_id,all_pass,E_rel0,E_rel_final,K_obs,"
             "max_absXdot1,max_absXdot3,error"]
    for value, rep in zip(values, reports):
        if rep.final is not None and rep.error is None:
            csv_file = out_root / rep.config["output_dir"] / "diagnostics.csv"
            data = np.genfromtxt(csv_file, delimiter=",", names=True)
            e0 = float(np.atleast_1d(data["E_rel"])[0])
            ef = float(np.atleast_1d(data["E_rel"])[-1])
            m1 = float(np.max(np.abs(np.atleast_1d(data["Xdot1"]))))
            m3 = float(np.max(np.abs(np.atleast_1d(data["Xdot3"]))))
        else:
            e0 = ef = m1 = m3 = float("nan")
        lines.append(",".join([
            axis, format_float(value), rep.scenario_id, str(rep.all_pass),
            format_float(e0), format_float(ef),
            format_float(rep.K_obs if rep.K_obs is not None else float("nan")),
            format_float(m1), format_float(m3),
            rep.error["type"] if rep.error else "",
        ]))
    summary_path = summary_dir / "sweep_summary.csv"
    summary_path.write_text("\n".join(lines) + "\n")
    return reports, summary_path


# --------------------------------------------------------------------------
# state files
# --------------------------------------------------------------------------

_STATE_MAGIC = b"NSFSTATE"
_STATE_VERSION = 1
_HEADER = struct.Struct("<8sIddQd")


def export_state(f: Field, path: str | Path) -> None:
    """Self-describing binary snapshot; round-trips bit-exactly."""
    header = _HEADER.pack(_STATE_MAGIC, _STATE_VERSION, f.grid.x_min,
                          f.grid.x_max, f.grid.n, f.t)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(f.v.astype(np.float64, copy=False).tobytes())
        fh.write(f.u.astype(np.float64, copy=False).tobytes())
        fh.write(f.theta.astype(np.float64, copy=False).tobytes())


def import_state(path: str | Path) -> Field:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise StateFormatError(f"truncated state file {path}")
    magic, version, x_min, x_max, n, t = _HEADER.unpack(raw[: _HEADER.size])
    if magic != _STATE_MAGIC:
        raise StateFormatError(f"not a state file (bad magic {magic!r})")
    if version != _STATE_VERSION:
        raise StateFormatError(
            f"state file version {version}, this build reads version {_STATE_VERSION}"
        )
    payload = raw[_HEADER.size:]
    expected = 3 * n * 8
    if len(payload) != expected:
        raise StateFormatError(
            f"grid mismatch: header declares n={n} ({expected} payload bytes), "
            f"file carries {len(payload)}"
        )
    arr = np.frombuffer(payload, dtype="<f8")
    grid = Grid(x_min, x_max, int(n))
    return Field(grid, t, arr[:n].copy(), arr[n:2 * n].copy(), arr[2 * n:].copy())
