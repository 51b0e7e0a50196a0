"""Command-line driver.

    python -m bcsquench quench  --config run.json --out-dir out/
    python -m bcsquench scan2d  --config scan.json --threads 4
    python -m bcsquench lax | twospin | staged | analyze ...

Configs are JSON validated against ``schema/config.schema.json`` (unknown
keys are rejected).  Frequencies are given in MHz, times in microseconds.
Every output file is assembled in memory and only written once the whole
run has succeeded; each file goes to a temporary name first and is then
renamed into place.

Exit codes: 0 success, 2 configuration or schema error, 3 file I/O error,
4 numerical guard violation (step size, trigger timeout, root search,
unphysical state, analysis window).
"""
from __future__ import annotations

import argparse
import copy
import csv
import datetime as _dt
import hashlib
import io
import json
import logging
import math
import os
import sys
import tempfile
from importlib import resources
from typing import Optional

import jsonschema
import numpy as np

from . import __version__
from .analysis import (
    Thresholds,
    WindowError,
    decay_time,
    oscillation_peak,
    spectrum,
    window_metrics,
)
from .core import (
    OPTIMAL_DRIVE_AREA,
    ConfigurationError,
    CouplingProfile,
    DispersionSpec,
    ModelParams,
    build_dispersion,
    elastic_dephasing_rate,
    mhz,
    prepare_initial_state,
    sample_couplings,
    to_mhz,
)
from .dynamics import (
    FIRST_MINIMUM,
    STABILITY_LIMIT,
    QuenchSchedule,
    Stage,
    StepSizeError,
    Trajectory,
    TriggerTimeout,
    continuous_restore_protocol,
    evolve,
    fastest_rate,
    staged_quench,
)
from .lax import LaxParams, RootSearchError, boundary_curves, classify_phase_analytic, closed_form_roots, find_roots_numeric
from .motion import (
    MotionParams,
    PhysicalityError,
    evolve_motion,
    motion_fastest_rate,
    prepare_motional_state,
    site_phases,
    thermal_nbar,
    thermal_sample,
)
from .scan import ScanConfig, ScanResult, default_workers, run_scan
from .twospin import TwoSpinParams, two_spin_delta, two_spin_delta_min, two_spin_frequency

log = logging.getLogger("bcsquench")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

US = 1e-6
DEFAULT_T_END_US = 10.0
DEFAULT_LATE_WINDOW_US = (3.0, 8.0)
DEFAULT_SHORT_WINDOW_US = (0.5, 4.0)

#: classifier cuts for scans (agreement is flat for osc cuts 0.02-0.05)
SCAN_THRESHOLDS = Thresholds()

NUMERIC_ERRORS = (StepSizeError, TriggerTimeout, RootSearchError, PhysicalityError, WindowError, FloatingPointError)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- config


def load_schema() -> dict:
    text = resources.files("bcsquench").joinpath("schema/config.schema.json").read_text("utf-8")
    return json.loads(text)


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_CONFIG, f"config {path} is not valid JSON: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise CliError(EXIT_CONFIG, f"config error at {where}: {exc.message}") from exc


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _require(cfg: dict, key: str, mode: str) -> dict:
    if key not in cfg:
        raise CliError(EXIT_CONFIG, f"mode {mode!r} needs a {key!r} section")
    return cfg[key]


def _dispersion_spec(d: dict, default_seed: int) -> DispersionSpec:
    samples = d.get("samples_mhz")
    return DispersionSpec(
        kind=d["kind"],
        delta_s=mhz(d.get("delta_s_mhz", 0.0)),
        e_w=mhz(d.get("e_w_mhz", 0.0)),
        e_w_second=mhz(d["e_w_second_mhz"]) if "e_w_second_mhz" in d else None,
        empirical_samples=[mhz(v) for v in samples] if samples is not None else None,
        seed=d.get("seed", default_seed),
        stratified=d.get("stratified", True),
    )


def _ideal(cfg: dict) -> dict:
    cfg = copy.deepcopy(cfg)
    model = cfg.get("model", {})
    for key in ("gamma_mhz", "superradiance_n_mhz", "gamma_el_mhz", "f_ac_mhz"):
        model.pop(key, None)
    for stage in cfg.get("schedule", []):
        stage["gamma_mhz"] = 0.0
        stage["superradiance_n_mhz"] = 0.0
        stage["gamma_el_mhz"] = 0.0
    cfg.pop("motion", None)
    return cfg


class Model:
    """Everything a single-trajectory run needs, built from a validated config."""

    def __init__(self, cfg: dict, seed: int):
        m = cfg["model"]
        n = m["n_spins"]
        kind = m.get("coupling", "homogeneous")
        self.motion: Optional[MotionParams] = None
        motion_cfg = cfg.get("motion")
        try:
            if motion_cfg is not None:
                if kind == "homogeneous":
                    raise ConfigurationError("motion needs incommensurate or random_cos couplings")
                site = motion_cfg.get("site_factor", kind)
                if site != kind:
                    raise ConfigurationError("motion site_factor must match model coupling")
                omega_t = mhz(motion_cfg["omega_t_mhz"])
                if "nbar" in motion_cfg:
                    nbar = motion_cfg["nbar"]
                else:
                    nbar = thermal_nbar(motion_cfg.get("temperature_uk", 0.0) * 1e-6, omega_t)
                self.motion = MotionParams(
                    omega_t=omega_t,
                    eta=motion_cfg["eta"],
                    nbar=nbar,
                    n_max=motion_cfg.get("n_max"),
                    gamma_mo=mhz(motion_cfg.get("gamma_mo_mhz", 0.0)),
                    reach=motion_cfg.get("reach", 1),
                    site_factor=site,
                )
                phases = site_phases(self.motion, n, m.get("coupling_seed", seed))
                couplings = CouplingProfile(kind, np.cos(phases), n / 2.0)
                self.levels = thermal_sample(self.motion, n, seed)
                self.phases = phases
            else:
                couplings = sample_couplings(kind, n, m.get("coupling_seed", seed), m.get("stratified_couplings", False))
            eps = build_dispersion(_dispersion_spec(m["dispersion"], seed), n)
            chi = mhz(m["chi_n_mhz"]) / couplings.n_eff
            if "gamma_el_mhz" in m:
                gamma_el = mhz(m["gamma_el_mhz"])
            elif "f_ac_mhz" in m:
                gamma_el = elastic_dephasing_rate(m["f_ac_mhz"])
            else:
                gamma_el = 0.0
            self.params = ModelParams(
                chi=chi,
                couplings=couplings,
                dispersion=eps,
                gamma=mhz(m.get("gamma_mhz", 0.0)),
                big_gamma=mhz(m.get("superradiance_n_mhz", 0.0)) / couplings.n_eff,
                gamma_el=gamma_el,
                gamma_mo=self.motion.gamma_mo if self.motion else 0.0,
            )
            default_area = math.pi / 2 if kind == "homogeneous" else OPTIMAL_DRIVE_AREA
            self.drive_area = m.get("drive_area", default_area)
            self.phase_spread = m.get("phase_spread", 0.0)
            self.schedule = self._schedule(cfg.get("schedule", []), couplings.n_eff, seed)
        except ConfigurationError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from exc

    @staticmethod
    def _schedule(stages: list, n_eff: float, seed: int) -> QuenchSchedule:
        out = []
        for s in stages:
            trig = s["trigger"]
            out.append(Stage(
                trigger=FIRST_MINIMUM if trig == FIRST_MINIMUM else trig * US,
                dispersion=_dispersion_spec(s["dispersion"], seed) if "dispersion" in s else None,
                chi=mhz(s["chi_n_mhz"]) / n_eff if "chi_n_mhz" in s else None,
                gamma=mhz(s["gamma_mhz"]) if "gamma_mhz" in s else None,
                big_gamma=mhz(s["superradiance_n_mhz"]) / n_eff if "superradiance_n_mhz" in s else None,
                gamma_el=mhz(s["gamma_el_mhz"]) if "gamma_el_mhz" in s else None,
            ))
        return QuenchSchedule(tuple(out))

    def default_dt(self) -> float:
        if self.motion is not None:
            rate = motion_fastest_rate(self.params, self.motion, self.motion.reach)
        else:
            rate = fastest_rate(self.params)
        return 0.5 * STABILITY_LIMIT / rate if rate > 0 else 1e-9

    def run(self, dt: float, t_end: float, schedule: Optional[QuenchSchedule] = None) -> Trajectory:
        spread = self.phase_spread
        if self.motion is not None:
            if schedule is not None and schedule.stages:
                raise CliError(EXIT_CONFIG, "schedules are not supported together with motion")
            from .core import phase_spread as _spread

            phi = _spread(self.params.dispersion, spread) if spread > 0 else None
            state = prepare_motional_state(self.levels, self.phases, self.motion, self.drive_area, phi)
            return evolve_motion(state, self.params, self.motion, dt, t_end)
        try:
            state = prepare_initial_state(self.params.couplings, self.drive_area, spread, self.params.dispersion)
        except ConfigurationError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from exc
        if schedule is not None and schedule.has_minimum_trigger:
            return staged_quench(state, self.params, schedule, dt, t_end)
        return evolve(state, self.params, schedule, dt, t_end)


# ---------------------------------------------------------------- formatting


def _csv(header: list, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, nan/inf to None."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def trajectory_csv(traj: Trajectory) -> str:
    nd = traj.norm_delta
    rows = ((t, d.real, d.imag, a) for t, d, a in zip(traj.times, traj.delta, nd))
    return _csv(["t_s", "re_delta", "im_delta", "abs_norm"], rows)


def read_trajectory_csv(path: str) -> Trajectory:
    try:
        with open(path, encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            data = np.array([[float(v) for v in row] for row in reader if row])
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read trajectory {path}: {exc}") from exc
    except (ValueError, StopIteration) as exc:
        raise CliError(EXIT_CONFIG, f"malformed trajectory file {path}: {exc}") from exc
    if header[:3] != ["t_s", "re_delta", "im_delta"] or data.ndim != 2 or len(data) < 2:
        raise CliError(EXIT_CONFIG, f"{path} is not a trajectory CSV")
    delta = data[:, 1] + 1j * data[:, 2]
    return Trajectory(data[:, 0], delta, float(abs(delta[0])))


# ---------------------------------------------------------------- analysis helpers


def _windows(cfg: dict, t_end: float) -> dict:
    a = cfg.get("analysis", {})
    late = tuple(a.get("late_window_us", DEFAULT_LATE_WINDOW_US))
    short = tuple(a.get("short_window_us", DEFAULT_SHORT_WINDOW_US))
    decay = tuple(a["decay_window_us"]) if "decay_window_us" in a else None
    out = {"late": late, "short": short, "decay": decay}
    for name, w in out.items():
        if w is None:
            continue
        if not w[0] < w[1]:
            raise CliError(EXIT_CONFIG, f"{name} window must be increasing")
        if w[1] * US > t_end * (1 + 1e-9):
            raise CliError(EXIT_CONFIG, f"{name} window ends after t_end")
    return out


def trajectory_metrics(traj: Trajectory, cfg: dict) -> dict:
    t_end = traj.times[-1] - traj.times[0] + traj.dt
    win = _windows(cfg, t_end)
    a = cfg.get("analysis", {})
    order = a.get("detrend_order", 2)
    quantity = a.get("spectrum_quantity", "abs2")
    t0 = traj.times[0]
    late = window_metrics(traj, t0 + win["late"][0] * US, t0 + win["late"][1] * US)
    spec = spectrum(traj, t0 + win["short"][0] * US, t0 + win["short"][1] * US, order, quantity)
    peak = oscillation_peak(spec)
    out = {
        "delta_init_rad_s": traj.delta_init,
        "delta_init_mhz": to_mhz(traj.delta_init),
        "late_window_us": list(win["late"]),
        "avg": late.avg,
        "std": late.std,
        "delta_inf_rad_s": late.avg * traj.delta_init,
        "short_window_us": list(win["short"]),
        "spectrum_quantity": quantity,
        "osc_freq_mhz": peak.freq / 1e6 if peak.found else None,
        "osc_amp": peak.amplitude,
        "switch_times_s": list(traj.switch_times),
    }
    if win["decay"] is not None:
        fit = decay_time(traj, t0 + win["decay"][0] * US, t0 + win["decay"][1] * US)
        out["decay_time_s"] = fit.tau
        out["decay_unbounded"] = fit.unbounded
    return out, spec


def spectrum_csv(spec) -> str:
    return _csv(["freq_mhz", "power"], zip(spec.frequencies / 1e6, spec.power))


# ---------------------------------------------------------------- commands


def _numerics(cfg: dict, model: Optional[Model] = None):
    num = cfg.get("numerics", {})
    t_end = num.get("t_end_us", DEFAULT_T_END_US) * US
    if "dt_us" in num:
        dt = num["dt_us"] * US
    elif model is not None:
        dt = model.default_dt()
    else:
        dt = 1e-9
    return dt, t_end


def cmd_quench(cfg: dict, seed: int, args, staged: bool = False) -> dict:
    _require(cfg, "model", "staged" if staged else "quench")
    model = Model(cfg, seed)
    dt, t_end = _numerics(cfg, model)
    _windows(cfg, t_end)
    schedule = model.schedule
    if staged:
        if not schedule.has_minimum_trigger:
            e_w = model.params.dispersion.max() - model.params.dispersion.min()
            spec = cfg["model"]["dispersion"]
            schedule = continuous_restore_protocol(mhz(spec.get("e_w_mhz", 0.0)) or e_w, seed=seed)
    elif schedule.has_minimum_trigger:
        raise CliError(EXIT_CONFIG, "first_minimum triggers belong to the 'staged' command")
    traj = model.run(dt, t_end, schedule)
    metrics, spec = trajectory_metrics(traj, cfg)
    metrics.update({"dt_s": dt, "t_end_s": t_end, "n_spins": model.params.n_spins, "seed": seed})
    return {
        "trajectory.csv": trajectory_csv(traj),
        "metrics.json": _json(metrics),
        "spectrum.csv": spectrum_csv(spec),
    }


def cmd_twospin(cfg: dict, seed: int, args) -> dict:
    ts = _require(cfg, "twospin", "twospin")
    p = TwoSpinParams(mhz(ts["chi_n_mhz"]), mhz(ts["delta_s_mhz"]))
    t_end = ts.get("t_end_us", DEFAULT_T_END_US) * US
    dt = ts.get("dt_us", 0.001) * US
    t = dt * np.arange(int(round(t_end / dt)) + 1)
    d = two_spin_delta(t, p)
    freq = two_spin_frequency(p)
    info = {
        "chi_n_rad_s": p.chi_n,
        "delta_s_rad_s": p.delta_s,
        "ratio": p.ratio,
        "omega_rad_s": freq.omega,
        "freq_mhz": to_mhz(freq.omega),
        "dip": freq.dip,
        "delta_min": two_spin_delta_min(p),
    }
    return {"twospin.csv": _csv(["t_s", "delta_norm"], zip(t, d)), "twospin.json": _json(info)}


def cmd_lax(cfg: dict, seed: int, args) -> dict:
    lx = _require(cfg, "lax", "lax")
    inhom = lx.get("inhomogeneous", False)
    numeric = lx.get("numeric", True)
    results = []
    for pt in lx["points"]:
        p = LaxParams(pt["chi_n_over_ew"], 1.0, pt["delta_s_over_ew"])
        entry = {
            "chi_n_over_ew": p.chi_ratio,
            "delta_s_over_ew": p.delta_ratio,
            "analytic_label": str(classify_phase_analytic(p, inhom)),
            "closed_form_roots": [[z.real, z.imag] for z in closed_form_roots(p).roots],
        }
        if numeric:
            roots = find_roots_numeric(p)
            label = roots.label()
            if inhom:
                label = {"IIIa": "II", "IIIb": "III"}.get(str(label), str(label))
            entry["numeric_label"] = str(label)
            entry["numeric_roots"] = [[z.real, z.imag] for z in roots.roots]
        results.append(entry)
    return {"lax.json": _json({"units": "roots in units of E_W", "inhomogeneous": inhom, "points": results})}


def scan_config(cfg: dict, seed: int) -> ScanConfig:
    s = cfg.get("scan", {})
    th = s.get("thresholds", {})
    kw = dict(
        chi_range=tuple(s.get("chi_range", (0.05, 3.0))),
        delta_range=tuple(s.get("delta_range", (0.0, 3.0))),
        n_chi=s.get("n_chi", 50),
        n_delta=s.get("n_delta", 50),
        n_spins=s.get("n_spins", 1000),
        coupling=s.get("coupling", "random_cos"),
        drive_area=s.get("drive_area"),
        seed=seed,
        t_end=s.get("t_end_ew", 100.0),
        window=tuple(s.get("window_ew", (40.0, 100.0))),
        boundary_margin=s.get("boundary_margin", 0.10),
        thresholds=Thresholds(
            avg=th.get("avg", SCAN_THRESHOLDS.avg),
            osc=th.get("osc", SCAN_THRESHOLDS.osc),
            plateau=th.get("plateau"),
        ),
    )
    sc = ScanConfig(**kw)
    if sc.chi_range[0] <= 0 or sc.chi_range[1] < sc.chi_range[0]:
        raise CliError(EXIT_CONFIG, "chi_range must be positive and increasing")
    if sc.delta_range[0] < 0 or sc.delta_range[1] < sc.delta_range[0]:
        raise CliError(EXIT_CONFIG, "delta_range must be nonnegative and increasing")
    if not sc.window[0] < sc.window[1] <= sc.t_end:
        raise CliError(EXIT_CONFIG, "window_ew must be increasing and end before t_end_ew")
    return sc


OBSERVABLES = ("avg", "std", "osc_amp", "osc_freq")


def emit_phase_diagram(result: ScanResult, include_homogeneous_only: bool = False) -> dict:
    """CSV texts for a finished scan: the full table, one file per observable and the boundaries."""
    files = {}
    rows = list(result.rows())
    files["phase_diagram.csv"] = _csv(
        ["chi_n_over_ew", "delta_s_over_ew", "avg", "std", "osc_amp", "osc_freq_ew", "label", "analytic_label", "off_boundary"],
        rows,
    )
    for k, name in enumerate(OBSERVABLES):
        files[f"{name}.csv"] = _csv(["chi_n_over_ew", "delta_s_over_ew", name], ((r[0], r[1], r[2 + k]) for r in rows))
    cfg = result.config
    curves = boundary_curves(cfg.chi_range, cfg.delta_range, include_homogeneous_only=include_homogeneous_only)
    brows = []
    for b in curves:
        for i, (x, y) in enumerate(b.points):
            brows.append((b.name, int(b.homogeneous_only), i, float(x), float(y)))
    files["boundaries.csv"] = _csv(["boundary", "homogeneous_only", "point", "chi_n_over_ew", "delta_s_over_ew"], brows)
    agree = result.agreement()
    files["summary.json"] = _json({
        "points": len(rows),
        "off_boundary_points": int(np.sum(result.off_boundary)),
        "agreement": agree if not math.isnan(agree) else None,
        "thresholds": {"avg": cfg.thresholds.avg, "osc": cfg.thresholds.osc, "plateau": cfg.thresholds.plateau},
        "window_ew": list(cfg.window),
        "t_end_ew": cfg.t_end,
        "n_spins": cfg.n_spins,
        "coupling": cfg.coupling,
    })
    return files


def cmd_scan2d(cfg: dict, seed: int, args) -> dict:
    sc = scan_config(cfg, seed)
    result = run_scan(sc, workers=args.threads)
    return emit_phase_diagram(result, include_homogeneous_only=not sc.inhomogeneous)


def cmd_analyze(cfg: dict, seed: int, args) -> dict:
    an = _require(cfg, "analyze", "analyze")
    traj = read_trajectory_csv(an["input"])
    metrics, spec = trajectory_metrics(traj, cfg)
    return {"metrics.json": _json(metrics), "spectrum.csv": spectrum_csv(spec)}


COMMANDS = {
    "quench": cmd_quench,
    "staged": lambda cfg, seed, args: cmd_quench(cfg, seed, args, staged=True),
    "scan2d": cmd_scan2d,
    "lax": cmd_lax,
    "twospin": cmd_twospin,
    "analyze": cmd_analyze,
}


# ---------------------------------------------------------------- output


def write_outputs(out_dir: str, files: dict) -> None:
    """Write every file via a temporary name and rename; nothing is left half-written."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        staged = []
        try:
            for name in sorted(files):
                fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=out_dir)
                staged.append((tmp, name))
                with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                    fh.write(files[name])
            for tmp, name in staged:
                os.replace(tmp, os.path.join(out_dir, name))
        finally:
            for tmp, _ in staged:
                if os.path.exists(tmp):
                    os.unlink(tmp)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write outputs to {out_dir}: {exc}") from exc


def manifest(command: str, cfg: dict, seed: int, files: dict) -> str:
    return _json({
        "command": command,
        "config_sha256": config_hash(cfg),
        "seed": seed,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "files": sorted(files),
    })


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bcsquench", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="overrides numerics.seed")
        p.add_argument("--out-dir", default=".", help="output directory (default: .)")
        p.add_argument("--threads", type=int, default=default_workers(), help="worker processes for scans")
        p.add_argument("--ideal", action="store_true", help="zero every dissipative rate and drop motion")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.ideal:
            cfg = _ideal(cfg)
        seed = args.seed if args.seed is not None else cfg.get("numerics", {}).get("seed", 0)
        if args.threads < 1:
            raise CliError(EXIT_CONFIG, "--threads must be at least 1")
        with np.errstate(over="raise", invalid="raise"):
            files = COMMANDS[args.command](cfg, seed, args)
        files["manifest.json"] = manifest(args.command, cfg, seed, files)
        write_outputs(args.out_dir, files)
    except CliError as exc:
        print(f"bcsquench: {exc}", file=sys.stderr)
        return exc.code
    except ConfigurationError as exc:
        print(f"bcsquench: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        print(f"bcsquench: numerical guard: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    log.info("wrote %d files to %s", len(files), args.out_dir)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
