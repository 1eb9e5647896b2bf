"""Command line entry point: ``rydvortex run --scenario <name> --out <dir>``.

Every flag can also be given as an environment variable ``RYDVORTEX_<FLAG>``
(upper case, dashes as underscores); explicit flags win.  Outputs are
written to a scratch directory and moved into place only when the whole
scenario succeeded, so a failed run leaves nothing behind.  Failures print
one JSON object to stderr and exit with a non-zero status.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import shutil
import sys
import tempfile
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from rydvortex import __version__
from rydvortex.io import dumps, write_csv, write_grid_csv
from rydvortex.params import PhysicalParams, derive_params

SCENARIOS = ("fig2", "figSI1", "fig1e", "fig3-ansatz", "fig4-ansatz", "spectra", "custom")
ENV_PREFIX = "RYDVORTEX_"

EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4


class ConfigError(ValueError):
    pass


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunSpec:
    scenario: str
    out: Path
    config: Path | None = None
    threads: int = 1
    grid_scale: float = 1.0
    isosurface_level: float = 0.7  # rad/us
    ods: tuple = ()
    lams: tuple = ()
    phis_over_pi: tuple = ()
    grid_n: int = 601
    half_width: float = 5.0
    dt: float = 0.002
    tau_max: float = 2.0
    params: PhysicalParams = field(default_factory=PhysicalParams)

    def knobs(self) -> dict:
        d = asdict(self)
        d.pop("params")
        d["out"] = str(self.out)
        d["config"] = None if self.config is None else str(self.config)
        return d


# --------------------------------------------------------------------- parsing

def _floats(text):
    if text is None or text == "":
        return ()
    return tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rydvortex", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one scenario and write its data files")
    run.add_argument("scenario_pos", nargs="?", metavar="SCENARIO", choices=SCENARIOS)
    run.add_argument("--scenario", choices=SCENARIOS)
    run.add_argument("--config", help="JSON parameter file (MHz, um)")
    run.add_argument("--out", help="output directory")
    run.add_argument("--threads", type=int)
    run.add_argument("--grid-scale", type=float)
    run.add_argument("--isosurface-level", type=float, help="|grad phi3| level, rad/us")
    run.add_argument("--od", help="comma separated OD list")
    run.add_argument("--lambda", dest="lams", help="comma separated lambda list")
    run.add_argument("--phi", dest="phis", help="comma separated phi/pi list")
    run.add_argument("--grid-n", type=int)
    run.add_argument("--dt", type=float, help="conditional sampling step, us")
    run.add_argument("--tau-max", type=float, help="conditional delay range, us")
    return ap


_ENV_KEYS = {"scenario": "SCENARIO", "config": "CONFIG", "out": "OUT", "threads": "THREADS",
             "grid_scale": "GRID_SCALE", "isosurface_level": "ISOSURFACE_LEVEL", "od": "OD",
             "lams": "LAMBDA", "phis": "PHI", "grid_n": "GRID_N", "dt": "DT",
             "tau_max": "TAU_MAX"}


def _load_config(path):
    """(params, run-knob overrides) from a JSON file.

    The file is either a flat object of physical parameters, or an object
    with keys "params" and "run".
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    knobs = {}
    if "params" in data or "run" in data:
        extra = set(data) - {"params", "run"}
        if extra:
            raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
        knobs = data.get("run", {}) or {}
        data = data.get("params", {}) or {}
    try:
        params = PhysicalParams.from_json(json.dumps(data))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return params, knobs


def resolve(args: argparse.Namespace, environ=None) -> RunSpec:
    """Merge defaults, config "run" knobs, environment and flags (in that order)."""
    environ = os.environ if environ is None else environ
    vals = {}
    for key, env in _ENV_KEYS.items():
        if ENV_PREFIX + env in environ:
            vals[key] = environ[ENV_PREFIX + env]
    for key in _ENV_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = v
    if getattr(args, "scenario", None) is None and getattr(args, "scenario_pos", None):
        vals["scenario"] = args.scenario_pos

    scenario = vals.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
    if not vals.get("out"):
        raise ConfigError("an output directory is required (--out)")

    params, knobs = PhysicalParams(), {}
    if vals.get("config"):
        params, knobs = _load_config(vals["config"])
    allowed = {"threads", "grid_scale", "isosurface_level", "od", "lams", "phis", "grid_n",
               "dt", "tau_max", "half_width"}
    bad = set(knobs) - allowed
    if bad:
        raise ConfigError(f"unknown run keys: {sorted(bad)}")
    merged = {**knobs, **{k: v for k, v in vals.items() if k in allowed}}

    try:
        spec = RunSpec(
            scenario=scenario,
            out=Path(vals["out"]),
            config=Path(vals["config"]) if vals.get("config") else None,
            threads=int(merged.get("threads", 1)),
            grid_scale=float(merged.get("grid_scale", 1.0)),
            isosurface_level=float(merged.get("isosurface_level", 0.7)),
            ods=_as_tuple(merged.get("od")),
            lams=_as_tuple(merged.get("lams")),
            phis_over_pi=_as_tuple(merged.get("phis")),
            grid_n=int(merged.get("grid_n", 601)),
            half_width=float(merged.get("half_width", 5.0)),
            dt=float(merged.get("dt", 0.002)),
            tau_max=float(merged.get("tau_max", 2.0)),
            params=params,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if spec.threads < 1:
        raise ConfigError("threads must be >= 1")
    if not spec.grid_scale > 0:
        raise ConfigError("grid-scale must be positive")
    if spec.grid_n < 5:
        raise ConfigError("grid-n must be at least 5")
    if not (spec.dt > 0 and spec.tau_max > 0):
        raise ConfigError("dt and tau-max must be positive")
    if abs(round(spec.tau_max / spec.dt) * spec.dt - spec.tau_max) > 1e-9 * spec.tau_max:
        raise ConfigError("tau-max must be a multiple of dt")
    return spec


def _as_tuple(v):
    if v is None:
        return ()
    if isinstance(v, (list, tuple)):
        return tuple(float(x) for x in v)
    if isinstance(v, (int, float)):
        return (float(v),)
    return _floats(v)


# ------------------------------------------------------------------ scenarios

def _grid(spec: RunSpec):
    from rydvortex.two_photon import GridSpec

    n = int(round((spec.grid_n - 1) * spec.grid_scale)) + 1
    return GridSpec(n=max(n, 5), half_width=spec.half_width)


def _header(spec, p, **extra):
    return {"scenario": spec.scenario, "params_MHz_um": p.to_mhz_dict(), **extra}


def _check_finite(name, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise SolverError(f"{name}: non-finite values in solver output")


def _conditional_curve(p, grid, tau_max, dt):
    """Module-level so it can run in worker processes."""
    from rydvortex.conditional import evolve_conditional, observables
    from rydvortex.two_photon import solve_steady_state

    a = solve_steady_state(p, grid)
    cur = observables(evolve_conditional(a, tau_max=tau_max, dt=dt))
    _check_finite(f"OD={p.OD}", cur.g2, cur.phi2)
    return cur


def _map(spec, fn, jobs):
    if spec.threads == 1 or len(jobs) < 2:
        return [fn(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=spec.threads) as pool:
        return list(pool.map(fn, *zip(*jobs)))  # results keep job order


def scenario_fig2(spec, out):
    ods = spec.ods or tuple(float(v) for v in range(20, 111, 5))
    grid = _grid(spec)
    jobs = [(spec.params.replace(OD=od), grid, spec.tau_max, spec.dt) for od in ods]
    curves = _map(spec, _conditional_curve, jobs)
    cols = [[], [], [], [], []]
    for od, cur in zip(ods, curves):
        cols[0].append(np.full(cur.tau.size, od))
        for k, v in enumerate((cur.tau, cur.g2, cur.phi2, cur.phi2_unwrapped), start=1):
            cols[k].append(v)
    hdr = _header(spec, spec.params, grid_n=grid.n, dt_us=spec.dt, tau_max_us=spec.tau_max)
    write_csv(out / "observables.csv", ["OD", "tau_us", "g2", "phi2_wrapped", "phi2_unwrapped"],
              [np.concatenate(c) for c in cols], hdr)
    write_csv(out / "zero_delay.csv", ["OD", "g2_0", "phi2_0_wrapped", "phi2_0_unwrapped"],
              [np.array(ods), [c.g2[0] for c in curves], [c.phi2[0] for c in curves],
               [c.phi2_unwrapped[0] for c in curves]], hdr)
    return {"ODs": list(ods), "grid_n": grid.n}


def scenario_figSI1(spec, out):
    from rydvortex.conditional import evolve_conditional
    from rydvortex.topology import find_vortices
    from rydvortex.two_photon import solve_steady_state

    od = spec.ods[0] if spec.ods else 73.0
    p = spec.params.replace(OD=od)
    grid = _grid(spec)
    a = solve_steady_state(p, grid)
    psi = a.normalized("EE")
    _check_finite("two-photon solve", psi)
    run = evolve_conditional(a, tau_max=spec.tau_max, dt=spec.dt)
    _check_finite("conditional evolution", run.e)
    hdr = _header(spec, p, grid_n=grid.n, half_width_sigma=grid.half_width)
    write_grid_csv(out / "psi_abs2.csv", "x1_um", a.x1, "x2_um", a.x2,
                   {"abs2": np.abs(psi) ** 2}, hdr)
    write_grid_csv(out / "psi_phase.csv", "x1_um", a.x1, "x2_um", a.x2,
                   {"phase_rad": np.angle(psi)}, hdr)
    hdr_c = {**hdr, "dt_us": spec.dt, "tau_max_us": spec.tau_max}
    write_grid_csv(out / "ebar_abs2.csv", "tau_us", run.tau, "x2_um", run.x2,
                   {"abs2": np.abs(run.e) ** 2}, hdr_c)
    write_grid_csv(out / "ebar_phase.csv", "tau_us", run.tau, "x2_um", run.x2,
                   {"phase_rad": np.angle(run.e)}, hdr_c)
    vs = find_vortices(psi, a.x1, a.x2)
    rows = vs.rows()
    write_csv(out / "vortices.csv", ["x", "y", "charge", "core_abs"],
              [np.array([r[k] for r in rows], dtype=float) for k in range(4)], hdr)
    return {"OD": od, "grid_n": grid.n, "n_vortices": len(vs)}


def scenario_fig1e(spec, out):
    from rydvortex.effective import (PHI0, analytic_phase_boundary, bound_energy_threshold,
                                     phase_diagram)

    lams = np.array(spec.lams or (0.1, 0.2, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0))
    phis = np.pi * np.array(spec.phis_over_pi or tuple(np.round(np.arange(0.1, 5.01, 0.1), 10)))
    pd = phase_diagram(lams, phis)
    hdr = {"scenario": spec.scenario, "model": pd.model, "PHI0_over_pi": PHI0 / math.pi}
    rows = pd.rows()
    write_csv(out / "phase_diagram.csv",
              ["lambda", "phi_over_pi", "vortex_bool", "first_vortex_R_over_L"],
              [np.array([r[k] for r in rows], dtype=float) for k in range(4)], hdr)
    lam_c = np.geomspace(0.05, 10.0, 200)
    weak, strong = analytic_phase_boundary(lam_c)
    write_csv(out / "analytic_boundaries.csv",
              ["lambda", "weak_phi_over_pi", "strong_phi_over_pi", "bound_energy_phi_over_pi"],
              [lam_c, weak / np.pi, strong / np.pi,
               np.array([bound_energy_threshold(l) for l in lam_c]) / np.pi], hdr)
    write_csv(out / "thresholds.csv", ["lambda", "threshold_phi_over_pi"],
              [lams, pd.threshold_phi / np.pi], hdr)
    return {"lambdas": lams.tolist(), "n_phi": int(phis.size)}


def _ansatz_for(p):
    from rydvortex.three_photon import ThreePhotonAnsatz, group_velocity

    d = derive_params(p)
    cfg = ThreePhotonAnsatz.from_lambda(d.lam, d.r_b)
    return cfg, group_velocity(p), d


def scenario_fig3(spec, out):
    from rydvortex.three_photon import (ansatz_disconnected_g3, ansatz_volume, central_phase,
                                        phase_topology, to_time)
    from rydvortex.topology import phase_gradient_magnitude

    p = spec.params.replace(OD=spec.ods[0]) if spec.ods else spec.params
    cfg, vg, d = _ansatz_for(p)
    n = int(round(120 * spec.grid_scale)) + 1
    x = np.linspace(-6 * cfg.a, 6 * cfg.a, n)
    R_line = cfg.R_for_phase(math.pi)
    R = R_line * np.linspace(0.8, 1.2, int(round(40 * spec.grid_scale)) + 1)
    summary = {}
    for tag, c in (("full", cfg), ("pairwise", cfg.without_three_body())):
        top = phase_topology(c, x, x, R)
        summary[tag] = {"n_lines": top.n_lines, "n_rings": top.n_rings,
                        "first_R_lines_um": top.first_R("lines"),
                        "first_R_rings_um": top.first_R("rings")}
        vol = ansatz_volume(c, x, x, R)
        dx = float(to_time(x[1] - x[0], vg))
        grads = np.stack([phase_gradient_magnitude(np.angle(vol[:, :, k]), dx, dx)
                          for k in range(R.size)], axis=-1)
        E, Z, RR = np.meshgrid(to_time(x, vg), to_time(x, vg), R, indexing="ij")
        write_csv(out / f"grad_phi3_{tag}.csv",
                  ["eta_us", "zeta_us", "R_um", "grad_phi3_rad_per_us", "above_level"],
                  [E, Z, RR, grads, grads >= spec.isosurface_level],
                  {"scenario": spec.scenario, "variant": tag,
                   "isosurface_level_rad_per_us": spec.isosurface_level, "v_g_um_per_us": vg})
    E, Z = np.meshgrid(x, x, indexing="ij")
    psi = cfg.psi(E, Z, R_line)
    g3d = ansatz_disconnected_g3(cfg, E, Z, R_line)
    write_grid_csv(out / "slice_line_formation.csv", "eta_us", to_time(x, vg), "zeta_us",
                   to_time(x, vg), {"g3": np.abs(psi) ** 2, "phi3": np.angle(psi), "g3d": g3d,
                                    "g3c": np.abs(psi) ** 2 - g3d},
                   {"scenario": spec.scenario, "R_um": R_line, "v_g_um_per_us": vg})
    Rc, ph = central_phase(cfg, R_line)
    write_csv(out / "central_phase.csv", ["R_um", "phi3_center_unwrapped"], [Rc, ph],
              {"scenario": spec.scenario})
    (out / "topology.json").write_text(dumps(summary) + "\n")
    return {"a_um": cfg.a, "E2_per_um": cfg.E2, "E3_per_um": cfg.E3, "v_g_um_per_us": vg,
            "R_line_um": R_line, "grid_points": n, "topology": summary}


def scenario_fig4(spec, out):
    from rydvortex.three_photon import (ansatz_disconnected_g3, disconnected_g3, to_length,
                                        to_time)

    od = spec.ods[0] if spec.ods else 69.0
    p = spec.params.replace(OD=od)
    cfg, vg, d = _ansatz_for(p)
    n = int(round(120 * spec.grid_scale)) + 1
    x = np.linspace(-6 * cfg.a, 6 * cfg.a, n)
    E, Z = np.meshgrid(x, x, indexing="ij")
    R = p.L  # whole medium
    psi = cfg.psi(E, Z, R)
    g3 = np.abs(psi) ** 2
    g3d = ansatz_disconnected_g3(cfg, E, Z, R)
    hdr = {"scenario": spec.scenario, "OD": od, "R_um": R, "v_g_um_per_us": vg,
           "E2R_over_pi": cfg.E2 * R / math.pi}
    write_grid_csv(out / "g3_ansatz.csv", "eta_us", to_time(x, vg), "zeta_us", to_time(x, vg),
                   {"g3": g3, "phi3": np.angle(psi), "g3d": g3d, "g3c": g3 - g3d}, hdr)
    cur = _conditional_curve(p, _grid(spec), spec.tau_max, spec.dt)
    t = np.linspace(-0.4, 0.4, n)
    Et, Zt = np.meshgrid(t, t, indexing="ij")
    write_grid_csv(out / "g3d_simulated.csv", "eta_us", t, "zeta_us", t,
                   {"g3d": disconnected_g3(cur, Et, Zt)}, {**hdr, "source": "conditional g2"})
    return {"OD": od, "grid_points": n, "a_us": float(to_time(cfg.a, vg)),
            "a_um_check": float(to_length(to_time(cfg.a, vg), vg))}


def scenario_spectra(spec, out):
    from rydvortex.single_photon import transmission_spectrum

    p = spec.params.replace(OD=spec.ods[0]) if spec.ods else spec.params
    deltas = 2 * np.pi * np.linspace(-6.0, 6.0, int(round(1200 * spec.grid_scale)) + 1)
    s = transmission_spectrum(p, deltas)
    r = s.rows()
    write_csv(out / "spectra.csv", ["delta_MHz", "T3", "T2", "phase3_rad", "phase2_rad"],
              [r[:, k] for k in range(5)], _header(spec, p))
    return {"n_delta": int(deltas.size)}


def scenario_custom(spec, out):
    from rydvortex.two_photon import solve_steady_state

    p = spec.params.replace(OD=spec.ods[0]) if spec.ods else spec.params
    grid = _grid(spec)
    a = solve_steady_state(p, grid)
    _check_finite("two-photon solve", a.reduced)
    fields = {name: a.normalized(name) for name in ("EE", "ES", "SS")}
    write_grid_csv(out / "amplitudes.csv", "x1_um", a.x1, "x2_um", a.x2, fields,
                   _header(spec, p, grid_n=grid.n))
    cur = _conditional_curve(p, grid, spec.tau_max, spec.dt)
    write_csv(out / "observables.csv", ["tau_us", "g2", "phi2_wrapped", "phi2_unwrapped"],
              [cur.tau, cur.g2, cur.phi2, cur.phi2_unwrapped], _header(spec, p))
    return {"OD": p.OD, "grid_n": grid.n}


_SCENARIO_FUNCS = {"fig2": scenario_fig2, "figSI1": scenario_figSI1, "fig1e": scenario_fig1e,
                   "fig3-ansatz": scenario_fig3, "fig4-ansatz": scenario_fig4,
                   "spectra": scenario_spectra, "custom": scenario_custom}


def run(spec: RunSpec) -> dict:
    """Run a scenario; files appear in ``spec.out`` only if everything succeeded."""
    out = Path(spec.out)
    parent = out.resolve().parent
    try:
        parent.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=".rydvortex-", dir=parent))
    except OSError as exc:
        raise OSError(f"cannot create output directory under {parent}: {exc}") from exc
    try:
        info = _SCENARIO_FUNCS[spec.scenario](spec, tmp)
        meta = {"version": __version__, "scenario": spec.scenario, "knobs": spec.knobs(),
                "params_MHz_um": spec.params.to_mhz_dict(), "result": info,
                "files": sorted([f.name for f in tmp.iterdir()] + ["metadata.json"])}
        if spec.params.OD > 0:
            meta["derived"] = derive_params(spec.params).as_dict()
        (tmp / "metadata.json").write_text(json.dumps(_plain(meta), sort_keys=True, indent=1)
                                           + "\n")
        out.mkdir(parents=True, exist_ok=True)
        for f in sorted(tmp.iterdir()):
            shutil.move(str(f), str(out / f.name))
        return meta
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


def _plain(obj):
    return json.loads(dumps(obj))


def _fail(kind: str, status: int, exc: BaseException) -> int:
    err = {"error": kind, "status": status, "message": str(exc), "type": type(exc).__name__}
    print(json.dumps(err, sort_keys=True), file=sys.stderr)
    if os.environ.get(ENV_PREFIX + "DEBUG"):
        traceback.print_exc()
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = resolve(args)
    except ConfigError as exc:
        return _fail("config error", EXIT_CONFIG, exc)
    try:
        meta = run(spec)
    except ConfigError as exc:
        return _fail("config error", EXIT_CONFIG, exc)
    except (SolverError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail("solver error", EXIT_SOLVER, exc)
    except OSError as exc:
        return _fail("io error", EXIT_IO, exc)
    except ValueError as exc:
        return _fail("config error", EXIT_CONFIG, exc)
    print(json.dumps({"status": "ok", "out": str(spec.out), "files": meta["files"]},
                     sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
