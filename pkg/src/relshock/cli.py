"""Scenario runner: ``relshock run``, ``relshock audit-eos``, ``relshock version``.

Experiments are described by JSON files; flags only choose the config, the
output directory, parallelism and verbosity.  Exit codes: 0 PASS, 1 FAIL,
2 missing file, 3 schema violation, 4 inadmissible physics, 5 runtime error.
"""
from __future__ import annotations

import argparse
import copy
import hashlib
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import blowup as bl
from . import eos as eosm
from . import multid as md
from . import riemann as rm
from . import solver1d as s1
from .errors import ConfigError, DomainError, RelshockError

log = logging.getLogger("relshock")

MODES = ("dichotomy-1d", "eos-audit", "multid-check")

# key -> default (None means required or optional without default)
_TOP = {
    "name": "scenario", "mode": None, "eos": None, "kind": "relativistic", "grid": None,
    "cfl": 0.9, "t_end": None, "profile": None, "seeds": None, "scheme": "upwind",
    "thresholds": {}, "history_every": 0, "audit": {}, "multid": {}, "output": None,
    "scenarios": None,
}
_THRESHOLDS = {
    "gradient_blowup_factor": 1e3, "horizon_multiplier": 50.0, "dt_collapse": 1e-12,
    "floor_tol": 0.05, "exponent_slack": 0.2, "riccati_rtol": 1e-6,
}
_GRID = {"x_min": None, "x_max": None, "n_cells": None, "boundary": "constant-extrapolation"}
_AUDIT = {"rho_range": [1e-3, 10.0], "A_candidates": None}
_MULTID = {"field": None, "snapshots": [0.0, 0.5, 1.0], "region": None, "mass_group": None,
           "grad_u0": None, "free_stream_t": None, "tolerance": 1e-3}
_MASS_GROUP = {"A0": None, "B0": None, "R0": None}


@dataclass
class ScenarioConfig:
    name: str
    mode: str
    eos: dict | None
    kind: str
    grid: dict | None
    cfl: float
    t_end: float | None
    profile: dict | None
    seeds: list | None
    scheme: str
    thresholds: dict
    history_every: int
    audit: dict
    multid: dict
    output: str | None = None
    scenarios: list | None = None
    source: str | None = field(default=None, repr=False)

    def effective(self) -> dict:
        d = {k: copy.deepcopy(getattr(self, k)) for k in _TOP if k != "scenarios"}
        if self.scenarios is not None:
            d["scenarios"] = [s.effective() for s in self.scenarios]
        return d


def _check_keys(d, allowed, path):
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object", 3)
    for k in d:
        if k not in allowed:
            raise ConfigError(f"{path}.{k}: unknown key", 3)


def _fill(d, defaults, path):
    _check_keys(d, defaults, path)
    out = {k: copy.deepcopy(v) for k, v in defaults.items()}
    out.update(d)
    return out


def _num(v, path, positive=False, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}: expected a number", 3)
    if integer and int(v) != v:
        raise ConfigError(f"{path}: expected an integer", 3)
    if positive and not v > 0:
        raise ConfigError(f"{path}: must be positive", 3)
    return int(v) if integer else float(v)


def build_eos(d: dict, path="eos") -> eosm.EosSpec:
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object", 3)
    _check_keys(d, {"kind", "k", "gamma", "c", "polynomial", "table", "assumption_A"}, path)
    kind = d.get("kind")
    if kind not in ("polytropic", "general"):
        raise ConfigError(f"{path}.kind: must be 'polytropic' or 'general'", 3)
    need = ("k", "gamma", "c") if kind == "polytropic" else ("c",)
    for k in need:
        if k not in d:
            raise ConfigError(f"{path}.{k}: required", 3)
        _num(d[k], f"{path}.{k}")
    if kind == "polytropic" and not d["gamma"] > 1:
        raise ConfigError("eos.gamma: gamma > 1 required (polytropic gas with gamma > 1; "
                          "the isothermal case gamma = 1 is unsupported)", 4)
    try:
        return eosm.EosSpec.from_dict(d)
    except DomainError as exc:
        raise ConfigError(f"{path}: {exc}", 4) from None


def _validate(raw: dict, path="config", parent: dict | None = None) -> ScenarioConfig:
    if parent is not None:
        merged = {k: copy.deepcopy(v) for k, v in parent.items() if k != "scenarios"}
        merged.update(raw)
        raw = merged
    d = _fill(raw, _TOP, path)
    subs = d.pop("scenarios")
    if subs is not None:
        if not isinstance(subs, list) or not subs:
            raise ConfigError(f"{path}.scenarios: expected a non-empty list", 3)
        base = {k: v for k, v in raw.items() if k != "scenarios"}
        kids = [_validate(s, f"{path}.scenarios[{i}]", base) for i, s in enumerate(subs)]
        names = [k.name for k in kids]
        if len(set(names)) != len(names):
            raise ConfigError(f"{path}.scenarios: scenario names must be unique", 3)
        cfg = ScenarioConfig(**{k: d[k] for k in d if k in ScenarioConfig.__dataclass_fields__},
                             scenarios=kids)
        return cfg
    if not isinstance(d["name"], str) or not d["name"] or "/" in d["name"]:
        raise ConfigError(f"{path}.name: expected a non-empty string without '/'", 3)
    if d["mode"] not in MODES:
        raise ConfigError(f"{path}.mode: must be one of {', '.join(MODES)}", 3)
    if d["kind"] not in ("relativistic", "classical"):
        raise ConfigError(f"{path}.kind: must be 'relativistic' or 'classical'", 3)
    d["thresholds"] = _fill(d["thresholds"], _THRESHOLDS, f"{path}.thresholds")
    for k, v in d["thresholds"].items():
        _num(v, f"{path}.thresholds.{k}", positive=True)
    d["cfl"] = _num(d["cfl"], f"{path}.cfl", positive=True)
    if d["cfl"] > 0.9:
        raise ConfigError(f"{path}.cfl: must not exceed 0.9", 3)
    d["history_every"] = _num(d["history_every"], f"{path}.history_every", integer=True)
    if d["scheme"] not in ("upwind", "muscl"):
        raise ConfigError(f"{path}.scheme: must be 'upwind' or 'muscl'", 3)
    if d["mode"] in ("dichotomy-1d", "eos-audit"):
        if d["eos"] is None:
            raise ConfigError(f"{path}.eos: required", 3)
        build_eos(d["eos"], f"{path}.eos")
    if d["mode"] == "dichotomy-1d":
        if d["grid"] is None:
            raise ConfigError(f"{path}.grid: required", 3)
        g = _fill(d["grid"], _GRID, f"{path}.grid")
        for k in ("x_min", "x_max"):
            if g[k] is None:
                raise ConfigError(f"{path}.grid.{k}: required", 3)
            g[k] = _num(g[k], f"{path}.grid.{k}")
        if g["n_cells"] is None:
            raise ConfigError(f"{path}.grid.n_cells: required", 3)
        g["n_cells"] = _num(g["n_cells"], f"{path}.grid.n_cells", positive=True, integer=True)
        if g["boundary"] not in ("periodic", "constant-extrapolation"):
            raise ConfigError(f"{path}.grid.boundary: must be 'periodic' or 'constant-extrapolation'", 3)
        if not g["x_max"] > g["x_min"]:
            raise ConfigError(f"{path}.grid: x_max must exceed x_min", 3)
        d["grid"] = g
        if d["profile"] is None:
            raise ConfigError(f"{path}.profile: required", 3)
        if not isinstance(d["profile"], dict):
            raise ConfigError(f"{path}.profile: expected an object", 3)
        prof = d["profile"]
        s1.InitialProfile.from_dict(prof)
        if d["kind"] == "relativistic" and "u" in prof:
            c = float(d["eos"]["c"])
            if abs(float(prof["u"])) >= c:
                raise ConfigError(f"{path}.profile.u: |u0| < c required (sub-luminal admissibility)", 4)
        if d["t_end"] is not None:
            d["t_end"] = _num(d["t_end"], f"{path}.t_end", positive=True)
        if d["seeds"] is not None:
            if not isinstance(d["seeds"], list):
                raise ConfigError(f"{path}.seeds: expected a list", 3)
            for i, s in enumerate(d["seeds"]):
                _check_keys(s, {"x", "family"}, f"{path}.seeds[{i}]")
                _num(s.get("x"), f"{path}.seeds[{i}].x")
                if s.get("family", 1) not in (1, 2):
                    raise ConfigError(f"{path}.seeds[{i}].family: must be 1 or 2", 3)
    if d["mode"] == "eos-audit":
        d["audit"] = _fill(d["audit"], _AUDIT, f"{path}.audit")
        rr = d["audit"]["rho_range"]
        if not (isinstance(rr, list) and len(rr) == 2):
            raise ConfigError(f"{path}.audit.rho_range: expected [lo, hi]", 3)
        if not 0 < rr[0] < rr[1]:
            raise ConfigError(f"{path}.audit.rho_range: need 0 < lo < hi", 3)
    if d["mode"] == "multid-check":
        d["multid"] = _fill(d["multid"], _MULTID, f"{path}.multid")
        if d["multid"]["field"] is None:
            raise ConfigError(f"{path}.multid.field: required", 3)
        if d["multid"]["field"].get("type") != "dust-stream" and d["eos"] is None:
            raise ConfigError(f"{path}.eos: required for this field type", 3)
        eos = build_eos(d["eos"], f"{path}.eos") if d["eos"] is not None else None
        try:
            md.field_from_descriptor(d["multid"]["field"], eos)
        except TypeError as exc:
            raise ConfigError(f"{path}.multid.field: {exc}", 3) from None
        except DomainError as exc:
            raise ConfigError(f"{path}.multid.field: {exc}", 4) from None
        if d["multid"]["mass_group"] is not None:
            d["multid"]["mass_group"] = _fill(d["multid"]["mass_group"], _MASS_GROUP, f"{path}.multid.mass_group")
        snaps = d["multid"]["snapshots"]
        if not isinstance(snaps, list) or len(snaps) < 3:
            raise ConfigError(f"{path}.multid.snapshots: need at least 3 times", 3)
    return ScenarioConfig(**d)


def parse_config(path) -> ScenarioConfig:
    """Read and validate a JSON scenario file."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}", 2)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})", 3) from None
    cfg = _validate(raw)
    cfg.source = os.path.abspath(path)
    return cfg


# -- deterministic output helpers -----------------------------------------------
def _clean(o):
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, np.ndarray):
        return [_clean(v) for v in o.tolist()]
    if isinstance(o, (np.floating, float)):
        v = float(o)
        return v if math.isfinite(v) else repr(v)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    return o


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def write_manifest(out_dir):
    entries = []
    for name in sorted(os.listdir(out_dir)):
        p = os.path.join(out_dir, name)
        if name == "manifest.json" or not os.path.isfile(p):
            continue
        with open(p, "rb") as fh:
            entries.append({"file": name, "sha256": hashlib.sha256(fh.read()).hexdigest()})
    _write_json(os.path.join(out_dir, "manifest.json"), {"files": entries})


# -- scenario modes --------------------------------------------------------------
def crossing_time(field: s1.Field1D) -> float:
    """``1 / max |d lambda/dx|`` at ``t=0``, or domain transit time for flat data."""
    d = field.coefficients()
    g = field.grid
    rate = max(np.max(np.abs(g.gradient(d["lambda1"]))), np.max(np.abs(g.gradient(d["lambda2"]))))
    if rate > 0:
        return float(1.0 / rate)
    smax = max(np.max(np.abs(d["lambda1"])), np.max(np.abs(d["lambda2"])))
    return float((g.x_max - g.x_min) / smax) if smax > 0 else 1.0


def run_dichotomy(cfg: ScenarioConfig, out_dir) -> tuple:
    eos = build_eos(cfg.eos)
    th = cfg.thresholds
    grid = s1.Grid1D(cfg.grid["x_min"], cfg.grid["x_max"], cfg.grid["n_cells"], cfg.grid["boundary"])
    prof = s1.InitialProfile.from_dict(cfg.profile)
    f = s1.init_field(grid, eos, cfg.kind, prof)
    t_end = cfg.t_end if cfg.t_end is not None else th["horizon_multiplier"] * crossing_time(f)
    rc = bl.classify_rc(f)
    if cfg.seeds is not None:
        seeds = np.array([s["x"] for s in cfg.seeds], dtype=float)
        fams = np.array([s.get("family", 1) for s in cfg.seeds], dtype=int)
    else:
        seeds, fams = bl.default_seeds(f)
    monitors = [s1.Tracer(f, seeds, fams)] if seeds.size else []
    log.info("%s: evolving to t=%.6g on %d cells", cfg.name, t_end, grid.n_cells)
    ser = s1.evolve(f, t_end, cfg.cfl, monitors, cfg.scheme, th["gradient_blowup_factor"],
                    th["dt_collapse"], cfg.history_every)
    rep = bl.predict_blowup(ser, seeds if seeds.size else None, fams if seeds.size else None) \
        if seeds.size else bl.BlowupReport(rc.compression_present, rc.compression_cells,
                                           None, ser.observed_t_star if ser.blowup else None)
    if eos.kind == "polytropic":
        fam1 = [t for t in rep.traces if t.family == 1]
        ff = bl.verify_density_floor(ser, fam1[0] if fam1 else None, tol=th["floor_tol"],
                                     exponent_slack=th["exponent_slack"])
        rep.floor_fit, rep.exponent_fit = ff.floor_dict(), ff.exponent_dict()
    rep.T_m = rep.predicted_t_star
    passed, _, _ = bl.dichotomy_verdict(rc, rep)
    body = rep.to_dict()
    body.update({"name": cfg.name, "t_end": t_end, "halt_reason": ser.halt_reason, "steps": ser.steps,
                 "max_gradient_ratio": ser.max_gradient_ratio, "invariant_margin": ser.invariant_margin,
                 "admissibility": f.admissibility.to_dict(), "data_bounds": f.bounds.to_dict(),
                 "rc_counts": rc.counts})
    _write_json(os.path.join(out_dir, "report.json"), body)
    ser.to_csv(os.path.join(out_dir, "series.csv"))
    for i, tr in enumerate(rep.traces):
        if tr.inv_xi is None and abs(tr.xi_field[0]) > 0:
            try:
                s1.integrate_riccati(tr, rtol=th["riccati_rtol"])
            except RelshockError:
                pass
        tr.to_csv(os.path.join(out_dir, f"trace_{i:02d}_family{tr.family}.csv"))
    return passed, body


def _candidates(cand):
    if cand is None:
        return None
    if isinstance(cand, dict):
        return np.arange(cand["start"], cand["stop"] + 0.5 * cand["step"], cand["step"])
    return np.asarray(cand, dtype=float)


def run_audit(cfg: ScenarioConfig, out_dir=None) -> tuple:
    eos = build_eos(cfg.eos)
    rep = eosm.check_pressure_assumptions(eos, cfg.audit["rho_range"], _candidates(cfg.audit["A_candidates"]))
    body = rep.to_dict()
    body["name"] = cfg.name
    body["eos"] = eos.to_dict()
    passed = bool(rep.assumption2 and rep.assumption3)
    body["passed"] = passed
    if out_dir is not None:
        _write_json(os.path.join(out_dir, "report.json"), body)
    return passed, body


def run_multid(cfg: ScenarioConfig, out_dir) -> tuple:
    m = cfg.multid
    eos = build_eos(cfg.eos) if cfg.eos is not None else None
    desc = dict(m["field"])
    region = m["region"]
    snaps = []
    for t in m["snapshots"]:
        if desc.get("type") == "dust-stream":
            fld = md.field_from_descriptor(dict(desc, t=float(t)))
        else:
            fld = md.field_from_descriptor(desc, eos)
            fld.t = float(t)
        snaps.append(md.compute_functionals(fld, region))
    tol = m["tolerance"]
    drift = md.conservation_check(snaps, tol, tol, tol, tol)
    body = {"name": cfg.name, "drift": drift.to_dict(), "functionals": [s.to_dict() for s in snaps],
            "velocity_floor": md.velocity_floor(snaps[0])}
    passed = drift.passed
    if m["mass_group"] is not None:
        fld0 = md.field_from_descriptor(dict(desc, t=float(m["snapshots"][0])) if desc.get("type") == "dust-stream"
                                        else desc, eos)
        mg = m["mass_group"]
        group = md.MassGroupSpec.from_field(fld0, mg["A0"], mg["B0"], mg["R0"])
        D0, D = md.mass_group_constants(group, fld0.eos)
        T = md.mass_group_blowup_bound(group, fld0.eos)
        quad_at_T = 0.5 * D * group.m0 * T * T + 2 * group.F0 * T + group.M0 - group.R1 ** 2 * group.m0
        body["mass_group"] = {"m0": group.m0, "M0": group.M0, "F0": group.F0, "m_bar0": group.m_bar0,
                              "A0_volume": group.A0_volume, "R1": group.R1, "D0": D0, "D": D, "T_bound": T,
                              "plug_back_residual": abs(quad_at_T) / (group.R1 ** 2 * group.m0)}
    if m["grad_u0"] is not None:
        G = np.asarray(m["grad_u0"], dtype=float)
        ts = md.free_stream_time(G)
        fs = {"t_star": ts}
        if m["free_stream_t"] is not None:
            try:
                fs["grad_u_t"] = md.free_stream_gradient(G, float(m["free_stream_t"]))[0]
            except RelshockError as exc:
                fs["singular"] = str(exc)
        body["free_stream"] = fs
    body["passed"] = passed
    _write_json(os.path.join(out_dir, "report.json"), body)
    return passed, body


_RUNNERS = {"dichotomy-1d": run_dichotomy, "eos-audit": run_audit, "multid-check": run_multid}


def run_scenario(cfg: ScenarioConfig, out_dir) -> int:
    """Run one scenario, write artifacts and a manifest; return the exit status."""
    os.makedirs(out_dir, exist_ok=True)
    _write_json(os.path.join(out_dir, "config.effective.json"), cfg.effective())
    try:
        passed, _ = _RUNNERS[cfg.mode](cfg, out_dir)
        code = 0 if passed else 1
    except ConfigError as exc:
        _write_json(os.path.join(out_dir, "error.json"), {"error": str(exc), "exit_code": exc.exit_code})
        log.error("%s: %s", cfg.name, exc)
        code = exc.exit_code
    except (RelshockError, ArithmeticError, ValueError) as exc:
        msg = f"{type(exc).__module__}.{type(exc).__name__}: {exc}"
        _write_json(os.path.join(out_dir, "error.json"), {"error": msg, "exit_code": 5})
        log.error("%s: %s", cfg.name, msg)
        code = 5
    write_manifest(out_dir)
    return code


def _run_child(args):
    cfg, out = args
    return run_scenario(cfg, out)


def run_all(cfg: ScenarioConfig, out_dir, jobs=1) -> int:
    if cfg.scenarios is None:
        return run_scenario(cfg, out_dir)
    os.makedirs(out_dir, exist_ok=True)
    tasks = [(s, os.path.join(out_dir, s.name)) for s in cfg.scenarios]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            codes = list(ex.map(_run_child, tasks))
    else:
        codes = [_run_child(t) for t in tasks]
    _write_json(os.path.join(out_dir, "summary.json"),
                {"scenarios": [{"name": s.name, "exit_code": c} for (s, _), c in zip(tasks, codes)]})
    write_manifest(out_dir)
    return max(codes)


# -- entry point -----------------------------------------------------------------
def build_parser():
    p = argparse.ArgumentParser(prog="relshock", description=__doc__.splitlines()[0])
    p.add_argument("--verbosity", choices=("quiet", "info", "debug"), default="info")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario config")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--jobs", type=int, default=1)
    a = sub.add_parser("audit-eos", help="audit the pressure law of a config and print the report")
    a.add_argument("--config", required=True)
    sub.add_parser("version", help="print the version")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}[args.verbosity]
    logging.basicConfig(level=level, format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.command == "version":
        print(__version__)
        return 0
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.command == "audit-eos":
        if cfg.eos is None:
            print("error: config.eos: required", file=sys.stderr)
            return 3
        audit_cfg = copy.copy(cfg)
        audit_cfg.audit = _fill(cfg.audit or {}, _AUDIT, "config.audit")
        try:
            passed, body = run_audit(audit_cfg)
        except RelshockError as exc:
            print(f"error: {type(exc).__module__}: {exc}", file=sys.stderr)
            return 5
        print(json.dumps(_clean(body), indent=2, sort_keys=True))
        return 0 if passed else 1
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 3
    return run_all(cfg, args.out, args.jobs)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
