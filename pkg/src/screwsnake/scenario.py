"""Scenario configuration (YAML) and the end-to-end run entry point.

A scenario names a mode, a terrain, geometry overrides, timing, and the
mode's command block; ``run_scenario`` builds the matching simulator,
installs controller setpoints, runs it, and returns (log, summary).
Identical configs (same seed) produce bit-identical logs.
"""

from __future__ import annotations

import math
import os
from importlib import resources
from pathlib import Path

import yaml

from .chain import ChainGeometry, JointState
from .corridor import ConformingSimulator, CorridorSpec, zigzag_corridor
from .errors import ScenarioConfigError
from .mconfig import mconfig_setpoints
from .sim import Mode, Simulator
from .terrain import resolve_profile
from .tunneling import STRAIGHT, TunnelingCommand, tunneling_setpoints

_GEOM_FIELDS = {
    "n_segments": int,
    "l": float,
    "r_s": float,
    "v_lead_max": float,
    "joint_limit": float,
    "joint_limit_deg": float,
    "omega_max": float,
    "cross_section": float,
    "handedness": list,
}


def load_defaults() -> dict:
    """Versioned experiment defaults (durations, dt, tolerances).

    A defaults.yaml inside $SCREWSNAKE_CONFIG_DIR, when present, overrides
    the bundled file.
    """
    config_dir = os.environ.get("SCREWSNAKE_CONFIG_DIR")
    if config_dir:
        override = Path(config_dir) / "defaults.yaml"
        if override.exists():
            return yaml.safe_load(override.read_text())
    text = resources.files("screwsnake").joinpath("data/defaults.yaml").read_text()
    return yaml.safe_load(text)


def _field(cfg: dict, path: str, typ, default=None, required=False):
    node = cfg
    parts = path.split(".")
    for p in parts[:-1]:
        node = node.get(p, {}) if isinstance(node, dict) else {}
    if not isinstance(node, dict) or parts[-1] not in node:
        if required:
            raise ScenarioConfigError(path, "missing required field")
        return default
    value = node[parts[-1]]
    if typ is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if typ is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if typ is not None and not isinstance(value, typ):
        raise ScenarioConfigError(path, f"expected {typ.__name__}, got {type(value).__name__}")
    return value


def _radius(cfg: dict, path: str, default=STRAIGHT) -> float:
    node = cfg
    for p in path.split("."):
        node = node.get(p, {}) if isinstance(node, dict) else {}
        if node == {}:
            break
    value = node if node != {} else default
    if isinstance(value, str):
        if value.lower() in ("straight", "inf", "infinite"):
            return STRAIGHT
        try:
            return float(value)
        except ValueError:
            raise ScenarioConfigError(
                path, f"unrecognized radius {value!r}"
            ) from None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise ScenarioConfigError(path, "expected a number or 'straight'")


def build_geometry(cfg: dict) -> ChainGeometry:
    g = cfg.get("geometry", {}) or {}
    if not isinstance(g, dict):
        raise ScenarioConfigError("geometry", "expected a mapping")
    for key in g:
        if key not in _GEOM_FIELDS:
            raise ScenarioConfigError(f"geometry.{key}", "unknown geometry field")
    kwargs = {}
    for key, typ in _GEOM_FIELDS.items():
        if key in g and key != "joint_limit_deg":
            kwargs[key] = typ(g[key]) if typ in (int, float) else g[key]
    if "joint_limit_deg" in g:
        kwargs["joint_limit"] = math.radians(float(g["joint_limit_deg"]))
    if "handedness" in kwargs:
        kwargs["handedness"] = tuple(int(h) for h in kwargs["handedness"])
    return ChainGeometry(**kwargs)


def build_corridor(node) -> CorridorSpec:
    if node in (None, "fig8", "builtin"):
        return zigzag_corridor()
    if not isinstance(node, dict):
        raise ScenarioConfigError("conforming.corridor", "expected 'fig8' or a mapping")
    known = {
        "width", "lead_in", "bend_deg", "n_bends", "fillet_radius",
        "straight", "incline_deg", "incline_length", "lead_out",
    }
    for key in node:
        if key not in known:
            raise ScenarioConfigError(f"conforming.corridor.{key}", "unknown corridor field")
    return zigzag_corridor(**{k: float(v) if k != "n_bends" else int(v) for k, v in node.items()})


def load_scenario(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"scenario file not found: {p}")
    cfg = yaml.safe_load(p.read_text())
    if not isinstance(cfg, dict):
        raise ScenarioConfigError("<root>", "scenario must be a mapping")
    return cfg


def run_scenario(cfg: dict | str | Path):
    """Run one scenario; returns (TrajectoryLog, summary dict)."""
    if not isinstance(cfg, dict):
        cfg = load_scenario(cfg)
    mode_name = _field(cfg, "mode", str, required=True)
    try:
        mode = Mode(mode_name)
    except ValueError:
        raise ScenarioConfigError(
            "mode", f"unknown mode {mode_name!r}; expected one of "
            f"{[m.value for m in Mode]}"
        ) from None
    geom = build_geometry(cfg)
    terrain = resolve_profile(_field(cfg, "terrain", None, default="ideal_screw_medium"))
    dt = _field(cfg, "dt", float, default=0.01)
    duration = _field(cfg, "duration", float, required=True)
    if duration < 0.0:
        raise ScenarioConfigError("duration", "must be >= 0")
    seed = _field(cfg, "seed", int, default=0)

    if mode is Mode.CONFORMING:
        spec = build_corridor((cfg.get("conforming") or {}).get("corridor"))
        sim = ConformingSimulator(
            geom=geom,
            terrain=terrain,
            spec=spec,
            screw_speed_fraction=_field(
                cfg, "conforming.screw_speed_fraction", float, default=1.0
            ),
            dt=dt,
        )
        log = sim.run(duration)
        summary = sim.summary()
        summary["seed"] = seed
        return log, summary

    sim = Simulator(
        geom=geom,
        terrain=terrain,
        mode=mode,
        dt=dt,
        seed=seed,
        rate_limit=_field(cfg, "rate_limit", float, default=1.0),
        incline_deg=_field(cfg, "incline_deg", float, default=0.0),
        noise_sd=_field(cfg, "noise_sd", float, default=0.0),
    )

    if mode is Mode.TUNNELING:
        cmd = TunnelingCommand(
            turn_radius=_radius(cfg, "tunneling.turn_radius"),
            screw_speed_fraction=_field(
                cfg, "tunneling.screw_speed_fraction", float, default=0.5
            ),
        )
        sp = tunneling_setpoints(geom, cmd)
        sim.set_setpoints(sp.joint_angles, sp.screw_omegas)
    elif mode is Mode.M_CONFIG:
        theta_m = math.radians(_field(cfg, "mconfig.theta_m_deg", float, default=140.0))
        sp = mconfig_setpoints(
            geom,
            theta_m,
            turn_radius=_radius(cfg, "mconfig.turn_radius"),
            base_speed=_field(cfg, "mconfig.base_speed", float, default=0.5),
        )
        sim.set_setpoints(sp.joint_angles, sp.screw_omegas)
    elif mode is Mode.TELEOP:
        schedule = _field(cfg, "teleop.schedule", list, default=[])
        _run_teleop_schedule(sim, geom, schedule, duration)
        summary = sim.summary()
        summary["seed"] = seed
        return sim.log, summary

    if _field(cfg, "initial", str, default="posed") == "posed":
        sim.snap_to_setpoints()
    log = sim.run(duration)
    summary = sim.summary()
    summary["seed"] = seed
    return log, summary


def _run_teleop_schedule(sim: Simulator, geom: ChainGeometry, schedule, duration):
    """Scripted joint-deflection schedule for teleop-mode scenarios."""
    events = sorted(schedule, key=lambda e: float(e.get("t", 0.0)))
    idx = 0
    steps = int(round(duration / sim.dt))
    for k in range(steps):
        now = k * sim.dt
        while idx < len(events) and float(events[idx].get("t", 0.0)) <= now:
            ev = events[idx]
            defl = [float(d) for d in ev.get("deflections", [0.0] * geom.n_joints)]
            frac = float(ev.get("screw", 0.0))
            angles = tuple(math.pi - d for d in defl)
            omegas = tuple(h * frac * geom.omega_max for h in geom.handedness)
            sim.set_setpoints(angles, omegas)
            idx += 1
        sim.step()
    return sim.log


def write_summary(summary: dict, path):
    Path(path).write_text(yaml.safe_dump(summary, sort_keys=True))
