"""Command-line interface: experiment sweeps, calibration, bus analysis,
scenario runs, and the teleop server.

Exit codes: 0 on success, 1 when a tolerance check fails, 2 on usage or
configuration errors (click's default). All commands are deterministic
for a fixed --seed; outputs are CSV or YAML.
"""

from __future__ import annotations

import csv
import math
import sys
from pathlib import Path

import click
import yaml

from .bus import BusModel, max_segments, rtt, scheduling_table
from .chain import ChainGeometry
from .errors import InfeasibleRadiusError, ScrewSnakeError
from .scenario import load_defaults, run_scenario, write_summary
from .server import run_server
from .terrain import calibrate_suite, resolve_profile, save_profile
from .tunneling import STRAIGHT, heading_angle


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        values = [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise click.UsageError(f"{flag}: expected a list of numbers, got {text!r}")
    if not values:
        raise click.UsageError(f"{flag}: empty list")
    return values


@click.group()
def main():
    """Screw-propelled snake robot simulator."""


@main.command("sweep-tunneling")
@click.option("--radii", required=True, help="commanded radii in m, comma separated")
@click.option("--terrain", default=None, help="terrain profile name or path")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--tol", type=float, default=None, help="relative radius error gate")
@click.option("--speed", type=float, default=None, help="screw speed fraction")
@click.option("--arc", type=float, default=None, help="swept arc per run (rad)")
@click.option("--dt", type=float, default=None)
@click.option("--seed", type=int, default=0)
def sweep_tunneling(radii, terrain, out, tol, speed, arc, dt, seed):
    """Commanded-vs-fitted turning radius table for tunneling mode."""
    defaults = load_defaults()["tunneling_sweep"]
    terrain = terrain or defaults["terrain"]
    tol = tol if tol is not None else defaults["tol"]
    speed = speed if speed is not None else defaults["speed_fraction"]
    arc = arc if arc is not None else defaults["arc_rad"]
    dt = dt if dt is not None else load_defaults()["dt"]
    values = _parse_floats(radii, "--radii")
    geom = ChainGeometry()
    profile = resolve_profile(terrain)
    axial_speed = profile.kappa_axial * abs(speed) * geom.v_lead_max
    if axial_speed <= 0.0:
        raise click.UsageError("terrain/speed give zero axial propulsion")
    rows = []
    failed = False
    for r_cmd in values:
        try:
            theta, clamped = heading_angle(geom, r_cmd)
        except InfeasibleRadiusError as exc:
            rows.append(
                {"R_cmd": r_cmd, "theta": "", "R_fit": "", "err": "",
                 "status": f"infeasible (r_min={exc.r_min:.4f})"}
            )
            continue
        duration = arc * max(abs(r_cmd), geom.r_min) / axial_speed
        _, summary = run_scenario(
            {
                "mode": "tunneling",
                "terrain": terrain,
                "dt": dt,
                "seed": seed,
                "duration": duration,
                "tunneling": {
                    "turn_radius": r_cmd,
                    "screw_speed_fraction": speed,
                },
            }
        )
        r_fit = summary["fitted_radius"]
        err = abs(r_fit - abs(r_cmd))
        status = "clamped-to-limit" if clamped else "ok"
        if err > tol * abs(r_cmd):
            failed = True
            status = "tolerance-exceeded"
        rows.append(
            {"R_cmd": r_cmd, "theta": theta, "R_fit": r_fit, "err": err,
             "status": status}
        )
    _emit_csv(rows, ["R_cmd", "theta", "R_fit", "err", "status"], out)
    if failed:
        sys.exit(1)


@main.command("sweep-mconfig")
@click.option("--angles", required=True, help="theta_m values in degrees")
@click.option("--terrain", default=None)
@click.option("--duration", type=float, default=None)
@click.option("--base-speed", type=float, default=None)
@click.option("--turn-radius", default="straight")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--dt", type=float, default=None)
@click.option("--seed", type=int, default=0)
def sweep_mconfig(angles, terrain, duration, base_speed, turn_radius, out, dt, seed):
    """Mean speed (and fitted radius when turning) per M-configuration angle."""
    defaults = load_defaults()["mconfig_sweep"]
    terrain = terrain or defaults["terrain"]
    duration = duration if duration is not None else defaults["duration"]
    base_speed = base_speed if base_speed is not None else defaults["base_speed"]
    dt = dt if dt is not None else load_defaults()["dt"]
    values = _parse_floats(angles, "--angles")
    for a in values:
        if not 90.0 < a <= 180.0:
            raise click.UsageError(f"--angles: {a} outside (90, 180] degrees")
    rows = []
    for a in values:
        _, summary = run_scenario(
            {
                "mode": "mconfig",
                "terrain": terrain,
                "dt": dt,
                "seed": seed,
                "duration": duration,
                "mconfig": {
                    "theta_m_deg": a,
                    "turn_radius": turn_radius,
                    "base_speed": base_speed,
                },
            }
        )
        rows.append(
            {
                "theta_m_deg": a,
                "mean_speed": summary["mean_speed"],
                "fitted_radius": summary["fitted_radius"]
                if summary["fitted_radius"] is not None
                else "",
            }
        )
    _emit_csv(rows, ["theta_m_deg", "mean_speed", "fitted_radius"], out)


@main.command("bus-analyze")
@click.option("--rate", type=float, default=None, help="loop rate in Hz")
@click.option("--max-n", type=int, default=None)
@click.option("--base-rtt", type=float, default=8.85)
@click.option("--per-hop", type=float, default=0.31)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def bus_analyze(rate, max_n, base_rtt, per_hop, out):
    """Scheduling feasibility of the daisy chain at a given loop rate."""
    defaults = load_defaults()["bus"]
    rate = rate if rate is not None else defaults["rate_hz"]
    max_n = max_n if max_n is not None else defaults["max_n"]
    model = BusModel(base_rtt_ms=base_rtt, per_hop_ms=per_hop, loop_rate_hz=rate)
    table = scheduling_table(model, max_n)
    limit = max_segments(model)
    report = {
        "loop_rate_hz": rate,
        "period_ms": round(model.period_ms, 6),
        "max_segments": limit if limit != math.inf else "unbounded",
        "rows": table,
    }
    text = yaml.safe_dump(report, sort_keys=False)
    if out:
        Path(out).write_text(text)
    click.echo(text, nl=False)


@main.command()
@click.option("--observations", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", type=click.Path(file_okay=False), default="profiles")
@click.option("--report", type=click.Path(dir_okay=False), default=None)
def calibrate(observations, out_dir, report):
    """Fit terrain profiles from a speed observation table."""
    data = yaml.safe_load(Path(observations).read_text())
    surfaces = data.get("surfaces")
    if not isinstance(surfaces, dict) or not surfaces:
        raise click.UsageError("observations file needs a 'surfaces' mapping")
    tables = {
        name: {float(a): float(v) for a, v in obs.items()}
        for name, obs in surfaces.items()
    }
    results = calibrate_suite(
        tables,
        fraction=float(data.get("fraction", 1.0)),
        damping={k: float(v) for k, v in (data.get("damping") or {}).items()},
    )
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    report_doc = {}
    for name, res in results.items():
        save_profile(res.profile, out_path / f"{name}.profile")
        report_doc[name] = {
            "kappa_axial": res.profile.kappa_axial,
            "slip": res.profile.slip,
            "angles_deg": list(res.angles_deg),
            "observed": list(res.observed),
            "predicted": [round(p, 6) for p in res.predicted],
            "residuals": [round(r, 6) for r in res.residuals],
            "excluded_angles": list(res.excluded_angles),
            "max_fitted_residual": round(res.max_fitted_residual, 6),
        }
    text = yaml.safe_dump(report_doc, sort_keys=True)
    if report:
        Path(report).write_text(text)
    click.echo(text, nl=False)


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(dir_okay=False))
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None)
@click.option("--summary", "summary_path", type=click.Path(dir_okay=False), default=None)
def run(scenario_path, csv_path, summary_path):
    """Run one scenario file; print its summary."""
    path = Path(scenario_path)
    if not path.exists():
        click.echo(f"scenario file not found: {path}", err=True)
        sys.exit(2)
    log, summary = run_scenario(path)
    if csv_path:
        log.write_csv(csv_path)
    if summary_path:
        write_summary(summary, summary_path)
    click.echo(yaml.safe_dump(summary, sort_keys=True), nl=False)


@main.command()
@click.option("--port", type=int, default=8765, help="TCP json-lines port")
@click.option("--ws-port", type=int, default=None, help="WebSocket port (default port+1)")
@click.option("--terrain", default="ideal_screw_medium")
@click.option("--device-limit-deg", type=float, default=80.0)
@click.option("--seed", type=int, default=0)
def serve(port, ws_port, terrain, device_limit_deg, seed):
    """Launch the teleoperation gateway."""
    click.echo(
        f"teleop gateway: tcp://127.0.0.1:{port} "
        f"ws://127.0.0.1:{ws_port if ws_port is not None else port + 1}"
    )
    run_server(
        port=port, ws_port=ws_port, terrain=terrain,
        device_limit_deg=device_limit_deg, seed=seed,
    )


def _emit_csv(rows, fieldnames, out):
    if out:
        with open(out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            writer.writerows(rows)
    writer = csv.DictWriter(
        click.get_text_stream("stdout"), fieldnames=fieldnames
    )
    writer.writeheader()
    writer.writerows(rows)


if __name__ == "__main__":
    try:
        main()
    except ScrewSnakeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
