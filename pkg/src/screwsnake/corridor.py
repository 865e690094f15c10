"""Corridor geometry and the corridor-conforming locomotion mode.

Conforming mode leaves every joint but the head compliant; the body is
pulled through the corridor by screw propulsion and takes whatever shape
the walls impose. That is modeled as follow-the-leader along the corridor
centerline: the head segment center advances along the centerline at the
terrain's axial speed and every trailing chain point (joints and segment
centers alternate at exact half-link spacing) sits on the centerline at
its chained chord distance. Compliant joint angles are then exactly the
local centerline bend angles, and wall clearance reduces to point to
centerline distance checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import ChainGeometry, JointState
from .errors import InvalidGeometryError, JointLimitError
from .sim import Mode, TrajectoryLog, wrap_angle
from .terrain import TerrainProfile, realized_velocity


@dataclass(frozen=True)
class CorridorSpec:
    """Polyline corridor with a wall-to-wall width and an inclined span.

    ``incline_span`` is the (start, end) arc-length range over which the
    incline applies; the incline only scales speed.
    """

    centerline: np.ndarray
    width: float
    incline_deg: float = 0.0
    incline_span: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        pts = np.asarray(self.centerline, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise InvalidGeometryError("centerline must be (k, 2) with k >= 2")
        object.__setattr__(self, "centerline", pts)
        if self.width <= 0.0:
            raise InvalidGeometryError("corridor width must be > 0")

    @property
    def seg_lengths(self) -> np.ndarray:
        return np.hypot(*np.diff(self.centerline, axis=0).T)

    @property
    def arc_lengths(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.seg_lengths)])

    @property
    def total_length(self) -> float:
        return float(self.arc_lengths[-1])

    def clearance(self, geom: ChainGeometry) -> float:
        """Free lateral play of the robot body inside the corridor."""
        play = (self.width - geom.cross_section) / 2.0
        if play < 0.0:
            raise InvalidGeometryError(
                f"corridor width {self.width} m below robot cross-section "
                f"{geom.cross_section} m"
            )
        return play

    def point_at(self, s: float) -> np.ndarray:
        s = min(max(s, 0.0), self.total_length)
        arcs = self.arc_lengths
        idx = int(np.searchsorted(arcs, s, side="right")) - 1
        idx = min(idx, len(arcs) - 2)
        seg = self.centerline[idx + 1] - self.centerline[idx]
        seg_len = arcs[idx + 1] - arcs[idx]
        frac = 0.0 if seg_len == 0.0 else (s - arcs[idx]) / seg_len
        return self.centerline[idx] + frac * seg

    def distance_to_centerline(self, p) -> float:
        p = np.asarray(p, dtype=float)
        a = self.centerline[:-1]
        b = self.centerline[1:]
        ab = b - a
        denom = np.einsum("ij,ij->i", ab, ab)
        denom[denom == 0.0] = 1.0
        t = np.clip(np.einsum("ij,ij->i", p - a, ab) / denom, 0.0, 1.0)
        proj = a + t[:, None] * ab
        return float(np.min(np.hypot(*(p - proj).T)))

    def speed_factor(self, s: float) -> float:
        s0, s1 = self.incline_span
        if s0 <= s <= s1 and self.incline_deg != 0.0:
            return math.cos(math.radians(self.incline_deg))
        return 1.0


def zigzag_corridor(
    width: float = 0.22,
    lead_in: float = 1.2,
    bend_deg: float = 35.0,
    n_bends: int = 3,
    fillet_radius: float = 0.35,
    straight: float = 0.7,
    incline_deg: float = 15.0,
    incline_length: float = 0.8,
    lead_out: float = 0.6,
    samples_per_fillet: int = 24,
) -> CorridorSpec:
    """Tortuous test corridor: lead-in, alternating filleted bends, an
    inclined run, and a lead-out."""
    pts = [np.zeros(2)]
    heading = 0.0

    def advance(dist):
        pts.append(pts[-1] + dist * np.array([math.cos(heading), math.sin(heading)]))

    advance(lead_in)
    sign = 1.0
    for _ in range(n_bends):
        turn = math.radians(bend_deg) * sign
        # fillet arc sampled as a dense polyline
        start_ang = heading - sign * math.pi / 2  # from arc center to current point
        center = pts[-1] - fillet_radius * np.array(
            [math.cos(start_ang), math.sin(start_ang)]
        )
        for k in range(1, samples_per_fillet + 1):
            ang = start_ang + turn * k / samples_per_fillet
            pts.append(center + fillet_radius * np.array([math.cos(ang), math.sin(ang)]))
        heading += turn
        advance(straight)
        sign = -sign

    arcs = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(np.array(pts), axis=0).T))])
    incline_start = float(arcs[-1])
    advance(incline_length)
    incline_end = incline_start + incline_length
    advance(lead_out)
    return CorridorSpec(
        centerline=np.array(pts),
        width=width,
        incline_deg=incline_deg,
        incline_span=(incline_start, incline_end),
    )


class _ChainPlacer:
    """Places chain points on the centerline at exact chord spacing.

    Walking backward from an anchor point, the first centerline crossing of
    the circle of radius ``chord`` around the anchor is found by scanning
    polyline segments (warm-started per point, so amortized O(1)) and
    solving the segment/circle quadratic exactly. Valid while the chord is
    shorter than the local curvature diameter, which the corridor builder
    guarantees.
    """

    def __init__(self, spec: CorridorSpec, chord: float, n_points: int):
        self.pts = spec.centerline
        self.arcs = spec.arc_lengths
        self.chord = chord
        self.hints = [len(self.pts) - 2] * n_points

    def locate(self, s: float) -> int:
        idx = int(np.searchsorted(self.arcs, s, side="right")) - 1
        return min(max(idx, 0), len(self.pts) - 2)

    def point_at(self, s: float, idx: int) -> np.ndarray:
        seg_len = self.arcs[idx + 1] - self.arcs[idx]
        frac = 0.0 if seg_len == 0.0 else (s - self.arcs[idx]) / seg_len
        return self.pts[idx] + frac * (self.pts[idx + 1] - self.pts[idx])

    def _cross(self, idx: int, anchor: np.ndarray, t_max: float):
        a = self.pts[idx]
        u = self.pts[idx + 1] - a
        v = a - anchor
        uu = float(u @ u)
        if uu == 0.0:
            return None
        ub = float(u @ v)
        c = float(v @ v) - self.chord * self.chord
        disc = ub * ub - uu * c
        if disc < 0.0:
            return None
        root = math.sqrt(disc)
        for t in ((-ub + root) / uu, (-ub - root) / uu):
            if 0.0 <= t <= t_max + 1e-12:
                return min(t, t_max)
        return None

    def place_behind(self, anchor: np.ndarray, s_anchor: float,
                     point_index: int):
        """(s, point) of the chain point one chord behind the anchor.

        Scans backward from just above the point's last known segment
        (points only move forward, at most one segment per step).
        """
        anchor_idx = self.locate(s_anchor)
        idx = min(self.hints[point_index] + 2, anchor_idx)
        while idx >= 0:
            if idx == anchor_idx:
                seg_len = self.arcs[idx + 1] - self.arcs[idx]
                t_cap = 1.0 if seg_len == 0.0 else (
                    (s_anchor - self.arcs[idx]) / seg_len
                )
                t_cap = min(max(t_cap, 0.0), 1.0)
            else:
                t_cap = 1.0
            sol = self._cross(idx, anchor, t_cap)
            if sol is not None:
                self.hints[point_index] = idx
                s = self.arcs[idx] + sol * (self.arcs[idx + 1] - self.arcs[idx])
                return s, self.pts[idx] + sol * (self.pts[idx + 1] - self.pts[idx])
            idx -= 1
        # ran off the corridor start: clamp to the first vertex
        self.hints[point_index] = 0
        return 0.0, self.pts[0].copy()


@dataclass
class ConformingSimulator:
    """Head-steered, compliant-body traversal of a corridor."""

    geom: ChainGeometry
    terrain: TerrainProfile
    spec: CorridorSpec
    screw_speed_fraction: float = 1.0
    dt: float = 0.01
    log: TrajectoryLog = field(init=False)
    violations: int = field(init=False, default=0)
    exit_reached: bool = field(init=False, default=False)
    saturation_count: int = field(init=False, default=0)
    t: float = field(init=False, default=0.0)

    def __post_init__(self):
        self.spec.clearance(self.geom)  # validates width vs cross-section
        self.chain_span = 2.0 * self.geom.l * (self.geom.n_segments - 1)
        self.s_head = self.chain_span + 0.05
        if self.s_head >= self.spec.total_length:
            raise InvalidGeometryError("corridor shorter than the robot")
        self.log = TrajectoryLog(dt=self.dt)
        self._n_points = 2 * self.geom.n_segments - 1
        self._placer = _ChainPlacer(self.spec, self.geom.l, self._n_points)

    def _chain_points(self):
        """Head center plus trailing joints/centers at exact chord spacing."""
        placer = self._placer
        s = self.s_head
        p = placer.point_at(s, placer.locate(s))
        pts = [p]
        for k in range(1, self._n_points):
            s, p = placer.place_behind(p, s, k)
            pts.append(p)
        self._tail_idx = placer.hints[self._n_points - 1]
        return np.array(pts)

    def _axial_speed(self) -> float:
        va = 0.0
        for i in range(self.geom.n_segments):
            omega = self.geom.handedness[i] * self.screw_speed_fraction * self.geom.omega_max
            sv, clamped = realized_velocity(self.terrain, self.geom, omega, i + 1)
            if clamped:
                self.saturation_count += 1
            va += sv.axial
        return va / self.geom.n_segments

    def step(self):
        pts = self._chain_points()
        # compliant joint deflections = local centerline bend angles
        dirs = pts[:-1] - pts[1:]  # pointing forward (toward the head)
        angs = np.arctan2(dirs[:, 1], dirs[:, 0])
        bends = np.array(
            [wrap_angle(angs[2 * k] - angs[2 * k + 1]) for k in range(self.geom.n_joints)]
        )
        for k, b in enumerate(bends, start=1):
            if abs(b) > self.geom.joint_limit + 1e-9:
                raise JointLimitError(
                    f"corridor imposes {b:.3f} rad on joint {k}, beyond the limit"
                )
        # wall-clearance audit: chain points sit on the centerline by
        # construction; chord midpoints carry the corner-cutting sagitta.
        # Distances are checked against the local polyline window only.
        play = self.spec.clearance(self.geom)
        lo = max(self._tail_idx - 2, 0)
        hi = min(self._placer.locate(self.s_head) + 2, len(self.spec.centerline) - 1)
        window = self.spec.centerline[lo: hi + 1]
        a, b = window[:-1], window[1:]
        ab = b - a
        denom = np.einsum("ij,ij->i", ab, ab)
        denom[denom == 0.0] = 1.0
        mids = 0.5 * (pts[:-1] + pts[1:])
        for p in mids:
            t = np.clip(np.einsum("ij,ij->i", p - a, ab) / denom, 0.0, 1.0)
            proj = a + t[:, None] * ab
            if np.min(np.hypot(*(p - proj).T)) > play + 1e-9:
                self.violations += 1
        # advance the head along the centerline
        speed = self._axial_speed() * self.spec.speed_factor(self.s_head)
        if abs(bends).max() > 1e-6:
            speed *= self.terrain.lateral_damping
        self.s_head = min(self.s_head + abs(speed) * self.dt, self.spec.total_length)
        self.t += self.dt
        head_dir = angs[0]
        n = self.geom.n_segments
        self.log.append(
            self.t, pts[0, 0], pts[0, 1], wrap_angle(head_dir),
            np.pi - bends, [self.screw_speed_fraction * self.geom.omega_max] * n,
            [speed] * n, [0.0] * n, (speed, 0.0, 0.0),
        )
        if self.s_head >= self.spec.total_length - 1e-9:
            self.exit_reached = True

    def run(self, duration: float):
        steps = int(round(duration / self.dt))
        for _ in range(steps):
            self.step()
            if self.exit_reached:
                break
        return self.log

    def summary(self) -> dict:
        return {
            "mode": Mode.CONFORMING.value,
            "terrain": self.terrain.name,
            "dt": self.dt,
            "duration": round(self.t, 12),
            "steps": len(self.log),
            "violations": self.violations,
            "exit_reached": self.exit_reached,
            "saturation_count": self.saturation_count,
            "corridor_length": self.spec.total_length,
            "head_arc_position": self.s_head,
        }
