"""Voxel cost fields and gripper trajectory planning.

The workspace is a regular voxel grid.  Obstacles become smooth repulsive
cost fields (Euclidean distance transform or Gaussian-blurred occupancy,
normalized to [0, 1]); the planner walks greedily through the 26-connected
neighbourhood, trading goal attraction against field cost, and the result
is checked against spacing, velocity and acceleration limits before it is
handed to the plan executor.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO

import numpy as np
from scipy import ndimage


class PlanningError(Exception):
    """Planning failed: bad endpoints, a stuck walk, or a budget blown."""


@dataclass
class VoxelGrid:
    """A scalar field sampled on a regular grid.

    ``origin`` is the world position of the corner of voxel (0, 0, 0);
    voxel centres sit half a resolution further in.
    """

    data: np.ndarray
    resolution: float = 0.01
    origin: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3:
            raise ValueError("grid data must be three-dimensional")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        self.origin = np.asarray(self.origin, dtype=np.float64)
        if self.origin.shape != (3,):
            raise ValueError("origin must be a 3-vector")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    def index_to_world(self, index) -> np.ndarray:
        idx = np.asarray(index, dtype=np.float64)
        return self.origin + (idx + 0.5) * self.resolution

    def world_to_index(self, point) -> tuple[int, int, int]:
        rel = (np.asarray(point, dtype=np.float64) - self.origin) / self.resolution
        idx = np.floor(rel).astype(int)
        if np.any(idx < 0) or np.any(idx >= self.data.shape):
            raise ValueError(f"point {point} lies outside the grid")
        return tuple(int(v) for v in idx)

    def like(self, data: np.ndarray) -> "VoxelGrid":
        return VoxelGrid(data, self.resolution, self.origin.copy())

    def save(self, path) -> None:
        np.savez_compressed(
            path, data=self.data, resolution=self.resolution, origin=self.origin
        )

    @classmethod
    def load(cls, path) -> "VoxelGrid":
        with np.load(path) as bundle:
            missing = {"data", "resolution", "origin"} - set(bundle.files)
            if missing:
                raise ValueError(f"grid file missing fields: {sorted(missing)}")
            return cls(
                bundle["data"],
                float(bundle["resolution"]),
                bundle["origin"],
            )


def distance_field(occupied: np.ndarray, resolution: float) -> np.ndarray:
    """Metric distance from every voxel to the nearest occupied voxel."""
    occ = np.asarray(occupied, dtype=bool)
    if not occ.any():
        return np.full(occ.shape, np.inf)
    return ndimage.distance_transform_edt(~occ, sampling=resolution)


def smooth_field(data: np.ndarray, sigma: float) -> np.ndarray:
    """Gaussian blur in voxel units (reflected borders, 3-sigma support)."""
    return ndimage.gaussian_filter(
        np.asarray(data, dtype=np.float64), sigma=sigma, mode="reflect", truncate=3.0
    )


def normalize_field(data: np.ndarray) -> np.ndarray:
    """Affinely rescale to [0, 1]; a constant field becomes all zeros."""
    arr = np.asarray(data, dtype=np.float64)
    lo = arr.min()
    span = arr.max() - lo
    if span == 0:
        return np.zeros_like(arr)
    return (arr - lo) / span


def occupancy_cost(occupied: np.ndarray, sigma: float = 2.0) -> np.ndarray:
    """Normalized blurred occupancy: ~1 inside obstacles, falling off with
    distance -- the standard repulsive term."""
    return normalize_field(smooth_field(np.asarray(occupied, dtype=np.float64), sigma))


@dataclass
class MapSet:
    """The four workspace fields the planner consumes.

    ``interact`` scores proximity to the object being manipulated (to be
    approached deliberately), ``ignore`` scores everything that must simply
    be avoided, and ``rotation``/``gripper`` mark the reachable envelopes
    of the two tool behaviours.
    """

    interact: VoxelGrid
    ignore: VoxelGrid
    rotation: VoxelGrid
    gripper: VoxelGrid

    def __post_init__(self) -> None:
        base = self.interact
        for name in ("ignore", "rotation", "gripper"):
            g = getattr(self, name)
            if g.shape != base.shape:
                raise ValueError(f"{name} map shape {g.shape} != {base.shape}")
            if g.resolution != base.resolution:
                raise ValueError(f"{name} map resolution differs")

    def total_cost(self) -> VoxelGrid:
        blended = (2.0 * self.interact.data + self.ignore.data) / 3.0
        return self.interact.like(blended)

    def obstacles(self, threshold: float = 0.5) -> np.ndarray:
        return self.ignore.data > threshold


def _neighbourhood() -> tuple[np.ndarray, np.ndarray]:
    offsets = [
        (dx, dy, dz)
        for dx in (-1, 0, 1)
        for dy in (-1, 0, 1)
        for dz in (-1, 0, 1)
        if (dx, dy, dz) != (0, 0, 0)
    ]
    arr = np.array(offsets, dtype=int)
    return arr, np.linalg.norm(arr, axis=1)


_OFFSETS, _OFFSET_NORMS = _neighbourhood()


def greedy_descent(
    cost: np.ndarray,
    start,
    goal,
    obstacles: np.ndarray | None = None,
    field_weight: float = 1.0,
    goal_weight: float = 0.2,
    max_steps: int | None = None,
) -> np.ndarray:
    """Greedy best-neighbour walk from start to goal over a cost field.

    Each step moves to the unvisited, non-obstacle neighbour minimizing
    ``field_weight * cost + goal_weight * euclidean_distance_to_goal`` (the
    distance measured in voxels).  The visited set rules out cycles, so the
    walk either reaches the goal or runs out of moves and raises.

    Returns the walked indices as an (N, 3) integer array, start and goal
    inclusive.
    """
    arr = np.asarray(cost, dtype=np.float64)
    shape = np.array(arr.shape)
    start = tuple(int(v) for v in start)
    goal = tuple(int(v) for v in goal)
    for name, p in (("start", start), ("goal", goal)):
        if len(p) != 3 or np.any(np.array(p) < 0) or np.any(np.array(p) >= shape):
            raise PlanningError(f"{name} {p} outside the grid")
    if obstacles is not None:
        obstacles = np.asarray(obstacles, dtype=bool)
        if obstacles.shape != arr.shape:
            raise PlanningError("obstacle mask shape mismatch")
        if obstacles[start]:
            raise PlanningError(f"start {start} is inside an obstacle")
        if obstacles[goal]:
            raise PlanningError(f"goal {goal} is inside an obstacle")
    if max_steps is None:
        max_steps = 8 * int(shape.sum())
    goal_arr = np.array(goal, dtype=np.float64)
    path = [start]
    visited = {start}
    current = start
    for _ in range(max_steps):
        if current == goal:
            return np.array(path, dtype=int)
        candidates = np.array(current) + _OFFSETS
        inside = np.all((candidates >= 0) & (candidates < shape), axis=1)
        best = None
        best_score = np.inf
        for ok, cand in zip(inside, candidates):
            if not ok:
                continue
            key = (int(cand[0]), int(cand[1]), int(cand[2]))
            if key in visited:
                continue
            if obstacles is not None and obstacles[key]:
                continue
            score = field_weight * arr[key] + goal_weight * float(
                np.linalg.norm(cand - goal_arr)
            )
            if score < best_score:
                best_score = score
                best = key
        if best is None:
            raise PlanningError(f"walk stuck at {current} after {len(path)} steps")
        path.append(best)
        visited.add(best)
        current = best
    raise PlanningError(f"no path within {max_steps} steps")


def path_to_world(grid: VoxelGrid, path: np.ndarray) -> np.ndarray:
    return np.array([grid.index_to_world(idx) for idx in np.asarray(path)])


def time_step(points: np.ndarray, v_max: float) -> float:
    """Uniform sample interval such that the longest segment moves at
    exactly the velocity limit."""
    if v_max <= 0:
        raise ValueError("v_max must be positive")
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) < 2:
        return 0.0
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return float(seg.max() / v_max)


@dataclass(frozen=True)
class ConstraintReport:
    ok: bool
    max_segment: float
    max_velocity: float
    max_acceleration: float
    violations: tuple[str, ...]


def check_constraints(
    points: np.ndarray,
    dt: float,
    max_segment: float,
    v_max: float,
    a_max: float,
) -> ConstraintReport:
    """Validate waypoint spacing and finite-difference velocity and
    acceleration magnitudes against their limits."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must be an (N, 3) array")
    if len(pts) < 2:
        return ConstraintReport(True, 0.0, 0.0, 0.0, ())
    if dt <= 0:
        raise ValueError("dt must be positive")
    steps = np.diff(pts, axis=0)
    seg = np.linalg.norm(steps, axis=1)
    vel = steps / dt
    speed = seg / dt
    acc = (
        np.linalg.norm(np.diff(vel, axis=0), axis=1) / dt
        if len(vel) > 1
        else np.zeros(1)
    )
    tol = 1e-9
    violations = []
    if seg.max() > max_segment + tol:
        violations.append(
            f"segment {seg.max():.6f} exceeds max_segment {max_segment:.6f}"
        )
    if speed.max() > v_max + tol:
        violations.append(f"velocity {speed.max():.6f} exceeds v_max {v_max:.6f}")
    if acc.max() > a_max + tol:
        violations.append(f"acceleration {acc.max():.6f} exceeds a_max {a_max:.6f}")
    return ConstraintReport(
        ok=not violations,
        max_segment=float(seg.max()),
        max_velocity=float(speed.max()),
        max_acceleration=float(acc.max()),
        violations=tuple(violations),
    )


def save_trajectory(out: IO[str], times: np.ndarray, points: np.ndarray) -> None:
    times = np.asarray(times, dtype=np.float64)
    pts = np.asarray(points, dtype=np.float64)
    if len(times) != len(pts):
        raise ValueError("times and points disagree in length")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("t", "x", "y", "z"))
    for t, (x, y, z) in zip(times, pts):
        writer.writerow((f"{t:.6f}", f"{x:.6f}", f"{y:.6f}", f"{z:.6f}"))


def load_trajectory(inp: IO[str]) -> tuple[np.ndarray, np.ndarray]:
    reader = csv.reader(inp)
    header = next(reader, None)
    if tuple(header or ()) != ("t", "x", "y", "z"):
        raise ValueError("unrecognized trajectory header")
    times = []
    points = []
    for row in reader:
        if len(row) != 4:
            raise ValueError(f"malformed trajectory row: {row!r}")
        times.append(float(row[0]))
        points.append([float(v) for v in row[1:]])
    return np.array(times), np.array(points)


def plan_trajectory(
    grid: VoxelGrid,
    cost: np.ndarray,
    start,
    goal,
    obstacles: np.ndarray | None = None,
    v_max: float = 0.05,
    field_weight: float = 1.0,
    goal_weight: float = 0.2,
) -> tuple[np.ndarray, np.ndarray]:
    """Plan start->goal and time-parameterize: (times, world points)."""
    path = greedy_descent(
        cost,
        start,
        goal,
        obstacles=obstacles,
        field_weight=field_weight,
        goal_weight=goal_weight,
    )
    pts = path_to_world(grid, path)
    dt = time_step(pts, v_max)
    times = np.arange(len(pts)) * dt
    return times, pts
