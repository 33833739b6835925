"""Synthetic tabletop scenes and the closed-loop pipeline Monte-Carlo.

The workspace is a 64 cm cube voxelized at 1 cm: a table slab with a
5.6 cm puzzle cube resting on it.  A deterministic perception stub reads
the cube's stickers (optionally with injected noise), per-layer map sets
describe where the gripper should approach each face, and a three-stage
reliability model covers the deployed pipeline: knowledge-base solving
(``kb``, real computation), language-model instruction generation
(``llm``, modeled as a success rate), and physical execution (``exe``,
likewise).  Campaigns aggregate many trials into per-depth statistics.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import random
from dataclasses import dataclass, field, replace
from typing import IO, Iterable

import numpy as np

from cubebot.coords import Tables, get_tables
from cubebot.cube import (
    CENTER_INDICES,
    FACE_LETTERS,
    CubeError,
    CubieState,
    Face,
    Move,
    MoveSequence,
    cubies_to_facelets,
    facelets_to_cubies,
    parse_facelets,
    scrambled_state,
    validate,
)
from cubebot.motion import (
    MapSet,
    PlanningError,
    VoxelGrid,
    check_constraints,
    occupancy_cost,
    plan_trajectory,
)
from cubebot.solvers import (
    SolveBudget,
    TimeBudgetExhausted,
    TWO_PHASE_BUDGET,
    KB_BUDGET,
    solve_two_phase,
    verify_solution,
)

STAGES = ("kb", "llm", "exe")


class LayerUnreachable(PlanningError):
    """A layer's face center falls outside the workspace grid."""


def derive_seed(master: int, label: str) -> int:
    """Stable 64-bit stream seed for a named sub-experiment."""
    digest = hashlib.blake2b(
        f"{master}:{label}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


# --- scene geometry ---------------------------------------------------------


@dataclass(frozen=True)
class SceneSpec:
    shape: tuple[int, int, int] = (64, 64, 64)
    resolution: float = 0.01
    cube_edge: float = 0.056
    table_top: float = 0.08
    cube_centre: tuple[float, float, float] | None = None  # None: centred
    home_index: tuple[int, int, int] = (6, 32, 10)
    approach_clearance: int = 2  # voxels above the cube for the grasp point

    def __post_init__(self) -> None:
        if self.cube_edge <= 0 or self.resolution <= 0:
            raise ValueError("cube_edge and resolution must be positive")
        if self.table_top + self.cube_edge >= self.shape[2] * self.resolution:
            raise ValueError("cube does not fit under the workspace ceiling")

    def centre_world(self) -> np.ndarray:
        if self.cube_centre is not None:
            return np.asarray(self.cube_centre, dtype=np.float64)
        return np.array(
            [
                self.shape[0] * self.resolution / 2,
                self.shape[1] * self.resolution / 2,
                self.table_top + self.cube_edge / 2,
            ]
        )


DEFAULT_SCENE_SPEC = SceneSpec()

# World-frame outward normal of each cube face: x toward R, y toward F,
# z up through U.
FACE_NORMALS = {
    Face.U: np.array([0.0, 0.0, 1.0]),
    Face.D: np.array([0.0, 0.0, -1.0]),
    Face.R: np.array([1.0, 0.0, 0.0]),
    Face.L: np.array([-1.0, 0.0, 0.0]),
    Face.F: np.array([0.0, 1.0, 0.0]),
    Face.B: np.array([0.0, -1.0, 0.0]),
}


@dataclass
class Scene:
    spec: SceneSpec
    cube_state: CubieState
    scramble: MoveSequence
    grid: VoxelGrid
    maps: MapSet
    cube_occupancy: np.ndarray
    table_occupancy: np.ndarray
    grasp_index: tuple[int, int, int]

    @property
    def home_index(self) -> tuple[int, int, int]:
        return self.spec.home_index

    def cube_centre(self) -> np.ndarray:
        return self.spec.centre_world()

    def face_centre(self, face: Face) -> np.ndarray:
        return self.cube_centre() + FACE_NORMALS[face] * (self.spec.cube_edge / 2)

    def hard_obstacles(self) -> np.ndarray:
        return self.cube_occupancy | self.table_occupancy


def _axis_span(centre: float, extent: float, resolution: float) -> tuple[int, int]:
    lo = int(np.floor((centre - extent / 2) / resolution))
    hi = int(np.ceil((centre + extent / 2) / resolution))
    return lo, hi


def build_scene(
    scramble_depth: int = 0,
    seed: int = 0,
    spec: SceneSpec = DEFAULT_SCENE_SPEC,
) -> Scene:
    state, scramble = scrambled_state(scramble_depth, seed=seed)
    shape = spec.shape
    grid = VoxelGrid(np.zeros(shape), resolution=spec.resolution)

    table = np.zeros(shape, dtype=bool)
    table_top_idx = int(round(spec.table_top / spec.resolution))
    table[:, :, :table_top_idx] = True

    cube = np.zeros(shape, dtype=bool)
    cx, cy, cz = spec.centre_world()
    x0, x1 = _axis_span(cx, spec.cube_edge, spec.resolution)
    y0, y1 = _axis_span(cy, spec.cube_edge, spec.resolution)
    z0 = int(round((cz - spec.cube_edge / 2) / spec.resolution))
    z1 = z0 + (x1 - x0)
    sx = slice(max(0, x0), min(shape[0], x1))
    sy = slice(max(0, y0), min(shape[1], y1))
    sz = slice(max(0, z0), min(shape[2], z1))
    cube[sx, sy, sz] = True
    if not cube.any():
        raise ValueError("cube lies entirely outside the grid")

    # Envelopes: the rotation tool works in an inflated box around the cube,
    # the gripper anywhere above the table surface.
    rotation = np.zeros(shape)
    pad = 3
    rotation[
        max(0, x0 - pad) : x1 + pad,
        max(0, y0 - pad) : y1 + pad,
        max(0, z0 - 1) : z1 + pad,
    ] = 1.0
    gripper = np.zeros(shape)
    gripper[:, :, table_top_idx:] = 1.0

    maps = MapSet(
        interact=grid.like(occupancy_cost(cube, sigma=2.0)),
        ignore=grid.like(occupancy_cost(table, sigma=2.0)),
        rotation=grid.like(rotation),
        gripper=grid.like(gripper),
    )
    grasp = (
        (x0 + x1) // 2,
        (y0 + y1) // 2,
        min(shape[2] - 1, z1 + spec.approach_clearance - 1),
    )
    return Scene(
        spec=spec,
        cube_state=state,
        scramble=scramble,
        grid=grid,
        maps=maps,
        cube_occupancy=cube,
        table_occupancy=table,
        grasp_index=grasp,
    )


# --- perception stub --------------------------------------------------------


def observe_cube(scene: Scene, sticker_noise: float = 0.0, seed: int = 0) -> str:
    """Read the cube's 54-character sticker descriptor.

    Each non-center sticker is independently replaced by a uniformly
    random *different* label with probability ``sticker_noise``; the six
    centers are always read correctly.
    """
    if not 0.0 <= sticker_noise <= 1.0:
        raise ValueError("sticker_noise must be a probability")
    descriptor = cubies_to_facelets(scene.cube_state).descriptor
    if sticker_noise == 0.0:
        return descriptor
    rnd = random.Random(derive_seed(seed, "observe"))
    centers = set(CENTER_INDICES)
    chars = list(descriptor)
    for i in range(54):
        if i in centers:
            continue
        if rnd.random() < sticker_noise:
            others = [c for c in FACE_LETTERS if c != chars[i]]
            chars[i] = others[rnd.randrange(len(others))]
    return "".join(chars)


# --- per-subtask geometry ---------------------------------------------------


def _world_coordinates(grid: VoxelGrid) -> np.ndarray:
    """(X, Y, Z, 3) array of voxel-centre world positions."""
    idx = np.stack(
        np.meshgrid(*[np.arange(n) for n in grid.data.shape], indexing="ij"),
        axis=-1,
    )
    return grid.origin + (idx + 0.5) * grid.resolution


def build_subtask_maps(scene: Scene, move: Move) -> MapSet:
    """Map set for one gripper subtask: turning ``move.face``'s layer.

    The interact field marks the approach corridor outside that face (one
    cube edge deep), the ignore field marks the cube body and table, the
    rotation field peaks along the tool axis through the face center, and
    the gripper field marks the near half of the corridor where the
    fingers close.  Only the face matters; the turn count does not.
    """
    face = move.face
    centre = scene.face_centre(face)
    try:
        scene.grid.world_to_index(centre)
    except ValueError as exc:
        raise LayerUnreachable(
            f"face {face.name} center {tuple(np.round(centre, 3))} "
            "is outside the workspace"
        ) from exc

    normal = FACE_NORMALS[face]
    edge = scene.spec.cube_edge
    rel = _world_coordinates(scene.grid) - centre
    depth = rel @ normal
    lateral = rel - depth[..., None] * normal
    lateral_dist = np.abs(lateral).max(axis=-1)

    corridor = (depth > 0) & (depth <= edge) & (lateral_dist <= edge / 2)
    grasp_zone = corridor & (depth <= edge / 2)
    axis_dist = np.linalg.norm(lateral, axis=-1)

    interact = occupancy_cost(corridor, sigma=1.5)
    ignore = occupancy_cost(
        (scene.cube_occupancy & ~corridor) | scene.table_occupancy, sigma=1.5
    )
    rotation = np.clip(1.0 - axis_dist / edge, 0.0, 1.0)
    return MapSet(
        interact=scene.grid.like(interact),
        ignore=scene.grid.like(ignore),
        rotation=scene.grid.like(rotation),
        gripper=scene.grid.like(grasp_zone.astype(np.float64)),
    )


def _approach_index(scene: Scene, face: Face) -> tuple[int, int, int]:
    """Free voxel just outside the face; falls back to the overhead grasp
    point for layers whose corridor is blocked by the table."""
    offset = scene.spec.cube_edge / 2 + 2 * scene.spec.resolution
    point = scene.cube_centre() + FACE_NORMALS[face] * offset
    try:
        idx = scene.grid.world_to_index(point)
    except ValueError:
        return scene.grasp_index
    if scene.hard_obstacles()[idx]:
        return scene.grasp_index
    return idx


def subtask_trajectory(
    scene: Scene, move: Move, v_max: float = 0.05
) -> tuple[np.ndarray, np.ndarray]:
    """Plan the gripper leg for one subtask: home to the face's approach
    point, steered by that subtask's ignore field."""
    maps = build_subtask_maps(scene, move)
    return plan_trajectory(
        scene.grid,
        maps.ignore.data,
        scene.home_index,
        _approach_index(scene, move.face),
        obstacles=scene.hard_obstacles(),
        v_max=v_max,
    )


def approach_trajectory(
    scene: Scene, v_max: float = 0.05
) -> tuple[np.ndarray, np.ndarray]:
    """Plan the gripper's initial approach from home to the grasp point."""
    return plan_trajectory(
        scene.grid,
        scene.maps.total_cost().data,
        scene.home_index,
        scene.grasp_index,
        obstacles=scene.hard_obstacles(),
        v_max=v_max,
    )


def approach_report(scene: Scene, v_max: float = 0.05):
    times, pts = approach_trajectory(scene, v_max=v_max)
    dt = float(times[1] - times[0]) if len(times) > 1 else 1.0
    max_seg = scene.spec.resolution * float(np.sqrt(3)) + 1e-9
    return check_constraints(
        pts, dt, max_segment=max_seg, v_max=v_max, a_max=10.0 * v_max / dt
    )


# --- pipeline reliability model --------------------------------------------


@dataclass(frozen=True)
class StageModel:
    """Per-stage success probabilities for the deployed pipeline."""

    p_kb: float = 0.90
    p_llm: float = 0.9276
    p_exe: float = 0.9461

    def __post_init__(self) -> None:
        for name in ("p_kb", "p_llm", "p_exe"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability, got {p}")

    def expected_overall(self) -> float:
        return self.p_kb * self.p_llm * self.p_exe

    def expected_failure_shares(self) -> tuple[float, float, float]:
        """Of the runs that fail, the fraction lost at each stage."""
        f1 = 1.0 - self.p_kb
        f2 = self.p_kb * (1.0 - self.p_llm)
        f3 = self.p_kb * self.p_llm * (1.0 - self.p_exe)
        total = f1 + f2 + f3
        if total == 0:
            return (0.0, 0.0, 0.0)
        return (f1 / total, f2 / total, f3 / total)


DEFAULT_MODEL = StageModel()


@dataclass(frozen=True)
class TrialRecord:
    """One pipeline trial.  Stages after the first failure are unevaluated
    (``None``); a failed solve stage records ``kb_outcome=None``."""

    scramble_depth: int
    kb_outcome: int | None  # solution length, or None on failure
    llm_outcome: bool | None
    exe_outcome: bool | None

    @property
    def ok(self) -> bool:
        return self.exe_outcome is True

    @property
    def failure_category(self) -> str | None:
        if self.kb_outcome is None:
            return "kb"
        if self.llm_outcome is False:
            return "llm"
        if self.exe_outcome is False:
            return "exe"
        return None


def run_trial(
    depth: int,
    model: StageModel = DEFAULT_MODEL,
    budget: SolveBudget = TWO_PHASE_BUDGET,
    seed: int = 0,
    sticker_noise: float = 0.0,
    tables: Tables | None = None,
) -> TrialRecord:
    """One full pipeline trial: scramble, observe, solve, then sample the
    downstream stages.

    The solve stage fails genuinely (unparseable or unsolvable descriptor,
    exhausted budget) or by a Bernoulli draw topping its failure rate up
    to at least ``1 - p_kb``; downstream stages are pure Bernoulli draws.
    """
    rnd = random.Random(derive_seed(seed, "stages"))
    scene = build_scene(depth, seed=derive_seed(seed, "scramble"))
    descriptor = observe_cube(scene, sticker_noise, seed=seed)
    length: int | None = None
    try:
        state = facelets_to_cubies(parse_facelets(descriptor))
        validate(state)
        result = solve_two_phase(state, budget=budget, tables=tables)
        if verify_solution(state, result.solution):
            length = result.length
    except (CubeError, TimeBudgetExhausted):
        length = None
    if length is not None and rnd.random() >= model.p_kb:
        length = None  # injected solve-stage fault
    if length is None:
        return TrialRecord(depth, None, None, None)
    if rnd.random() >= model.p_llm:
        return TrialRecord(depth, length, False, None)
    return TrialRecord(depth, length, True, rnd.random() < model.p_exe)


# --- campaign statistics ----------------------------------------------------


@dataclass
class DepthStats:
    trials: int = 0
    successes: int = 0
    stage_attempts: dict[str, int] = field(
        default_factory=lambda: {s: 0 for s in STAGES}
    )
    stage_successes: dict[str, int] = field(
        default_factory=lambda: {s: 0 for s in STAGES}
    )
    failure_counts: dict[str, int] = field(
        default_factory=lambda: {s: 0 for s in STAGES}
    )
    histogram: dict[int, int] = field(default_factory=dict)

    def add(self, record: TrialRecord) -> None:
        self.trials += 1
        self.stage_attempts["kb"] += 1
        if record.kb_outcome is None:
            self.failure_counts["kb"] += 1
            return
        self.stage_successes["kb"] += 1
        self.histogram[record.kb_outcome] = (
            self.histogram.get(record.kb_outcome, 0) + 1
        )
        self.stage_attempts["llm"] += 1
        if not record.llm_outcome:
            self.failure_counts["llm"] += 1
            return
        self.stage_successes["llm"] += 1
        self.stage_attempts["exe"] += 1
        if not record.exe_outcome:
            self.failure_counts["exe"] += 1
            return
        self.stage_successes["exe"] += 1
        self.successes += 1


@dataclass
class PipelineStats:
    by_depth: dict[int, DepthStats] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: Iterable[TrialRecord]) -> "PipelineStats":
        stats = cls()
        for rec in records:
            stats.add(rec)
        return stats

    def add(self, record: TrialRecord) -> None:
        self.by_depth.setdefault(record.scramble_depth, DepthStats()).add(record)

    def _sum(self, pick) -> int:
        return sum(pick(d) for d in self.by_depth.values())

    @property
    def trials(self) -> int:
        return self._sum(lambda d: d.trials)

    @property
    def successes(self) -> int:
        return self._sum(lambda d: d.successes)

    @property
    def overall_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def stage_rates(self) -> dict[str, float]:
        """Empirical conditional success rate of each stage."""
        rates = {}
        for s in STAGES:
            attempts = self._sum(lambda d: d.stage_attempts[s])
            wins = self._sum(lambda d: d.stage_successes[s])
            rates[s] = wins / attempts if attempts else 1.0
        return rates

    def failure_counts(self) -> dict[str, int]:
        return {s: self._sum(lambda d: d.failure_counts[s]) for s in STAGES}

    @property
    def failure_shares(self) -> tuple[float, ...]:
        counts = self.failure_counts()
        total = sum(counts.values())
        if total == 0:
            return ()
        return tuple(counts[s] / total for s in STAGES)

    def length_histogram(self, depth: int) -> dict[int, int]:
        return dict(self.by_depth[depth].histogram)

    def to_record(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "overall_rate": round(self.overall_rate, 6),
            "stage_rates": {k: round(v, 6) for k, v in self.stage_rates().items()},
            "failure_counts": self.failure_counts(),
            "failure_shares": [round(v, 6) for v in self.failure_shares],
            "depths": {
                str(depth): {
                    "trials": d.trials,
                    "successes": d.successes,
                    "histogram": {
                        str(k): d.histogram[k] for k in sorted(d.histogram)
                    },
                }
                for depth, d in sorted(self.by_depth.items())
            },
        }

    def write_csv(self, out: IO[str]) -> None:
        """One row per depth plus a closing ``all`` row: depth, trials,
        per-stage conditional rates, overall rate, and the solve-length
        histogram as space-separated ``length:count`` pairs."""
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(
            ("depth", "trials", "rate_kb", "rate_llm", "rate_exe", "overall", "histogram")
        )

        def rate(wins: int, attempts: int) -> str:
            return f"{wins / attempts:.6f}" if attempts else ""

        for depth in sorted(self.by_depth):
            d = self.by_depth[depth]
            hist = " ".join(f"{k}:{d.histogram[k]}" for k in sorted(d.histogram))
            writer.writerow(
                (
                    depth,
                    d.trials,
                    *(
                        rate(d.stage_successes[s], d.stage_attempts[s])
                        for s in STAGES
                    ),
                    rate(d.successes, d.trials),
                    hist,
                )
            )
        rates = self.stage_rates()
        writer.writerow(
            (
                "all",
                self.trials,
                *(f"{rates[s]:.6f}" for s in STAGES),
                f"{self.overall_rate:.6f}",
                "",
            )
        )


# --- campaign driver --------------------------------------------------------


@dataclass(frozen=True)
class CampaignConfig:
    depths: tuple[int, ...] = (10, 20, 30, 40)
    trials_per_depth: int = 25_000
    pool_size: int = 64
    sticker_noise: float = 0.0
    model: StageModel = DEFAULT_MODEL
    budget: SolveBudget = KB_BUDGET

    def __post_init__(self) -> None:
        if not self.depths:
            raise ValueError("at least one scramble depth is required")
        if any(d < 0 for d in self.depths):
            raise ValueError("scramble depths must be >= 0")
        if self.trials_per_depth <= 0 or self.pool_size <= 0:
            raise ValueError("trials_per_depth and pool_size must be positive")
        if not 0.0 <= self.sticker_noise <= 1.0:
            raise ValueError("sticker_noise must be a probability")


DEFAULT_CAMPAIGN = CampaignConfig()


def load_campaign_config(path) -> CampaignConfig:
    """Read a key/value campaign file; absent keys keep their defaults.

    Layout::

        [campaign]
        depths = 10, 20, 30, 40
        trials_per_depth = 25000
        pool_size = 64
        sticker_noise = 0.0

        [stages]
        p_kb = 0.90
        p_llm = 0.9276
        p_exe = 0.9461

        [budget]
        max_total_length = 23
        target_length = 18
        max_phase1_candidates = 10000
        time_cap_ms = 15000
    """
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as handle:
        parser.read_file(handle)
    config = DEFAULT_CAMPAIGN
    if parser.has_section("campaign"):
        sec = parser["campaign"]
        updates = {}
        if "depths" in sec:
            updates["depths"] = tuple(
                int(tok) for tok in sec["depths"].replace(",", " ").split()
            )
        for key in ("trials_per_depth", "pool_size"):
            if key in sec:
                updates[key] = sec.getint(key)
        if "sticker_noise" in sec:
            updates["sticker_noise"] = sec.getfloat("sticker_noise")
        config = replace(config, **updates)
    if parser.has_section("stages"):
        sec = parser["stages"]
        config = replace(
            config,
            model=StageModel(
                p_kb=sec.getfloat("p_kb", DEFAULT_MODEL.p_kb),
                p_llm=sec.getfloat("p_llm", DEFAULT_MODEL.p_llm),
                p_exe=sec.getfloat("p_exe", DEFAULT_MODEL.p_exe),
            ),
        )
    if parser.has_section("budget"):
        sec = parser["budget"]
        base = config.budget
        config = replace(
            config,
            budget=SolveBudget(
                max_total_length=sec.getint(
                    "max_total_length", base.max_total_length
                ),
                target_length=sec.getint("target_length", base.target_length),
                max_phase1_candidates=sec.getint(
                    "max_phase1_candidates", base.max_phase1_candidates
                ),
                time_cap_ms=sec.getint("time_cap_ms", base.time_cap_ms),
            ),
        )
    return config


def _depth_pool(
    depth: int,
    size: int,
    seed: int,
    budget: SolveBudget,
    tables: Tables,
) -> list[tuple[CubieState, int | None]]:
    """Scrambles with their genuine solve outcomes (length, or None)."""
    pool: list[tuple[CubieState, int | None]] = []
    rnd = random.Random(derive_seed(seed, f"pool-{depth}"))
    for _ in range(size):
        state, _ = scrambled_state(depth, seed=rnd.randrange(2**31))
        try:
            result = solve_two_phase(state, budget=budget, tables=tables)
            length = result.length if verify_solution(state, result.solution) else None
        except TimeBudgetExhausted:
            length = None
        pool.append((state, length))
    return pool


def run_campaign(
    config: CampaignConfig = DEFAULT_CAMPAIGN,
    seed: int = 0,
    tables: Tables | None = None,
) -> PipelineStats:
    """Monte-Carlo the pipeline over per-depth scramble pools.

    Solves are memoized per pooled scramble, so the trial loop costs only
    random draws.  With sticker noise enabled, each trial re-observes its
    scramble and a corrupted descriptor counts as a genuine solve-stage
    failure unless it still parses to the solvable truth.
    """
    if tables is None:
        tables = get_tables()
    stats = PipelineStats()
    model = config.model
    for depth in config.depths:
        pool = _depth_pool(
            depth, config.pool_size, seed, config.budget, tables
        )
        rng = np.random.default_rng(derive_seed(seed, f"trials-{depth}"))
        picks = rng.integers(0, len(pool), size=config.trials_per_depth)
        draws = rng.random(size=(config.trials_per_depth, 3))
        noisy = config.sticker_noise > 0.0
        bucket = stats.by_depth.setdefault(depth, DepthStats())
        solve_cache: dict[CubieState, int | None] = {}
        for i in range(config.trials_per_depth):
            state, length = pool[picks[i]]
            if noisy:
                scene_like = _ObservedState(state)
                descriptor = observe_cube(
                    scene_like,
                    config.sticker_noise,
                    seed=derive_seed(seed, f"noise-{depth}-{i}"),
                )
                length = _resolve_descriptor(
                    descriptor, state, length, solve_cache, config.budget, tables
                )
            if length is not None and draws[i, 0] >= model.p_kb:
                length = None
            if length is None:
                bucket.add(TrialRecord(depth, None, None, None))
            elif draws[i, 1] >= model.p_llm:
                bucket.add(TrialRecord(depth, length, False, None))
            else:
                bucket.add(
                    TrialRecord(depth, length, True, draws[i, 2] < model.p_exe)
                )
    return stats


class _ObservedState:
    """Minimal stand-in with the one attribute observe_cube reads."""

    def __init__(self, state: CubieState) -> None:
        self.cube_state = state


def _resolve_descriptor(
    descriptor: str,
    truth: CubieState,
    truth_length: int | None,
    cache: dict[CubieState, int | None],
    budget: SolveBudget,
    tables: Tables,
) -> int | None:
    """Genuine solve outcome for a possibly-corrupted descriptor."""
    try:
        state = facelets_to_cubies(parse_facelets(descriptor))
        validate(state)
    except CubeError:
        return None
    if state == truth:
        return truth_length
    if state not in cache:
        try:
            result = solve_two_phase(state, budget=budget, tables=tables)
            cache[state] = (
                result.length if verify_solution(state, result.solution) else None
            )
        except TimeBudgetExhausted:
            cache[state] = None
    return cache[state]
