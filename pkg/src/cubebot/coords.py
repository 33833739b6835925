"""Coordinate spaces, move tables and pruning tables for the two-phase solver.

Phase 1 abstracts a state into three coordinates that are all zero exactly on
the subgroup generated by U, D, R2, L2, F2, B2:

* ``twist``  -- corner orientations, base-3 over the first seven corners
  (3^7 = 2187 values),
* ``flip``   -- edge orientations, base-2 over the first eleven edges
  (2^11 = 2048 values),
* ``slice``  -- which four slots hold the middle-slice edges
  (C(12,4) = 495 values).

Phase 2 operates inside that subgroup with

* ``corner_perm``  -- rank of the corner permutation (8! = 40320),
* ``ud_edge_perm`` -- rank of the permutation of the eight U/D edges (40320),
* ``slice_perm``   -- rank of the permutation of the four slice edges (24).

Every coordinate is anchored so the solved state maps to 0.  Move tables give
the coordinate after each allowed move; pruning tables hold exact BFS
distances to the phase goal over joint coordinate pairs and are therefore
admissible heuristics.  All tables are dense arrays, built deterministically
on first use and cached on disk (see RUBIK_KB_CACHE).
"""

from __future__ import annotations

import hashlib
import logging
import os
import struct
from math import comb
from pathlib import Path
from typing import NamedTuple

import numpy as np

from cubebot.cube import MOVE_CUBES, CubeError, CubieState, SOLVED

log = logging.getLogger(__name__)

N_TWIST = 3**7        # 2187
N_FLIP = 2**11        # 2048
N_SLICE = comb(12, 4)  # 495
N_CPERM = 40320       # 8!
N_UDEDGE = 40320      # 8!
N_SPERM = 24          # 4!

N_MOVES = 18

# Moves allowed in phase 2 (U and D freely, half turns elsewhere), as indices
# into the global (U,R,F,D,L,B) x (1,2,3) move order.  The relative order is
# preserved so search expansion order stays globally consistent.
PHASE2_MOVE_INDICES = (0, 1, 2, 4, 7, 9, 10, 11, 13, 16)

CACHE_ENV_VAR = "RUBIK_KB_CACHE"
CACHE_MAGIC = b"CBTB"
CACHE_VERSION = 1


class NotInSubgroup(CubeError):
    """State is outside the phase-2 subgroup (some phase-1 coordinate != 0)."""


class Phase1Coord(NamedTuple):
    twist: int
    flip: int
    slice: int


class Phase2Coord(NamedTuple):
    corner_perm: int
    ud_edge_perm: int
    slice_perm: int


# ---------------------------------------------------------------------------
# Permutation ranking (Lehmer code; identity ranks 0)
# ---------------------------------------------------------------------------


def rank_permutation(perm) -> int:
    n = len(perm)
    rank = 0
    for i in range(n):
        smaller_later = sum(1 for j in range(i + 1, n) if perm[j] < perm[i])
        rank = rank * (n - i) + smaller_later
    return rank


def unrank_permutation(rank: int, n: int) -> list[int]:
    digits = []
    for i in range(1, n + 1):
        digits.append(rank % i)
        rank //= i
    digits.reverse()
    available = list(range(n))
    return [available.pop(d) for d in digits]


# ---------------------------------------------------------------------------
# Individual coordinates
# ---------------------------------------------------------------------------


def twist_of(co) -> int:
    t = 0
    for i in range(7):
        t = 3 * t + co[i]
    return t


def co_of_twist(t: int) -> tuple[int, ...]:
    co = [0] * 8
    for i in range(6, -1, -1):
        co[i] = t % 3
        t //= 3
    co[7] = (3 - sum(co) % 3) % 3
    return tuple(co)


def flip_of(eo) -> int:
    f = 0
    for i in range(11):
        f = 2 * f + eo[i]
    return f


def eo_of_flip(f: int) -> tuple[int, ...]:
    eo = [0] * 12
    for i in range(10, -1, -1):
        eo[i] = f % 2
        f //= 2
    eo[11] = sum(eo) % 2
    return tuple(eo)


def slice_of(ep) -> int:
    """Combinatorial rank of the set of slots holding slice edges.

    Slots are reflected (11 - slot) before colex ranking so the home set
    {8, 9, 10, 11} ranks 0.
    """
    t = sorted(11 - slot for slot in range(12) if ep[slot] >= 8)
    return sum(comb(t[k], k + 1) for k in range(4))


def slice_slots(s: int) -> list[int]:
    """Inverse of slice_of: the four slots (ascending) holding slice edges."""
    t = []
    for k in range(4, 0, -1):
        v = k - 1
        while comb(v + 1, k) <= s:
            v += 1
        t.append(v)
        s -= comb(v, k)
    return sorted(11 - v for v in t)


def ep_of_slice(s: int) -> tuple[int, ...]:
    """A representative edge permutation with the given slice coordinate."""
    slots = slice_slots(s)
    ep = [-1] * 12
    for piece, slot in zip((8, 9, 10, 11), slots):
        ep[slot] = piece
    fill = iter(range(8))
    for i in range(12):
        if ep[i] < 0:
            ep[i] = next(fill)
    return tuple(ep)


def encode_phase1(state: CubieState) -> Phase1Coord:
    return Phase1Coord(twist_of(state.co), flip_of(state.eo), slice_of(state.ep))


def encode_phase2(state: CubieState) -> Phase2Coord:
    """Phase-2 coordinates; raises NotInSubgroup outside the phase-2 group."""
    t, f, s = encode_phase1(state)
    if t or f or s:
        raise NotInSubgroup(f"phase-1 coordinates {(t, f, s)} are not all zero")
    return Phase2Coord(
        rank_permutation(state.cp),
        rank_permutation(state.ep[:8]),
        rank_permutation(tuple(p - 8 for p in state.ep[8:])),
    )


# ---------------------------------------------------------------------------
# Move tables
# ---------------------------------------------------------------------------


def _twist_after(co, move_cube: CubieState):
    return tuple((co[move_cube.cp[i]] + move_cube.co[i]) % 3 for i in range(8))


def _perm_after(perm, move_perm):
    return tuple(perm[move_perm[i]] for i in range(len(perm)))


def build_move_tables(phase: int) -> dict[str, np.ndarray]:
    """Dense coordinate transition tables for one phase.

    Each table maps (coordinate, move column) -> next coordinate.  Phase 1
    columns cover all 18 moves; phase 2 columns cover the ten phase-2 moves
    in PHASE2_MOVE_INDICES order.
    """
    if phase == 1:
        twist = np.zeros((N_TWIST, N_MOVES), dtype=np.uint16)
        for t in range(N_TWIST):
            co = co_of_twist(t)
            for m in range(N_MOVES):
                twist[t, m] = twist_of(_twist_after(co, MOVE_CUBES[m]))
        flip = np.zeros((N_FLIP, N_MOVES), dtype=np.uint16)
        for f in range(N_FLIP):
            eo = eo_of_flip(f)
            for m in range(N_MOVES):
                cube_m = MOVE_CUBES[m]
                new_eo = tuple(
                    (eo[cube_m.ep[i]] + cube_m.eo[i]) % 2 for i in range(12)
                )
                flip[f, m] = flip_of(new_eo)
        slice_t = np.zeros((N_SLICE, N_MOVES), dtype=np.uint16)
        for s in range(N_SLICE):
            ep = ep_of_slice(s)
            for m in range(N_MOVES):
                slice_t[s, m] = slice_of(_perm_after(ep, MOVE_CUBES[m].ep))
        return {"twist": twist, "flip": flip, "slice": slice_t}

    if phase == 2:
        n_p2 = len(PHASE2_MOVE_INDICES)
        cperm = np.zeros((N_CPERM, n_p2), dtype=np.uint16)
        for c in range(N_CPERM):
            cp = unrank_permutation(c, 8)
            for col, m in enumerate(PHASE2_MOVE_INDICES):
                cperm[c, col] = rank_permutation(_perm_after(cp, MOVE_CUBES[m].cp))
        udedge = np.zeros((N_UDEDGE, n_p2), dtype=np.uint16)
        for e in range(N_UDEDGE):
            ep = tuple(unrank_permutation(e, 8)) + (8, 9, 10, 11)
            for col, m in enumerate(PHASE2_MOVE_INDICES):
                after = _perm_after(ep, MOVE_CUBES[m].ep)
                udedge[e, col] = rank_permutation(after[:8])
        sperm = np.zeros((N_SPERM, n_p2), dtype=np.uint16)
        for s in range(N_SPERM):
            ep = tuple(range(8)) + tuple(p + 8 for p in unrank_permutation(s, 4))
            for col, m in enumerate(PHASE2_MOVE_INDICES):
                after = _perm_after(ep, MOVE_CUBES[m].ep)
                sperm[s, col] = rank_permutation(tuple(p - 8 for p in after[8:]))
        return {"corner_perm": cperm, "ud_edge_perm": udedge, "slice_perm": sperm}

    raise ValueError(f"phase must be 1 or 2, got {phase}")


# ---------------------------------------------------------------------------
# Pruning tables (exact BFS distances over joint coordinate pairs)
# ---------------------------------------------------------------------------


def _joint_bfs(table_a: np.ndarray, table_b: np.ndarray) -> np.ndarray:
    """BFS distance-to-goal over the product graph of two coordinates.

    Goal is (0, 0).  Both move tables must have the same move columns.
    Returns an int8 array of shape (len(table_a), len(table_b)).
    """
    n_a, n_moves = table_a.shape
    n_b = table_b.shape[0]
    dist = np.full(n_a * n_b, -1, dtype=np.int8)
    dist[0] = 0
    frontier = np.array([0], dtype=np.int64)
    depth = 0
    ta = table_a.astype(np.int64)
    tb = table_b.astype(np.int64)
    while frontier.size:
        depth += 1
        a = frontier // n_b
        b = frontier % n_b
        nxt = (ta[a] * n_b + tb[b]).ravel()
        nxt = np.unique(nxt)
        nxt = nxt[dist[nxt] < 0]
        dist[nxt] = depth
        frontier = nxt
    return dist.reshape(n_a, n_b)


def build_prune_tables(
    phase: int, move_tables: dict[str, np.ndarray] | None = None
) -> dict[str, np.ndarray]:
    """Distance-to-goal tables used as search heuristics.

    Phase 1: (twist x slice) and (flip x slice); phase 2:
    (corner_perm x slice_perm) and (ud_edge_perm x slice_perm).  The search
    takes the max of each pair, which stays admissible.
    """
    if move_tables is None:
        move_tables = build_move_tables(phase)
    if phase == 1:
        return {
            "twist_slice": _joint_bfs(move_tables["twist"], move_tables["slice"]),
            "flip_slice": _joint_bfs(move_tables["flip"], move_tables["slice"]),
        }
    if phase == 2:
        return {
            "corner_slice": _joint_bfs(
                move_tables["corner_perm"], move_tables["slice_perm"]
            ),
            "ud_edge_slice": _joint_bfs(
                move_tables["ud_edge_perm"], move_tables["slice_perm"]
            ),
        }
    raise ValueError(f"phase must be 1 or 2, got {phase}")


# ---------------------------------------------------------------------------
# Binary cache
# ---------------------------------------------------------------------------

# header: magic(4) version(u32) phase(u32) rows(u64) cols(u64) checksum(u64)
_HEADER = struct.Struct("<4sIIQQQ")

_TABLE_SPECS = [
    # (file stem, phase, group, key, dtype)
    ("twist_moves", 1, "moves", "twist", np.uint16),
    ("flip_moves", 1, "moves", "flip", np.uint16),
    ("slice_moves", 1, "moves", "slice", np.uint16),
    ("cperm_moves", 2, "moves", "corner_perm", np.uint16),
    ("udedge_moves", 2, "moves", "ud_edge_perm", np.uint16),
    ("sperm_moves", 2, "moves", "slice_perm", np.uint16),
    ("prune_twist_slice", 1, "prune", "twist_slice", np.int8),
    ("prune_flip_slice", 1, "prune", "flip_slice", np.int8),
    ("prune_cperm_sperm", 2, "prune", "corner_slice", np.int8),
    ("prune_udedge_sperm", 2, "prune", "ud_edge_slice", np.int8),
]


def payload_checksum(payload: bytes) -> int:
    return int.from_bytes(
        hashlib.blake2b(payload, digest_size=8).digest(), "little"
    )


def write_table(path: Path, array: np.ndarray, phase: int) -> None:
    payload = np.ascontiguousarray(array).astype(array.dtype.newbyteorder("<")).tobytes()
    header = _HEADER.pack(
        CACHE_MAGIC,
        CACHE_VERSION,
        phase,
        array.shape[0],
        array.shape[1],
        payload_checksum(payload),
    )
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(header + payload)
    os.replace(tmp, path)


def read_table(path: Path, phase: int, dtype) -> np.ndarray:
    """Read one cached table; raises ValueError on any mismatch."""
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError("truncated header")
    magic, version, file_phase, rows, cols, checksum = _HEADER.unpack_from(raw)
    if magic != CACHE_MAGIC:
        raise ValueError("bad magic")
    if version != CACHE_VERSION:
        raise ValueError(f"cache version {version}, expected {CACHE_VERSION}")
    if file_phase != phase:
        raise ValueError(f"phase {file_phase}, expected {phase}")
    payload = raw[_HEADER.size :]
    dt = np.dtype(dtype).newbyteorder("<")
    if len(payload) != rows * cols * dt.itemsize:
        raise ValueError("payload size mismatch")
    if payload_checksum(payload) != checksum:
        raise ValueError("checksum mismatch")
    return np.frombuffer(payload, dtype=dt).reshape(rows, cols).astype(dtype)


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    xdg = os.environ.get("XDG_CACHE_HOME")
    base = Path(xdg) if xdg else Path.home() / ".cache"
    return base / "cubebot"


class Tables:
    """All move and pruning tables, loaded from cache or built on demand."""

    def __init__(self, tables: dict[str, np.ndarray]):
        self.twist_moves = tables["twist"]
        self.flip_moves = tables["flip"]
        self.slice_moves = tables["slice"]
        self.cperm_moves = tables["corner_perm"]
        self.udedge_moves = tables["ud_edge_perm"]
        self.sperm_moves = tables["slice_perm"]
        self.prune_twist_slice = tables["twist_slice"]
        self.prune_flip_slice = tables["flip_slice"]
        self.prune_cperm_sperm = tables["corner_slice"]
        self.prune_udedge_sperm = tables["ud_edge_slice"]

    @classmethod
    def load(cls, cache_dir: str | os.PathLike | None = None) -> "Tables":
        """Load every table, rebuilding (and rewriting) any that is missing,
        corrupt, or from a different format version."""
        directory = Path(cache_dir) if cache_dir is not None else default_cache_dir()
        directory.mkdir(parents=True, exist_ok=True)
        loaded: dict[str, np.ndarray] = {}
        built: dict[int, dict[str, dict[str, np.ndarray]]] = {}

        def built_tables(phase: int) -> dict[str, dict[str, np.ndarray]]:
            if phase not in built:
                log.info("building coordinate tables for phase %d", phase)
                moves = build_move_tables(phase)
                built[phase] = {"moves": moves, "prune": build_prune_tables(phase, moves)}
            return built[phase]

        for stem, phase, group, key, dtype in _TABLE_SPECS:
            path = directory / f"{stem}.tbl"
            array = None
            if path.exists():
                try:
                    array = read_table(path, phase, dtype)
                except (ValueError, OSError) as exc:
                    log.warning("rebuilding table %s: %s", path.name, exc)
            if array is None:
                array = built_tables(phase)[group][key]
                write_table(path, array, phase)
            loaded[key] = array
        return cls(loaded)


_DEFAULT_TABLES: Tables | None = None


def get_tables(cache_dir: str | os.PathLike | None = None) -> Tables:
    """Process-wide singleton for the default cache directory."""
    global _DEFAULT_TABLES
    if cache_dir is not None:
        return Tables.load(cache_dir)
    if _DEFAULT_TABLES is None:
        _DEFAULT_TABLES = Tables.load(None)
    return _DEFAULT_TABLES
