"""Solver backends and the common solve/verify interface.

Backends:

* ``two-phase``  -- coordinate search to the U,D,R2,L2,F2,B2 subgroup, then
  to solved, under a conservative default budget.
* ``kb``         -- the same search with a much larger budget (lower target
  length, 10k phase-1 candidates), trading time for shorter solutions.
* ``lbl``        -- staged macro solver (see cubebot.lbl), long but simple
  solutions in the style of a human beginner method.
* ``optimal``    -- exact shallow solver, practical to about depth 7; used
  as an oracle for the others.

Every backend returns a SolveResult whose solution verifiably restores the
input state (``verify_solution``).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from cubebot import kernel as kernel_mod
from cubebot.coords import Tables, encode_phase1, get_tables
from cubebot.cube import (
    CENTER_INDICES,
    CORNER_COLORS,
    CORNER_FACELETS,
    EDGE_COLORS,
    EDGE_FACELETS,
    CubeError,
    CubieState,
    Face,
    Move,
    MoveSequence,
    SOLVED,
    ValidationError,
    apply_sequence,
    cubies_to_facelets,
    facelets_to_cubies,
    FaceletState,
    move_from_index,
    validate,
)

DEFAULT_BUDGET_FIELDS = dict(
    max_total_length=23,
    target_length=21,
    max_phase1_candidates=50,
    time_cap_ms=1000,
)


class Unsolvable(CubeError):
    """The state fails a solvability invariant; no move sequence exists."""


class TimeBudgetExhausted(CubeError):
    """No solution found within the given budget."""


class NotFound(CubeError):
    """Shallow optimal search exceeded its depth limit."""


@dataclass(frozen=True)
class SolveBudget:
    """Caps for the two-phase search.

    ``target_length``: stop as soon as a solution at most this long is found.
    ``max_phase1_candidates``: how many phase-1 solutions may be completed
    before settling for the best total seen.  Enlarging any cap never makes
    the returned solution longer (the exploration order is fixed).
    """

    max_total_length: int = 23
    target_length: int = 21
    max_phase1_candidates: int = 50
    time_cap_ms: int = 1000

    def __post_init__(self) -> None:
        for name in (
            "max_total_length",
            "target_length",
            "max_phase1_candidates",
            "time_cap_ms",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.target_length > self.max_total_length:
            raise ValueError("target_length must not exceed max_total_length")


TWO_PHASE_BUDGET = SolveBudget()
KB_BUDGET = SolveBudget(
    max_total_length=23,
    target_length=18,
    max_phase1_candidates=10_000,
    time_cap_ms=15_000,
)
# Never stop early on solution quality; used for shallow-state optimality.
EXHAUSTIVE_BUDGET = SolveBudget(
    max_total_length=23,
    target_length=1,
    max_phase1_candidates=1_000_000,
    time_cap_ms=120_000,
)


@dataclass(frozen=True)
class SolveResult:
    backend: str
    solution: MoveSequence
    phase1_length: int
    phase2_length: int
    nodes_expanded: int
    candidates: int
    elapsed_ms: float

    @property
    def length(self) -> int:
        return len(self.solution)

    def to_record(self, include_timing: bool = False) -> dict:
        return {
            "backend": self.backend,
            "solution": str(self.solution),
            "length": self.length,
            "phase1_length": self.phase1_length,
            "phase2_length": self.phase2_length,
            "nodes_expanded": self.nodes_expanded,
            "candidates": self.candidates,
            "elapsed_ms": round(self.elapsed_ms, 3) if include_timing else None,
        }


# ---------------------------------------------------------------------------
# Search directions.
#
# The two-phase search solves toward the U/D-axis subgroup, so its results
# depend on which axis plays the U/D role and on whether we solve the state
# or its inverse.  Probing all six combinations (three axes via the 120-degree
# rotation about the URF-DBL corner diagonal, each with the plain and the
# inverted state) and keeping the shortest mapped-back solution gives much
# shorter totals for the same overall candidate budget.  The candidate budget
# is split evenly across directions and the best length found so far caps the
# later directions, so the whole procedure stays deterministic.
# ---------------------------------------------------------------------------

# 120-degree rotation about the URF-DBL diagonal: U->R->F->U, D->L->B->D.
_ROT_A = {
    Face.U: Face.R,
    Face.R: Face.F,
    Face.F: Face.U,
    Face.D: Face.L,
    Face.L: Face.B,
    Face.B: Face.D,
}


def _compose_sigma(a, b):
    return {f: a[b[f]] for f in Face}


_SIGMA_ID = {f: f for f in Face}
_SIGMAS = (_SIGMA_ID, _ROT_A, _compose_sigma(_ROT_A, _ROT_A))
_SIGMA_INVS = tuple({v: k for k, v in sigma.items()} for sigma in _SIGMAS)


def _facelet_map(sigma) -> list[int]:
    """Position map of the whole-cube rotation: sticker i lands at map[i]."""
    out = [-1] * 54
    for face in Face:
        out[CENTER_INDICES[face.value]] = CENTER_INDICES[sigma[face].value]
    corner_by_faces = {frozenset(CORNER_COLORS[s]): s for s in range(8)}
    for slot in range(8):
        image = corner_by_faces[frozenset(sigma[f] for f in CORNER_COLORS[slot])]
        for k, f in enumerate(CORNER_COLORS[slot]):
            m = CORNER_COLORS[image].index(sigma[f])
            out[CORNER_FACELETS[slot][k]] = CORNER_FACELETS[image][m]
    edge_by_faces = {frozenset(EDGE_COLORS[s]): s for s in range(12)}
    for slot in range(12):
        image = edge_by_faces[frozenset(sigma[f] for f in EDGE_COLORS[slot])]
        for k, f in enumerate(EDGE_COLORS[slot]):
            m = EDGE_COLORS[image].index(sigma[f])
            out[EDGE_FACELETS[slot][k]] = EDGE_FACELETS[image][m]
    return out


_FACELET_MAPS = tuple(_facelet_map(sigma) for sigma in _SIGMAS)

# (rotation index, solve the inverse state?) in fixed exploration order.
_DIRECTIONS = ((0, False), (0, True), (1, False), (1, True), (2, False), (2, True))


def _rotate_state(state: CubieState, rot: int) -> CubieState:
    if rot == 0:
        return state
    sigma = _SIGMAS[rot]
    fmap = _FACELET_MAPS[rot]
    d = cubies_to_facelets(state).descriptor
    out = [""] * 54
    for i, c in enumerate(d):
        out[fmap[i]] = sigma[Face[c]].name
    return facelets_to_cubies(FaceletState("".join(out)))


def _map_back(move_ids, rot: int, invert: bool) -> MoveSequence:
    sigma_inv = _SIGMA_INVS[rot]
    moves = [Move(sigma_inv[Face(m // 3)], m % 3 + 1) for m in move_ids]
    if invert:
        moves = [m.inverse() for m in reversed(moves)]
    return MoveSequence(tuple(moves))


_CTX_CACHE: dict[tuple[int, int], object] = {}


def _kernel_ctx(tables: Tables, kern) -> object:
    key = (id(tables), id(kern))
    ctx = _CTX_CACHE.get(key)
    if ctx is None:
        ctx = kern.prepare(tables)
        _CTX_CACHE[key] = ctx
    return ctx


def _check_solvable(state: CubieState) -> None:
    try:
        validate(state)
    except ValidationError as exc:
        raise Unsolvable(str(exc)) from exc


def _run_two_phase(
    state: CubieState,
    budget: SolveBudget,
    backend: str,
    tables: Tables | None,
    kern=None,
) -> SolveResult:
    _check_solvable(state)
    if tables is None:
        tables = get_tables()
    if kern is None:
        kern = kernel_mod.active_kernel
    ctx = _kernel_ctx(tables, kern)
    per_direction = max(1, budget.max_phase1_candidates // len(_DIRECTIONS))
    t0 = time.perf_counter()
    deadline = t0 + budget.time_cap_ms / 1000.0
    best_seq: MoveSequence | None = None
    best_p1 = 0
    nodes = 0
    candidates = 0
    for rot, invert in _DIRECTIONS:
        remaining_ms = (deadline - time.perf_counter()) * 1000.0
        if remaining_ms <= 0:
            break
        cap = budget.max_total_length if best_seq is None else len(best_seq) - 1
        if cap < 0:
            break
        probe = _rotate_state(state.inverse() if invert else state, rot)
        twist, flip, slice_ = encode_phase1(probe)
        out = kern.search_two_phase(
            ctx,
            twist,
            flip,
            slice_,
            probe.cp,
            probe.ep,
            cap,
            budget.target_length,
            per_direction,
            remaining_ms,
        )
        nodes += out["nodes"]
        candidates += out["candidates"]
        if out["moves"] is not None:
            best_seq = _map_back(out["moves"], rot, invert)
            best_p1 = out["phase1_length"]
            if len(best_seq) <= budget.target_length:
                break
    elapsed = (time.perf_counter() - t0) * 1000.0
    if best_seq is None:
        raise TimeBudgetExhausted(
            f"no solution of length <= {budget.max_total_length} found "
            f"({candidates} candidates, {nodes} nodes)"
        )
    return SolveResult(
        backend=backend,
        solution=best_seq,
        phase1_length=best_p1,
        phase2_length=len(best_seq) - best_p1,
        nodes_expanded=nodes,
        candidates=candidates,
        elapsed_ms=elapsed,
    )


def solve_two_phase(
    state: CubieState,
    budget: SolveBudget | None = None,
    tables: Tables | None = None,
    kern=None,
) -> SolveResult:
    return _run_two_phase(state, budget or TWO_PHASE_BUDGET, "two-phase", tables, kern)


def solve_kb(
    state: CubieState,
    budget: SolveBudget | None = None,
    tables: Tables | None = None,
    kern=None,
) -> SolveResult:
    """Two-phase search with the extended budget: slower, shorter answers."""
    return _run_two_phase(state, budget or KB_BUDGET, "kb", tables, kern)


def solve_optimal_shallow(
    state: CubieState, max_depth: int = 7, kern=None
) -> SolveResult:
    """Exact minimal-length solution for near-solved states.

    Iterative deepening over the raw cubie representation with no tables;
    raises NotFound when the state needs more than ``max_depth`` moves.
    """
    if not 0 <= max_depth <= 7:
        raise ValueError("max_depth must be between 0 and 7")
    _check_solvable(state)
    if kern is None:
        kern = kernel_mod.active_kernel
    t0 = time.perf_counter()
    out = kern.search_optimal(state.cp, state.co, state.ep, state.eo, max_depth)
    elapsed = (time.perf_counter() - t0) * 1000.0
    if out["moves"] is None:
        raise NotFound(f"no solution within {max_depth} moves")
    seq = MoveSequence(tuple(move_from_index(m) for m in out["moves"]))
    return SolveResult(
        backend="optimal",
        solution=seq,
        phase1_length=len(seq),
        phase2_length=0,
        nodes_expanded=out["nodes"],
        candidates=0,
        elapsed_ms=elapsed,
    )


def verify_solution(state: CubieState, solution: MoveSequence) -> bool:
    return apply_sequence(state, solution) == SOLVED


def solve(
    state: CubieState,
    backend: str = "kb",
    budget: SolveBudget | None = None,
    tables: Tables | None = None,
) -> SolveResult:
    """Dispatch by backend name: kb, two-phase, lbl or optimal."""
    if backend == "kb":
        return solve_kb(state, budget, tables)
    if backend == "two-phase":
        return solve_two_phase(state, budget, tables)
    if backend == "lbl":
        from cubebot.lbl import solve_layer_by_layer

        return solve_layer_by_layer(state)
    if backend == "optimal":
        return solve_optimal_shallow(state)
    raise ValueError(f"unknown backend {backend!r}")
