"""Layer-by-layer macro solver.

Solves the way a beginner is taught to: bottom cross, bottom corners,
middle edges, then the last layer in four looks (orient edges, orient
corners, permute corners, permute edges).  Every emitted move comes from a
small menu of standard finger macros; the solver only chooses which macro
to apply and from which angle, so solutions are long but each step has an
obvious purpose.

Selection works by simulation: candidate macros are applied to a copy of
the state and the cheapest one that achieves the stage goal (after merging
adjacent turns of the same face) is kept.  The last-layer looks run a tiny
shortest-path search over macro applications instead, which keeps them
provably terminating.
"""

from __future__ import annotations

import time
from heapq import heappop, heappush

from cubebot.cube import (
    ALL_MOVES,
    BL,
    BR,
    CubieState,
    DB,
    DBL,
    DF,
    DFR,
    DL,
    DLF,
    DR,
    DRB,
    FL,
    FR,
    Face,
    MOVE_CUBES,
    Move,
    MoveSequence,
    SOLVED,
    ValidationError,
    apply_move,
    validate,
)
from cubebot.solvers import SolveResult, Unsolvable

_U1 = Move(Face.U, 1)
_U2 = Move(Face.U, 2)
_U3 = Move(Face.U, 3)

_CROSS_SLOTS = (DR, DF, DL, DB)
_D_CORNERS = (DFR, DLF, DBL, DRB)
_MIDDLE_SLOTS = (FR, FL, BL, BR)

# Which vertical faces flank each slot when it is held at the viewer's
# front-right (f = face toward the viewer, r = face on the right hand).
_CORNER_VIEW = {
    DFR: (Face.F, Face.R),
    DLF: (Face.L, Face.F),
    DBL: (Face.B, Face.L),
    DRB: (Face.R, Face.B),
}
_MIDDLE_VIEW = {
    FR: (Face.F, Face.R),
    FL: (Face.F, Face.L),
    BL: (Face.B, Face.L),
    BR: (Face.B, Face.R),
}


def _word(text: str) -> tuple[Move, ...]:
    out = []
    for tok in text.split():
        turns = {"": 1, "2": 2, "'": 3}.get(tok[1:])
        if turns is None:
            raise ValueError(f"bad move token {tok!r}")
        out.append(Move(Face[tok[0]], turns))
    return tuple(out)


# 90-degree relabelling about the vertical axis; powers give all four ways
# of holding the cube without tipping it.
_Y = {Face.U: Face.U, Face.D: Face.D, Face.F: Face.R,
      Face.R: Face.B, Face.B: Face.L, Face.L: Face.F}


def _relabel(word: tuple[Move, ...], k: int) -> tuple[Move, ...]:
    out = list(word)
    for _ in range(k):
        out = [Move(_Y[m.face], m.turns) for m in out]
    return tuple(out)


_EDGE_FLIPS = (
    _word("F R U R' U' F'"),
    _word("F U R U' R' F'"),
)
_CORNER_TWISTS = (
    _word("R U R' U R U2 R'"),            # one corner oriented
    _word("R U2 R' U' R U' R'"),           # mirror case
    _word("R U2 R2 U' R2 U' R2 U2 R"),     # none oriented, headlights opposed
    _word("R U R' U R U' R' U R U2 R'"),   # none oriented, both pairs out
    _word("R2 D R' U2 R D' R' U2 R'"),     # two diagonal oriented
)
_CORNER_CYCLES = (_word("R' F R' B2 R F' R' B2 R2"),)
_EDGE_CYCLES = (
    _word("R U' R U R U R U' R' U' R2"),
    _word("R2 U2 R U2 R2 U2 R2 U2 R U2 R2"),
)


def _effect(word: tuple[Move, ...]) -> CubieState:
    s = SOLVED
    for m in word:
        s = apply_move(s, m)
    return s


def _check_macros() -> None:
    # The last-layer planners assume these macros never touch the first two
    # layers (and, where noted, preserve even more).  Fail loudly at import
    # if a macro's written form drifts from its intended effect.
    def complain(kind, word, why):
        text = " ".join(str(m) for m in word)
        raise RuntimeError(f"{kind} macro [{text}] {why}")

    for kind, words in (
        ("edge-flip", _EDGE_FLIPS),
        ("corner-twist", _CORNER_TWISTS),
        ("corner-cycle", _CORNER_CYCLES),
        ("edge-cycle", _EDGE_CYCLES),
    ):
        for word in words:
            e = _effect(word)
            if not (
                all(e.cp[i] == i and e.co[i] == 0 for i in range(4, 8))
                and all(e.ep[i] == i and e.eo[i] == 0 for i in range(4, 12))
            ):
                complain(kind, word, "disturbs the first two layers")
            if kind != "edge-flip" and any(e.eo):
                complain(kind, word, "must preserve edge orientation")
            if kind in ("corner-cycle", "edge-cycle") and any(e.co):
                complain(kind, word, "must preserve corner orientation")
            if kind == "edge-cycle" and e.cp != SOLVED.cp:
                complain(kind, word, "must leave every corner in place")
            if kind == "corner-cycle" and e.ep != SOLVED.ep:
                complain(kind, word, "must leave every edge in place")


_check_macros()


def _merge(moves) -> list[Move]:
    """Collapse turns of the same face, commuting across the shared axis.

    Runs of moves on one axis (say R and L) commute freely, so "R L R'"
    reduces to "L".  Quarter turns that sum to a full turn disappear.
    """
    out: list[Move] = []
    for m in moves:
        out.append(m)
        while out:
            i = len(out) - 1
            axis = out[i].face.value % 3
            j = i - 1
            merged = False
            while j >= 0 and out[j].face.value % 3 == axis:
                if out[j].face == out[i].face:
                    turns = (out[j].turns + out[i].turns) % 4
                    del out[i]
                    if turns == 0:
                        del out[j]
                    else:
                        out[j] = Move(out[j].face, turns)
                    merged = True
                    break
                j -= 1
            if not merged:
                break
    return out


# --- single-edge distance tables for the cross search ----------------------

# _EDGE_STEP[move][slot] = (slot after the move, orientation flip)
_EDGE_STEP = []
for _m in range(18):
    _mc = MOVE_CUBES[_m]
    _row = [None] * 12
    for _j in range(12):
        _row[_mc.ep[_j]] = (_j, _mc.eo[_j])
    _EDGE_STEP.append(tuple(_row))


def _edge_distances(home: int) -> dict[tuple[int, int], int]:
    dist = {(home, 0): 0}
    frontier = [(home, 0)]
    while frontier:
        nxt = []
        for slot, ori in frontier:
            d = dist[(slot, ori)]
            for m in range(18):
                to, flip = _EDGE_STEP[m][slot]
                key = (to, (ori + flip) % 2)
                if key not in dist:
                    dist[key] = d + 1
                    nxt.append(key)
        frontier = nxt
    return dist


_CROSS_DIST = {home: _edge_distances(home) for home in _CROSS_SLOTS}


class _Work:
    """Running state, emitted moves and a simulation counter."""

    __slots__ = ("state", "moves", "sims")

    def __init__(self, state: CubieState) -> None:
        self.state = state
        self.moves: list[Move] = []
        self.sims = 0

    def play(self, word) -> None:
        for m in word:
            self.state = apply_move(self.state, m)
        self.moves.extend(word)

    def merged_len(self) -> int:
        return len(_merge(self.moves))


def _pick(work: _Work, candidates, accept):
    """Simulate each candidate word; return (cost, word, state) of the
    cheapest accepted one, where cost is the merged-length increase."""
    best = None
    base = work.merged_len()
    for word in candidates:
        work.sims += 1
        s = work.state
        for m in word:
            s = apply_move(s, m)
        if not accept(s):
            continue
        cost = len(_merge(work.moves + list(word))) - base
        if best is None or cost < best[0]:
            best = (cost, word, s)
    return best


def _cross_ok(s: CubieState, slots) -> bool:
    return all(s.ep[e] == e and s.eo[e] == 0 for e in slots)


def _corners_ok(s: CubieState, slots) -> bool:
    return all(s.cp[c] == c and s.co[c] == 0 for c in slots)


# --- stage 1: bottom cross -------------------------------------------------


def _cross_edge_search(work: _Work, piece: int, preserved) -> tuple[Move, ...] | None:
    """Shortest move word that homes ``piece`` and keeps ``preserved`` home.

    Iterative deepening with the exact single-edge distance as heuristic;
    a state scores zero exactly when the stage goal holds, so the heuristic
    doubles as the goal test.
    """

    def h(s: CubieState) -> int:
        slot = s.ep.index(piece)
        v = _CROSS_DIST[piece][(slot, s.eo[slot])]
        for p in preserved:
            q = s.ep.index(p)
            v = max(v, _CROSS_DIST[p][(q, s.eo[q])])
        return v

    def dfs(s: CubieState, budget: int, last_face: int, path: list[Move]) -> bool:
        work.sims += 1
        hv = h(s)
        if hv == 0:
            return True
        if hv > budget:
            return False
        for move in ALL_MOVES:
            if move.face.value == last_face:
                continue
            path.append(move)
            if dfs(apply_move(s, move), budget - 1, move.face.value, path):
                return True
            path.pop()
        return False

    for cap in range(8):
        path: list[Move] = []
        if dfs(work.state, cap, -1, path):
            return tuple(path)
    return None


def _solve_cross(work: _Work) -> None:
    placed = [e for e in _CROSS_SLOTS if work.state.ep[e] == e and work.state.eo[e] == 0]
    remaining = [e for e in _CROSS_SLOTS if e not in placed]
    while remaining:
        base = work.merged_len()
        best = None
        for piece in remaining:
            word = _cross_edge_search(work, piece, placed)
            if word is None:
                raise RuntimeError(f"no cross placement found for edge {piece}")
            cost = len(_merge(work.moves + list(word))) - base
            if best is None or cost < best[0]:
                best = (cost, piece, word)
        _, piece, word = best
        work.play(word)
        placed.append(piece)
        remaining.remove(piece)


# --- stage 2: bottom corners -----------------------------------------------


def _corner_insert_algs(slot: int):
    f, r = _CORNER_VIEW[slot]
    sexy = (Move(r, 1), _U1, Move(r, 3), _U3)
    algs = [sexy * k for k in range(1, 6)]
    algs.append((Move(r, 1), _U2, Move(r, 3), _U3, Move(r, 1), _U1, Move(r, 3)))
    algs.append((Move(f, 3), _U2, Move(f, 1), _U1, Move(f, 3), _U3, Move(f, 1)))
    return algs


def _corner_candidates(state: CubieState, piece: int):
    algs = _corner_insert_algs(piece)
    prefixes = ((), (_U1,), (_U2,), (_U3,))
    slot = state.cp.index(piece)
    if slot < 4:
        return [p + a for p in prefixes for a in algs]
    # Stuck in the bottom layer (wrong slot, or twisted at home): pop it to
    # the top with one sexy-move pair at its current slot, then insert.
    fc, rc = _CORNER_VIEW[slot]
    pops = (
        (Move(rc, 1), _U1, Move(rc, 3), _U3),
        (Move(fc, 3), _U3, Move(fc, 1), _U1),
    )
    return [pop + p + a for pop in pops for p in prefixes for a in algs]


def _solve_first_corners(work: _Work) -> None:
    placed = [c for c in _D_CORNERS if work.state.cp[c] == c and work.state.co[c] == 0]
    remaining = [c for c in _D_CORNERS if c not in placed]
    while remaining:
        best = None
        for piece in remaining:
            def accept(s, piece=piece):
                return (
                    _cross_ok(s, _CROSS_SLOTS)
                    and _corners_ok(s, placed)
                    and s.cp[piece] == piece
                    and s.co[piece] == 0
                )

            got = _pick(work, _corner_candidates(work.state, piece), accept)
            if got is None:
                raise RuntimeError(f"no insertion found for corner {piece}")
            if best is None or got[0] < best[0][0]:
                best = (got, piece)
        got, piece = best
        work.play(got[1])
        placed.append(piece)
        remaining.remove(piece)


# --- stage 3: middle edges -------------------------------------------------


def _middle_insert_algs(slot: int):
    x, y = _MIDDLE_VIEW[slot]
    algs = []
    for f, r in ((x, y), (y, x)):
        algs.append((_U1, Move(r, 1), _U3, Move(r, 3), _U3, Move(f, 3), _U1, Move(f, 1)))
        algs.append((_U3, Move(r, 3), _U1, Move(r, 1), _U1, Move(f, 1), _U3, Move(f, 3)))
    return algs


def _middle_candidates(state: CubieState, piece: int):
    algs = _middle_insert_algs(piece)
    prefixes = ((), (_U1,), (_U2,), (_U3,))
    slot = state.ep.index(piece)
    if slot < 4:
        return [p + a for p in prefixes for a in algs]
    # Stuck in the middle layer: run any insertion at its current slot to
    # eject it to the top, then insert it properly.
    ejects = _middle_insert_algs(slot)
    return [e + p + a for e in ejects for p in prefixes for a in algs]


def _solve_middle_edges(work: _Work) -> None:
    placed = [e for e in _MIDDLE_SLOTS if work.state.ep[e] == e and work.state.eo[e] == 0]
    remaining = [e for e in _MIDDLE_SLOTS if e not in placed]
    while remaining:
        best = None
        for piece in remaining:
            def accept(s, piece=piece):
                return (
                    _cross_ok(s, _CROSS_SLOTS)
                    and _corners_ok(s, _D_CORNERS)
                    and _cross_ok(s, placed)
                    and s.ep[piece] == piece
                    and s.eo[piece] == 0
                )

            got = _pick(work, _middle_candidates(work.state, piece), accept)
            if got is None:
                raise RuntimeError(f"no insertion found for middle edge {piece}")
            if best is None or got[0] < best[0][0]:
                best = (got, piece)
        got, piece = best
        work.play(got[1])
        placed.append(piece)
        remaining.remove(piece)


# --- last layer: four looks over macro alphabets ---------------------------


def _plan_macros(start, goal, steps):
    """Cheapest macro word sequence from ``start`` to ``goal``.

    ``steps`` is a sequence of (word, transition) pairs where the transition
    maps an abstract stage state to its successor.  Dijkstra over move count;
    the state spaces involved have at most ~100 elements.
    """
    if start == goal:
        return []
    dist = {start: 0}
    came = {}
    heap = [(0, 0, start)]
    counter = 1
    while heap:
        d, _, p = heappop(heap)
        if p == goal:
            out = []
            while p != start:
                prev, idx = came[p]
                out.append(steps[idx][0])
                p = prev
            out.reverse()
            return out
        if d > dist.get(p, 1 << 30):
            continue
        for idx, (word, fn) in enumerate(steps):
            q = fn(p)
            nd = d + len(word)
            if nd < dist.get(q, 1 << 30):
                dist[q] = nd
                came[q] = (p, idx)
                heappush(heap, (nd, counter, q))
                counter += 1
    raise RuntimeError("macro plan is unreachable")


def _sim_step(word, rep, proj):
    memo = {}

    def fn(p):
        got = memo.get(p)
        if got is None:
            s = rep(p)
            for m in word:
                s = apply_move(s, m)
            got = proj(s)
            memo[p] = got
        return got

    return (word, fn)


def _u_words():
    return ((_U1,), (_U2,), (_U3,))


def _eo_rep(p):
    return CubieState(SOLVED.cp, SOLVED.co, SOLVED.ep, p + (0,) * 8)


def _co_rep(p):
    return CubieState(SOLVED.cp, p + (0,) * 4, SOLVED.ep, SOLVED.eo)


def _cp_rep(p):
    return CubieState(p + (4, 5, 6, 7), SOLVED.co, SOLVED.ep, SOLVED.eo)


def _ep_rep(p):
    return CubieState(SOLVED.cp, SOLVED.co, p + tuple(range(4, 12)), SOLVED.eo)


_EO_STEPS = tuple(
    _sim_step(w, _eo_rep, lambda s: s.eo[:4])
    for w in (
        *_u_words(),
        *(_relabel(base, k) for base in _EDGE_FLIPS for k in range(4)),
    )
)
_CO_STEPS = tuple(
    _sim_step(w, _co_rep, lambda s: s.co[:4])
    for w in (
        *_u_words(),
        *(_relabel(base, k) for base in _CORNER_TWISTS for k in range(4)),
    )
)
_CP_STEPS = tuple(
    _sim_step(w, _cp_rep, lambda s: s.cp[:4])
    for w in (
        *_u_words(),
        *(_relabel(base, k) for base in _CORNER_CYCLES for k in range(4)),
    )
)


def _ep_net_step(word, du):
    _, inner = _sim_step(word, _ep_rep, lambda s: s.ep[:4])

    def fn(p):
        ep4, net = p
        return (inner(ep4), (net + du) % 4)

    return (word, fn)


# Plain top turns displace the (already solved) top corners, so the edge
# look tracks the net top-layer offset and must return it to zero.
_EP_STEPS = tuple(
    _ep_net_step(w, du)
    for w, du in (
        ((_U1,), 1),
        ((_U2,), 2),
        ((_U3,), 3),
        *((_relabel(base, k), 0) for base in _EDGE_CYCLES for k in range(4)),
    )
)


def _solve_last_layer(work: _Work) -> None:
    for word in _plan_macros(work.state.eo[:4], (0, 0, 0, 0), _EO_STEPS):
        work.play(word)
    for word in _plan_macros(work.state.co[:4], (0, 0, 0, 0), _CO_STEPS):
        work.play(word)
    for word in _plan_macros(work.state.cp[:4], (0, 1, 2, 3), _CP_STEPS):
        work.play(word)
    start = (work.state.ep[:4], 0)
    for word in _plan_macros(start, ((0, 1, 2, 3), 0), _EP_STEPS):
        work.play(word)


def solve_layer_by_layer(state: CubieState) -> SolveResult:
    """Solve with beginner macros; long solutions, transparent steps."""
    try:
        validate(state)
    except ValidationError as exc:
        raise Unsolvable(str(exc)) from exc
    t0 = time.perf_counter()
    work = _Work(state)
    _solve_cross(work)
    _solve_first_corners(work)
    _solve_middle_edges(work)
    first_two = work.merged_len()
    _solve_last_layer(work)
    if work.state != SOLVED:
        raise RuntimeError("layer-by-layer stages did not close")
    merged = _merge(work.moves)
    elapsed = (time.perf_counter() - t0) * 1000.0
    phase2 = max(0, len(merged) - first_two)
    return SolveResult(
        backend="lbl",
        solution=MoveSequence(tuple(merged)),
        phase1_length=len(merged) - phase2,
        phase2_length=phase2,
        nodes_expanded=work.sims,
        candidates=0,
        elapsed_ms=elapsed,
    )
