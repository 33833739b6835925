"""Pure-Python search kernel for the two-phase solver and the shallow
optimal solver.

This is the fallback implementation; ``cubebot._twophase_cy`` is a compiled
drop-in with the same entry points and the exact same deterministic
exploration order, so both kernels return identical results for identical
inputs and budgets.

Move ids are dense indices 0..17 in (U,R,F,D,L,B) x (1,2,3) order.  Search
expansion follows that order everywhere.  Two successor rules keep paths
canonical: never turn the face just turned, and for opposite-face pairs only
expand the higher-index face after the lower one (U D is explored, D U is
not -- they commute).
"""

from __future__ import annotations

import time

from cubebot.cube import MOVE_CUBES
from cubebot.coords import N_SLICE, N_SPERM, PHASE2_MOVE_INDICES

KERNEL_NAME = "python"

_MOVE_CP = [MOVE_CUBES[m].cp for m in range(18)]
_MOVE_EP = [MOVE_CUBES[m].ep for m in range(18)]
_MOVE_CO = [MOVE_CUBES[m].co for m in range(18)]
_MOVE_EO = [MOVE_CUBES[m].eo for m in range(18)]

_P2_FACE = [m // 3 for m in PHASE2_MOVE_INDICES]


def _allowed(face: int, last_face: int) -> bool:
    if face == last_face:
        return False
    if face % 3 == last_face % 3 and face < last_face:
        return False
    return True


def prepare(tables):
    """Convert numpy tables to plain lists once; reused across solves."""
    return {
        "twist": tables.twist_moves.tolist(),
        "flip": tables.flip_moves.tolist(),
        "slice": tables.slice_moves.tolist(),
        "cperm": tables.cperm_moves.tolist(),
        "udedge": tables.udedge_moves.tolist(),
        "sperm": tables.sperm_moves.tolist(),
        "pts": tables.prune_twist_slice.tolist(),
        "pfs": tables.prune_flip_slice.tolist(),
        "pcs": tables.prune_cperm_sperm.tolist(),
        "pes": tables.prune_udedge_sperm.tolist(),
    }


def _rank_perm(perm) -> int:
    n = len(perm)
    rank = 0
    for i in range(n):
        s = 0
        pi = perm[i]
        for j in range(i + 1, n):
            if perm[j] < pi:
                s += 1
        rank = rank * (n - i) + s
    return rank


class _Search:
    def __init__(self, ctx, cp0, ep0, max_total, target_len, max_candidates, time_cap_ms):
        self.ctx = ctx
        self.cp0 = list(cp0)
        self.ep0 = list(ep0)
        self.max_total = max_total
        self.target_len = target_len
        self.max_candidates = max_candidates
        self.deadline = time.monotonic() + time_cap_ms / 1000.0 if time_cap_ms else None
        self.nodes = 0
        self.candidates = 0
        self.best_total = max_total + 1
        self.best_moves: list[int] | None = None
        self.best_p1: int = -1
        self.timed_out = False
        self.stop = False
        self.path1: list[int] = []
        self.path2: list[int] = []

    def _check_budgets(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            self.timed_out = True
            self.stop = True

    def run(self, twist, flip, slice_):
        ctx = self.ctx
        h1 = max(ctx["pts"][twist][slice_], ctx["pfs"][flip][slice_])
        depth = h1
        while depth <= min(self.max_total, self.best_total - 1) and not self.stop:
            self.path1 = []
            self._dfs1(twist, flip, slice_, depth, -1)
            depth += 1
        return self

    def _dfs1(self, t, f, s, remaining, last_face):
        if self.stop:
            return
        self.nodes += 1
        if self.nodes & 0x3FF == 0:
            self._check_budgets()
        ctx = self.ctx
        if remaining == 0:
            if t == 0 and f == 0 and s == 0:
                self._on_phase1_solution(last_face)
            return
        if ctx["pts"][t][s] > remaining or ctx["pfs"][f][s] > remaining:
            return
        tw, fl, sl = ctx["twist"], ctx["flip"], ctx["slice"]
        for m in range(18):
            face = m // 3
            if last_face >= 0 and not _allowed(face, last_face):
                continue
            self.path1.append(m)
            self._dfs1(tw[t][m], fl[f][m], sl[s][m], remaining - 1, face)
            self.path1.pop()
            if self.stop:
                return

    def _on_phase1_solution(self, last_face):
        path1 = self.path1
        # A phase-1 solution ending in a phase-2 move is redundant: the same
        # total is reachable from the shorter prefix found one depth earlier.
        if path1 and (path1[-1] in PHASE2_MOVE_INDICES):
            return
        self.candidates += 1
        if self.candidates >= self.max_candidates:
            self.stop = True
        cp = self.cp0
        ep = self.ep0
        for m in path1:
            mcp = _MOVE_CP[m]
            mep = _MOVE_EP[m]
            cp = [cp[mcp[i]] for i in range(8)]
            ep = [ep[mep[i]] for i in range(12)]
        c = _rank_perm(cp)
        e = _rank_perm(ep[:8])
        s = _rank_perm([p - 8 for p in ep[8:]])
        ctx = self.ctx
        allowance = min(self.max_total, self.best_total - 1) - len(path1)
        h2 = max(ctx["pcs"][c][s], ctx["pes"][e][s])
        depth2 = h2
        while depth2 <= allowance:
            self.path2 = []
            if self._dfs2(c, e, s, depth2, last_face):
                self.best_total = len(path1) + depth2
                self.best_moves = list(path1) + list(reversed(self.path2))
                self.best_p1 = len(path1)
                if self.best_total <= self.target_len:
                    self.stop = True
                break
            depth2 += 1
            if self.stop and self.timed_out:
                break

    def _dfs2(self, c, e, s, remaining, last_face) -> bool:
        self.nodes += 1
        if self.nodes & 0x3FF == 0:
            self._check_budgets()
            if self.timed_out:
                return False
        if remaining == 0:
            return c == 0 and e == 0 and s == 0
        ctx = self.ctx
        if ctx["pcs"][c][s] > remaining or ctx["pes"][e][s] > remaining:
            return False
        cm, em, sm = ctx["cperm"], ctx["udedge"], ctx["sperm"]
        for col in range(10):
            face = _P2_FACE[col]
            if last_face >= 0 and not _allowed(face, last_face):
                continue
            if self._dfs2(cm[c][col], em[e][col], sm[s][col], remaining - 1, face):
                self.path2.append(PHASE2_MOVE_INDICES[col])
                return True
        return False


def search_two_phase(
    ctx,
    twist: int,
    flip: int,
    slice_: int,
    cp0,
    ep0,
    max_total: int,
    target_len: int,
    max_candidates: int,
    time_cap_ms: float,
) -> dict:
    """Run the full two-phase search.  Returns a result dict with keys
    ``moves`` (list of move ids or None), ``phase1_length``, ``nodes``,
    ``candidates``, ``timed_out``."""
    search = _Search(ctx, cp0, ep0, max_total, target_len, max_candidates, time_cap_ms)
    search.run(twist, flip, slice_)
    return {
        "moves": search.best_moves,
        "phase1_length": search.best_p1,
        "nodes": search.nodes,
        "candidates": search.candidates,
        "timed_out": search.timed_out,
    }


# ---------------------------------------------------------------------------
# Shallow optimal solver: plain iterative-deepening DFS on the cubie arrays,
# no tables involved (it serves as an independent oracle for the two-phase
# path).
# ---------------------------------------------------------------------------


_SOLVED_CP = list(range(8))
_SOLVED_EP = list(range(12))
_ZEROS8 = [0] * 8
_ZEROS12 = [0] * 12


def search_optimal(cp, co, ep, eo, max_depth: int) -> dict:
    """Exact minimal-length solution by iterative deepening, or None if the
    state needs more than ``max_depth`` moves."""
    cp, co, ep, eo = list(cp), list(co), list(ep), list(eo)
    path: list[int] = []
    counter = [0]
    for depth in range(max_depth + 1):
        path.clear()
        if _dfs_exact(cp, co, ep, eo, depth, -1, path, counter):
            return {"moves": list(path), "nodes": counter[0]}
    return {"moves": None, "nodes": counter[0]}


def _dfs_exact(cp, co, ep, eo, remaining, last_face, path, counter) -> bool:
    counter[0] += 1
    if remaining == 0:
        return cp == _SOLVED_CP and co == _ZEROS8 and ep == _SOLVED_EP and eo == _ZEROS12
    for m in range(18):
        face = m // 3
        if last_face >= 0 and not _allowed(face, last_face):
            continue
        mcp, mco, mep, meo = _MOVE_CP[m], _MOVE_CO[m], _MOVE_EP[m], _MOVE_EO[m]
        ncp = [cp[mcp[i]] for i in range(8)]
        nco = [(co[mcp[i]] + mco[i]) % 3 for i in range(8)]
        nep = [ep[mep[i]] for i in range(12)]
        neo = [(eo[mep[i]] + meo[i]) % 2 for i in range(12)]
        path.append(m)
        if _dfs_exact(ncp, nco, nep, neo, remaining - 1, face, path, counter):
            return True
        path.pop()
    return False
