# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled search kernel: drop-in replacement for cubebot._twophase_py.

The control flow mirrors the pure-Python kernel statement for statement so
both kernels return identical results for identical inputs and budgets
(whenever the wall-clock cap does not bind).
"""

import time

import numpy as np

from cubebot.cube import MOVE_CUBES
from cubebot.coords import PHASE2_MOVE_INDICES

KERNEL_NAME = "compiled"

_MOVE_CP_ARR = np.array([MOVE_CUBES[m].cp for m in range(18)], dtype=np.uint8)
_MOVE_CO_ARR = np.array([MOVE_CUBES[m].co for m in range(18)], dtype=np.uint8)
_MOVE_EP_ARR = np.array([MOVE_CUBES[m].ep for m in range(18)], dtype=np.uint8)
_MOVE_EO_ARR = np.array([MOVE_CUBES[m].eo for m in range(18)], dtype=np.uint8)
_P2_MOVES_ARR = np.array(PHASE2_MOVE_INDICES, dtype=np.int32)
_P2_FACE_ARR = (_P2_MOVES_ARR // 3).astype(np.int32)


def prepare(tables):
    """Contiguous, correctly-typed views of every table."""
    return (
        np.ascontiguousarray(tables.twist_moves, dtype=np.uint16),
        np.ascontiguousarray(tables.flip_moves, dtype=np.uint16),
        np.ascontiguousarray(tables.slice_moves, dtype=np.uint16),
        np.ascontiguousarray(tables.cperm_moves, dtype=np.uint16),
        np.ascontiguousarray(tables.udedge_moves, dtype=np.uint16),
        np.ascontiguousarray(tables.sperm_moves, dtype=np.uint16),
        np.ascontiguousarray(tables.prune_twist_slice, dtype=np.int8),
        np.ascontiguousarray(tables.prune_flip_slice, dtype=np.int8),
        np.ascontiguousarray(tables.prune_cperm_sperm, dtype=np.int8),
        np.ascontiguousarray(tables.prune_udedge_sperm, dtype=np.int8),
    )


cdef inline bint _allowed(int face, int last_face) noexcept:
    if face == last_face:
        return False
    if face % 3 == last_face % 3 and face < last_face:
        return False
    return True


cdef class _TwoPhase:
    cdef const unsigned short[:, ::1] twist_t, flip_t, slice_t, cperm_t, udedge_t, sperm_t
    cdef const signed char[:, ::1] pts, pfs, pcs, pes
    cdef const unsigned char[:, ::1] mcp, mep
    cdef const int[::1] p2_moves, p2_face
    cdef unsigned char cp0[8]
    cdef unsigned char ep0[12]
    cdef int max_total, target_len
    cdef long max_candidates
    cdef double deadline
    cdef bint has_deadline
    cdef long nodes, candidates
    cdef int best_total, best_p1
    cdef int best_moves[64]
    cdef bint timed_out, stop
    cdef int path1[40]
    cdef int path2[40]
    cdef int p1_len, p2_len

    def __init__(self, ctx, cp0, ep0, max_total, target_len, max_candidates,
                 time_cap_ms):
        cdef int i
        (self.twist_t, self.flip_t, self.slice_t, self.cperm_t, self.udedge_t,
         self.sperm_t, self.pts, self.pfs, self.pcs, self.pes) = ctx
        self.mcp = _MOVE_CP_ARR
        self.mep = _MOVE_EP_ARR
        self.p2_moves = _P2_MOVES_ARR
        self.p2_face = _P2_FACE_ARR
        for i in range(8):
            self.cp0[i] = cp0[i]
        for i in range(12):
            self.ep0[i] = ep0[i]
        self.max_total = max_total
        self.target_len = target_len
        self.max_candidates = max_candidates
        self.has_deadline = time_cap_ms is not None and time_cap_ms > 0
        self.deadline = (time.monotonic() + time_cap_ms / 1000.0) if self.has_deadline else 0.0
        self.nodes = 0
        self.candidates = 0
        self.best_total = max_total + 1
        self.best_p1 = -1
        self.timed_out = False
        self.stop = False

    cdef void _check_budgets(self):
        if self.has_deadline and time.monotonic() > self.deadline:
            self.timed_out = True
            self.stop = True

    cdef void run(self, int twist, int flip, int slice_):
        cdef int h1 = self.pts[twist, slice_]
        cdef int h2 = self.pfs[flip, slice_]
        cdef int depth
        if h2 > h1:
            h1 = h2
        depth = h1
        while depth <= min(self.max_total, self.best_total - 1) and not self.stop:
            self.p1_len = 0
            self._dfs1(twist, flip, slice_, depth, -1)
            depth += 1

    cdef void _dfs1(self, int t, int f, int s, int remaining, int last_face):
        cdef int m, face
        if self.stop:
            return
        self.nodes += 1
        if self.nodes & 0x3FF == 0:
            self._check_budgets()
        if remaining == 0:
            if t == 0 and f == 0 and s == 0:
                self._on_phase1_solution(last_face)
            return
        if self.pts[t, s] > remaining or self.pfs[f, s] > remaining:
            return
        for m in range(18):
            face = m / 3
            if last_face >= 0 and not _allowed(face, last_face):
                continue
            self.path1[self.p1_len] = m
            self.p1_len += 1
            self._dfs1(self.twist_t[t, m], self.flip_t[f, m], self.slice_t[s, m],
                       remaining - 1, face)
            self.p1_len -= 1
            if self.stop:
                return

    cdef void _on_phase1_solution(self, int last_face):
        cdef unsigned char cp[8]
        cdef unsigned char ep[12]
        cdef unsigned char ncp[8]
        cdef unsigned char nep[12]
        cdef int i, k, m
        cdef int c, e, s, h2, depth2, allowance
        # Skip redundant phase-1 solutions ending in a phase-2 move.
        if self.p1_len > 0:
            m = self.path1[self.p1_len - 1]
            for i in range(10):
                if self.p2_moves[i] == m:
                    return
        self.candidates += 1
        if self.candidates >= self.max_candidates:
            self.stop = True
        for i in range(8):
            cp[i] = self.cp0[i]
        for i in range(12):
            ep[i] = self.ep0[i]
        for k in range(self.p1_len):
            m = self.path1[k]
            for i in range(8):
                ncp[i] = cp[self.mcp[m, i]]
            for i in range(12):
                nep[i] = ep[self.mep[m, i]]
            for i in range(8):
                cp[i] = ncp[i]
            for i in range(12):
                ep[i] = nep[i]
        c = _rank_perm(cp, 8)
        e = _rank_perm(ep, 8)
        for i in range(4):
            ncp[i] = ep[8 + i] - 8
        s = _rank_perm(ncp, 4)
        allowance = min(self.max_total, self.best_total - 1) - self.p1_len
        h2 = self.pcs[c, s]
        if self.pes[e, s] > h2:
            h2 = self.pes[e, s]
        depth2 = h2
        while depth2 <= allowance:
            self.p2_len = 0
            if self._dfs2(c, e, s, depth2, last_face):
                self.best_total = self.p1_len + depth2
                self.best_p1 = self.p1_len
                for i in range(self.p1_len):
                    self.best_moves[i] = self.path1[i]
                # path2 is recorded goal-first during unwinding; reverse it.
                for i in range(depth2):
                    self.best_moves[self.p1_len + i] = self.path2[depth2 - 1 - i]
                if self.best_total <= self.target_len:
                    self.stop = True
                break
            depth2 += 1
            if self.stop and self.timed_out:
                break

    cdef bint _dfs2(self, int c, int e, int s, int remaining, int last_face):
        cdef int col, face
        self.nodes += 1
        if self.nodes & 0x3FF == 0:
            self._check_budgets()
            if self.timed_out:
                return False
        if remaining == 0:
            return c == 0 and e == 0 and s == 0
        if self.pcs[c, s] > remaining or self.pes[e, s] > remaining:
            return False
        for col in range(10):
            face = self.p2_face[col]
            if last_face >= 0 and not _allowed(face, last_face):
                continue
            if self._dfs2(self.cperm_t[c, col], self.udedge_t[e, col],
                          self.sperm_t[s, col], remaining - 1, face):
                self.path2[self.p2_len] = self.p2_moves[col]
                self.p2_len += 1
                return True
        return False


cdef int _rank_perm(const unsigned char* perm, int n) noexcept:
    cdef int i, j, smaller, rank = 0
    for i in range(n):
        smaller = 0
        for j in range(i + 1, n):
            if perm[j] < perm[i]:
                smaller += 1
        rank = rank * (n - i) + smaller
    return rank


def search_two_phase(ctx, twist, flip, slice_, cp0, ep0, max_total, target_len,
                     max_candidates, time_cap_ms):
    cdef _TwoPhase search = _TwoPhase(ctx, cp0, ep0, max_total, target_len,
                                      max_candidates, time_cap_ms)
    search.run(twist, flip, slice_)
    moves = None
    if search.best_total <= search.max_total:
        moves = [search.best_moves[i] for i in range(search.best_total)]
    return {
        "moves": moves,
        "phase1_length": search.best_p1,
        "nodes": search.nodes,
        "candidates": search.candidates,
        "timed_out": search.timed_out,
    }


# ---------------------------------------------------------------------------
# Shallow optimal search (no tables)
# ---------------------------------------------------------------------------


cdef class _Optimal:
    cdef const unsigned char[:, ::1] mcp, mco, mep, meo
    cdef long nodes
    cdef int path[8]

    def __init__(self):
        self.mcp = _MOVE_CP_ARR
        self.mco = _MOVE_CO_ARR
        self.mep = _MOVE_EP_ARR
        self.meo = _MOVE_EO_ARR
        self.nodes = 0

    cdef bint dfs(self, unsigned char* cp, unsigned char* co,
                  unsigned char* ep, unsigned char* eo,
                  int remaining, int last_face, int depth_index):
        cdef unsigned char ncp[8]
        cdef unsigned char nco[8]
        cdef unsigned char nep[12]
        cdef unsigned char neo[12]
        cdef int m, face, i
        cdef bint ok
        self.nodes += 1
        if remaining == 0:
            ok = True
            for i in range(8):
                if cp[i] != i or co[i] != 0:
                    ok = False
                    break
            if ok:
                for i in range(12):
                    if ep[i] != i or eo[i] != 0:
                        ok = False
                        break
            return ok
        for m in range(18):
            face = m / 3
            if last_face >= 0 and not _allowed(face, last_face):
                continue
            for i in range(8):
                ncp[i] = cp[self.mcp[m, i]]
                nco[i] = (co[self.mcp[m, i]] + self.mco[m, i]) % 3
            for i in range(12):
                nep[i] = ep[self.mep[m, i]]
                neo[i] = (eo[self.mep[m, i]] + self.meo[m, i]) % 2
            self.path[depth_index] = m
            if self.dfs(ncp, nco, nep, neo, remaining - 1, face, depth_index + 1):
                return True
        return False


def search_optimal(cp, co, ep, eo, max_depth):
    cdef _Optimal search = _Optimal()
    cdef unsigned char acp[8]
    cdef unsigned char aco[8]
    cdef unsigned char aep[12]
    cdef unsigned char aeo[12]
    cdef int i, depth
    for i in range(8):
        acp[i] = cp[i]
        aco[i] = co[i]
    for i in range(12):
        aep[i] = ep[i]
        aeo[i] = eo[i]
    for depth in range(max_depth + 1):
        if search.dfs(acp, aco, aep, aeo, depth, -1, 0):
            return {"moves": [search.path[i] for i in range(depth)],
                    "nodes": search.nodes}
    return {"moves": None, "nodes": search.nodes}
