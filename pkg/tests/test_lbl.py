"""Layer-by-layer solver: stage goals, move merging, solution validity."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubebot import lbl
from cubebot.cube import (
    CubieState,
    SOLVED,
    apply_move,
    move_from_index,
    parse_move,
    scrambled_state,
)
from cubebot.lbl import solve_layer_by_layer
from cubebot.solvers import Unsolvable, verify_solution


def _state_from_word(word):
    s = SOLVED
    for idx in word:
        s = apply_move(s, move_from_index(idx))
    return s


# --- move merging ----------------------------------------------------------


@settings(max_examples=120, deadline=None)
@given(st.lists(st.integers(0, 17), max_size=25))
def test_merge_preserves_effect(word):
    moves = [move_from_index(i) for i in word]
    merged = lbl._merge(moves)
    a = SOLVED
    for m in moves:
        a = apply_move(a, m)
    b = SOLVED
    for m in merged:
        b = apply_move(b, m)
    assert a == b


@settings(max_examples=120, deadline=None)
@given(st.lists(st.integers(0, 17), max_size=25))
def test_merge_is_idempotent_and_reduced(word):
    moves = [move_from_index(i) for i in word]
    merged = lbl._merge(moves)
    assert lbl._merge(merged) == merged
    assert all(m.turns in (1, 2, 3) for m in merged)
    for a, b in zip(merged, merged[1:]):
        assert a.face != b.face


def test_merge_cancels_across_commuting_moves():
    merged = lbl._merge([parse_move("R1"), parse_move("L1"), parse_move("R3")])
    assert merged == [parse_move("L1")]
    assert lbl._merge([parse_move("U1"), parse_move("U1")]) == [parse_move("U2")]
    assert lbl._merge([parse_move("F2"), parse_move("F2")]) == []


# --- stage goals -----------------------------------------------------------


def _first_layer_ok(s):
    return lbl._cross_ok(s, lbl._CROSS_SLOTS) and lbl._corners_ok(s, lbl._D_CORNERS)


def test_stages_reach_their_goals_in_order():
    for seed in range(8):
        state, _ = scrambled_state(40, seed=600 + seed)
        work = lbl._Work(state)
        lbl._solve_cross(work)
        assert lbl._cross_ok(work.state, lbl._CROSS_SLOTS)
        lbl._solve_first_corners(work)
        assert _first_layer_ok(work.state)
        lbl._solve_middle_edges(work)
        assert _first_layer_ok(work.state)
        assert lbl._cross_ok(work.state, lbl._MIDDLE_SLOTS)
        lbl._solve_last_layer(work)
        assert work.state == SOLVED


def test_macro_words_leave_first_two_layers_alone():
    for word in (*lbl._EDGE_FLIPS, *lbl._CORNER_TWISTS, *lbl._CORNER_CYCLES, *lbl._EDGE_CYCLES):
        e = lbl._effect(word)
        assert e.cp[4:] == SOLVED.cp[4:]
        assert e.ep[4:] == SOLVED.ep[4:]
        assert not any(e.co[4:])
        assert not any(e.eo[4:])


# --- end to end ------------------------------------------------------------


def test_solved_input_needs_no_moves():
    res = solve_layer_by_layer(SOLVED)
    assert res.length == 0
    assert res.backend == "lbl"


def test_solutions_verify_on_deep_scrambles():
    for seed in range(12):
        state, _ = scrambled_state(40, seed=700 + seed)
        res = solve_layer_by_layer(state)
        assert verify_solution(state, res.solution)
        assert res.phase1_length + res.phase2_length == res.length


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 17), min_size=1, max_size=12))
def test_solutions_verify_on_short_words(word):
    state = _state_from_word(word)
    res = solve_layer_by_layer(state)
    assert verify_solution(state, res.solution)


def test_output_is_merged():
    state, _ = scrambled_state(40, seed=42)
    res = solve_layer_by_layer(state)
    moves = list(res.solution)
    assert lbl._merge(moves) == moves


def test_deterministic():
    state, _ = scrambled_state(40, seed=13)
    a = solve_layer_by_layer(state)
    b = solve_layer_by_layer(state)
    assert str(a.solution) == str(b.solution)


def test_length_in_beginner_range():
    lens = []
    for seed in range(10):
        state, _ = scrambled_state(40, seed=800 + seed)
        lens.append(solve_layer_by_layer(state).length)
    avg = sum(lens) / len(lens)
    assert 40 <= avg <= 135


def test_rejects_unsolvable_state():
    co = list(SOLVED.co)
    co[0] = 1
    with pytest.raises(Unsolvable):
        solve_layer_by_layer(CubieState(SOLVED.cp, tuple(co), SOLVED.ep, SOLVED.eo))
