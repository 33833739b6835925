import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubebot import cube
from cubebot.cube import (
    ALL_MOVES,
    CubieState,
    Face,
    Move,
    MoveSequence,
    SOLVED,
    SOLVED_DESCRIPTOR,
    apply_move,
    apply_sequence,
    cubies_to_facelets,
    facelets_to_cubies,
    parse_facelets,
    random_scramble,
    scrambled_state,
    validate,
)

# ---------------------------------------------------------------------------
# Sticker-cycle oracle.
#
# The index cycles below were written down by hand from the face layout
# (U=0..8 read with B at the top, R=9..17 / F=18..26 / L=36..44 / B=45..53
# upright with U at the top, D=27..35 read with F at the top) by tracking
# where each sticker of the turned layer physically goes.  They are kept
# independent of the package's own move tables on purpose.
# ---------------------------------------------------------------------------

R1_CYCLES = [
    (8, 45, 35, 26),    # corner stickers leaving/entering the U/B/D/F faces
    (2, 51, 29, 20),
    (9, 11, 17, 15),    # R face corners rotate in place
    (5, 48, 32, 23),    # edge stickers
    (10, 14, 16, 12),   # R face edges rotate in place
]

F1_CYCLES = [
    (6, 9, 29, 44),
    (38, 8, 15, 27),
    (18, 20, 26, 24),   # F face corners
    (7, 12, 28, 41),
    (19, 23, 25, 21),   # F face edges
]

U1_CYCLES = [
    # U turn: layer pieces rotate front->left seen from above, so sticker
    # content facing F ends up facing L, L->B, B->R, R->F.
    (8, 6, 0, 2),       # U face corners (front-right -> front-left -> ...)
    (7, 3, 1, 5),       # U face edges
    (9, 18, 36, 45),    # R1 -> F1 -> L1 -> B1 corner stickers
    (20, 38, 47, 11),   # F3 -> L3 -> B3 -> R3 corner stickers
    (10, 19, 37, 46),   # side edge stickers
]


def apply_cycles(descriptor: str, cycles) -> str:
    out = list(descriptor)
    for cyc in cycles:
        for i, src in enumerate(cyc):
            out[cyc[(i + 1) % len(cyc)]] = descriptor[src]
    return "".join(out)


def oracle_after(cycles) -> str:
    return apply_cycles(SOLVED_DESCRIPTOR, cycles)


@pytest.mark.parametrize(
    "move,cycles",
    [("R1", R1_CYCLES), ("F1", F1_CYCLES), ("U1", U1_CYCLES)],
)
def test_single_move_matches_sticker_cycle_oracle(move, cycles):
    got = cubies_to_facelets(apply_move(SOLVED, cube.parse_move(move)))
    assert got.descriptor == oracle_after(cycles)


def test_face_turn_permutes_exactly_twenty_positions():
    # Apply the cycles to 54 distinguishable markers: exactly 20 positions
    # must change content.
    markers = "".join(chr(33 + i) for i in range(54))
    for cycles in (R1_CYCLES, F1_CYCLES, U1_CYCLES):
        after = apply_cycles(markers, cycles)
        assert sum(1 for a, b in zip(markers, after) if a != b) == 20


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_move_facelet_action_matches_oracle_on_random_states(seed):
    # Equivariance: the oracle cycles applied to any state's descriptor agree
    # with the cubie-level move followed by projection.
    state, _ = scrambled_state(20, seed)
    before = cubies_to_facelets(state).descriptor
    for token, cycles in (("R1", R1_CYCLES), ("F1", F1_CYCLES), ("U1", U1_CYCLES)):
        got = cubies_to_facelets(apply_move(state, cube.parse_move(token)))
        assert got.descriptor == apply_cycles(before, cycles)


def test_f1_paints_u_bottom_row_with_l_labels():
    got = cubies_to_facelets(apply_move(SOLVED, cube.parse_move("F1")))
    assert got.descriptor[6:9] == "LLL"


def test_r1_paints_u_right_column_with_f_labels():
    got = cubies_to_facelets(apply_move(SOLVED, cube.parse_move("R1")))
    assert got.descriptor[2] == "F" and got.descriptor[5] == "F" and got.descriptor[8] == "F"


def test_double_and_triple_turns_compose():
    for face in Face:
        one = apply_move(SOLVED, Move(face, 1))
        two = apply_move(one, Move(face, 1))
        three = apply_move(two, Move(face, 1))
        assert apply_move(SOLVED, Move(face, 2)) == two
        assert apply_move(SOLVED, Move(face, 3)) == three
        assert apply_move(three, Move(face, 1)) == SOLVED


def test_four_quarter_turns_are_identity():
    for face in Face:
        state = SOLVED
        for _ in range(4):
            state = apply_move(state, Move(face, 1))
        assert state == SOLVED


def test_move_inverse_is_4_minus_t():
    for m in ALL_MOVES:
        assert m.inverse().turns == 4 - m.turns
        assert apply_move(apply_move(SOLVED, m), m.inverse()) == SOLVED


# ---------------------------------------------------------------------------
# Descriptor parsing
# ---------------------------------------------------------------------------


def test_parse_solved_descriptor():
    st_ = parse_facelets(SOLVED_DESCRIPTOR)
    assert facelets_to_cubies(st_) == SOLVED


def test_parse_rejects_wrong_length():
    with pytest.raises(cube.WrongLength):
        parse_facelets(SOLVED_DESCRIPTOR[:-1])


def test_parse_rejects_invalid_character():
    bad = SOLVED_DESCRIPTOR[:10] + "X" + SOLVED_DESCRIPTOR[11:]
    with pytest.raises(cube.InvalidCharacter):
        parse_facelets(bad)


def test_parse_rejects_count_violation():
    # swap one non-center U sticker to R: counts become U=8, R=10
    bad = "R" + SOLVED_DESCRIPTOR[1:]
    with pytest.raises(cube.CountViolation):
        parse_facelets(bad)


def test_parse_rejects_center_violation():
    # swap the two stickers at positions 4 (U center) and 13 (R center):
    # counts stay balanced but centers are wrong
    s = list(SOLVED_DESCRIPTOR)
    s[4], s[13] = s[13], s[4]
    with pytest.raises(cube.CenterViolation):
        parse_facelets("".join(s))


def test_unrecognized_cubie_impossible_edge():
    # Swap the R sticker of the UR edge with the U sticker of the UF edge:
    # the UR slot then shows U/U, which no real edge piece carries.
    s = list(SOLVED_DESCRIPTOR)
    s[10], s[7] = s[7], s[10]
    with pytest.raises(cube.UnrecognizedCubie):
        facelets_to_cubies(cube.FaceletState("".join(s)))


def test_unrecognized_cubie_duplicate_piece():
    # Overwrite the U sticker of the UR edge with D: the UR slot then reads
    # as a second DR piece while the real DR piece is still in place.
    s = list(SOLVED_DESCRIPTOR)
    s[5] = "D"
    with pytest.raises(cube.UnrecognizedCubie):
        facelets_to_cubies(cube.FaceletState("".join(s)))


# ---------------------------------------------------------------------------
# Round trip and conservation
# ---------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=0, max_value=40))
def test_roundtrip_random_states(seed, depth):
    state, _ = scrambled_state(depth, seed)
    assert facelets_to_cubies(cubies_to_facelets(state)) == state


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_label_counts_conserved(seed):
    state, _ = scrambled_state(30, seed)
    d = cubies_to_facelets(state).descriptor
    for c in "URFDLB":
        assert d.count(c) == 9
    for face_idx, pos in enumerate(cube.CENTER_INDICES):
        assert d[pos] == "URFDLB"[face_idx]


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_sequence_inverse_restores_identity(seed):
    seq = random_scramble(25, seed)
    state = apply_sequence(SOLVED, seq)
    assert apply_sequence(state, seq.inverse()) == SOLVED


def test_moves_preserve_validity():
    state = SOLVED
    rng = random.Random(7)
    for _ in range(200):
        state = apply_move(state, ALL_MOVES[rng.randrange(18)])
        validate(state)  # must never raise


# ---------------------------------------------------------------------------
# Validation of hand-broken states
# ---------------------------------------------------------------------------


def test_validate_twist_violation():
    co = list(SOLVED.co)
    co[0] = 1
    with pytest.raises(cube.TwistViolation):
        validate(CubieState(SOLVED.cp, tuple(co), SOLVED.ep, SOLVED.eo))


def test_validate_flip_violation():
    eo = list(SOLVED.eo)
    eo[0] = 1
    with pytest.raises(cube.FlipViolation):
        validate(CubieState(SOLVED.cp, SOLVED.co, SOLVED.ep, tuple(eo)))


def test_validate_parity_violation():
    ep = list(SOLVED.ep)
    ep[0], ep[1] = ep[1], ep[0]
    with pytest.raises(cube.ParityViolation):
        validate(CubieState(SOLVED.cp, SOLVED.co, tuple(ep), SOLVED.eo))


def test_single_swapped_edge_pair_is_parity_violation():
    # exchanging exactly two edge stickers pairwise gives an odd edge
    # permutation with even corner permutation
    state = CubieState(
        SOLVED.cp,
        SOLVED.co,
        (cube.UF, cube.UR) + SOLVED.ep[2:],
        SOLVED.eo,
    )
    with pytest.raises(cube.ParityViolation):
        validate(state)


# ---------------------------------------------------------------------------
# Moves and scrambles
# ---------------------------------------------------------------------------


def test_move_text_round_trip():
    text = "R1 U2 B3 L2 D1 F2"
    assert str(MoveSequence.parse(text)) == text


def test_parse_move_rejects_bad_tokens():
    for bad in ("R0", "R4", "X1", "R", "r1", "R12"):
        with pytest.raises(cube.BadToken):
            cube.parse_move(bad)


def test_move_constructor_rejects_bad_turns():
    with pytest.raises(cube.BadToken):
        Move(Face.R, 0)


def test_scramble_deterministic_and_no_repeat_faces():
    a = random_scramble(40, 123)
    b = random_scramble(40, 123)
    assert str(a) == str(b)
    assert len(a) == 40
    faces = [m.face for m in a]
    assert all(f1 != f2 for f1, f2 in zip(faces, faces[1:]))
    c = random_scramble(40, 124)
    assert str(a) != str(c)


def test_scramble_zero_moves():
    assert len(random_scramble(0, 5)) == 0


def test_face_colors():
    assert [f.color for f in Face] == [
        "yellow",
        "green",
        "red",
        "white",
        "blue",
        "orange",
    ]
