"""Exact cube model: faces, moves, sticker and cubie representations.

Two equivalent state representations are provided:

* ``FaceletState`` -- the 54 sticker labels, listed face by face in the order
  U, R, F, D, L, B.  Within a face the nine stickers are row-major under the
  usual viewing convention: U is read with B at the top, D with F at the top,
  and the four side faces upright with U at the top.  Centers therefore sit at
  indices 4, 13, 22, 31, 40 and 49.
* ``CubieState`` -- corner/edge permutations plus orientation vectors
  (cp, co, ep, eo), the algebraic form all solvers work on.

Stickers are labelled with the face letter they belong to on a solved cube,
so a state doubles as its own text descriptor.  The physical color bound to
each letter (U=yellow, R=green, F=red, D=white, L=blue, B=orange) only
matters for display.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import IntEnum

FACE_LETTERS = "URFDLB"

# Corner slots, in the order used by cp/co.
URF, UFL, ULB, UBR, DFR, DLF, DBL, DRB = range(8)
CORNER_NAMES = ("URF", "UFL", "ULB", "UBR", "DFR", "DLF", "DBL", "DRB")

# Edge slots, in the order used by ep/eo.  The last four (FR, FL, BL, BR)
# form the middle slice between R/L and F/B.
UR, UF, UL, UB, DR, DF, DL, DB, FR, FL, BL, BR = range(12)
EDGE_NAMES = ("UR", "UF", "UL", "UB", "DR", "DF", "DL", "DB", "FR", "FL", "BL", "BR")


class Face(IntEnum):
    U = 0
    R = 1
    F = 2
    D = 3
    L = 4
    B = 5

    @property
    def color(self) -> str:
        return _FACE_COLORS[self.value]

    @property
    def axis(self) -> int:
        """Turn axis; opposite faces (U/D, R/L, F/B) share an axis."""
        return self.value % 3


_FACE_COLORS = ("yellow", "green", "red", "white", "blue", "orange")

CENTER_INDICES = (4, 13, 22, 31, 40, 49)

# Sticker indices of each corner slot, reference (U/D) sticker first, the
# remaining two in clockwise order around the corner.
CORNER_FACELETS = (
    (8, 9, 20),    # URF
    (6, 18, 38),   # UFL
    (0, 36, 47),   # ULB
    (2, 45, 11),   # UBR
    (29, 26, 15),  # DFR
    (27, 44, 24),  # DLF
    (33, 53, 42),  # DBL
    (35, 17, 51),  # DRB
)

# Face labels carried by each corner piece, same ordering as above.
CORNER_COLORS = (
    (Face.U, Face.R, Face.F),
    (Face.U, Face.F, Face.L),
    (Face.U, Face.L, Face.B),
    (Face.U, Face.B, Face.R),
    (Face.D, Face.F, Face.R),
    (Face.D, Face.L, Face.F),
    (Face.D, Face.B, Face.L),
    (Face.D, Face.R, Face.B),
)

EDGE_FACELETS = (
    (5, 10),   # UR
    (7, 19),   # UF
    (3, 37),   # UL
    (1, 46),   # UB
    (32, 16),  # DR
    (28, 25),  # DF
    (30, 43),  # DL
    (34, 52),  # DB
    (23, 12),  # FR
    (21, 41),  # FL
    (50, 39),  # BL
    (48, 14),  # BR
)

EDGE_COLORS = (
    (Face.U, Face.R),
    (Face.U, Face.F),
    (Face.U, Face.L),
    (Face.U, Face.B),
    (Face.D, Face.R),
    (Face.D, Face.F),
    (Face.D, Face.L),
    (Face.D, Face.B),
    (Face.F, Face.R),
    (Face.F, Face.L),
    (Face.B, Face.L),
    (Face.B, Face.R),
)


class CubeError(Exception):
    """Base class for every error raised by this package's cube layer."""


class FaceletError(CubeError):
    """A 54-character descriptor failed a format check."""


class WrongLength(FaceletError):
    pass


class InvalidCharacter(FaceletError):
    pass


class CountViolation(FaceletError):
    """Some face letter does not appear exactly nine times."""


class CenterViolation(FaceletError):
    """Center stickers are not U, R, F, D, L, B in face order."""


class UnrecognizedCubie(CubeError):
    """A sticker triple/pair does not correspond to any physical piece."""


class BadToken(CubeError):
    """A move token is not of the form <FACE><TURNS> with TURNS in 1..3."""


class ValidationError(CubeError):
    """A cubie state violates a solvability invariant."""


class TwistViolation(ValidationError):
    pass


class FlipViolation(ValidationError):
    pass


class ParityViolation(ValidationError):
    pass


@dataclass(frozen=True)
class Move:
    """A face turn: 1, 2 or 3 clockwise quarter turns."""

    face: Face
    turns: int

    def __post_init__(self) -> None:
        if self.turns not in (1, 2, 3):
            raise BadToken(f"turns must be 1, 2 or 3, got {self.turns!r}")

    @property
    def index(self) -> int:
        """Dense index 0..17 in the fixed (U,R,F,D,L,B) x (1,2,3) order."""
        return self.face.value * 3 + self.turns - 1

    def inverse(self) -> "Move":
        return Move(self.face, 4 - self.turns)

    def __str__(self) -> str:
        return f"{self.face.name}{self.turns}"


ALL_MOVES = tuple(Move(Face(f), t) for f in range(6) for t in (1, 2, 3))


def move_from_index(i: int) -> Move:
    return ALL_MOVES[i]


def parse_move(token: str) -> Move:
    if len(token) != 2 or token[0] not in FACE_LETTERS or token[1] not in "123":
        raise BadToken(f"bad move token {token!r}")
    return Move(Face[token[0]], int(token[1]))


@dataclass(frozen=True)
class MoveSequence:
    """An immutable sequence of moves with text round-trip support."""

    moves: tuple[Move, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "MoveSequence":
        tokens = text.split()
        return cls(tuple(parse_move(t) for t in tokens))

    def inverse(self) -> "MoveSequence":
        return MoveSequence(tuple(m.inverse() for m in reversed(self.moves)))

    def __str__(self) -> str:
        return " ".join(str(m) for m in self.moves)

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def __add__(self, other: "MoveSequence") -> "MoveSequence":
        return MoveSequence(self.moves + other.moves)


@dataclass(frozen=True)
class FaceletState:
    """54 sticker labels; ``descriptor`` doubles as the text serialization."""

    descriptor: str

    def face_stickers(self, face: Face) -> str:
        return self.descriptor[face.value * 9 : face.value * 9 + 9]

    def __str__(self) -> str:
        return self.descriptor


SOLVED_DESCRIPTOR = "".join(c * 9 for c in FACE_LETTERS)
SOLVED_FACELETS = FaceletState(SOLVED_DESCRIPTOR)


def parse_facelets(text: str) -> FaceletState:
    """Parse and fully format-check a 54-character sticker descriptor.

    Checks run in order: length, alphabet, per-letter counts (9 each),
    centers fixed at U,R,F,D,L,B.
    """
    if len(text) != 54:
        raise WrongLength(f"descriptor must have 54 characters, got {len(text)}")
    for i, c in enumerate(text):
        if c not in FACE_LETTERS:
            raise InvalidCharacter(f"invalid character {c!r} at index {i}")
    for c in FACE_LETTERS:
        n = text.count(c)
        if n != 9:
            raise CountViolation(f"label {c} appears {n} times, expected 9")
    for face_idx, pos in enumerate(CENTER_INDICES):
        if text[pos] != FACE_LETTERS[face_idx]:
            raise CenterViolation(
                f"center at index {pos} is {text[pos]}, expected {FACE_LETTERS[face_idx]}"
            )
    return FaceletState(text)


@dataclass(frozen=True)
class CubieState:
    """Corner/edge permutations and orientations.

    ``cp[i]``/``ep[i]`` give the piece sitting in slot ``i``; ``co[i]`` in
    0..2 and ``eo[i]`` in 0..1 give that piece's orientation.  The identity
    (solved) state is ``cp=ep=identity, co=eo=0``.
    """

    cp: tuple[int, ...]
    co: tuple[int, ...]
    ep: tuple[int, ...]
    eo: tuple[int, ...]

    def multiply(self, other: "CubieState") -> "CubieState":
        """Group composition: apply ``other`` after ``self``."""
        cp = tuple(self.cp[other.cp[i]] for i in range(8))
        co = tuple((self.co[other.cp[i]] + other.co[i]) % 3 for i in range(8))
        ep = tuple(self.ep[other.ep[i]] for i in range(12))
        eo = tuple((self.eo[other.ep[i]] + other.eo[i]) % 2 for i in range(12))
        return CubieState(cp, co, ep, eo)

    def inverse(self) -> "CubieState":
        cp = [0] * 8
        co = [0] * 8
        ep = [0] * 12
        eo = [0] * 12
        for i in range(8):
            cp[self.cp[i]] = i
            co[self.cp[i]] = (3 - self.co[i]) % 3
        for i in range(12):
            ep[self.ep[i]] = i
            eo[self.ep[i]] = self.eo[i]
        return CubieState(tuple(cp), tuple(co), tuple(ep), tuple(eo))


SOLVED = CubieState(
    cp=tuple(range(8)),
    co=(0,) * 8,
    ep=tuple(range(12)),
    eo=(0,) * 12,
)

# The six generator move cubes: the state a solved cube reaches after one
# clockwise quarter turn of each face.
_MOVE_U = CubieState(
    cp=(UBR, URF, UFL, ULB, DFR, DLF, DBL, DRB),
    co=(0,) * 8,
    ep=(UB, UR, UF, UL, DR, DF, DL, DB, FR, FL, BL, BR),
    eo=(0,) * 12,
)
_MOVE_R = CubieState(
    cp=(DFR, UFL, ULB, URF, DRB, DLF, DBL, UBR),
    co=(2, 0, 0, 1, 1, 0, 0, 2),
    ep=(FR, UF, UL, UB, BR, DF, DL, DB, DR, FL, BL, UR),
    eo=(0,) * 12,
)
_MOVE_F = CubieState(
    cp=(UFL, DLF, ULB, UBR, URF, DFR, DBL, DRB),
    co=(1, 2, 0, 0, 2, 1, 0, 0),
    ep=(UR, FL, UL, UB, DR, FR, DL, DB, UF, DF, BL, BR),
    eo=(0, 1, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0),
)
_MOVE_D = CubieState(
    cp=(URF, UFL, ULB, UBR, DLF, DBL, DRB, DFR),
    co=(0,) * 8,
    ep=(UR, UF, UL, UB, DF, DL, DB, DR, FR, FL, BL, BR),
    eo=(0,) * 12,
)
_MOVE_L = CubieState(
    cp=(URF, ULB, DBL, UBR, DFR, UFL, DLF, DRB),
    co=(0, 1, 2, 0, 0, 2, 1, 0),
    ep=(UR, UF, BL, UB, DR, DF, FL, DB, FR, UL, DL, BR),
    eo=(0,) * 12,
)
_MOVE_B = CubieState(
    cp=(URF, UFL, UBR, DRB, DFR, DLF, ULB, DBL),
    co=(0, 0, 1, 2, 0, 0, 2, 1),
    ep=(UR, UF, UL, BR, DR, DF, DL, BL, FR, FL, UB, DB),
    eo=(0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 1),
)

_GENERATORS = (_MOVE_U, _MOVE_R, _MOVE_F, _MOVE_D, _MOVE_L, _MOVE_B)


def _build_move_cubes() -> tuple[CubieState, ...]:
    cubes = []
    for gen in _GENERATORS:
        cube = SOLVED
        for _ in range(3):
            cube = cube.multiply(gen)
            cubes.append(cube)
    return tuple(cubes)


# MOVE_CUBES[m.index] is the move cube for each of the 18 moves.
MOVE_CUBES = _build_move_cubes()


def apply_move(state: CubieState, move: Move) -> CubieState:
    return state.multiply(MOVE_CUBES[move.index])


def apply_sequence(state: CubieState, seq: MoveSequence) -> CubieState:
    for move in seq:
        state = state.multiply(MOVE_CUBES[move.index])
    return state


def is_solved(state: CubieState) -> bool:
    return state == SOLVED


def facelets_to_cubies(facelets: FaceletState) -> CubieState:
    """Resolve sticker labels into pieces; raises UnrecognizedCubie if some
    sticker triple/pair does not exist on a real cube."""
    f = facelets.descriptor
    cp = [0] * 8
    co = [0] * 8
    for slot in range(8):
        idx = CORNER_FACELETS[slot]
        for ori in range(3):
            if f[idx[ori]] in "UD":
                break
        else:
            raise UnrecognizedCubie(f"corner slot {CORNER_NAMES[slot]} has no U/D sticker")
        c1 = f[idx[(ori + 1) % 3]]
        c2 = f[idx[(ori + 2) % 3]]
        for piece in range(8):
            cols = CORNER_COLORS[piece]
            if (
                f[idx[ori]] == cols[0].name
                and c1 == cols[1].name
                and c2 == cols[2].name
            ):
                cp[slot] = piece
                co[slot] = ori
                break
        else:
            raise UnrecognizedCubie(
                f"stickers {f[idx[0]]}{f[idx[1]]}{f[idx[2]]} at corner slot "
                f"{CORNER_NAMES[slot]} form no real corner"
            )
    ep = [0] * 12
    eo = [0] * 12
    for slot in range(12):
        idx = EDGE_FACELETS[slot]
        pair = (f[idx[0]], f[idx[1]])
        for piece in range(12):
            cols = (EDGE_COLORS[piece][0].name, EDGE_COLORS[piece][1].name)
            if pair == cols:
                ep[slot] = piece
                eo[slot] = 0
                break
            if pair == cols[::-1]:
                ep[slot] = piece
                eo[slot] = 1
                break
        else:
            raise UnrecognizedCubie(
                f"stickers {pair[0]}{pair[1]} at edge slot {EDGE_NAMES[slot]} "
                f"form no real edge"
            )
    duplicates = len(set(cp)) != 8 or len(set(ep)) != 12
    if duplicates:
        raise UnrecognizedCubie("duplicate pieces in descriptor")
    return CubieState(tuple(cp), tuple(co), tuple(ep), tuple(eo))


def cubies_to_facelets(state: CubieState) -> FaceletState:
    f = [""] * 54
    for face_idx, pos in enumerate(CENTER_INDICES):
        f[pos] = FACE_LETTERS[face_idx]
    for slot in range(8):
        piece = state.cp[slot]
        ori = state.co[slot]
        for k in range(3):
            f[CORNER_FACELETS[slot][(k + ori) % 3]] = CORNER_COLORS[piece][k].name
    for slot in range(12):
        piece = state.ep[slot]
        ori = state.eo[slot]
        for k in range(2):
            f[EDGE_FACELETS[slot][(k + ori) % 2]] = EDGE_COLORS[piece][k].name
    return FaceletState("".join(f))


def validate(state: CubieState) -> None:
    """Check the three solvability invariants, raising on the first failure.

    Order of checks: corner twist (mod 3), edge flip (mod 2), permutation
    parity (corner and edge parities must agree).
    """
    if sum(state.co) % 3 != 0:
        raise TwistViolation(f"corner twist sum {sum(state.co)} is not divisible by 3")
    if sum(state.eo) % 2 != 0:
        raise FlipViolation(f"edge flip sum {sum(state.eo)} is odd")
    if _permutation_parity(state.cp) != _permutation_parity(state.ep):
        raise ParityViolation("corner and edge permutation parities differ")


def _permutation_parity(perm: tuple[int, ...]) -> int:
    inversions = 0
    n = len(perm)
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j]:
                inversions += 1
    return inversions % 2


def random_scramble(n_moves: int, seed: int) -> MoveSequence:
    """Deterministic scramble of ``n_moves`` with no two consecutive moves on
    the same face.

    The draw scheme (documented so results are reproducible): for each move,
    draw the face with ``Random.randrange(6)``, redrawing while it equals the
    previous face, then the turn count with ``Random.randrange(1, 4)``.
    """
    if n_moves < 0:
        raise ValueError("n_moves must be >= 0")
    rng = random.Random(seed)
    moves = []
    last_face = -1
    for _ in range(n_moves):
        face = rng.randrange(6)
        while face == last_face:
            face = rng.randrange(6)
        turns = rng.randrange(1, 4)
        moves.append(Move(Face(face), turns))
        last_face = face
    return MoveSequence(tuple(moves))


def scrambled_state(n_moves: int, seed: int) -> tuple[CubieState, MoveSequence]:
    """Convenience: scramble applied to the solved cube."""
    seq = random_scramble(n_moves, seed)
    return apply_sequence(SOLVED, seq), seq
