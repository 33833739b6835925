"""Compile move sequences into gripper primitives.

A face turn becomes three primitives: travel to the layer, rotate the
gripper there, travel back to the initial pose.  The text forms are the
interface consumed by the execution side, so they are pinned exactly:

    move gripper to right layer
    rotate gripper at right layer counter-clockwise by 1*90 degrees
    move to initial pose

``parse_plan`` is the strict inverse and exists so a compiled plan can be
checked against the sequence it came from.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from cubebot.cube import CubeError, Face, Move, MoveSequence

LAYER_NAMES = {
    Face.U: "upper",
    Face.R: "right",
    Face.F: "front",
    Face.D: "down",
    Face.L: "left",
    Face.B: "back",
}
_FACE_OF_LAYER = {name: face for face, name in LAYER_NAMES.items()}


class PlanFormatError(CubeError):
    """A plan text line or structure does not match the pinned grammar."""


@dataclass(frozen=True)
class MoveToLayer:
    layer: str

    @property
    def text(self) -> str:
        return f"move gripper to {self.layer} layer"


@dataclass(frozen=True)
class RotateAtLayer:
    layer: str
    clockwise: bool
    quarter_turns: int

    @property
    def text(self) -> str:
        direction = "clockwise" if self.clockwise else "counter-clockwise"
        return (
            f"rotate gripper at {self.layer} layer "
            f"{direction} by {self.quarter_turns}*90 degrees"
        )


@dataclass(frozen=True)
class MoveToInitialPose:
    @property
    def text(self) -> str:
        return "move to initial pose"


Primitive = Union[MoveToLayer, RotateAtLayer, MoveToInitialPose]


def compile_move(move: Move) -> tuple[Primitive, Primitive, Primitive]:
    layer = LAYER_NAMES[move.face]
    if move.turns == 3:
        rotate = RotateAtLayer(layer, clockwise=False, quarter_turns=1)
    else:
        rotate = RotateAtLayer(layer, clockwise=True, quarter_turns=move.turns)
    return (MoveToLayer(layer), rotate, MoveToInitialPose())


def compile_sequence(seq: MoveSequence) -> list[Primitive]:
    out: list[Primitive] = []
    for move in seq:
        out.extend(compile_move(move))
    return out


def plan_text(primitives) -> str:
    return "\n".join(p.text for p in primitives)


_MOVE_RE = re.compile(r"^move gripper to (\w+) layer$")
_ROTATE_RE = re.compile(
    r"^rotate gripper at (\w+) layer (clockwise|counter-clockwise) by ([12])\*90 degrees$"
)
_HOME_RE = re.compile(r"^move to initial pose$")


def parse_plan(text: str) -> MoveSequence:
    """Strictly parse plan text back into the move sequence it encodes."""
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) % 3 != 0:
        raise PlanFormatError(f"plan must come in triples, got {len(lines)} lines")
    moves = []
    for i in range(0, len(lines), 3):
        m_to = _MOVE_RE.match(lines[i])
        m_rot = _ROTATE_RE.match(lines[i + 1])
        m_home = _HOME_RE.match(lines[i + 2])
        if not m_to:
            raise PlanFormatError(f"bad travel line: {lines[i]!r}")
        if not m_rot:
            raise PlanFormatError(f"bad rotate line: {lines[i + 1]!r}")
        if not m_home:
            raise PlanFormatError(f"bad return line: {lines[i + 2]!r}")
        layer = m_to.group(1)
        if layer not in _FACE_OF_LAYER:
            raise PlanFormatError(f"unknown layer {layer!r}")
        if m_rot.group(1) != layer:
            raise PlanFormatError(
                f"rotate targets {m_rot.group(1)!r} but gripper is at {layer!r}"
            )
        quarters = int(m_rot.group(3))
        if m_rot.group(2) == "clockwise":
            turns = quarters
        else:
            if quarters != 1:
                raise PlanFormatError("counter-clockwise turns are single quarters")
            turns = 3
        moves.append(Move(_FACE_OF_LAYER[layer], turns))
    return MoveSequence(tuple(moves))
