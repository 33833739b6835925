"""cubebot: cube solving, robot plan compilation, and motion planning."""

__version__ = "0.1.0"

from cubebot.cube import (  # noqa: F401
    CubieState,
    Face,
    FaceletState,
    Move,
    MoveSequence,
    SOLVED,
    apply_move,
    apply_sequence,
    cubies_to_facelets,
    facelets_to_cubies,
    is_solved,
    parse_facelets,
    random_scramble,
    validate,
)
