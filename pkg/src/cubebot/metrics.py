"""Progress metrics for move sequences.

The basic signal is the per-face match rate: the fraction of a face's nine
stickers showing that face's centre colour.  Tracing a solution records the
six rates after every move, which makes regressions in solver behaviour
visible ("does the bottom face monotonically improve?") and feeds the CSV
export consumed by external plotting.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from cubebot.cube import (
    CubieState,
    Face,
    FaceletState,
    Move,
    MoveSequence,
    apply_move,
    cubies_to_facelets,
)

CSV_FIELDS = (
    "run_id",
    "step",
    "rate_U",
    "rate_R",
    "rate_F",
    "rate_D",
    "rate_L",
    "rate_B",
    "avg",
    "min",
    "max",
)


def face_match_rate(facelets: FaceletState, face: Face) -> float:
    """Fraction of the face's stickers matching its centre, in ninths."""
    block = facelets.descriptor[face.value * 9 : face.value * 9 + 9]
    return block.count(face.name) / 9.0


def all_face_rates(facelets: FaceletState) -> tuple[float, ...]:
    return tuple(face_match_rate(facelets, f) for f in Face)


@dataclass(frozen=True)
class TraceRecord:
    """Face rates after ``step`` moves; ``move`` is None for the start row."""

    step: int
    move: Move | None
    rates: tuple[float, ...]

    @property
    def average(self) -> float:
        return sum(self.rates) / len(self.rates)

    @property
    def minimum(self) -> float:
        return min(self.rates)

    @property
    def maximum(self) -> float:
        return max(self.rates)


def trace_solution(state: CubieState, solution: MoveSequence) -> list[TraceRecord]:
    """Rates before any move and after each move of ``solution``."""
    records = [TraceRecord(0, None, all_face_rates(cubies_to_facelets(state)))]
    current = state
    for i, move in enumerate(solution, start=1):
        current = apply_move(current, move)
        records.append(TraceRecord(i, move, all_face_rates(cubies_to_facelets(current))))
    return records


def reduction_percent(before: float, after: float) -> float:
    """How much smaller ``after`` is than ``before``, as a percentage.

    Positive means improvement; negative means ``after`` is larger.
    """
    if before <= 0:
        raise ValueError("baseline must be positive")
    # 1 - after/before (rather than (before-after)/before) keeps the result
    # capped at exactly 100 for after >= 0.
    return 100.0 * (1.0 - after / before)


def write_trace_csv(out: IO[str], run_id: str, records: Iterable[TraceRecord]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in records:
        row = [run_id, str(rec.step)]
        row.extend(f"{r:.6f}" for r in rec.rates)
        row.extend(f"{v:.6f}" for v in (rec.average, rec.minimum, rec.maximum))
        writer.writerow(row)


def read_trace_csv(inp: IO[str]) -> list[tuple[str, TraceRecord]]:
    """Inverse of write_trace_csv, minus the move column (not serialized)."""
    reader = csv.reader(inp)
    header = next(reader, None)
    if tuple(header or ()) != CSV_FIELDS:
        raise ValueError("unrecognized trace header")
    out = []
    for row in reader:
        if len(row) != len(CSV_FIELDS):
            raise ValueError(f"malformed trace row: {row!r}")
        rates = tuple(float(v) for v in row[2:8])
        out.append((row[0], TraceRecord(int(row[1]), None, rates)))
    return out


def summarize_lengths(lengths: Sequence[int]) -> dict:
    """Average/min/max of a cohort of solution lengths."""
    if not lengths:
        raise ValueError("empty cohort")
    return {
        "count": len(lengths),
        "average": sum(lengths) / len(lengths),
        "min": min(lengths),
        "max": max(lengths),
    }
