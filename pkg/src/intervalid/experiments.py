"""Range-degradation sweeps for binary two-node diagrams.

For Y -> X with both binary, Y's lower bounds are set to ``(b_y, 1 - b_y -
r_y)`` so that its range is ``r_y``. The removal sweep records the range of
X after removing Y; the reversal sweep records the range of ``Y | x1`` after
reversing the arc.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Literal, Sequence, TextIO

import numpy as np

from .model import EPS_VALIDATE, InfluenceDiagram, LowerBoundTable, OutcomeSpace, ValidationError
from .transforms import remove_node, reverse_arc

log = logging.getLogger(__name__)

CSV_HEADER = ("kind", "b_y", "r_y", "output_range", "conditional_mode")

DEFAULT_B_Y = (0.0, 0.1, 0.2, 0.3, 0.4)
R_STEP = 0.05

# p(x1 | y1), p(x1 | y2)
EXACT_CONDITIONALS = ((0.8, 0.2), (0.3, 0.7))
BOUNDED_SLACK = 0.1


def bounded_conditionals(exact=EXACT_CONDITIONALS, slack: float = BOUNDED_SLACK):
    return tuple(tuple(max(0.0, v - slack) for v in row) for row in exact)


def default_r_grid(b_y: float, step: float = R_STEP) -> list[float]:
    """``0, step, ...`` up to ``1 - 2 b_y`` inclusive."""
    top = 1.0 - 2.0 * b_y
    n = int(np.floor(top / step + 1e-9))
    return [round(i * step, 12) for i in range(n + 1)]


@dataclass(frozen=True)
class SweepSpec:
    kind: Literal["reversal", "removal"]
    b_y_grid: Sequence[float] = DEFAULT_B_Y
    range_grid: Sequence[float] | None = None
    """Ranges of Y to visit; ``None`` uses :func:`default_r_grid` per level."""
    conditionals: tuple = EXACT_CONDITIONALS
    conditional_mode: str = "exact"

    @classmethod
    def default(cls, kind: str, bounded: bool = False) -> "SweepSpec":
        if bounded:
            return cls(kind, conditionals=bounded_conditionals(), conditional_mode="bounded")
        return cls(kind)

    def points(self) -> list[tuple[float, float]]:
        pts = []
        for b in self.b_y_grid:
            grid = default_r_grid(b) if self.range_grid is None else self.range_grid
            pts.extend((float(b), float(r)) for r in grid)
        return pts


@dataclass(frozen=True)
class SweepRow:
    kind: str
    b_y: float
    r_y: float
    output_range: float
    conditional_mode: str


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    skipped: list[tuple[float, float, str]] = field(default_factory=list)


def two_node_diagram(b_y: float, r_y: float, conditionals) -> InfluenceDiagram:
    y = (b_y, 1.0 - b_y - r_y)
    if y[1] < -EPS_VALIDATE or not 0.0 <= r_y <= 1.0 or not 0.0 <= b_y <= 1.0:
        raise ValidationError(f"b_y={b_y}, r_y={r_y} gives invalid bounds {y}")
    return InfluenceDiagram(
        [OutcomeSpace("Y", ("y1", "y2")), OutcomeSpace("X", ("x1", "x2"))],
        [
            LowerBoundTable("Y", (), {(): [y[0], max(0.0, y[1])]}),
            LowerBoundTable("X", ("Y",), {(0,): conditionals[0], (1,): conditionals[1]}),
        ],
    )


def _run(spec: SweepSpec, measure) -> SweepResult:
    if not spec.b_y_grid or (spec.range_grid is not None and not spec.range_grid):
        raise ValueError("empty sweep")
    result = SweepResult()
    for b_y, r_y in spec.points():
        try:
            d = two_node_diagram(b_y, r_y, spec.conditionals)
        except ValidationError as exc:
            log.warning("skipping grid point b_y=%g r_y=%g: %s", b_y, r_y, exc)
            result.skipped.append((b_y, r_y, str(exc)))
            continue
        out = measure(d)
        result.rows.append(SweepRow(spec.kind, b_y, r_y, out, spec.conditional_mode))
    return result


def sweep_reversal(spec: SweepSpec) -> SweepResult:
    """Range of ``Y | x1`` after reversing ``Y -> X``, per grid point."""
    if spec.kind != "reversal":
        raise ValueError(f"sweep_reversal got a {spec.kind!r} spec")
    return _run(spec, lambda d: float(1.0 - reverse_arc(d, "Y", "X").table("Y")[(0,)].sum()))


def sweep_removal(spec: SweepSpec) -> SweepResult:
    """Range of X after removing Y, per grid point."""
    if spec.kind != "removal":
        raise ValueError(f"sweep_removal got a {spec.kind!r} spec")
    return _run(spec, lambda d: float(1.0 - remove_node(d, "Y").table("X")[()].sum()))


def run_sweep(spec: SweepSpec) -> SweepResult:
    return (sweep_reversal if spec.kind == "reversal" else sweep_removal)(spec)


def removal_slope(conditionals) -> float:
    """``1 - sum_x min_y p(x|y)``: slope of the exact removal line."""
    cond = np.asarray(conditionals, dtype=np.float64)
    return float(1.0 - cond.min(axis=0).sum())


def write_csv(rows: Sequence[SweepRow], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.kind, f"{r.b_y:.12g}", f"{r.r_y:.12g}", f"{r.output_range:.12g}", r.conditional_mode])


def read_csv(src: TextIO) -> list[SweepRow]:
    rows = []
    for rec in csv.DictReader(src):
        rows.append(SweepRow(rec["kind"], float(rec["b_y"]), float(rec["r_y"]),
                             float(rec["output_range"]), rec["conditional_mode"]))
    return rows


def to_csv_text(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()
