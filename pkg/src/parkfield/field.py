"""Composite polygon force field and sampled field maps.

Every polygon contributes the minimum over its edge-line values: for a
convex obstacle that is the penetration depth inside and non-positive
outside; a 2-vertex spot edge carries one signed line, negative over the
spot interior (zero on the edge) and positive beyond it.  The composite
field is the maximum over all polygons.  Evaluators come in a scalar form
and a vectorized ``*_many`` form over (N, 2) arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, GeometryError
from .geometry import Point2, Polygon

MAX_FIELD_MAP_CELLS = 10**8


@dataclass(frozen=True)
class FieldSet:
    """Non-empty collection of field-generating polygons."""

    polygons: tuple[Polygon, ...]

    def __post_init__(self):
        if not self.polygons:
            raise GeometryError("FieldSet needs at least one polygon")
        object.__setattr__(self, "polygons", tuple(self.polygons))


class _CompiledPolygon:
    """Per-polygon line arrays for batch min-over-edges evaluation."""

    def __init__(self, polygon: Polygon):
        self.normals = np.array([[e.a, e.b] for e in polygon.edges])
        self.offsets = np.array([e.c for e in polygon.edges])

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        return (pts @ self.normals.T + self.offsets).min(axis=1)


class CompiledFieldSet:
    """A FieldSet prepared for repeated batch evaluation."""

    def __init__(self, fields: FieldSet):
        self.polygons = [_CompiledPolygon(p) for p in fields.polygons]

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        values = self.polygons[0].eval_many(pts)
        for poly in self.polygons[1:]:
            np.maximum(values, poly.eval_many(pts), out=values)
        return values


def polygon_field(polygon: Polygon, p: Point2) -> float:
    """Field of a single polygon at ``p``: min over its edge lines.

    Positive inside a convex obstacle; a spot edge gives its signed line
    distance, negative on the side the spot lies on and zero on the edge.
    """
    pts = np.array([[p.x, p.y]])
    return float(_CompiledPolygon(polygon).eval_many(pts)[0])


def gamma(fields: FieldSet, p: Point2) -> float:
    """Composite field at ``p``: max over polygons of the per-polygon field."""
    return max(polygon_field(poly, p) for poly in fields.polygons)


def gamma_many(fields: FieldSet, pts: np.ndarray) -> np.ndarray:
    """Composite field at many points, pts shaped (N, 2)."""
    return CompiledFieldSet(fields).eval_many(np.asarray(pts, dtype=float))


@dataclass(frozen=True)
class FieldMap:
    """Field samples on a regular lattice.

    ``values[r][c]`` is the field at ``origin + (c*cell_size, r*cell_size)``;
    the lattice nodes double as marching-squares grid corners, so refining
    the resolution by an integer factor reproduces the coarse nodes exactly.
    """

    origin: Point2
    cell_size: float
    rows: int
    cols: int
    values: np.ndarray

    def __post_init__(self):
        if self.cell_size <= 0:
            raise GeometryError("cell_size must be positive")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.rows, self.cols):
            raise GeometryError(
                f"values shape {vals.shape} != ({self.rows}, {self.cols})"
            )
        object.__setattr__(self, "values", vals)

    def node_xy(self, row: int, col: int) -> tuple[float, float]:
        return (self.origin.x + col * self.cell_size,
                self.origin.y + row * self.cell_size)

    def to_text(self) -> str:
        """Plain-text grid: one header line, then row-major values."""
        header = (
            f"{self.origin.x!r} {self.origin.y!r} {self.cell_size!r} "
            f"{self.rows} {self.cols}"
        )
        lines = [header]
        for row in self.values:
            lines.append(" ".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "FieldMap":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        ox, oy, cell, rows, cols = lines[0].split()
        rows, cols = int(rows), int(cols)
        values = np.array(
            [[float(v) for v in ln.split()] for ln in lines[1 : 1 + rows]]
        )
        return FieldMap(Point2(float(ox), float(oy)), float(cell), rows, cols, values)


def sample_field(
    fields: FieldSet,
    bounds: tuple[float, float, float, float],
    resolution: float,
) -> FieldMap:
    """Sample the composite field over ``bounds`` = (x_min, y_min, x_max, y_max).

    ``resolution`` is lattice nodes per metre (node spacing 1/resolution);
    the lattice covers the bounds inclusively.  Deterministic.
    """
    x_min, y_min, x_max, y_max = bounds
    if not (x_max > x_min and y_max > y_min):
        raise GeometryError(f"degenerate bounds {bounds}")
    if resolution <= 0:
        raise GeometryError("resolution must be positive")
    cell = 1.0 / resolution
    cols = int(np.ceil((x_max - x_min) * resolution)) + 1
    rows = int(np.ceil((y_max - y_min) * resolution)) + 1
    if rows * cols > MAX_FIELD_MAP_CELLS:
        raise BudgetError(
            f"field map of {rows}x{cols} nodes exceeds {MAX_FIELD_MAP_CELLS}"
        )
    xs = x_min + cell * np.arange(cols)
    ys = y_min + cell * np.arange(rows)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    values = CompiledFieldSet(fields).eval_many(pts).reshape(rows, cols)
    return FieldMap(Point2(x_min, y_min), cell, rows, cols, values)
