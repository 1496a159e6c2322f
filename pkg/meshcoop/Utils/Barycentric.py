"""
    Barycentric.py

    Contains the barycentric view of a three-provider game: the imputation triangle, the core region inside it and
    the renderer that draws allocations on top of both as an SVG image.

    An allocation x maps to ``lambda_m = (x_m - v({m})) / (v(M) - sum_j v({j}))``. Vertex m of the triangle gives the
    whole cooperation gain to provider m; a pair {a, b} blocks every point where ``lambda_c > 1 - e_ab / g``, with c
    the third provider, ``e_ab = v({a, b}) - v({a}) - v({b})`` and g the gain of the grand coalition.
"""

from __future__ import annotations

import os
from typing import IO

import numpy as np
import matplotlib
from matplotlib.figure import Figure
from matplotlib.patches import Polygon

from meshcoop.Coalition import Coalition, CharacteristicFunction
from meshcoop.Errors import UnsupportedDimensionError
from meshcoop.Utils.Utils import log, tolerance_for, GAME_TOLERANCE, FEASIBILITY_TOLERANCE

# SP1 on top, SP2 bottom left, SP3 bottom right.
VERTICES = np.array([[0.5, np.sqrt(3) / 2], [0.0, 0.0], [1.0, 0.0]])

CANVAS_SIZE = (800, 700)
SHADE_ALPHA = 0.25

class BarycentricPoint():
    """An allocation placed on the imputation triangle."""

    def __init__(self, *, label: str, simplex_coords: tuple[float, float, float]):
        self.__label = label
        self.__coords = tuple(float(value) for value in simplex_coords)

    def __repr__(self):
        return f"<BarycentricPoint({self.__label!r}, {tuple(round(value, 6) for value in self.__coords)})>"

    @property
    def label(self) -> str:
        return self.__label

    @property
    def simplex_coords(self) -> tuple[float, float, float]:
        return self.__coords

    @property
    def cartesian(self) -> tuple[float, float]:
        """The (x, y) position of the point in the drawing's unit triangle."""
        x, y = np.asarray(self.__coords) @ VERTICES
        return float(x), float(y)

    @property
    def is_imputation(self) -> bool:
        """True when the point lies on the closed triangle."""
        return min(self.__coords) >= -FEASIBILITY_TOLERANCE and abs(sum(self.__coords) - 1.0) <= FEASIBILITY_TOLERANCE

def _gain(cf: CharacteristicFunction) -> float:
    if (cf.providers != 3):
        raise UnsupportedDimensionError(f"Barycentric plots need exactly 3 providers, not {cf.providers}.")

    cf.require_complete()
    standalone = sum(cf.value(Coalition.singleton(m)) for m in (1, 2, 3))
    gain = cf.value(Coalition.grand(3)) - standalone

    if (gain <= tolerance_for(standalone, GAME_TOLERANCE)):
        raise UnsupportedDimensionError(f"The imputation simplex is degenerate: v(M) exceeds the standalone values by {gain}.")

    return gain

def to_barycentric(cf: CharacteristicFunction, allocation, label: str = "") -> BarycentricPoint:
    """Maps an allocation onto the imputation triangle.

    Args:
        cf (``CharacteristicFunction``): A complete three-provider game.
        allocation (``Allocation | list[float]``): The payoffs of providers 1, 2 and 3.
        label (``str``, optional): The label drawn next to the point. Defaults to the allocation's method.

    Raises:
        ``UnsupportedDimensionError``: Raised if the game does not have 3 providers or v(M) equals the standalone sum.

    Returns:
        ``BarycentricPoint``: The point.
    """
    gain = _gain(cf)
    payoffs = allocation.as_list() if hasattr(allocation, "as_list") else list(allocation)

    if (len(payoffs) != 3):
        raise UnsupportedDimensionError(f"Allocation should have 3 payoffs, not {len(payoffs)}.")

    coords = [(payoffs[m - 1] - cf.value(Coalition.singleton(m))) / gain for m in (1, 2, 3)]
    return BarycentricPoint(label = label or getattr(allocation, "method", ""), simplex_coords = coords)

def _core_constraints(cf: CharacteristicFunction, gain: float) -> list[tuple[np.ndarray, float]]:
    """(Internal) Half-planes ``h . lambda <= t`` cut by the two-provider coalitions."""
    constraints = []

    for first, second, third in ((1, 2, 3), (1, 3, 2), (2, 3, 1)):
        excess = cf.value(Coalition.from_members([first, second])) - cf.value(Coalition.singleton(first)) - cf.value(Coalition.singleton(second))
        normal = np.zeros(3)
        normal[third - 1] = 1.0
        constraints.append((normal, 1.0 - excess / gain))

    return constraints

def _clip(polygon: list[np.ndarray], normal: np.ndarray, bound: float) -> list[np.ndarray]:
    """(Internal) Sutherland-Hodgman clipping of a polygon by one half-plane."""
    clipped = []

    for index, current in enumerate(polygon):
        following = polygon[(index + 1) % len(polygon)]
        current_side = normal @ current - bound
        following_side = normal @ following - bound

        if (current_side <= 0):
            clipped.append(current)

        if (current_side * following_side < 0):
            ratio = current_side / (current_side - following_side)
            clipped.append(current + ratio * (following - current))

    return clipped

def core_polygon(cf: CharacteristicFunction) -> np.ndarray:
    """Returns the vertices of the core region in barycentric coordinates.

    Args:
        cf (``CharacteristicFunction``): A complete three-provider game.

    Returns:
        ``np.ndarray``: A (k, 3) array of vertices in counter-clockwise drawing order; empty if the core is empty.
    """
    gain = _gain(cf)
    polygon = [row for row in np.eye(3)]

    for normal, bound in _core_constraints(cf, gain):
        polygon = _clip(polygon, normal, bound)
        if (not polygon):
            break

    return np.array(polygon).reshape(-1, 3)

def point_in_core(cf: CharacteristicFunction, point: BarycentricPoint, tolerance: float = GAME_TOLERANCE) -> bool:
    """Returns True if the point lies on the triangle and inside every core half-plane."""
    gain = _gain(cf)
    coords = np.asarray(point.simplex_coords)

    if (min(coords) < -tolerance or abs(coords.sum() - 1.0) > tolerance):
        return False

    return all(normal @ coords <= bound + tolerance for normal, bound in _core_constraints(cf, gain))

def _polygon_area(points: np.ndarray) -> float:
    if (len(points) < 3):
        return 0.0
    x, y = points[:, 0], points[:, 1]
    return 0.5 * abs(float(x @ np.roll(y, -1) - y @ np.roll(x, -1)))

def render_barycentric(cf: CharacteristicFunction, points: list, file: str | os.PathLike | IO, title: str | None = None) -> list[BarycentricPoint]:
    """Draws the imputation triangle, its core and a set of allocations as an SVG image.

    The part of the triangle outside the core is shaded; nothing is shaded when the core is the whole triangle.
    Output is byte-identical for identical inputs.

    Args:
        cf (``CharacteristicFunction``): A complete three-provider game.
        points (``list``): Allocations (or already mapped BarycentricPoints) to mark.
        file (``str | os.PathLike | IO``): Where to write the SVG.
        title (``str | None``, optional): A title drawn above the triangle. Defaults to None.

    Raises:
        ``UnsupportedDimensionError``: Raised if the game does not have 3 providers or its simplex is degenerate.

    Returns:
        ``list[BarycentricPoint]``: The points that were drawn.
    """
    _gain(cf)
    mapped = [point if isinstance(point, BarycentricPoint) else to_barycentric(cf, point) for point in points]
    core = core_polygon(cf)
    core = core @ VERTICES if len(core) else np.zeros((0, 2))

    width, height = CANVAS_SIZE

    with matplotlib.rc_context({"svg.hashsalt": "meshcoop", "svg.fonttype": "path"}):
        figure = Figure(figsize = (width / 72, height / 72), dpi = 72)
        axes = figure.add_subplot()
        axes.set_aspect("equal")
        axes.set_axis_off()
        axes.set_xlim(-0.12, 1.12)
        axes.set_ylim(-0.1, 0.98)

        if (_polygon_area(core) < _polygon_area(VERTICES) * (1 - 1e-9)):
            axes.add_patch(Polygon(VERTICES, closed = True, facecolor = "black", edgecolor = "none", alpha = SHADE_ALPHA, gid = "unstable-region"))
            if (len(core) >= 3):
                axes.add_patch(Polygon(core, closed = True, facecolor = "white", edgecolor = "black", linewidth = 0.8, linestyle = "--", gid = "core-region"))

        axes.add_patch(Polygon(VERTICES, closed = True, fill = False, edgecolor = "black", linewidth = 1.2, gid = "imputations"))

        for index, (x, y) in enumerate(VERTICES):
            axes.annotate(f"SP{index + 1}", (x, y), xytext = (0, 10 if index == 0 else -18), textcoords = "offset points", ha = "center", fontsize = 14)

        markers = ["o", "s", "^", "D", "v", "P"]
        for index, point in enumerate(mapped):
            x, y = point.cartesian
            axes.plot([x], [y], marker = markers[index % len(markers)], markersize = 9, color = "black", linestyle = "none", gid = f"point-{index}")
            axes.annotate(point.label, (x, y), xytext = (8, 6), textcoords = "offset points", fontsize = 12)

        if title:
            axes.set_title(title, fontsize = 14)

        figure.savefig(file, format = "svg", metadata = {"Date": None})

    log(f"> [meshcoop.Barycentric]: Rendered {len(mapped)} allocation(s) on the imputation triangle.")

    return mapped
