"""LBP and E-LBP code computation.

An E-LBP operator compares the mean intensity of a central point-set against
the means of eight neighbouring point-sets whose anchors sit ``range`` pixels
away in the eight compass directions. Means are compared exactly by
cross-multiplying integer sums with set sizes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ImageTooSmallError, OutOfBoundsError
from .imaging import GrayImage

# Clockwise from the top-left neighbour; the first direction is the MSB.
DIRECTIONS: Tuple[Tuple[int, int], ...] = (
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
)

_OFFSETS = {
    1: ((0, 0),),
    4: ((0, 0), (1, 0), (0, 1), (1, 1)),
    9: tuple((dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1)),
}


@dataclass(frozen=True)
class PointSetTopology:
    size_tag: int
    offsets: Tuple[Tuple[int, int], ...]

    @classmethod
    def of(cls, size_tag: int) -> "PointSetTopology":
        try:
            return cls(size_tag, _OFFSETS[size_tag])
        except KeyError:
            raise ValueError(f"topology must be one of 1, 4, 9; got {size_tag!r}") from None

    def __post_init__(self):
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError("topology offsets must be distinct")

    @property
    def count(self) -> int:
        return len(self.offsets)

    @property
    def min_dx(self) -> int:
        return min(dx for dx, _ in self.offsets)

    @property
    def max_dx(self) -> int:
        return max(dx for dx, _ in self.offsets)

    @property
    def min_dy(self) -> int:
        return min(dy for _, dy in self.offsets)

    @property
    def max_dy(self) -> int:
        return max(dy for _, dy in self.offsets)


@dataclass(frozen=True)
class OperatorParams:
    """Neighbour-set topology, central-set topology and range of an operator."""

    neighbor_topology: PointSetTopology
    central_topology: PointSetTopology
    range: int

    def __post_init__(self):
        if int(self.range) != self.range or self.range < 1:
            raise ValueError(f"range must be an integer >= 1, got {self.range!r}")

    @classmethod
    def create(cls, x: int = 4, y: int = 9, r: int = 5) -> "OperatorParams":
        return cls(PointSetTopology.of(x), PointSetTopology.of(y), r)

    @classmethod
    def classic(cls) -> "OperatorParams":
        return cls.create(1, 1, 1)

    @property
    def x(self) -> int:
        return self.neighbor_topology.size_tag

    @property
    def y(self) -> int:
        return self.central_topology.size_tag

    @property
    def r(self) -> int:
        return self.range

    @property
    def name(self) -> str:
        if (self.x, self.y, self.r) == (1, 1, 1):
            return "LBP"
        return f"E-LBP_{self.x}_{self.y}_{self.r}"

    def margins(self) -> Tuple[int, int, int, int]:
        """(left, top, right, bottom) border widths without codes."""
        topos = (self.neighbor_topology, self.central_topology)
        r = self.range
        left = r + max(-min(t.min_dx for t in topos), 0)
        right = r + max(max(t.max_dx for t in topos), 0)
        top = r + max(-min(t.min_dy for t in topos), 0)
        bottom = r + max(max(t.max_dy for t in topos), 0)
        return left, top, right, bottom


@dataclass(frozen=True, eq=False)
class CodeImage:
    origin: Tuple[int, int]
    codes: np.ndarray  # (height, width) uint8

    @property
    def width(self) -> int:
        return self.codes.shape[1]

    @property
    def height(self) -> int:
        return self.codes.shape[0]

    def __eq__(self, other):
        if not isinstance(other, CodeImage):
            return NotImplemented
        return self.origin == other.origin and np.array_equal(self.codes, other.codes)

    def to_image(self) -> GrayImage:
        return GrayImage(self.codes)


def lbp_code(img: GrayImage, x: int, y: int) -> int:
    """Classic 3x3 LBP code at column ``x``, row ``y``."""
    if not (1 <= x <= img.width - 2 and 1 <= y <= img.height - 2):
        raise OutOfBoundsError(f"({x}, {y}) has no full 3x3 neighbourhood in {img!r}")
    p = img.pixels
    centre = int(p[y, x])
    code = 0
    for dx, dy in DIRECTIONS:
        code = (code << 1) | (int(p[y + dy, x + dx]) >= centre)
    return code


def _set_sum(p: np.ndarray, x: int, y: int, topo: PointSetTopology) -> int:
    h, w = p.shape
    total = 0
    for dx, dy in topo.offsets:
        sx, sy = x + dx, y + dy
        if not (0 <= sx < w and 0 <= sy < h):
            raise OutOfBoundsError(f"sample ({sx}, {sy}) outside {w}x{h} image")
        total += int(p[sy, sx])
    return total


def elbp_code(img: GrayImage, x: int, y: int, params: OperatorParams) -> int:
    """E-LBP code at a single pixel (scalar reference path)."""
    p = img.pixels
    central = params.central_topology
    neighbor = params.neighbor_topology
    c_sum = _set_sum(p, x, y, central)
    code = 0
    for dx, dy in DIRECTIONS:
        n_sum = _set_sum(p, x + params.range * dx, y + params.range * dy, neighbor)
        code = (code << 1) | (n_sum * central.count >= c_sum * neighbor.count)
    return code


def _box_sum(p: np.ndarray, topo: PointSetTopology, x0: int, y0: int, w: int, h: int) -> np.ndarray:
    """Set sums for anchors (x0..x0+w-1, y0..y0+h-1)."""
    acc = np.zeros((h, w), dtype=np.int64)
    for dx, dy in topo.offsets:
        acc += p[y0 + dy : y0 + dy + h, x0 + dx : x0 + dx + w]
    return acc


def code_image(img: GrayImage, params: OperatorParams) -> CodeImage:
    """E-LBP codes over every pixel whose samples all fall inside the image."""
    left, top, right, bottom = params.margins()
    W, H = img.width, img.height
    w = W - left - right
    h = H - top - bottom
    if w < 1 or h < 1:
        raise ImageTooSmallError(
            f"{W}x{H} image too small for {params.name} (margins l={left} t={top} r={right} b={bottom})"
        )
    p = img.pixels.astype(np.int64)
    central = params.central_topology
    neighbor = params.neighbor_topology
    c_scaled = _box_sum(p, central, left, top, w, h) * neighbor.count
    codes = np.zeros((h, w), dtype=np.int64)
    r = params.range
    for dx, dy in DIRECTIONS:
        n_sum = _box_sum(p, neighbor, left + r * dx, top + r * dy, w, h)
        codes = (codes << 1) | (n_sum * central.count >= c_scaled)
    return CodeImage((left, top), codes.astype(np.uint8))
