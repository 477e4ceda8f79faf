"""Boxes, lattice paths, boundary functions, and order-convex shapes.

A box is a unit square with lower-left corner (x, y), x > y; its content is
x - y, the adjacent-swap index it encodes.  Shapes are finite box sets; the
order-convex ones are exactly those bounded by two nested E/S lattice paths
running between the diagonals of content 0 and content n.

Paths are parametrized by content: a path in the strip crosses each diagonal
{x - y = c} exactly once, at x-coordinate ``crossing_x[c]``.  A box (x, y) of
content c lies weakly northeast of a path iff ``crossing_x[c] <= x`` and
weakly southwest iff ``crossing_x[c] >= x + 1``; shape construction,
order-convexity and minimal completion all reduce to these two sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hecke import Word

__all__ = [
    "Box",
    "LatticePath",
    "BoundaryFunction",
    "Shape",
    "shape_from_paths",
    "word_of_shape",
    "column_contents",
    "path_from_theta",
    "theta_of_path",
    "coxeter_path",
    "classical_coxeter_word",
    "bipartite_coxeter_word",
    "coxeter_power_shape",
    "order_convex_completion",
    "bounding_paths",
]

_BIG = 1 << 48


@dataclass(frozen=True, order=True)
class Box:
    x: int
    y: int

    def __post_init__(self):
        if self.x <= self.y:
            raise ValueError(f"box requires x > y, got ({self.x}, {self.y})")

    @property
    def content(self) -> int:
        return self.x - self.y


class LatticePath:
    """E/S lattice path of exactly n unit steps from the content-0 diagonal.

    >>> p = LatticePath((0, 0), "SSE")
    >>> p.points()
    [(0, 0), (0, -1), (0, -2), (1, -2)]
    """

    __slots__ = ("start", "steps", "crossing_x")

    def __init__(self, start, steps: str):
        x0, y0 = int(start[0]), int(start[1])
        if x0 != y0:
            raise ValueError("path must start on the content-0 diagonal (x = y)")
        steps = str(steps).upper()
        if not steps or any(s not in "ES" for s in steps):
            raise ValueError("steps must be a nonempty string over {E, S}")
        self.start = (x0, y0)
        self.steps = steps
        east = np.cumsum(np.frombuffer(steps.encode(), dtype=np.uint8) == ord("E"))
        self.crossing_x = np.concatenate(([x0], x0 + east)).astype(np.int64)

    @property
    def n(self) -> int:
        return len(self.steps)

    def points(self):
        pts = [self.start]
        x, y = self.start
        for s in self.steps:
            if s == "E":
                x += 1
            else:
                y -= 1
            pts.append((x, y))
        return pts

    def end(self):
        x = int(self.crossing_x[-1])
        return (x, x - self.n)

    def __eq__(self, other):
        return (
            isinstance(other, LatticePath)
            and self.start == other.start
            and self.steps == other.steps
        )

    def __repr__(self):
        return f"LatticePath(start={self.start}, steps={self.steps!r})"

    def translate(self, dx: int, dy: int) -> "LatticePath":
        return LatticePath((self.start[0] + dx, self.start[1] + dy), self.steps)

    def to_json(self):
        return {"start": list(self.start), "steps": self.steps}

    @classmethod
    def from_json(cls, data) -> "LatticePath":
        return cls(tuple(data["start"]), data["steps"])


class BoundaryFunction:
    """Piecewise-linear function on [0, 1] with all slopes in [0, 1].

    Together with z -> (theta(z), theta(z) - z) these parametrize the scaled
    boundary curves of shape sequences.
    """

    __slots__ = ("zs", "vals")

    def __init__(self, breakpoints):
        pts = sorted((float(z), float(v)) for z, v in breakpoints)
        zs = np.array([z for z, _ in pts])
        vals = np.array([v for _, v in pts])
        if len(zs) < 2 or abs(zs[0]) > 1e-12 or abs(zs[-1] - 1.0) > 1e-12:
            raise ValueError("breakpoints must span z = 0 to z = 1")
        if np.any(np.diff(zs) <= 0):
            raise ValueError("breakpoint abscissae must be strictly increasing")
        slopes = np.diff(vals) / np.diff(zs)
        if np.any(slopes < -1e-9) or np.any(slopes > 1 + 1e-9):
            raise ValueError("slopes must lie in [0, 1]")
        self.zs = zs
        self.vals = vals

    def __call__(self, z):
        return np.interp(z, self.zs, self.vals)

    @classmethod
    def constant(cls, c: float) -> "BoundaryFunction":
        return cls([(0.0, c), (1.0, c)])

    @classmethod
    def linear(cls, slope: float, offset: float = 0.0) -> "BoundaryFunction":
        return cls([(0.0, offset), (1.0, offset + slope)])

    @classmethod
    def rectangle_lower(cls, width: float, offset: float = 0.0) -> "BoundaryFunction":
        """Lower boundary of an axis-parallel strip rectangle of the given width."""
        h = 1.0 - width
        return cls([(0.0, offset), (h, offset), (1.0, offset + width)])

    @classmethod
    def rectangle_upper(cls, width: float, offset: float = 0.0) -> "BoundaryFunction":
        return cls([(0.0, offset), (width, offset + width), (1.0, offset + width)])

    def breakpoints(self):
        return list(zip(self.zs.tolist(), self.vals.tolist()))

    def to_json(self):
        return {"breakpoints": [[z, v] for z, v in self.breakpoints()]}

    @classmethod
    def from_json(cls, data) -> "BoundaryFunction":
        return cls([(z, v) for z, v in data["breakpoints"]])


class Shape:
    """A finite set of boxes with contents in [1, n-1], stored column-wise.

    ``cols`` maps a column abscissa x to the sorted array of box ordinates y.
    Canonical box order is west-to-east by column, south-to-north inside a
    column; the induced word lists each column's contents in decreasing runs.
    """

    __slots__ = ("n", "cols")

    def __init__(self, n: int, cols: dict):
        self.n = int(n)
        clean = {}
        for x, ys in sorted(cols.items()):
            arr = np.unique(np.asarray(ys, dtype=np.int64))
            if arr.size == 0:
                continue
            cs = int(x) - arr
            if cs.min() < 1 or cs.max() > self.n - 1:
                raise ValueError(
                    f"column {x} has contents outside 1..{self.n - 1}"
                )
            clean[int(x)] = arr
        self.cols = clean

    @classmethod
    def from_boxes(cls, n: int, boxes) -> "Shape":
        cols: dict = {}
        for b in boxes:
            x, y = (b.x, b.y) if isinstance(b, Box) else (int(b[0]), int(b[1]))
            cols.setdefault(x, []).append(y)
        return cls(n, cols)

    @classmethod
    def staircase(cls, n: int) -> "Shape":
        sw = LatticePath((0, 0), "S" * n)
        ne = LatticePath((0, 0), "E" * n)
        return shape_from_paths(sw, ne)

    @classmethod
    def rectangle(cls, width: int, height: int, n: int | None = None,
                  corner=(0, 0)) -> "Shape":
        """width x height block of boxes whose northwest-most box is at ``corner``.

        ``corner`` is the lower-left vertex of the top-left box, so the block
        occupies columns corner.x .. corner.x+width-1 and contents start at
        corner.x - corner.y + ... >= 1.
        """
        if width < 1 or height < 1:
            raise ValueError("rectangle needs width, height >= 1")
        x0, y0 = corner
        if n is None:
            n = width + height + (x0 - y0 - 1)
        cols = {x0 + i: y0 - np.arange(height, dtype=np.int64)
                for i in range(width)}
        return cls(n, cols)

    @property
    def box_count(self) -> int:
        return sum(len(ys) for ys in self.cols.values())

    def __contains__(self, box) -> bool:
        x, y = (box.x, box.y) if isinstance(box, Box) else (box[0], box[1])
        ys = self.cols.get(x)
        if ys is None:
            return False
        k = np.searchsorted(ys, y)
        return k < len(ys) and ys[k] == y

    def iter_boxes(self):
        """Boxes in canonical order: columns west to east, south to north."""
        for x in sorted(self.cols):
            for y in self.cols[x].tolist():
                yield Box(x, y)

    def boxes(self):
        return list(self.iter_boxes())

    def union(self, other: "Shape") -> "Shape":
        if self.n != other.n:
            raise ValueError("size mismatch")
        cols = {x: ys for x, ys in self.cols.items()}
        for x, ys in other.cols.items():
            if x in cols:
                cols[x] = np.union1d(cols[x], ys)
            else:
                cols[x] = ys
        return Shape(self.n, cols)

    def difference(self, other: "Shape") -> "Shape":
        cols = {}
        for x, ys in self.cols.items():
            rem = np.setdiff1d(ys, other.cols.get(x, np.empty(0, dtype=np.int64)))
            if rem.size:
                cols[x] = rem
        return Shape(self.n, cols)

    def column_letters(self):
        """Word letters in canonical order, as one int array per column.

        Ordinates ascend south to north, so contents come out decreasing.
        """
        return [np.int64(x) - self.cols[x] for x in sorted(self.cols)]

    def word_letters(self) -> np.ndarray:
        cols = self.column_letters()
        if not cols:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(cols)

    def is_order_convex(self) -> bool:
        completed, added = order_convex_completion(self)
        return added.box_count == 0

    def __eq__(self, other):
        return (
            isinstance(other, Shape)
            and self.n == other.n
            and self.cols.keys() == other.cols.keys()
            and all(np.array_equal(self.cols[x], other.cols[x]) for x in self.cols)
        )

    def __repr__(self):
        return f"Shape(n={self.n}, boxes={self.box_count})"

    def to_json(self):
        return {"n": self.n, "boxes": [[b.x, b.y] for b in self.iter_boxes()]}

    @classmethod
    def from_json(cls, data) -> "Shape":
        if "boxes" in data:
            return cls.from_boxes(int(data["n"]), data["boxes"])
        sw = LatticePath.from_json(data["sw"])
        ne = LatticePath.from_json(data["ne"])
        shape = shape_from_paths(sw, ne)
        if shape.n != int(data["n"]):
            raise ValueError("path length disagrees with declared n")
        return shape


def shape_from_paths(sw: LatticePath, ne: LatticePath) -> Shape:
    """Order-convex shape of all boxes between two nested paths.

    >>> s = shape_from_paths(LatticePath((0, 0), "SSS"), LatticePath((0, 0), "EEE"))
    >>> [(b.x, b.y) for b in s.iter_boxes()]
    [(0, -2), (0, -1), (1, -1)]
    """
    if sw.n != ne.n:
        raise ValueError("paths must have equal length")
    lo = sw.crossing_x
    hi = ne.crossing_x
    if np.any(lo > hi):
        raise ValueError("southwest path must stay weakly southwest of northeast path")
    n = sw.n
    return Shape(n, _columns_between(lo, hi, n))


def _columns_between(lo: np.ndarray, hi: np.ndarray, n: int) -> dict:
    """Column map of {(x, x-c) : lo[c] <= x < hi[c], 1 <= c <= n-1}.

    Both crossing arrays are nondecreasing, so the contents hitting a fixed
    column form one contiguous range found by binary search.
    """
    cols: dict = {}
    widths = hi[1:n] - lo[1:n]
    if n < 2 or not np.any(widths > 0):
        return cols
    live = np.arange(1, n)[widths > 0]
    xmin = int(lo[live].min())
    xmax = int((hi[live] - 1).max())
    for x in range(xmin, xmax + 1):
        c_hi = int(np.searchsorted(lo, x, side="right")) - 1
        c_lo = int(np.searchsorted(hi, x + 1, side="left"))
        c_hi = min(c_hi, n - 1)
        c_lo = max(c_lo, 1)
        if c_lo <= c_hi:
            cols[x] = x - np.arange(c_hi, c_lo - 1, -1, dtype=np.int64)
    return cols


def column_contents(shape: Shape):
    """Per-column content intervals (a_j, b_j), west to east.

    Requires every column to be a contiguous content interval (true for all
    order-convex shapes).
    """
    out = []
    for x in sorted(shape.cols):
        ys = shape.cols[x]
        if len(ys) != ys[-1] - ys[0] + 1:
            raise ValueError(f"column {x} is not a contiguous interval")
        out.append((int(x - ys[-1]), int(x - ys[0])))
    return out


def word_of_shape(shape: Shape) -> Word:
    """Canonical word: columns west to east, each read in decreasing contents.

    >>> word_of_shape(Shape.staircase(3)).letters
    (2, 1, 2)
    """
    if not shape.is_order_convex():
        raise ValueError("shape is not order-convex; apply order_convex_completion first")
    return Word(shape.n, tuple(int(v) for v in shape.word_letters()))


def path_from_theta(theta: BoundaryFunction, n: int) -> LatticePath:
    """Discretize a boundary function to an n-step path (round half up, clamped)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    zs = np.arange(n + 1) / n
    targets = np.floor(n * theta(zs) + 0.5).astype(np.int64)
    east = [targets[0]]
    for j in range(1, n + 1):
        e = min(max(targets[j], east[-1]), east[-1] + 1)
        east.append(e)
    steps = "".join("E" if east[j] > east[j - 1] else "S" for j in range(1, n + 1))
    return LatticePath((east[0], east[0]), steps)


def theta_of_path(path: LatticePath) -> BoundaryFunction:
    """Boundary function of the scaled path: slope 1 on east steps, 0 on south."""
    n = path.n
    zs = np.arange(n + 1) / n
    return BoundaryFunction(zip(zs, path.crossing_x / n))


def classical_coxeter_word(n: int) -> Word:
    return Word(n, tuple(range(1, n)))


def bipartite_coxeter_word(n: int) -> Word:
    """Odd letters first, then even ones."""
    return Word(n, tuple(range(1, n, 2)) + tuple(range(2, n, 2)))


def coxeter_path(word: Word) -> LatticePath:
    """Southwest path of the one-box-per-content ribbon encoding a Coxeter word.

    The word must use each letter of 1..n-1 exactly once.  Box content c+1 is
    placed east of box c when c+1 follows c in the word and south of it
    otherwise; the resulting path starts with a south step and ends east.
    """
    n = word.n
    if sorted(word.letters) != list(range(1, n)):
        raise ValueError("a Coxeter word uses each letter of 1..n-1 exactly once")
    position = {letter: idx for idx, letter in enumerate(word.letters)}
    xs = [0]
    for c in range(1, n - 1):
        xs.append(xs[-1] + (1 if position[c + 1] > position[c] else 0))
    # crossing_x over contents 0..n: start on the diagonal at the first box's x,
    # and append one forced east step at the end.
    crossings = [xs[0]] + xs + [xs[-1] + 1]
    steps = "".join("E" if crossings[c] > crossings[c - 1] else "S" for c in range(1, n + 1))
    return LatticePath((crossings[0], crossings[0]), steps)


def coxeter_power_shape(sw: LatticePath, t: int) -> Shape:
    """Shape whose word realizes t passes of the Coxeter-word operator.

    The northeast boundary is the southwest path with its first step turned
    east and its last step turned south, translated t-1 steps north and east.
    """
    if t < 1:
        raise ValueError("power t must be >= 1")
    if not (sw.steps.startswith("S") and sw.steps.endswith("E")):
        raise ValueError("Coxeter path must start with a south step and end with an east step")
    ne_steps = "E" + sw.steps[1:-1] + "S"
    ne = LatticePath(
        (sw.start[0] + t - 1, sw.start[1] + t - 1), ne_steps
    )
    return shape_from_paths(sw, ne)


def _diagonal_bounds(shape: Shape):
    """Per-content lower/upper column bounds (m_c, M_c) with sentinels."""
    n = shape.n
    m = np.full(n + 1, _BIG, dtype=np.int64)
    big_neg = -_BIG
    M = np.full(n + 1, big_neg, dtype=np.int64)
    for x, ys in shape.cols.items():
        cs = x - ys
        np.minimum.at(m, cs, x)
        np.maximum.at(M, cs, x + 1)
    return m, M


def _envelopes(shape: Shape):
    """Crossing arrays (lo, hi) of the tightest bounding paths containing the shape.

    ``lo`` is the pointwise-maximal southwest path, ``hi`` the pointwise-minimal
    northeast path; where they would cross (diagonally separated components)
    both pinch along the southwest envelope.
    """
    n = shape.n
    m, M = _diagonal_bounds(shape)
    lo = np.empty(n + 1, dtype=np.int64)
    hi = np.empty(n + 1, dtype=np.int64)
    # forward sweeps: A_c = min over c' <= c of m_{c'} + (c - c'); D_c = running max of M
    a = _BIG
    d = -_BIG
    A = np.empty(n + 1, dtype=np.int64)
    D = np.empty(n + 1, dtype=np.int64)
    for c in range(n + 1):
        a = min(a + 1, m[c])
        d = max(d, M[c])
        A[c] = a
        D[c] = d
    # backward sweeps: B_c = min over c' >= c of m_{c'}; C_c = max of M_{c'} - (c' - c)
    b = _BIG
    cc = -_BIG
    B = np.empty(n + 1, dtype=np.int64)
    C = np.empty(n + 1, dtype=np.int64)
    for c in range(n, -1, -1):
        b = min(b, m[c])
        cc = max(cc - 1, M[c])
        B[c] = b
        C[c] = cc
    lo = np.minimum(A, B)
    hi = np.maximum(np.maximum(C, D), lo)
    return lo, hi


def order_convex_completion(shape: Shape):
    """Smallest order-convex shape containing ``shape`` plus the added boxes.

    Minimality is per-diagonal where unambiguous; when path pinches are
    needed the southwest envelope route is the deterministic choice.
    Returns ``(completed, added)`` as shapes.
    """
    n = shape.n
    if shape.box_count == 0:
        empty = Shape(n, {})
        return empty, empty
    lo, hi = _envelopes(shape)
    completed = Shape(n, _columns_between(lo, hi, n))
    added = completed.difference(shape)
    return completed, added


def bounding_paths(shape: Shape):
    """Bounding lattice paths (sw, ne) of an order-convex shape."""
    if shape.box_count == 0:
        raise ValueError("empty shape has no bounding paths")
    completed, added = order_convex_completion(shape)
    if added.box_count:
        raise ValueError("shape is not order-convex")
    lo, hi = _envelopes(shape)
    sw = LatticePath(
        (int(lo[0]), int(lo[0])),
        "".join("E" if lo[c] > lo[c - 1] else "S" for c in range(1, shape.n + 1)),
    )
    ne = LatticePath(
        (int(hi[0]), int(hi[0])),
        "".join("E" if hi[c] > hi[c - 1] else "S" for c in range(1, shape.n + 1)),
    )
    return sw, ne
