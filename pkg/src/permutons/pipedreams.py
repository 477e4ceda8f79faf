"""Random pipe dreams over a shape and crossing resolution.

Each box of a shape is tiled with a cross or a bump; boxes added to complete
a non-order-convex shape carry deterministic golden bumps.  Resolution walks
the boxes in canonical order keeping a label per diagonal position: a cross
of content c swaps positions c, c+1 only when the labels there are still in
increasing order (the two pipes have not crossed yet); otherwise the crossing
is resolved into a bump.  The exit labels therefore equal the tau-fold of the
sampled subword, which is how ``demazure_sample`` computes them in bulk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hecke import Permutation, make_rng
from .shapes import Box, Shape, order_convex_completion

__all__ = [
    "CROSS",
    "BUMP",
    "GOLD",
    "PipeDream",
    "ResolvedPipeDream",
    "sample_pipedream",
    "resolve",
    "demazure_sample",
    "trace_pipes",
]

CROSS = "C"
BUMP = "B"
GOLD = "G"


@dataclass
class PipeDream:
    """Tile assignment over an order-convex shape (golden tiles are forced bumps)."""

    shape: Shape
    tiles: dict

    @property
    def n(self) -> int:
        return self.shape.n

    def tile(self, box) -> str:
        key = (box.x, box.y) if isinstance(box, Box) else (box[0], box[1])
        return self.tiles[key]

    def to_json(self):
        return {
            "shape": self.shape.to_json(),
            "tiles": [[x, y, t] for (x, y), t in sorted(self.tiles.items())],
        }

    @classmethod
    def from_json(cls, data) -> "PipeDream":
        shape = Shape.from_json(data["shape"])
        tiles = {(int(x), int(y)): str(t) for x, y, t in data["tiles"]}
        return cls(shape, tiles)


@dataclass
class ResolvedPipeDream:
    base: PipeDream
    resolved: frozenset
    exit_labels: Permutation

    def tile(self, box) -> str:
        key = (box.x, box.y) if isinstance(box, Box) else (box[0], box[1])
        t = self.base.tiles[key]
        return BUMP if (t == CROSS and key in self.resolved) else t


def _completed_with_mask(shape: Shape):
    """Completed shape plus, per canonical box, whether it is golden."""
    completed, added = order_convex_completion(shape)
    golden_cols = added.cols
    masks = []
    for x in sorted(completed.cols):
        ys = completed.cols[x]
        gys = golden_cols.get(x)
        if gys is None:
            masks.append(np.zeros(len(ys), dtype=bool))
        else:
            masks.append(np.isin(ys, gys))
    if masks:
        golden = np.concatenate(masks)
    else:
        golden = np.zeros(0, dtype=bool)
    return completed, golden


def sample_pipedream(shape: Shape, p: float, seed) -> PipeDream:
    """Independently tile each non-golden box with a cross with probability p.

    Uniform draws are assigned to the non-golden boxes in canonical order, so
    a (shape, p, seed) triple fully determines the tiling.
    """
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    rng = make_rng(seed)
    completed, golden = _completed_with_mask(shape)
    crossed = np.zeros(len(golden), dtype=bool)
    if p == 1:
        crossed[~golden] = True
    else:
        crossed[~golden] = rng.random(int((~golden).sum())) < p
    tiles = {}
    for idx, box in enumerate(completed.iter_boxes()):
        if golden[idx]:
            tiles[(box.x, box.y)] = GOLD
        else:
            tiles[(box.x, box.y)] = CROSS if crossed[idx] else BUMP
    return PipeDream(completed, tiles)


def resolve(pd: PipeDream) -> ResolvedPipeDream:
    """Resolve repeated crossings in canonical order; exit labels are the fold."""
    if not pd.shape.is_order_convex():
        raise ValueError("resolve requires an order-convex shape; complete it first")
    state = list(range(1, pd.n + 1))
    resolved = []
    for box in pd.shape.iter_boxes():
        if pd.tiles[(box.x, box.y)] == CROSS:
            c = box.content
            a, b = state[c - 1], state[c]
            if a < b:
                state[c - 1], state[c] = b, a
            else:
                resolved.append((box.x, box.y))
    return ResolvedPipeDream(pd, frozenset(resolved), Permutation(state))


def demazure_sample(shape: Shape, p: float, seed) -> Permutation:
    """Demazure product of the p-thinned canonical word of the shape.

    Equal to ``resolve(sample_pipedream(shape, p, seed)).exit_labels`` but
    works directly on letter arrays, which keeps large shapes cheap.
    """
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    rng = make_rng(seed)
    completed, golden = _completed_with_mask(shape)
    letters = completed.word_letters()
    if p == 1:
        kept = letters[~golden]
    else:
        keep = np.zeros(len(golden), dtype=bool)
        keep[~golden] = rng.random(int((~golden).sum())) < p
        kept = letters[keep]
    vals = list(range(1, shape.n + 1))
    for i in kept.tolist():
        a = vals[i - 1]
        b = vals[i]
        if a < b:
            vals[i - 1] = b
            vals[i] = a
    return Permutation(vals)


def trace_pipes(shape: Shape, tile_of):
    """Geometrically trace all pipes through a tiled order-convex shape.

    Pipe c slides in through the c-th step of the southwest bounding path,
    goes straight at crosses, turns at bumps, and leaves through the
    northeast boundary.  ``tile_of(box_pair) -> tile`` supplies the tiling
    after any resolution.  Returns ``(exit_labels, crossings, paths)`` where
    crossings maps unordered pipe pairs to the number of shared cross tiles
    and paths maps each pipe to its (box, entry edge) sequence.  This is the
    rendering backend and the independent oracle for the fold-based
    resolution.
    """
    from .shapes import _envelopes

    n = shape.n
    if shape.box_count == 0:
        return Permutation.identity(n), {}, {pipe: [] for pipe in range(1, n + 1)}
    lo, _hi = _envelopes(shape)
    exits = {}
    lane_users: dict = {}
    paths = {}
    for pipe in range(1, n + 1):
        x = int(lo[pipe])
        if lo[pipe] > lo[pipe - 1]:  # east step: enter from the south edge
            box, edge = (x - 1, x - pipe), "S"
        else:  # south step: enter from the west edge
            box, edge = (x, x - pipe), "W"
        path = []
        while True:
            if box in shape:
                path.append((box, edge))
                lane_users.setdefault(box, {})[edge] = pipe
                if tile_of(box) == CROSS:  # straight through, level changes
                    box, edge = (
                        ((box[0] + 1, box[1]), "W")
                        if edge == "W"
                        else ((box[0], box[1] + 1), "S")
                    )
                else:  # bump, level preserved
                    box, edge = (
                        ((box[0], box[1] + 1), "S")
                        if edge == "W"
                        else ((box[0] + 1, box[1]), "W")
                    )
            elif box[0] - box[1] == n and edge == "W":
                # cut box on the far strip boundary: forced elbow west-to-north
                box, edge = (box[0], box[1] + 1), "S"
            elif box[0] - box[1] == 0 and edge == "S":
                # cut box on the near strip boundary: forced elbow south-to-east
                box, edge = (box[0] + 1, box[1]), "W"
            else:
                level = box[0] - box[1]
                exits[pipe] = level if edge == "W" else level + 1
                break
        paths[pipe] = path
    labels = [0] * n
    for pipe, idx in exits.items():
        labels[idx - 1] = pipe
    crossings: dict = {}
    for box, users in lane_users.items():
        if tile_of(box) == CROSS and len(users) == 2:
            pair = tuple(sorted(users.values()))
            crossings[pair] = crossings.get(pair, 0) + 1
    return Permutation(labels), crossings, paths
