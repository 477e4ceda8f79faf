"""Closed-form limit permutons and the min-plus product on height functions.

The height function of the limit of thinned-word samples over a shape family
with boundary functions (phi, psi) solves a fixed-point equation in the
hydrodynamic displacement rate ``c_p``; on the rough region K the solution is
the explicit radical formula ``f_p``, and outside K it saturates one of the
four clamps (the frozen corner regions).  ``h_p`` evaluates the correct
branch everywhere by locating the crossing of the monotone fixed-point map,
which coincides with the clamped formula on K.

The min-plus (tropical) product of two height functions,
``min_g(A(g, y) + B(x, g))``, realizes the Demazure product at the level of
measures; on integer permutation grids it is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hecke import HeightGrid, Permutation, make_rng
from .shapes import BoundaryFunction
from .tasep import c_p

__all__ = [
    "BoundaryPair",
    "REGION_K",
    "REGION_SE",
    "REGION_SW",
    "REGION_NE",
    "REGION_NW",
    "f_p",
    "h_p",
    "classify_region",
    "in_kpz_region",
    "fluctuation_scale",
    "trace_se_boundary",
    "trace_nw_boundary",
    "star",
    "common_refinement",
    "rotate",
    "uniform_height_grid",
    "nu_height",
    "rectangle_nu_check",
    "PolyphemusGeometry",
    "polyphemus_geometry",
    "AnalyticPermuton",
    "sample_from_permuton",
    "analytic_from_json",
    "analytic_to_json",
    "staircase_pair",
    "peridot_pair",
    "parallelogram_pair",
]

REGION_K = "K"
REGION_SE = "P_se"
REGION_SW = "P_sw"
REGION_NE = "P_ne"
REGION_NW = "P_nw"

MAX_REFINED_RESOLUTION = 8192


@dataclass(frozen=True)
class BoundaryPair:
    """Ordered pair of boundary functions with phi <= psi pointwise."""

    phi: BoundaryFunction
    psi: BoundaryFunction

    def __post_init__(self):
        zs = np.union1d(self.phi.zs, self.psi.zs)
        if np.any(self.phi(zs) > self.psi(zs) + 1e-12):
            raise ValueError("phi must stay weakly below psi")

    def gap(self, x: float, y: float) -> float:
        """psi(x) - phi(y), the effective number of update rounds at (x, y)."""
        return float(self.psi(x)) - float(self.phi(y))


def staircase_pair() -> BoundaryPair:
    return BoundaryPair(BoundaryFunction.constant(0.0), BoundaryFunction.linear(1.0))


def peridot_pair(beta: float, offset: float = 0.0) -> BoundaryPair:
    """Axis-parallel rectangle of width beta, optionally slid along the strip."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    return BoundaryPair(
        BoundaryFunction.rectangle_lower(beta, offset),
        BoundaryFunction.rectangle_upper(beta, offset),
    )


def parallelogram_pair(alpha: float, beta: float) -> BoundaryPair:
    """Strip parallelogram with diagonal sides: phi = beta z, psi = beta z + alpha."""
    if alpha < 0 or not 0 <= beta <= 1:
        raise ValueError("requires alpha >= 0 and beta in [0, 1]")
    return BoundaryPair(
        BoundaryFunction.linear(beta), BoundaryFunction.linear(beta, alpha)
    )


def f_p(bp: BoundaryPair, p: float, x: float, y: float) -> float:
    """Interior fixed-point formula; partial, valid where its radicand is >= 0."""
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    s = bp.gap(x, y)
    if p == 1.0:
        return s + y - x
    rad = (1 - p) * s * (s - x + y)
    if rad < 0:
        raise ValueError(f"radicand negative at ({x}, {y}); point lies outside K")
    return ((2 - p) * s + y - x - 2 * math.sqrt(rad)) / p


def _cp_gap(p: float, a: float, s: float) -> float:
    """c_p against a possibly nonpositive round count (no rounds, no motion)."""
    if s <= 0:
        return 0.0
    return c_p(p, a, s)


def h_p(bp: BoundaryPair, p: float, x: float, y: float) -> float:
    """Limit height function for thinning probability p at the point (x, y).

    Locates the crossing of the decreasing map h -> c_p(x-y+h, psi(x)-phi(y))
    against h on the admissible interval; the interior crossing is f_p and
    the ends are the frozen-region values, which reproduces the clamped
    formula min(max(0, y-x, f_p), 1-x, y) wherever that formula is a genuine
    fixed point.
    """
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    lo = max(0.0, y - x)
    hi = min(1.0 - x, y)
    if hi <= lo:
        return lo
    s = bp.gap(x, y)
    if p == 1.0:
        return min(max(lo, s + y - x), hi)
    if s <= 0:
        return lo
    if _cp_gap(p, x - y + lo, s) <= lo:
        return lo
    if _cp_gap(p, x - y + hi, s) >= hi:
        return hi
    return f_p(bp, p, x, y)


def classify_region(bp: BoundaryPair, p: float, x: float, y: float) -> str:
    """Frozen-corner label or K, by the displacement-rate conditions.

    Ties on shared boundaries break in the order P_se, P_nw, P_sw, P_ne.
    At p = 1 the northwest condition degenerates to a sign test on the gap.
    """
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    s = bp.gap(x, y)
    if p * s <= x - y:
        return REGION_SE
    if p == 1.0:
        nw = s < 0 or (s == 0 and y >= x)
    else:
        nw = p * s / (1 - p) <= y - x
    if nw:
        return REGION_NW
    if _cp_inf(p, x, s) >= y:
        return REGION_SW
    if _cp_inf(p, 1 - y, s) >= 1 - x:
        return REGION_NE
    return REGION_K


def _cp_inf(p: float, a: float, s: float) -> float:
    if s <= 0:
        return 0.0
    if p == 1.0:
        return math.inf if s > a else 0.0
    return c_p(p, a, s)


def in_kpz_region(bp: BoundaryPair, p: float, x: float, y: float) -> bool:
    """Strict membership in the rough region via the interior formula.

    The explicit radical expression is a root of the squared fixed-point
    equation, so besides the clamp inequalities it must actually satisfy
    c_p(x-y+f, gap) = f; the squared equation picks up a sign-flipped
    spurious root on the far side of the northwest frozen boundary (the
    difference f - (y-x) is a perfect square vanishing exactly there).
    """
    if not 0 < p < 1:
        raise ValueError("the rough region is defined for p in (0, 1)")
    s = bp.gap(x, y)
    rad = (1 - p) * s * (s - x + y)
    if rad < 0:
        return False
    f = ((2 - p) * s + y - x - 2 * math.sqrt(rad)) / p
    if not max(0.0, y - x) < f < min(1.0 - x, y):
        return False
    return abs(_cp_gap(p, x - y + f, s) - f) <= 1e-9 * max(1.0, abs(f))


def fluctuation_scale(bp: BoundaryPair, p: float, x: float, y: float) -> float:
    """One-n scale of height fluctuations at a rough point: v_p * n^{-2/3} units."""
    from .tasep import v_p

    h = h_p(bp, p, x, y)
    return v_p(p, x - y + h, bp.gap(x, y))


def trace_se_boundary(bp: BoundaryPair, p: float, x: float, tol: float = 1e-12) -> float:
    """y on the northwest boundary of the southeast frozen region above x.

    Solves p(psi(x) - phi(y)) = x - y; the left side minus the right is
    strictly increasing in y, so bisection applies.
    """
    lo, hi = 0.0, 1.0

    def g(y):
        return x - y - p * bp.gap(x, y)

    if g(0.0) < 0:
        return 0.0
    if g(1.0) > 0:
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def trace_nw_boundary(bp: BoundaryPair, p: float, x: float, tol: float = 1e-12) -> float:
    """y on the southeast boundary of the northwest frozen region above x."""
    if p == 1.0:
        raise ValueError("northwest region degenerates at p = 1")
    lo, hi = 0.0, 1.0

    def g(y):
        return y - x - p * bp.gap(x, y) / (1 - p)

    if g(1.0) < 0:
        return 1.0
    if g(0.0) > 0:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def star(a: HeightGrid, b: HeightGrid) -> HeightGrid:
    """Min-plus product of two height grids of equal resolution.

    out[i][j] = min over g of a[g][j] + b[i][g]; exact on permutation grids
    since each summand is piecewise linear with breakpoints on the grid.
    """
    if a.n != b.n:
        raise ValueError("resolution mismatch; apply common_refinement first")
    n = a.n
    ca = a.counts
    cb = b.counts
    dtype = np.result_type(ca.dtype, cb.dtype)
    out = np.empty((n + 1, n + 1), dtype=dtype)
    chunk = max(1, 8_000_000 // ((n + 1) * (n + 1)))
    for i0 in range(0, n + 1, chunk):
        i1 = min(i0 + chunk, n + 1)
        block = cb[i0:i1, :, None] + ca[None, :, :]
        out[i0:i1] = block.min(axis=1)
    return HeightGrid(n, out)


def _refine(grid: HeightGrid, m: int) -> HeightGrid:
    if m == grid.n:
        return grid
    pts = np.arange(m + 1) / m
    xs, ys = np.meshgrid(pts, pts, indexing="ij")
    vals = grid.value(xs, ys) * m
    rounded = np.round(vals)
    if np.max(np.abs(vals - rounded)) < 1e-9:
        return HeightGrid(m, rounded.astype(np.int64))
    return HeightGrid(m, vals)


def common_refinement(a: HeightGrid, b: HeightGrid,
                      max_resolution: int = MAX_REFINED_RESOLUTION):
    """Bilinearly resample both grids onto the lcm resolution (capped)."""
    m = math.lcm(a.n, b.n)
    if m > max_resolution:
        raise ValueError(
            f"common refinement {m} exceeds the configured cap {max_resolution}"
        )
    return _refine(a, m), _refine(b, m)


def uniform_height_grid(n: int) -> HeightGrid:
    """Integer-rounded grid of the uniform measure, (1-x) y."""
    i = np.arange(n + 1)[:, None]
    j = np.arange(n + 1)[None, :]
    return HeightGrid(n, np.round((n - i) * j / n).astype(np.int64))


def rotate(obj):
    """Rotate a grid or analytic permuton by a half turn.

    On height functions: H'(x, y) = y - x + H(1-x, 1-y); an involution that
    carries the identity to itself and commutes with the min-plus product.
    """
    if isinstance(obj, HeightGrid):
        n = obj.n
        i = np.arange(n + 1)[:, None]
        j = np.arange(n + 1)[None, :]
        return HeightGrid(n, (j - i) + obj.counts[::-1, ::-1])
    if isinstance(obj, AnalyticPermuton):
        inner = obj

        def hrot(x, y):
            return y - x + inner.height(1 - x, 1 - y)

        return AnalyticPermuton(f"rotate({obj.kind})", hrot, {"inner": obj})
    raise TypeError(f"cannot rotate {type(obj).__name__}")


def nu_height(alpha: float, beta: float, x: float, y: float) -> float:
    """Height function of the permuted-bubble-sort limit with parameters (alpha, beta).

    Direct formula below the horizontal level 1 - beta; above it, evaluate
    the half-turn image, which swaps beta and 1 - beta.
    """
    if alpha <= 0 or not 0 <= beta <= 1:
        raise ValueError("requires alpha > 0 and beta in [0, 1]")
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise ValueError("evaluation point must lie in the unit square")
    if y <= 1 - beta:
        thresh = alpha / (1 - beta) if beta < 1 else math.inf
        q = max(0.0, x - thresh)
        return min((1 - q) * y, 1 - x)
    return y - x + nu_height(alpha, 1 - beta, 1 - x, 1 - y)


def rectangle_nu_check(beta: float, x: float, y: float) -> float:
    """Independent closed form for the rectangle-word limit (alpha = beta(1-beta))."""
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    if x <= beta:
        return min(y, (beta - x) * y + 1 - beta)
    return y - x + rectangle_nu_check(1 - beta, 1 - x, 1 - y)


@dataclass(frozen=True)
class PolyphemusGeometry:
    """Tangency data of the two frozen-arc conics of a trapezoid limit."""

    p: float
    alpha: float
    beta: float
    R: float
    tangent_sw: tuple
    tangent_ne: tuple
    degeneration_threshold: float

    def on_sw_conic(self, x: float, y: float, tol: float = 1e-9) -> bool:
        p, a, b, R = self.p, self.alpha, self.beta, self.R
        lhs = (x - y + p * (b * x + (1 - a) * y + R)) ** 2
        rhs = 4 * p * x * (b * x - a * y + R)
        return abs(lhs - rhs) <= tol

    def on_ne_conic(self, x: float, y: float, tol: float = 1e-9) -> bool:
        p, a, b, R = self.p, self.alpha, self.beta, self.R
        lhs = (x - y + p * (1 + R - (1 - b) * x - a * y)) ** 2
        rhs = 4 * p * (1 - y) * (b * x - a * y + R)
        return abs(lhs - rhs) <= tol

    def collapses_to_antidiagonal(self) -> bool:
        return self.R >= self.degeneration_threshold


def polyphemus_geometry(p: float, alpha: float, beta: float, R: float) -> PolyphemusGeometry:
    """Tangency points, degeneration threshold and conic tests for a trapezoid."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if not (0 <= alpha <= 1 and 0 <= beta <= 1):
        raise ValueError("alpha and beta must lie in [0, 1]")
    if R < max(0.0, beta - alpha):
        raise ValueError("R must be at least max(0, beta - alpha)")
    tangent_sw = (
        (0.0, p * R / (1 - p * (1 - alpha))),
        (p * R / (1 - p * beta), 0.0),
    )
    tangent_ne = (
        (1.0, (1 - p * beta - p * R) / (1 - p * alpha)),
        ((1 - p * (1 - alpha) - p * R) / (1 - p * (1 - beta)), 1.0),
    )
    threshold = (
        2 - (1 - alpha + beta) * p + math.sqrt((1 - alpha - beta) ** 2 * p**2 + 4 * (1 - p))
    ) / (2 * p)
    return PolyphemusGeometry(p, alpha, beta, R, tangent_sw, tangent_ne, threshold)


# number of gamma samples in the coarse pass of the min-plus minimization
_GAMMA_GRID = 2001


def _gamma_min(f, g, x: float, y: float) -> float:
    """min over gamma of f(gamma, y) + g(x, gamma), grid pass plus refinement.

    Both summands are 1-Lipschitz in gamma, so the coarse pass is within one
    grid spacing of the true minimum; the local ternary search tightens the
    result to ~1e-6.
    """
    gammas = np.linspace(0.0, 1.0, _GAMMA_GRID)
    vals = np.array([f(gm, y) + g(x, gm) for gm in gammas])
    k = int(np.argmin(vals))
    lo = gammas[max(0, k - 1)]
    hi = gammas[min(_GAMMA_GRID - 1, k + 1)]
    for _ in range(40):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if f(m1, y) + g(x, m1) <= f(m2, y) + g(x, m2):
            hi = m2
        else:
            lo = m1
    gm = 0.5 * (lo + hi)
    return min(float(vals[k]), f(gm, y) + g(x, gm))


class AnalyticPermuton:
    """A permuton given by a closed-form (or grid-backed) height function."""

    def __init__(self, kind: str, height_fn, params: dict | None = None):
        self.kind = kind
        self._height = height_fn
        self.params = params or {}

    def height(self, x: float, y: float) -> float:
        x = min(1.0, max(0.0, float(x)))
        y = min(1.0, max(0.0, float(y)))
        return float(self._height(x, y))

    def height_matrix(self, resolution: int) -> np.ndarray:
        pts = np.arange(resolution + 1) / resolution
        return np.array([[self.height(x, y) for y in pts] for x in pts])

    def __repr__(self):
        return f"AnalyticPermuton({self.kind})"

    # --- constructors -----------------------------------------------------

    @classmethod
    def uniform(cls) -> "AnalyticPermuton":
        return cls("uniform", lambda x, y: (1 - x) * y)

    @classmethod
    def identity(cls) -> "AnalyticPermuton":
        return cls("identity", lambda x, y: max(0.0, y - x))

    @classmethod
    def antidiagonal(cls) -> "AnalyticPermuton":
        return cls("antidiagonal", lambda x, y: min(y, 1 - x))

    @classmethod
    def grid_backed(cls, grid: HeightGrid) -> "AnalyticPermuton":
        return cls("grid", lambda x, y: float(grid.value(x, y)), {"grid": grid})

    @classmethod
    def pipedream_limit(cls, bp: BoundaryPair, p: float) -> "AnalyticPermuton":
        return cls(
            "pipedream-limit",
            lambda x, y: h_p(bp, p, x, y),
            {"boundary": bp, "p": p},
        )

    @classmethod
    def bubble_nu(cls, alpha: float, beta: float) -> "AnalyticPermuton":
        return cls(
            "bubble-nu",
            lambda x, y: nu_height(alpha, beta, x, y),
            {"alpha": alpha, "beta": beta},
        )

    @classmethod
    def star_product(cls, factors) -> "AnalyticPermuton":
        factors = list(factors)
        if not factors:
            raise ValueError("star product needs at least one factor")
        acc = factors[0]
        for nxt in factors[1:]:
            left, right = acc, nxt
            acc = cls(
                f"star({left.kind}, {right.kind})",
                lambda x, y, L=left, R=right: _gamma_min(L.height, R.height, x, y),
                {"factors": (left, right)},
            )
        return acc

    # --- sampling ----------------------------------------------------------

    def sample_points(self, k: int, rng) -> np.ndarray:
        rng = make_rng(rng)
        if self.kind == "uniform":
            return rng.random((k, 2))
        if self.kind == "identity":
            u = rng.random(k)
            return np.column_stack([u, u])
        if self.kind == "antidiagonal":
            u = rng.random(k)
            return np.column_stack([u, 1 - u])
        if self.kind == "grid":
            return _sample_grid_points(self.params["grid"], k, rng)
        return _sample_inverse_cdf(self, k, rng)


def _sample_grid_points(grid: HeightGrid, k: int, rng) -> np.ndarray:
    n = grid.n
    c = np.asarray(grid.counts, dtype=float)
    # cell (i, j) mass from the mixed second difference of the height counts
    mass = (c[:-1, 1:] - c[1:, 1:] - c[:-1, :-1] + c[1:, :-1]) / n
    mass = np.clip(mass, 0.0, None)
    flat = mass.ravel()
    total = flat.sum()
    if total <= 0:
        raise ValueError("grid carries no mass")
    idx = rng.choice(flat.size, size=k, p=flat / total)
    ii, jj = np.divmod(idx, n)
    offs = rng.random((k, 2))
    return np.column_stack([(ii + offs[:, 0]) / n, (jj + offs[:, 1]) / n])


def _conditional_cdf(perm: AnalyticPermuton, x: float, y: float) -> float:
    h = 1e-5
    x0 = min(1 - h, max(h, x))
    return (perm.height(x0 - h, y) - perm.height(x0 + h, y)) / (2 * h)


def _sample_inverse_cdf(perm: AnalyticPermuton, k: int, rng) -> np.ndarray:
    xs = rng.random(k)
    us = rng.random(k)
    ys = np.empty(k)
    for t in range(k):
        lo, hi = 0.0, 1.0
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if _conditional_cdf(perm, xs[t], mid) < us[t]:
                lo = mid
            else:
                hi = mid
        ys[t] = 0.5 * (lo + hi)
    return np.column_stack([xs, ys])


def sample_from_permuton(perm: AnalyticPermuton, k: int, seed) -> Permutation:
    """Relative order of k independent draws from the permuton."""
    if k < 1:
        raise ValueError("k must be >= 1")
    pts = perm.sample_points(k, make_rng(seed))
    order = np.argsort(pts[:, 0], kind="stable")
    ys = pts[order, 1]
    ranks = np.empty(k, dtype=np.int64)
    ranks[np.argsort(ys, kind="stable")] = np.arange(1, k + 1)
    return Permutation(ranks)


def analytic_to_json(perm: AnalyticPermuton) -> dict:
    """Spec form {kind, params}; inverse of analytic_from_json."""
    kind = perm.kind
    if kind in ("uniform", "identity", "antidiagonal"):
        return {"kind": kind, "params": {}}
    if kind == "grid":
        return {"kind": "grid", "params": {"grid": perm.params["grid"].to_json()}}
    if kind == "pipedream-limit":
        bp = perm.params["boundary"]
        return {
            "kind": "pipedream-limit",
            "params": {
                "p": perm.params["p"],
                "phi": bp.phi.to_json(),
                "psi": bp.psi.to_json(),
            },
        }
    if kind == "bubble-nu":
        return {
            "kind": "bubble-nu",
            "params": {"alpha": perm.params["alpha"], "beta": perm.params["beta"]},
        }
    if kind.startswith("star("):
        left, right = perm.params["factors"]
        return {
            "kind": "star-product",
            "params": {"factors": [analytic_to_json(left), analytic_to_json(right)]},
        }
    if kind.startswith("rotate("):
        return {"kind": "rotate", "params": {"inner": analytic_to_json(perm.params["inner"])}}
    raise ValueError(f"cannot serialize analytic permuton of kind {kind!r}")


def analytic_from_json(data: dict) -> AnalyticPermuton:
    kind = data.get("kind")
    params = data.get("params", {})
    if kind == "uniform":
        return AnalyticPermuton.uniform()
    if kind == "identity":
        return AnalyticPermuton.identity()
    if kind == "antidiagonal":
        return AnalyticPermuton.antidiagonal()
    if kind == "grid":
        return AnalyticPermuton.grid_backed(HeightGrid.from_json(params["grid"]))
    if kind == "pipedream-limit":
        bp = BoundaryPair(
            BoundaryFunction.from_json(params["phi"]),
            BoundaryFunction.from_json(params["psi"]),
        )
        return AnalyticPermuton.pipedream_limit(bp, float(params["p"]))
    if kind == "bubble-nu":
        return AnalyticPermuton.bubble_nu(float(params["alpha"]), float(params["beta"]))
    if kind == "star-product":
        return AnalyticPermuton.star_product(
            [analytic_from_json(f) for f in params["factors"]]
        )
    if kind == "rotate":
        return rotate(analytic_from_json(params["inner"]))
    raise ValueError(f"unknown analytic permuton kind {kind!r}")
