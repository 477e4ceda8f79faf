"""Monte Carlo harness for the limit-theorem experiments, at desk scale.

Every experiment is a pure function of its dataclass config: trial t of an
experiment seeded with S draws from ``substream(S, t)``, so reports are
bit-for-bit reproducible for any worker count.  Reports are JSON-ready dicts
with per-point CSV rows on request.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial

import numpy as np

from .analytic import (
    AnalyticPermuton,
    BoundaryPair,
    classify_region,
    fluctuation_scale,
    h_p,
    in_kpz_region,
    nu_height,
    peridot_pair,
    rectangle_nu_check,
    REGION_K,
)
from .hecke import (
    Permutation,
    demazure_product,
    height_grid,
    inversions,
    pattern_densities,
    substream,
    uniform_random_permutation,
)
from .pipedreams import demazure_sample
from .shapes import (
    BoundaryFunction,
    LatticePath,
    Shape,
    coxeter_path,
    path_from_theta,
    shape_from_paths,
    word_of_shape,
)
from .tasep import c_p, simulate_displacements

__all__ = [
    "ConvergenceConfig",
    "FluctuationConfig",
    "HydrodynamicConfig",
    "BubbleConfig",
    "DoppelgangerConfig",
    "InversionConfig",
    "PatternConfig",
    "DoryConfig",
    "CompositeConfig",
    "convergence_experiment",
    "fluctuation_experiment",
    "hydrodynamic_experiment",
    "bubble_experiment",
    "doppelganger_experiment",
    "inversion_experiment",
    "pattern_experiment",
    "dory_experiment",
    "composite_shape_experiment",
    "exact_expected_star_inversions",
    "run_experiment",
    "write_report",
    "canonical_json",
    "interior_grid",
    "empirical_heights",
    "fold_word_onto",
    "slope_coxeter_path",
]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def interior_grid(resolution: int) -> np.ndarray:
    """Interior evaluation points i/resolution, i = 1..resolution-1."""
    if resolution < 2:
        raise ValueError("grid resolution must be >= 2")
    return np.arange(1, resolution) / resolution


def empirical_heights(u: Permutation, xs: np.ndarray) -> np.ndarray:
    """Matrix H_u(x, y) over the grid xs * xs."""
    g = height_grid(u)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    return np.asarray(g.value(gx, gy), dtype=float)


def _analytic_matrix(height_fn, xs: np.ndarray) -> np.ndarray:
    return np.array([[height_fn(x, y) for y in xs] for x in xs])


def _run_trials(fn, trials: int, workers: int):
    """Run fn(0..trials-1); fn must be picklable (a partial of a module fn)."""
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def fold_word_onto(v: Permutation, letters) -> Permutation:
    """Apply the sorting-operator word to v (letters act left to right)."""
    vals = list(v.values)
    for i in np.asarray(letters, dtype=np.int64).tolist():
        a = vals[i - 1]
        b = vals[i]
        if a < b:
            vals[i - 1] = b
            vals[i] = a
    return Permutation(vals)


def slope_coxeter_path(n: int, beta: float) -> LatticePath:
    """A one-pass word path with east fraction ~beta, valid as a Coxeter path."""
    base = path_from_theta(BoundaryFunction.linear(beta), n)
    steps = list(base.steps)
    steps[0] = "S"
    steps[-1] = "E"
    return LatticePath((0, 0), "".join(steps))


# --------------------------------------------------------------------------
# pipe-dream convergence and fluctuations


@dataclass
class ConvergenceConfig:
    phi: BoundaryFunction
    psi: BoundaryFunction
    p: float
    n_list: tuple = (500, 2000)
    trials: int = 1
    grid_resolution: int = 10
    seed: int = 0
    workers: int = 1


def _convergence_trial(cfg: ConvergenceConfig, n: int, base: int, t: int):
    shape = shape_from_paths(path_from_theta(cfg.phi, n), path_from_theta(cfg.psi, n))
    u = demazure_sample(shape, cfg.p, substream(cfg.seed, base + t))
    xs = interior_grid(cfg.grid_resolution)
    return empirical_heights(u, xs)


def convergence_experiment(cfg: ConvergenceConfig) -> dict:
    """Max/mean deviation of sampled heights from the analytic limit, per n."""
    bp = BoundaryPair(cfg.phi, cfg.psi)
    xs = interior_grid(cfg.grid_resolution)
    target = _analytic_matrix(lambda x, y: h_p(bp, cfg.p, x, y), xs)
    per_n = {}
    rows = []
    for idx, n in enumerate(cfg.n_list):
        base = idx * cfg.trials
        mats = _run_trials(partial(_convergence_trial, cfg, n, base),
                           cfg.trials, cfg.workers)
        devs = [np.abs(m - target) for m in mats]
        per_n[str(n)] = {
            "max_dev": float(np.max(devs)),
            "mean_dev": float(np.mean(devs)),
            "trial_max_devs": [float(d.max()) for d in devs],
        }
        for t, (m, d) in enumerate(zip(mats, devs)):
            for i, x in enumerate(xs):
                for j, y in enumerate(xs):
                    rows.append((n, t, float(x), float(y), float(m[i, j]),
                                 float(target[i, j]), float(d[i, j])))
    return {
        "experiment": "convergence",
        "p": cfg.p,
        "grid_resolution": cfg.grid_resolution,
        "seed": cfg.seed,
        "per_n": per_n,
        "max_dev": max(v["max_dev"] for v in per_n.values()),
        "mean_dev": float(np.mean([v["mean_dev"] for v in per_n.values()])),
        "rows": rows,
    }


@dataclass
class FluctuationConfig:
    phi: BoundaryFunction
    psi: BoundaryFunction
    p: float
    point: tuple = (0.5, 0.5)
    n_list: tuple = (256, 1024)
    trials: int = 300
    seed: int = 0
    workers: int = 1


def _height_at_point(u: Permutation, x: float, y: float) -> float:
    n = u.n
    i = int(round(x * n))
    j = int(round(y * n))
    vals = np.asarray(u.values)
    return float(np.sum(vals[i:] <= j)) / n


def _fluctuation_trial(cfg: FluctuationConfig, n: int, base: int, t: int) -> float:
    shape = shape_from_paths(path_from_theta(cfg.phi, n), path_from_theta(cfg.psi, n))
    u = demazure_sample(shape, cfg.p, substream(cfg.seed, base + t))
    return _height_at_point(u, *cfg.point)


def fluctuation_experiment(cfg: FluctuationConfig) -> dict:
    """Centering and scale of height fluctuations at one rough point.

    Estimates the standard deviation at each n, the empirical scaling
    exponent between consecutive sizes, and reports the predicted one-n
    fluctuation scale.  The full limiting law is out of scope; only the
    exponent and centering are checked.
    """
    x, y = cfg.point
    bp = BoundaryPair(cfg.phi, cfg.psi)
    if not in_kpz_region(bp, cfg.p, x, y):
        raise ValueError(f"evaluation point {cfg.point} lies outside the rough region")
    target = h_p(bp, cfg.p, x, y)
    scale = fluctuation_scale(bp, cfg.p, x, y)
    per_n = {}
    for idx, n in enumerate(cfg.n_list):
        base = idx * cfg.trials
        vals = np.array(
            _run_trials(partial(_fluctuation_trial, cfg, n, base),
                        cfg.trials, cfg.workers)
        )
        per_n[str(n)] = {
            "mean": float(vals.mean()),
            "std": float(vals.std(ddof=1)),
            "mean_dev": float(vals.mean() - target),
            "predicted_scale": scale * n ** (-2 / 3),
        }
    ns = list(cfg.n_list)
    stds = [per_n[str(n)]["std"] for n in ns]
    ratios = [stds[i + 1] / stds[i] for i in range(len(ns) - 1)]
    exponents = [
        -math.log(stds[i + 1] / stds[i]) / math.log(ns[i + 1] / ns[i])
        for i in range(len(ns) - 1)
    ]
    return {
        "experiment": "fluctuation",
        "p": cfg.p,
        "point": [x, y],
        "target_height": target,
        "per_n": per_n,
        "std_ratios": ratios,
        "exponent_estimates": exponents,
        "seed": cfg.seed,
    }


# --------------------------------------------------------------------------
# TASEP hydrodynamics


@dataclass
class HydrodynamicConfig:
    p: float = 0.5
    m: float = 0.25
    t: float = 1.0
    L_list: tuple = (500, 2000)
    trials: int = 200
    seed: int = 0


def hydrodynamic_experiment(cfg: HydrodynamicConfig) -> dict:
    """Monte Carlo mean of the scaled displacement against its limit c_p."""
    target = c_p(cfg.p, cfg.m, cfg.t)
    per_L = {}
    for idx, L in enumerate(cfg.L_list):
        k = int(L * cfg.m)
        steps = int(L * cfg.t)
        disp = simulate_displacements(k, steps, cfg.p, substream(cfg.seed, idx),
                                      trials=cfg.trials)
        vals = disp[:, k - 1] / L
        per_L[str(L)] = {
            "mean": float(vals.mean()),
            "std": float(vals.std(ddof=1)),
            "abs_dev": float(abs(vals.mean() - target)),
        }
    return {
        "experiment": "hydrodynamic",
        "p": cfg.p,
        "m": cfg.m,
        "t": cfg.t,
        "c_p": target,
        "per_L": per_L,
        "seed": cfg.seed,
    }


# --------------------------------------------------------------------------
# bubble-sort operators


@dataclass
class BubbleConfig:
    n: int = 2000
    alpha: float = 0.2
    beta: float = 1.0
    word: str = "classical"  # classical | bipartite | slope
    trials: int = 1
    grid_resolution: int = 10
    seed: int = 0
    workers: int = 1


def _bubble_word_path(cfg: BubbleConfig) -> LatticePath:
    from .shapes import bipartite_coxeter_word, classical_coxeter_word

    if cfg.word == "classical":
        return coxeter_path(classical_coxeter_word(cfg.n))
    if cfg.word == "bipartite":
        return coxeter_path(bipartite_coxeter_word(cfg.n))
    if cfg.word == "slope":
        return slope_coxeter_path(cfg.n, cfg.beta)
    raise ValueError(f"unknown word kind {cfg.word!r}")


def _bubble_trial(cfg: BubbleConfig, letters, t: int):
    v = uniform_random_permutation(cfg.n, substream(cfg.seed, t))
    u = fold_word_onto(v, letters)
    xs = interior_grid(cfg.grid_resolution)
    return empirical_heights(u, xs), _antidiagonal_mass(u)


def _antidiagonal_mass(u: Permutation, band: float = 0.02) -> float:
    n = u.n
    i = np.arange(1, n + 1) / n
    vals = np.asarray(u.values) / n
    return float(np.mean(np.abs(vals - (1 - i)) <= band))


def bubble_experiment(cfg: BubbleConfig) -> dict:
    """Repeated one-pass sorting words applied to a uniform start.

    Compares the empirical height grid with the closed-form limit for the
    word's slope parameter, and reports how much of the plot accumulates
    along the antidiagonal (the fully sorted section).
    """
    if cfg.alpha <= 0:
        raise ValueError("alpha must be positive")
    from .shapes import coxeter_power_shape

    t_power = int(cfg.alpha * cfg.n)
    if t_power < 1:
        raise ValueError("alpha * n must be at least 1")
    sw = _bubble_word_path(cfg)
    shape = coxeter_power_shape(sw, t_power)
    letters = shape.word_letters()
    xs = interior_grid(cfg.grid_resolution)
    target = _analytic_matrix(
        lambda x, y: nu_height(cfg.alpha, cfg.beta, x, y), xs
    )
    results = _run_trials(partial(_bubble_trial, cfg, letters),
                          cfg.trials, cfg.workers)
    devs = [np.abs(m - target) for m, _ in results]
    # mass predicted on the fully sorted antidiagonal segment
    lo = 1 - cfg.alpha / cfg.beta if cfg.beta > 0 else 1.0
    hi = cfg.alpha / (1 - cfg.beta) if cfg.beta < 1 else 1.0
    segment = max(0.0, min(1.0, hi) - max(0.0, lo))
    return {
        "experiment": "bubble",
        "n": cfg.n,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "word": cfg.word,
        "passes": t_power,
        "max_dev": float(np.max(devs)),
        "mean_dev": float(np.mean(devs)),
        "antidiagonal_occupancy": [float(m) for _, m in results],
        "antidiagonal_segment_mass": segment,
        "seed": cfg.seed,
    }


@dataclass
class DoppelgangerConfig:
    beta: float = 0.5
    n: int = 2000
    grid_resolution: int = 10
    seed: int = 0


def doppelganger_experiment(cfg: DoppelgangerConfig) -> dict:
    """Rectangle word versus slope-word power with matched parameters.

    Both operators applied to independent uniform starts should approach the
    same limit when the slope-word strength is beta(1-beta).
    """
    n, beta = cfg.n, cfg.beta
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    width = math.ceil(beta * n)
    height = math.floor((1 - beta) * n)
    if width < 1 or height < 1:
        raise ValueError("degenerate rectangle; n too small for this beta")
    from .shapes import coxeter_power_shape

    rect = Shape.rectangle(width, height, n=n, corner=(0, -1))
    rect_letters = rect.word_letters()
    alpha = beta * (1 - beta)
    t_power = int(alpha * n)
    par_shape = coxeter_power_shape(slope_coxeter_path(n, beta), t_power)
    par_letters = par_shape.word_letters()

    v1 = uniform_random_permutation(n, substream(cfg.seed, 0))
    v2 = uniform_random_permutation(n, substream(cfg.seed, 1))
    u_rect = fold_word_onto(v1, rect_letters)
    u_par = fold_word_onto(v2, par_letters)

    xs = interior_grid(cfg.grid_resolution)
    target = _analytic_matrix(lambda x, y: nu_height(alpha, beta, x, y), xs)
    cross = _analytic_matrix(lambda x, y: rectangle_nu_check(beta, x, y), xs)
    m_rect = empirical_heights(u_rect, xs)
    m_par = empirical_heights(u_par, xs)
    return {
        "experiment": "doppelganger",
        "n": n,
        "beta": beta,
        "alpha": alpha,
        "rect_max_dev": float(np.max(np.abs(m_rect - target))),
        "par_max_dev": float(np.max(np.abs(m_par - target))),
        "pair_max_dev": float(np.max(np.abs(m_rect - m_par))),
        "closed_form_crosscheck": float(np.max(np.abs(target - cross))),
        "seed": cfg.seed,
    }


# --------------------------------------------------------------------------
# products of uniform permutations


def exact_expected_star_inversions(n: int) -> Fraction:
    """Exhaustive E[inversions(u * v)] over all ordered pairs (small n only)."""
    if n > 5:
        raise ValueError("exhaustive expectation is intended for n <= 5")
    total = Fraction(0)
    perms = list(Permutation.all_of_size(n))
    for u in perms:
        for v in perms:
            total += inversions(demazure_product(u, v))
    return total / (len(perms) ** 2)


@dataclass
class InversionConfig:
    n: int = 1000
    trials: int = 20
    seed: int = 0
    exact_sizes: tuple = (2, 4)


def inversion_experiment(cfg: InversionConfig) -> dict:
    """Inversion density of the product of two independent uniform draws."""
    exact = {
        str(m): str(exact_expected_star_inversions(m)) for m in cfg.exact_sizes
    }
    ratios = []
    denom = math.comb(cfg.n, 2)
    for t in range(cfg.trials):
        rng = substream(cfg.seed, t)
        u = uniform_random_permutation(cfg.n, rng)
        v = uniform_random_permutation(cfg.n, rng)
        ratios.append(inversions(demazure_product(u, v)) / denom)
    return {
        "experiment": "inversion",
        "n": cfg.n,
        "trials": cfg.trials,
        "exact": exact,
        "ratios": ratios,
        "mean_ratio": float(np.mean(ratios)),
        "seed": cfg.seed,
    }


@dataclass
class PatternConfig:
    n: int = 500
    k: int = 2
    trials: int = 20
    seed: int = 0


def pattern_experiment(cfg: PatternConfig) -> dict:
    """Monte Carlo pattern densities of the product of two uniform draws."""
    if cfg.k not in (2, 3):
        raise ValueError("pattern experiment supports k in {2, 3}")
    sums: dict = {}
    for t in range(cfg.trials):
        rng = substream(cfg.seed, t)
        u = uniform_random_permutation(cfg.n, rng)
        v = uniform_random_permutation(cfg.n, rng)
        for pat, dens in pattern_densities(demazure_product(u, v), cfg.k).items():
            key = "".join(map(str, pat))
            sums[key] = sums.get(key, 0.0) + float(dens)
    means = {pat: val / cfg.trials for pat, val in sums.items()}
    return {
        "experiment": "pattern",
        "n": cfg.n,
        "k": cfg.k,
        "trials": cfg.trials,
        "mean_densities": means,
        "seed": cfg.seed,
    }


# --------------------------------------------------------------------------
# bounded-memory forgetting model


@dataclass
class DoryConfig:
    n: int = 200
    beta: float = 0.5
    trials: int = 50
    seed: int = 0


def _memory_direct(q: np.ndarray, k: int) -> np.ndarray:
    """Relevance factors forgotten each day, simulating the memory directly."""
    import heapq

    heap = list(q[:k])
    heapq.heapify(heap)
    forgotten = []
    for j in range(k, len(q)):
        heapq.heappush(heap, q[j])
        forgotten.append(heapq.heappop(heap))
    return np.asarray(forgotten)


def dory_experiment(cfg: DoryConfig) -> dict:
    """Exact coupling between the memory model and the rectangle word.

    Both constructions run on the same relevance draws; the rank of the fact
    forgotten on day j must equal the sorted permutation's entry n+1-j,
    deterministically on every trial.  The forgotten-fact scatter is also
    compared to the rectangle limit on its native window.
    """
    n, beta = cfg.n, cfg.beta
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    k = math.floor((1 - beta) * n)
    if k < 1 or n - k < 1:
        raise ValueError("need at least one stored fact and one forgotten fact")
    coupling_failures = 0
    scatter_devs = []
    for t in range(cfg.trials):
        rng = substream(cfg.seed, t)
        q = rng.random(n)
        forgotten = _memory_direct(q, k)
        ranks = np.argsort(np.argsort(q)) + 1  # rank of each relevance factor
        rank_of = {float(q[i]): int(ranks[i]) for i in range(n)}
        # sorting-word route: w0 encodes q reversed, then k-window passes
        w0 = Permutation(np.argsort(np.argsort(q[::-1])) + 1)
        w = w0
        for i in range(1, n - k + 1):
            w = fold_word_onto(w, range(n - i - k + 1, n - i + 1))
        ok = all(
            rank_of[float(forgotten[j - 1])] == w(n + 1 - j)
            for j in range(1, n - k + 1)
        )
        if not ok:
            coupling_failures += 1
        # forgotten-fact scatter vs the rectangle limit on x >= 1-beta
        xs_pts = 1 - (np.arange(1, n - k + 1) - 1) / n
        ypts = forgotten
        for x in np.linspace(1 - beta + 0.05, 0.95, 5):
            for y in np.linspace(0.05, 0.95, 5):
                emp = float(np.sum((xs_pts >= x) & (ypts <= y))) / n
                scatter_devs.append(
                    abs(emp - nu_height(beta * (1 - beta), beta, x, y))
                )
    return {
        "experiment": "dory",
        "n": n,
        "beta": beta,
        "k": k,
        "trials": cfg.trials,
        "coupling_failures": coupling_failures,
        "coupling_exact": coupling_failures == 0,
        "scatter_max_dev": float(np.max(scatter_devs)),
        "seed": cfg.seed,
    }


# --------------------------------------------------------------------------
# composite (non-order-convex) shapes


@dataclass
class CompositeConfig:
    pieces: tuple = ((0.25, 0.0), (0.5, 0.25))  # (width, diagonal offset) pairs
    p: float = 0.5
    n: int = 1600
    grid_resolution: int = 10
    seed: int = 0


def composite_shape_experiment(cfg: CompositeConfig) -> dict:
    """Thinned-word sample over a glued union of strip rectangles.

    The union is completed with forced bumps; its sampled product must
    approach the min-plus product of the pieces' individual limits, provided
    the pieces are listed southwest to northeast with disjoint columns.
    """
    n, p = cfg.n, cfg.p
    offsets = [float(t0) for _, t0 in cfg.pieces]
    widths = [float(w) for w, _ in cfg.pieces]
    for i in range(1, len(cfg.pieces)):
        if offsets[i] < offsets[i - 1] + widths[i - 1] - 1e-12:
            raise ValueError(
                "pieces must be listed southwest to northeast with disjoint interiors"
            )
    shapes = []
    factors = []
    for w, t0 in cfg.pieces:
        W = int(round(w * n))
        T = int(round(t0 * n))
        H = n - W
        if W < 1 or H < 1:
            raise ValueError("degenerate piece")
        shapes.append(Shape.rectangle(W, H, n=n, corner=(T, T - 1)))
        factors.append(
            AnalyticPermuton.pipedream_limit(peridot_pair(w, offset=t0), p)
        )
    union = shapes[0]
    for s in shapes[1:]:
        union = union.union(s)
    u = demazure_sample(union, p, substream(cfg.seed, 0))
    xs = interior_grid(cfg.grid_resolution)
    limit = AnalyticPermuton.star_product(factors)
    target = _analytic_matrix(limit.height, xs)
    emp = empirical_heights(u, xs)
    dev = np.abs(emp - target)
    return {
        "experiment": "composite",
        "n": n,
        "p": p,
        "pieces": [[w, t0] for w, t0 in cfg.pieces],
        "max_dev": float(dev.max()),
        "mean_dev": float(dev.mean()),
        "seed": cfg.seed,
    }


# --------------------------------------------------------------------------
# dispatch and report output

_EXPERIMENTS = {
    "convergence": (ConvergenceConfig, convergence_experiment),
    "fluctuation": (FluctuationConfig, fluctuation_experiment),
    "hydrodynamic": (HydrodynamicConfig, hydrodynamic_experiment),
    "bubble": (BubbleConfig, bubble_experiment),
    "doppelganger": (DoppelgangerConfig, doppelganger_experiment),
    "inversion": (InversionConfig, inversion_experiment),
    "pattern": (PatternConfig, pattern_experiment),
    "dory": (DoryConfig, dory_experiment),
    "composite": (CompositeConfig, composite_shape_experiment),
}


def run_experiment(name: str, **kwargs) -> dict:
    if name not in _EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(_EXPERIMENTS)}")
    cfg_cls, fn = _EXPERIMENTS[name]
    # boundary functions come in as breakpoint lists when called from configs
    fields = {f for f in cfg_cls.__dataclass_fields__}
    clean = {}
    for key, val in kwargs.items():
        if key not in fields:
            raise ValueError(f"unknown config field {key!r} for experiment {name!r}")
        if key in ("phi", "psi") and not isinstance(val, BoundaryFunction):
            val = BoundaryFunction(val)
        if key in ("n_list", "L_list", "exact_sizes", "point") and isinstance(val, list):
            val = tuple(val)
        if key == "pieces" and isinstance(val, list):
            val = tuple(tuple(v) for v in val)
        clean[key] = val
    return fn(cfg_cls(**clean))


def write_report(report: dict, outdir: str, stem: str | None = None) -> dict:
    """Write the JSON summary (and the per-point CSV when rows are present)."""
    os.makedirs(outdir, exist_ok=True)
    stem = stem or report.get("experiment", "report")
    rows = report.pop("rows", None)
    paths = {}
    json_path = os.path.join(outdir, f"{stem}.json")
    with open(json_path, "w") as fh:
        fh.write(canonical_json(report))
    paths["json"] = json_path
    if rows:
        csv_path = os.path.join(outdir, f"{stem}.csv")
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "trial", "x", "y", "empirical", "analytic", "abs_dev"])
            writer.writerows(rows)
        paths["csv"] = csv_path
    return paths
