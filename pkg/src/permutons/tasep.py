"""Discrete-time TASEP with geometric jumps, parallel updates, and step start.

Particles 1..k sit at strictly decreasing positions, particle 1 rightmost.
Each time step every particle tries to jump right by an independent
Geometric(p) amount (P(G = r) = (1-p) p^r, r >= 0) and is cut off just
behind the previous position of the particle ahead of it, so the update is
parallel.  ``c_p``, ``q_p``, ``r_p`` and ``v_p`` are the hydrodynamic and
fluctuation scales of the displacement field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hecke import Permutation, make_rng
from .shapes import Shape, column_contents

__all__ = [
    "TasepState",
    "geometric_sample",
    "geometric_array",
    "tasep_step",
    "simulate_displacements",
    "iota",
    "window_indices",
    "particle_statistic",
    "column_jump_counts",
    "c_p",
    "q_p",
    "r_p",
    "v_p",
]


@dataclass
class TasepState:
    """Positions xi_1 > xi_2 > ... > xi_k >= 1 at time t."""

    positions: np.ndarray
    t: int = 0

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.int64)
        if pos.ndim != 1 or pos.size < 1:
            raise ValueError("positions must be a nonempty 1-d array")
        if np.any(np.diff(pos) >= 0) or pos[-1] < 1:
            raise ValueError("positions must be strictly decreasing and >= 1")
        self.positions = pos

    @property
    def k(self) -> int:
        return len(self.positions)

    @classmethod
    def step_initial(cls, k: int) -> "TasepState":
        """xi_i(0) = k + 1 - i, particles packed at 1..k."""
        return cls(np.arange(k, 0, -1, dtype=np.int64), t=0)

    def displacements(self) -> np.ndarray:
        k = self.k
        return self.positions - np.arange(k, 0, -1)


def geometric_sample(p: float, rng) -> int:
    """One Geometric(p) value on {0, 1, ...} via floor(log U / log p)."""
    if not 0 < p < 1:
        raise ValueError("geometric parameter must lie in (0, 1)")
    u = make_rng(rng).random()
    while u == 0.0:  # pragma: no cover - probability 2^-53
        u = make_rng(rng).random()
    return int(math.floor(math.log(u) / math.log(p)))


def geometric_array(p: float, size, rng) -> np.ndarray:
    if not 0 < p < 1:
        raise ValueError("geometric parameter must lie in (0, 1)")
    u = make_rng(rng).random(size)
    u = np.where(u == 0.0, 0.5, u)
    return np.floor(np.log(u) / math.log(p)).astype(np.int64)


def tasep_step(state: TasepState, p: float, rng,
               barrier: int | None = None,
               jumps: np.ndarray | None = None) -> TasepState:
    """One parallel update; blocking uses the previous positions.

    With a ``barrier`` only particles at positions <= barrier move, and none
    may land beyond it.  ``jumps`` injects the jump attempts (for coupling
    tests); otherwise they are Geometric(p) draws, one per particle.
    """
    pos = state.positions
    if jumps is None:
        jumps = geometric_array(p, len(pos), rng)
    else:
        jumps = np.asarray(jumps, dtype=np.int64)
    ahead = np.empty_like(pos)
    ahead[0] = np.iinfo(np.int64).max
    ahead[1:] = pos[:-1]
    new = np.minimum(pos + jumps, ahead - 1)
    if barrier is not None:
        subject = pos <= barrier
        new = np.where(subject, np.minimum(new, barrier), pos)
    return TasepState(new, t=state.t + 1)


def simulate_displacements(k: int, steps: int, p: float, seed,
                           trials: int = 1) -> np.ndarray:
    """Displacement matrix xi_bar of shape (trials, k) after ``steps`` updates.

    Vectorized over trials; particle i is only ever blocked by particle i-1,
    so simulating k particles is exact for every displacement index <= k.
    """
    rng = make_rng(seed)
    pos = np.tile(np.arange(k, 0, -1, dtype=np.int64), (trials, 1))
    big = np.iinfo(np.int64).max
    for _ in range(steps):
        jumps = geometric_array(p, (trials, k), rng)
        ahead = np.concatenate(
            [np.full((trials, 1), big, dtype=np.int64), pos[:, :-1]], axis=1
        )
        pos = np.minimum(pos + jumps, ahead - 1)
    return pos - np.arange(k, 0, -1)


def iota(w: Permutation, k: int) -> TasepState:
    """Particle state whose occupied sites track the top k values of w."""
    n = w.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    inv = w.inverse()
    occupied = sorted((n + 1 - inv(i) for i in range(n + 1 - k, n + 1)), reverse=True)
    return TasepState(np.asarray(occupied, dtype=np.int64))


def window_indices(shape: Shape, k: int, k_prime: int):
    """Column window (T, T') outside which the tracked statistic is frozen.

    T is the last column whose contents stay below n-k, T' the last whose
    northmost content is at most k'; both 0 when no column qualifies.
    """
    n = shape.n
    cc = column_contents(shape)
    T = 0
    Tp = 0
    for j, (a, b) in enumerate(cc, start=1):
        if b <= n - k - 1:
            T = j
        if a <= k_prime:
            Tp = j
    return T, Tp


def particle_statistic(state: TasepState, pos: int) -> int:
    """Number of particles at positions >= pos."""
    return int(np.sum(state.positions >= pos))


def column_jump_counts(letters_crossed, a: int, b: int, levels) -> np.ndarray:
    """Jump attempts encoded by one column's cross tiles, per tracked level.

    For a particle sitting at diagonal level ell, the attempt is the length
    of the maximal run of cross tiles at contents ell-1, ell-2, ... inside
    the column's content interval [a, b].  ``letters_crossed`` is the set of
    crossed contents.
    """
    crossed = set(int(c) for c in letters_crossed)
    out = []
    for ell in levels:
        run = 0
        c = ell - 1
        while a <= c <= b and c in crossed:
            run += 1
            c -= 1
        out.append(run)
    return np.asarray(out, dtype=np.int64)


def _require_domain(p: float, m: float, t: float) -> None:
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if not 0 < m / p < t:
        raise ValueError(f"requires 0 < m/p < t, got m={m}, t={t}, p={p}")


def c_p(p: float, a: float, b: float) -> float:
    """Limiting displacement rate: (sqrt(pb) - sqrt(a))^2 / (1-p) when pb >= a."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if a < 0 or b < 0:
        raise ValueError("c_p requires a, b >= 0")
    if p * b < a:
        return 0.0
    return (math.sqrt(p * b) - math.sqrt(a)) ** 2 / (1 - p)


def q_p(p: float, m: float, t: float) -> float:
    _require_domain(p, m, t)
    return (
        math.sqrt(p)
        * m ** (1 / 3)
        / t ** (1 / 6)
        * (math.sqrt(t / p) - math.sqrt(m)) ** (2 / 3)
        / (math.sqrt(p * t) - math.sqrt(m)) ** (1 / 3)
    )


def r_p(p: float, m: float, t: float) -> float:
    _require_domain(p, m, t)
    return (
        math.sqrt(p)
        * (math.sqrt(p * t) - math.sqrt(m)) ** (2 / 3)
        * (math.sqrt(t / p) - math.sqrt(m)) ** (2 / 3)
        / ((m * t) ** (1 / 6) * (1 - p))
    )


def v_p(p: float, m: float, t: float) -> float:
    """Fluctuation scale; satisfies 1/v = 1/q + 1/r."""
    _require_domain(p, m, t)
    return (
        m ** (1 / 3)
        * (math.sqrt(t / p) - math.sqrt(m)) ** (2 / 3)
        * (math.sqrt(p * t) - math.sqrt(m)) ** (2 / 3)
        / ((math.sqrt(t) - math.sqrt(p * m)) * t ** (1 / 6))
    )
