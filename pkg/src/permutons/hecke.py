"""Permutations in one-line notation and the 0-Hecke sorting-operator algebra.

A permutation ``u`` of ``{1, ..., n}`` is stored as a tuple of 1-based values.
The central operator is ``tau_apply(u, i)``, which puts the entries in
positions ``i`` and ``i+1`` in decreasing order.  Folding these operators over
a word yields the Demazure product, the associative product on the symmetric
group with ``u * s_i = tau_i(u)``.

>>> demazure_of_word(Word(3, (1, 2, 1))).values
(3, 2, 1)
>>> demazure_product(Permutation((2, 1, 3)), Permutation((1, 3, 2))).values
(2, 3, 1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

__all__ = [
    "Permutation",
    "Word",
    "HeightGrid",
    "tau_apply",
    "demazure_of_word",
    "canonical_reduced_word",
    "demazure_product",
    "inversions",
    "pattern_count",
    "pattern_density",
    "pattern_densities",
    "height_grid",
    "uniform_random_permutation",
    "make_rng",
    "substream",
]


def make_rng(seed):
    """Return a numpy Generator; passes Generators through untouched."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def substream(master_seed: int, index: int) -> np.random.Generator:
    """Independent per-task RNG substream.

    The stream is derived from the pair (master seed, substream index) via
    SeedSequence spawn keys, so results do not depend on scheduling order.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    return np.random.default_rng(ss)


class Permutation:
    """A permutation of {1, ..., n} in one-line notation.

    >>> u = Permutation((2, 1, 3))
    >>> u.n, u(1), u.inverse().values
    (3, 2, (2, 1, 3))
    """

    __slots__ = ("values",)

    def __init__(self, values):
        vals = tuple(int(v) for v in values)
        n = len(vals)
        if n < 1:
            raise ValueError("permutation must have size >= 1")
        seen = [False] * (n + 1)
        for v in vals:
            if not 1 <= v <= n or seen[v]:
                raise ValueError(f"not a permutation of 1..{n}: {vals}")
            seen[v] = True
        self.values = vals

    @property
    def n(self) -> int:
        return len(self.values)

    def __call__(self, i: int) -> int:
        """Value at 1-based position i."""
        return self.values[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for pos, v in enumerate(self.values, start=1):
            inv[v - 1] = pos
        return Permutation(inv)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"Permutation({self.values})"

    def __len__(self):
        return self.n

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def decreasing(cls, n: int) -> "Permutation":
        """The longest element n, n-1, ..., 1."""
        return cls(range(n, 0, -1))

    @classmethod
    def all_of_size(cls, n: int):
        """Iterate over the whole symmetric group (use only for small n)."""
        import itertools

        for vals in itertools.permutations(range(1, n + 1)):
            yield cls(vals)

    def to_json(self):
        return list(self.values)

    @classmethod
    def from_json(cls, data) -> "Permutation":
        return cls(data)


@dataclass(frozen=True)
class Word:
    """A word over the alphabet {1, ..., n-1} of adjacent-swap indices."""

    n: int
    letters: tuple

    def __post_init__(self):
        letters = tuple(int(i) for i in self.letters)
        object.__setattr__(self, "letters", letters)
        if self.n < 1:
            raise ValueError("alphabet bound n must be >= 1")
        for i in letters:
            if not 1 <= i <= self.n - 1:
                raise ValueError(f"letter {i} outside 1..{self.n - 1}")

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        if self.n != other.n:
            raise ValueError("cannot concatenate words over different alphabets")
        return Word(self.n, self.letters + other.letters)


def tau_apply(u: Permutation, i: int) -> Permutation:
    """Put the entries of u in positions i, i+1 in decreasing order.

    >>> tau_apply(Permutation((3, 1, 2)), 2).values
    (3, 2, 1)
    """
    if not 1 <= i <= u.n - 1:
        raise ValueError(f"position {i} outside 1..{u.n - 1}")
    a, b = u.values[i - 1], u.values[i]
    if a > b:
        return u
    vals = list(u.values)
    vals[i - 1], vals[i] = b, a
    return Permutation(vals)


def _fold_letters(vals: list, letters) -> None:
    """In-place tau-fold of ``letters`` over the 0-indexed value list ``vals``."""
    for i in letters:
        j = i - 1
        a = vals[j]
        b = vals[i]
        if a < b:
            vals[j] = b
            vals[i] = a


def demazure_of_word(w: Word) -> Permutation:
    """Demazure product s_{i_1} * ... * s_{i_r} of a word, as a tau-fold.

    >>> demazure_of_word(Word(5, ())).values
    (1, 2, 3, 4, 5)
    """
    vals = list(range(1, w.n + 1))
    _fold_letters(vals, w.letters)
    return Permutation(vals)


def canonical_reduced_word(u: Permutation) -> Word:
    """A reduced word for u obtained by smallest-descent peeling.

    Repeatedly right-multiply by s_i at the smallest descent i and prepend i;
    amortized O(n + inversions) with a backtracking scan pointer.

    >>> canonical_reduced_word(Permutation((3, 2, 1))).letters
    (1, 2, 1)
    """
    vals = list(u.values)
    n = len(vals)
    peeled = []
    i = 1
    while i <= n - 1:
        if vals[i - 1] > vals[i]:
            vals[i - 1], vals[i] = vals[i], vals[i - 1]
            peeled.append(i)
            i = max(1, i - 1)
        else:
            i += 1
    return Word(n, tuple(reversed(peeled)))


def demazure_product(u: Permutation, v: Permutation) -> Permutation:
    """The Demazure product u * v, computed by folding a reduced word of v over u."""
    if u.n != v.n:
        raise ValueError(f"size mismatch: {u.n} != {v.n}")
    vals = list(u.values)
    _fold_letters(vals, canonical_reduced_word(v).letters)
    return Permutation(vals)


def inversions(u: Permutation) -> int:
    """Number of pairs a < b appearing in decreasing order; O(n log n) merge count.

    >>> inversions(Permutation((2, 4, 1, 3)))
    3
    """
    vals = list(u.values)
    total, _ = _merge_count(vals)
    return total


def _merge_count(vals):
    n = len(vals)
    if n <= 1:
        return 0, vals
    mid = n // 2
    cl, left = _merge_count(vals[:mid])
    cr, right = _merge_count(vals[mid:])
    merged = []
    i = j = 0
    cross = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            j += 1
            cross += len(left) - i
    merged.extend(left[i:])
    merged.extend(right[j:])
    return cl + cr + cross, merged


def _standardize(seq) -> tuple:
    """Relative order of a sequence of distinct numbers, as 1-based values."""
    order = sorted(range(len(seq)), key=lambda t: seq[t])
    out = [0] * len(seq)
    for rank, idx in enumerate(order, start=1):
        out[idx] = rank
    return tuple(out)


def _count_patterns_k3(u: Permutation) -> dict:
    """Occurrence counts of all six length-3 patterns via prefix-count tables."""
    n = u.n
    vals = np.asarray(u.values, dtype=np.int64)
    # prefix[j][t] = #{ i <= j : u(i) <= t }, rows indexed 0..n
    onehot = np.zeros((n + 1, n + 1), dtype=np.int64)
    onehot[np.arange(1, n + 1), vals] = 1
    prefix = np.cumsum(np.cumsum(onehot, axis=0), axis=1)
    counts = {pat: 0 for pat in ((1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1))}
    for j in range(2, n):  # middle position, 1-based; needs i<j and k>j
        uj = int(vals[j - 1])
        uk = vals[j:]  # values at positions k > j
        row = prefix[j - 1]
        below_uj = int(row[uj - 1])
        above_uj = (j - 1) - below_uj
        a_k = row[uk - 1]  # #{i<j : u_i < u_k}; u_k itself sits past j, never counted
        asc = uk > uj
        desc = ~asc
        counts[(1, 2, 3)] += int(np.sum(asc)) * below_uj
        counts[(2, 1, 3)] += int(np.sum((a_k - below_uj) * asc))
        counts[(3, 1, 2)] += int(np.sum(((j - 1) - a_k) * asc))
        counts[(1, 3, 2)] += int(np.sum(a_k * desc))
        counts[(2, 3, 1)] += int(np.sum((below_uj - a_k) * desc))
        counts[(3, 2, 1)] += int(np.sum(desc)) * above_uj
    return counts


def pattern_count(u: Permutation, v: Permutation) -> int:
    """Number of occurrences of the pattern v in u.

    k = 2 uses the merge-sort inversion counter, k = 3 an O(n^2) prefix-count
    sweep, k = 4 direct enumeration; larger patterns are rejected.
    """
    k = v.n
    n = u.n
    if k > n:
        raise ValueError(f"pattern size {k} exceeds permutation size {n}")
    if k > 4:
        raise ValueError("pattern counting supports k <= 4")
    if k == 1:
        return n
    if k == 2:
        inv = inversions(u)
        return inv if v.values == (2, 1) else math.comb(n, 2) - inv
    if k == 3:
        return _count_patterns_k3(u)[v.values]
    target = v.values
    total = 0
    for idxs in combinations(range(n), 4):
        if _standardize([u.values[t] for t in idxs]) == target:
            total += 1
    return total


def pattern_density(u: Permutation, v: Permutation) -> Fraction:
    """Exact occurrence density of v in u, in [0, 1]."""
    return Fraction(pattern_count(u, v), math.comb(u.n, v.n))


def pattern_densities(u: Permutation, k: int) -> dict:
    """Densities of every pattern of size k (k <= 3), keyed by value tuple."""
    if k == 2:
        inv = inversions(u)
        tot = math.comb(u.n, 2)
        return {(2, 1): Fraction(inv, tot), (1, 2): Fraction(tot - inv, tot)}
    if k == 3:
        tot = math.comb(u.n, 3)
        return {pat: Fraction(c, tot) for pat, c in _count_patterns_k3(u).items()}
    raise ValueError("pattern_densities supports k in {2, 3}")


class HeightGrid:
    """Height function of a permutation-scale measure sampled on an (n+1)^2 grid.

    ``counts[i][j]`` holds ``n * H(i/n, j/n)``; for the measure of a
    permutation u this is the integer ``#{a > i : u(a) <= j}``, so small-n
    identities are exact.  Bilinear interpolation between grid points is exact
    for permutation measures because every grid cell carries a product measure.
    """

    __slots__ = ("n", "counts")

    def __init__(self, n: int, counts):
        arr = np.asarray(counts)
        if arr.shape != (n + 1, n + 1):
            raise ValueError(f"counts must be ({n + 1}, {n + 1}), got {arr.shape}")
        self.n = n
        self.counts = arr

    def value(self, x, y):
        """H(x, y) by bilinear interpolation; accepts scalars or arrays."""
        n = self.n
        xf = np.clip(np.asarray(x, dtype=float), 0.0, 1.0) * n
        yf = np.clip(np.asarray(y, dtype=float), 0.0, 1.0) * n
        i0 = np.minimum(xf.astype(np.int64), n - 1)
        j0 = np.minimum(yf.astype(np.int64), n - 1)
        fx = xf - i0
        fy = yf - j0
        c = self.counts
        val = (
            c[i0, j0] * (1 - fx) * (1 - fy)
            + c[i0 + 1, j0] * fx * (1 - fy)
            + c[i0, j0 + 1] * (1 - fx) * fy
            + c[i0 + 1, j0 + 1] * fx * fy
        ) / n
        return float(val) if val.ndim == 0 else val

    def check_invariants(self) -> None:
        """Raise unless boundary values and per-coordinate 1-Lipschitz steps hold."""
        c = self.counts
        n = self.n
        if np.any(c[n, :] != 0) or np.any(c[:, 0] != 0):
            raise AssertionError("boundary rows must vanish")
        if np.any(c[0, :] != np.arange(n + 1)) or np.any(c[:, n] != n - np.arange(n + 1)):
            raise AssertionError("marginal boundary values violated")
        dy = np.diff(c, axis=1)
        dx = -np.diff(c, axis=0)
        if np.any(dy < 0) or np.any(dy > 1) or np.any(dx < 0) or np.any(dx > 1):
            raise AssertionError("discrete Lipschitz condition violated")

    def __eq__(self, other):
        return (
            isinstance(other, HeightGrid)
            and self.n == other.n
            and np.array_equal(self.counts, other.counts)
        )

    def __hash__(self):  # pragma: no cover - grids are not meant for hashing
        return hash((self.n, self.counts.tobytes()))

    def to_json(self):
        counts = self.counts
        if np.issubdtype(counts.dtype, np.integer):
            return {"n": self.n, "counts": counts.tolist()}
        return {"n": self.n, "counts": [[float(v) for v in row] for row in counts]}

    @classmethod
    def from_json(cls, data) -> "HeightGrid":
        arr = np.asarray(data["counts"])
        if np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        return cls(int(data["n"]), arr)


def height_grid(u: Permutation) -> HeightGrid:
    """Exact integer height grid of the permutation measure of u."""
    n = u.n
    onehot = np.zeros((n + 1, n + 1), dtype=np.int64)
    onehot[np.arange(1, n + 1), np.asarray(u.values)] = 1
    suffix = np.zeros((n + 1, n + 1), dtype=np.int64)
    suffix[:n] = np.cumsum(onehot[::-1], axis=0)[::-1][1:]
    return HeightGrid(n, np.cumsum(suffix, axis=1))


def uniform_random_permutation(n: int, seed) -> Permutation:
    """Uniform element of the symmetric group; deterministic given the seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    return Permutation(rng.permutation(n) + 1)
