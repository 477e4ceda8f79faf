import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from permutons.hecke import (
    HeightGrid,
    Permutation,
    Word,
    canonical_reduced_word,
    demazure_of_word,
    demazure_product,
    height_grid,
    inversions,
    pattern_count,
    pattern_densities,
    pattern_density,
    substream,
    tau_apply,
    uniform_random_permutation,
)


def all_reduced_words(u):
    """Every reduced word of u, by peeling descents in all orders."""
    if u == Permutation.identity(u.n):
        yield ()
        return
    for i in range(1, u.n):
        if u.values[i - 1] > u.values[i]:
            v = list(u.values)
            v[i - 1], v[i] = v[i], v[i - 1]
            for w in all_reduced_words(Permutation(v)):
                yield w + (i,)


class TestTau:
    def test_sorts_increasing_pair(self):
        assert tau_apply(Permutation((1, 2, 3)), 1).values == (2, 1, 3)

    def test_idempotent_on_examples(self):
        assert tau_apply(Permutation((2, 1, 3)), 1).values == (2, 1, 3)
        assert tau_apply(Permutation((3, 1, 2)), 2).values == (3, 2, 1)

    def test_idempotent_exhaustive_s4(self):
        for u in Permutation.all_of_size(4):
            for i in range(1, 4):
                once = tau_apply(u, i)
                assert tau_apply(once, i) == once
                assert inversions(once) in (inversions(u), inversions(u) + 1)

    def test_index_range(self):
        with pytest.raises(ValueError):
            tau_apply(Permutation((1, 2, 3)), 3)
        with pytest.raises(ValueError):
            tau_apply(Permutation((1, 2, 3)), 0)


class TestDemazureWord:
    def test_examples(self):
        assert demazure_of_word(Word(3, (1, 2, 1))).values == (3, 2, 1)
        assert demazure_of_word(Word(3, (1, 1))).values == (2, 1, 3)
        assert demazure_of_word(Word(5, ())) == Permutation.identity(5)

    def test_letter_range(self):
        with pytest.raises(ValueError):
            Word(3, (3,))

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_commutation_moves_preserve_product(self, data):
        n = data.draw(st.integers(4, 8))
        letters = data.draw(
            st.lists(st.integers(1, n - 1), min_size=2, max_size=10)
        )
        positions = [
            i for i in range(len(letters) - 1)
            if abs(letters[i] - letters[i + 1]) >= 2
        ]
        if not positions:
            return
        i = data.draw(st.sampled_from(positions))
        swapped = list(letters)
        swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
        assert demazure_of_word(Word(n, letters)) == demazure_of_word(Word(n, swapped))


class TestReducedWords:
    def test_examples(self):
        assert canonical_reduced_word(Permutation.identity(4)).letters == ()
        assert canonical_reduced_word(Permutation((2, 1, 3))).letters == (1,)
        w = canonical_reduced_word(Permutation((3, 2, 1)))
        assert len(w) == 3
        assert demazure_of_word(w).values == (3, 2, 1)

    def test_every_reduced_word_folds_back_s4(self):
        for u in Permutation.all_of_size(4):
            count = 0
            for letters in all_reduced_words(u):
                count += 1
                assert demazure_of_word(Word(4, letters)) == u
                assert len(letters) == inversions(u)
            assert count >= 1

    def test_canonical_word_is_reduced(self):
        for n in (2, 3, 4, 5):
            for u in Permutation.all_of_size(n):
                w = canonical_reduced_word(u)
                assert len(w) == inversions(u)
                assert demazure_of_word(w) == u


class TestDemazureProduct:
    def test_examples(self):
        v = Permutation((2, 3, 1))
        assert demazure_product(Permutation.identity(3), v) == v
        assert demazure_product(v, Permutation.identity(3)) == v
        top = Permutation((3, 2, 1))
        assert demazure_product(top, top) == top
        assert demazure_product(Permutation((2, 1, 3)), Permutation((1, 3, 2))).values == (2, 3, 1)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            demazure_product(Permutation.identity(3), Permutation.identity(4))

    def test_associativity_s3(self):
        perms = list(Permutation.all_of_size(3))
        for u in perms:
            for v in perms:
                for w in perms:
                    assert demazure_product(demazure_product(u, v), w) == demazure_product(
                        u, demazure_product(v, w)
                    )

    def test_length_dominates_factors_s4(self):
        for u in Permutation.all_of_size(4):
            lu = inversions(u)
            for v in Permutation.all_of_size(4):
                assert inversions(demazure_product(u, v)) >= max(lu, inversions(v))

    def test_independent_of_reduced_word_choice_s4(self):
        from permutons.hecke import _fold_letters

        for u in Permutation.all_of_size(4):
            for v in Permutation.all_of_size(4):
                ref = demazure_product(u, v)
                for letters in itertools.islice(all_reduced_words(v), 3):
                    vals = list(u.values)
                    _fold_letters(vals, letters)
                    assert tuple(vals) == ref.values


class TestInversions:
    def test_examples(self):
        assert inversions(Permutation.identity(7)) == 0
        assert inversions(Permutation((3, 2, 1))) == 3
        assert inversions(Permutation((2, 4, 1, 3))) == 3

    def test_against_definition(self):
        rng = random.Random(0)
        for _ in range(40):
            n = rng.randint(1, 30)
            vals = list(range(1, n + 1))
            rng.shuffle(vals)
            u = Permutation(vals)
            inv = u.inverse()
            brute = sum(
                1
                for a in range(1, n + 1)
                for b in range(a + 1, n + 1)
                if inv(a) > inv(b)
            )
            assert inversions(u) == brute


def brute_pattern_count(u, v):
    k = v.n
    target = v.values
    count = 0
    for idxs in itertools.combinations(range(u.n), k):
        seq = [u.values[t] for t in idxs]
        order = sorted(range(k), key=lambda t: seq[t])
        std = [0] * k
        for rank, idx in enumerate(order, 1):
            std[idx] = rank
        if tuple(std) == target:
            count += 1
    return count


class TestPatterns:
    def test_examples(self):
        assert pattern_density(Permutation((3, 2, 1)), Permutation((2, 1))) == 1
        assert pattern_density(Permutation.identity(3), Permutation((1, 2))) == 1
        assert pattern_density(Permutation((2, 4, 1, 3)), Permutation((2, 1))) == Fraction(1, 2)

    def test_density_ties_to_inversions(self):
        u = uniform_random_permutation(40, 3)
        d = pattern_density(u, Permutation((2, 1)))
        assert d * math.comb(40, 2) == inversions(u)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(3, 11), st.randoms())
    def test_counts_match_enumeration(self, n, rnd):
        vals = list(range(1, n + 1))
        rnd.shuffle(vals)
        u = Permutation(vals)
        for v in Permutation.all_of_size(3):
            assert pattern_count(u, v) == brute_pattern_count(u, v)
        for v in itertools.islice(Permutation.all_of_size(min(4, n)), 5):
            assert pattern_count(u, v) == brute_pattern_count(u, v)

    def test_densities_sum_to_one(self):
        u = uniform_random_permutation(15, 5)
        assert sum(pattern_densities(u, 2).values()) == 1
        assert sum(pattern_densities(u, 3).values()) == 1

    def test_large_pattern_rejected(self):
        with pytest.raises(ValueError):
            pattern_count(uniform_random_permutation(8, 0), Permutation((5, 4, 3, 2, 1)))
        with pytest.raises(ValueError):
            pattern_count(Permutation.identity(2), Permutation.identity(3))


class TestHeightGrid:
    def test_corner_example(self):
        g = height_grid(Permutation((2, 1)))
        assert g.counts[1][1] == 1
        assert g.value(0.5, 0.5) == 0.5

    def test_identity_and_reversal_patterns(self):
        n = 6
        gid = height_grid(Permutation.identity(n))
        i = np.arange(n + 1)
        assert np.array_equal(gid.counts, np.maximum(0, i[None, :] - i[:, None]))
        gd = height_grid(Permutation.decreasing(n))
        assert np.array_equal(gd.counts, np.minimum(i[None, :], n - i[:, None]))

    def test_invariants_random(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = int(rng.integers(1, 51))
            height_grid(uniform_random_permutation(n, rng)).check_invariants()

    def test_bilinear_matches_measure(self):
        # each cell carries a product measure, so interpolation is exact:
        # for u = 21 the squares [0,1/2]x[1/2,1] and [1/2,1]x[0,1/2] have density 2
        g = height_grid(Permutation((2, 1)))
        assert abs(g.value(0.25, 0.75) - 0.625) < 1e-12
        assert abs(g.value(0.25, 0.25) - 0.25) < 1e-12

    def test_json_roundtrip(self):
        g = height_grid(uniform_random_permutation(9, 1))
        assert HeightGrid.from_json(g.to_json()) == g


class TestRandomPermutations:
    def test_trivial_and_deterministic(self):
        assert uniform_random_permutation(1, 99).values == (1,)
        assert uniform_random_permutation(3, 42) == uniform_random_permutation(3, 42)

    def test_uniformity_n3(self):
        counts = {}
        draws = 6000
        for t in range(draws):
            u = uniform_random_permutation(3, substream(7, t)).values
            counts[u] = counts.get(u, 0) + 1
        sigma = math.sqrt(draws * (1 / 6) * (5 / 6))
        for c in counts.values():
            assert abs(c - draws / 6) < 5 * sigma
