import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from permutons.hecke import Permutation, Word, demazure_of_word
from permutons.shapes import (
    BoundaryFunction,
    Box,
    LatticePath,
    Shape,
    bipartite_coxeter_word,
    bounding_paths,
    classical_coxeter_word,
    column_contents,
    coxeter_path,
    coxeter_power_shape,
    order_convex_completion,
    path_from_theta,
    shape_from_paths,
    theta_of_path,
    word_of_shape,
)

steps_strategy = st.text(alphabet="ES", min_size=1, max_size=10)


def random_nested_paths(draw_steps, rng_int):
    """Build a valid (sw, ne) pair by lifting the sw crossings."""
    sw = LatticePath((0, 0), draw_steps)
    n = sw.n
    hi = sw.crossing_x.copy()
    for c in range(1, n + 1):
        bump = rng_int(c)
        hi[c] = min(max(sw.crossing_x[c], hi[c - 1] + bump), hi[c - 1] + 1)
    hi = np.maximum(hi, sw.crossing_x)
    for c in range(1, n + 1):
        hi[c] = min(max(hi[c], hi[c - 1]), hi[c - 1] + 1)
    if np.any(hi < sw.crossing_x):
        return None
    ne = LatticePath(
        (int(hi[0]), int(hi[0])),
        "".join("E" if hi[c] > hi[c - 1] else "S" for c in range(1, n + 1)),
    )
    return sw, ne


class TestBoxesAndPaths:
    def test_box_requires_positive_content(self):
        with pytest.raises(ValueError):
            Box(1, 1)
        assert Box(3, 1).content == 2

    def test_path_basics(self):
        p = LatticePath((0, 0), "SSE")
        assert p.points() == [(0, 0), (0, -1), (0, -2), (1, -2)]
        assert p.end() == (1, -2)
        assert p.crossing_x.tolist() == [0, 0, 0, 1]

    def test_path_must_start_on_diagonal(self):
        with pytest.raises(ValueError):
            LatticePath((1, 0), "E")


class TestShapeFromPaths:
    def test_staircase_3(self):
        s = Shape.staircase(3)
        assert sorted((b.x, b.y) for b in s.iter_boxes()) == [(0, -2), (0, -1), (1, -1)]
        assert word_of_shape(s).letters == (2, 1, 2)
        assert column_contents(s) == [(1, 2), (2, 2)]

    def test_staircase_2_single_box(self):
        s = Shape.staircase(2)
        assert [(b.x, b.y) for b in s.iter_boxes()] == [(0, -1)]
        assert word_of_shape(s).letters == (1,)
        assert column_contents(s) == [(1, 1)]

    def test_rectangle_2x2(self):
        r = shape_from_paths(LatticePath((0, 0), "SSEE"), LatticePath((0, 0), "EESS"))
        assert sorted((b.x, b.y) for b in r.iter_boxes()) == [
            (0, -2), (0, -1), (1, -2), (1, -1)]
        assert word_of_shape(r).letters == (2, 1, 3, 2)
        assert Shape.rectangle(2, 2, corner=(0, -1)) == r

    def test_crossing_paths_rejected(self):
        with pytest.raises(ValueError):
            shape_from_paths(LatticePath((0, 0), "EES"), LatticePath((0, 0), "SSE"))

    def test_box_count_is_diagonal_area(self):
        for sw_steps, ne_steps in [("SSS", "EEE"), ("SSEE", "EESS"), ("SESE", "EESS")]:
            sw, ne = LatticePath((0, 0), sw_steps), LatticePath((0, 0), ne_steps)
            s = shape_from_paths(sw, ne)
            area = int(np.sum((ne.crossing_x - sw.crossing_x)[1:s.n]))
            assert s.box_count == area

    @settings(max_examples=80, deadline=None)
    @given(steps_strategy, st.randoms())
    def test_column_intervals_consistent(self, steps, rnd):
        pair = random_nested_paths(steps, lambda c: rnd.randint(0, 1))
        if pair is None:
            return
        shape = shape_from_paths(*pair)
        if shape.box_count == 0:
            return
        cc = column_contents(shape)
        n = shape.n
        for (a1, b1), (a2, b2) in zip(cc, cc[1:]):
            assert a1 <= max(a2 - 1, 1)
            assert b2 >= min(b1 + 1, n - 1)

    def test_paper_column_example(self):
        a = [1, 1, 2, 3, 4, 7, 8, 9]
        b = [3, 4, 5, 7, 8, 9, 9, 9]
        cols = {j: np.array([j - c for c in range(a[j], b[j] + 1)]) for j in range(8)}
        s = Shape(10, cols)
        assert column_contents(s) == list(zip(a, b))
        assert s.is_order_convex()

    def test_json_roundtrip(self):
        s = Shape.staircase(4)
        assert Shape.from_json(s.to_json()) == s
        sw, ne = bounding_paths(s)
        via_paths = Shape.from_json(
            {"n": 4, "sw": sw.to_json(), "ne": ne.to_json()}
        )
        assert via_paths == s


class TestThetaConversions:
    def test_examples(self):
        assert path_from_theta(BoundaryFunction.linear(1.0), 5).steps == "EEEEE"
        assert path_from_theta(BoundaryFunction.constant(0.0), 5).steps == "SSSSS"
        half = path_from_theta(BoundaryFunction.linear(0.5), 4)
        assert half.steps.count("E") == 2

    def test_theta_of_path_examples(self):
        th = theta_of_path(LatticePath((0, 0), "EEEEE"))
        zs = np.linspace(0, 1, 11)
        assert np.allclose(th(zs), zs)
        th = theta_of_path(LatticePath((0, 0), "ES"))
        assert th(0) == 0 and th(0.5) == 0.5 and th(1.0) == 0.5

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(0, 1), min_size=2, max_size=6),
        st.integers(3, 60),
    )
    def test_roundtrip_sup_error(self, raw, n):
        # build a valid boundary function from increments clipped to slope [0, 1]
        zs = np.linspace(0, 1, len(raw) + 1)
        vals = [0.0]
        for t, r in enumerate(raw):
            dz = zs[t + 1] - zs[t]
            vals.append(vals[-1] + min(max(r * dz, 0.0), dz))
        theta = BoundaryFunction(zip(zs, vals))
        path = path_from_theta(theta, n)
        assert path.n == n
        back = theta_of_path(path)
        grid = np.linspace(0, 1, 201)
        assert np.max(np.abs(back(grid) - theta(grid))) <= 1.0 / n + 1e-12


def enumerate_small_shapes(max_n=5, max_boxes=6):
    for n in range(2, max_n + 1):
        for sw_steps in itertools.product("ES", repeat=n):
            sw = LatticePath((0, 0), "".join(sw_steps))
            for ne_steps in itertools.product("ES", repeat=n):
                ne = LatticePath((0, 0), "".join(ne_steps))
                if np.any(sw.crossing_x > ne.crossing_x):
                    continue
                s = shape_from_paths(sw, ne)
                if 0 < s.box_count <= max_boxes:
                    yield s


class TestWordOfShape:
    def test_two_linear_extensions_same_fold(self):
        seen = 0
        for s in enumerate_small_shapes():
            seen += 1
            letters_cols = word_of_shape(s).letters
            # row-major south-to-north is a second valid linear extension
            boxes = sorted(s.iter_boxes(), key=lambda b: (b.y, b.x))
            letters_rows = tuple(b.content for b in boxes)
            assert demazure_of_word(Word(s.n, letters_cols)) == demazure_of_word(
                Word(s.n, letters_rows)
            )
        assert seen > 100

    def test_non_order_convex_rejected(self):
        s = Shape.from_boxes(4, [(0, -2), (1, -1)])
        with pytest.raises(ValueError):
            word_of_shape(s)


class TestCoxeter:
    def test_classical_path_and_ribbon(self):
        sw = coxeter_path(classical_coxeter_word(3))
        assert sw.steps == "SEE"
        shape = coxeter_power_shape(sw, 1)
        assert word_of_shape(shape).letters == (1, 2)

    def test_power_two_interleaves(self):
        sw = coxeter_path(classical_coxeter_word(3))
        assert word_of_shape(coxeter_power_shape(sw, 2)).letters == (1, 2, 1, 2)

    def test_word_equivalent_to_coxeter_word(self):
        for n, word in [(4, classical_coxeter_word(4)), (5, bipartite_coxeter_word(5)),
                        (6, bipartite_coxeter_word(6))]:
            ribbon = word_of_shape(coxeter_power_shape(coxeter_path(word), 1))
            for u in Permutation.all_of_size(min(n, 4)) if n == 4 else [
                Permutation.identity(n), Permutation.decreasing(n)
            ]:
                from permutons.experiments import fold_word_onto

                assert fold_word_onto(u, ribbon.letters) == fold_word_onto(u, word.letters)

    def test_power_operator_equality_s4(self):
        from permutons.experiments import fold_word_onto

        word = classical_coxeter_word(4)
        sw = coxeter_path(word)
        for t in (1, 2, 3):
            letters = word_of_shape(coxeter_power_shape(sw, t)).letters
            for u in Permutation.all_of_size(4):
                expect = u
                for _ in range(t):
                    expect = fold_word_onto(expect, word.letters)
                assert fold_word_onto(u, letters) == expect

    def test_malformed_path_rejected(self):
        with pytest.raises(ValueError):
            coxeter_power_shape(LatticePath((0, 0), "EES"), 1)
        with pytest.raises(ValueError):
            coxeter_path(Word(4, (1, 2, 1)))


class TestCompletion:
    def test_fixed_point_on_order_convex(self):
        for s in [Shape.staircase(4), Shape.rectangle(3, 2, corner=(0, -1))]:
            completed, added = order_convex_completion(s)
            assert completed == s
            assert added.box_count == 0
            assert s.is_order_convex()

    def test_two_box_example(self):
        s = Shape.from_boxes(4, [(0, -2), (1, -1)])
        completed, added = order_convex_completion(s)
        assert sorted((b.x, b.y) for b in completed.iter_boxes()) == [
            (0, -2), (0, -1), (1, -2), (1, -1)]
        assert sorted((b.x, b.y) for b in added.iter_boxes()) == [(0, -1), (1, -2)]
        cc = column_contents(completed)
        for (a1, b1), (a2, b2) in zip(cc, cc[1:]):
            assert a1 <= max(a2 - 1, 1) and b2 >= min(b1 + 1, completed.n - 1)

    def test_staircase_minus_corner(self):
        # removing the content-1 box forces it back
        s = Shape.from_boxes(3, [(0, -2), (1, -1)])
        completed, added = order_convex_completion(s)
        assert completed == Shape.staircase(3)
        assert [(b.x, b.y) for b in added.iter_boxes()] == [(0, -1)]
        # removing the deep box leaves a valid smaller region
        s = Shape.from_boxes(3, [(0, -1), (1, -1)])
        completed, added = order_convex_completion(s)
        assert completed == s and added.box_count == 0

    def test_separated_components_pinch(self):
        s = Shape.from_boxes(12, [(0, -1), (2, -9)])
        completed, added = order_convex_completion(s)
        assert added.box_count == 0
        assert completed == s

    def test_completion_result_is_order_convex(self):
        rng = np.random.default_rng(0)
        for _ in range(40):
            n = int(rng.integers(3, 10))
            count = int(rng.integers(1, 7))
            boxes = set()
            while len(boxes) < count:
                c = int(rng.integers(1, n))
                x = int(rng.integers(0, n))
                boxes.add((x, x - c))
            s = Shape.from_boxes(n, sorted(boxes))
            completed, added = order_convex_completion(s)
            assert completed.is_order_convex()
            assert set((b.x, b.y) for b in s.iter_boxes()) <= set(
                (b.x, b.y) for b in completed.iter_boxes()
            )
