"""Demazure products, random pipe dreams, geometric-jump TASEP, and permutons."""

from .hecke import (
    HeightGrid,
    Permutation,
    Word,
    canonical_reduced_word,
    demazure_of_word,
    demazure_product,
    height_grid,
    inversions,
    pattern_count,
    pattern_density,
    substream,
    tau_apply,
    uniform_random_permutation,
)
from .shapes import (
    BoundaryFunction,
    Box,
    LatticePath,
    Shape,
    coxeter_power_shape,
    order_convex_completion,
    path_from_theta,
    shape_from_paths,
    theta_of_path,
    word_of_shape,
)
from .pipedreams import PipeDream, ResolvedPipeDream, demazure_sample, resolve, sample_pipedream
from .tasep import TasepState, c_p, iota, q_p, r_p, tasep_step, v_p, window_indices
from .analytic import (
    AnalyticPermuton,
    BoundaryPair,
    classify_region,
    common_refinement,
    f_p,
    h_p,
    in_kpz_region,
    nu_height,
    polyphemus_geometry,
    rectangle_nu_check,
    rotate,
    sample_from_permuton,
    star,
)
from .svg import render_svg

__version__ = "0.1.0"
