import math
from fractions import Fraction

import numpy as np
import pytest

from gmsel.theory import (
    DensityModel,
    GaussianMixture2D,
    PiecewiseUniform1D,
    asymptotic_gm,
    bayes_classify,
    best_boundary_1d,
    cb_bb_demo,
    example_mixture_model,
    example_uniform_model,
    exhaustive_search,
    gm_boundary_1d,
    lemma_check,
    model_from_config,
    nonmonotone_example,
    removal_analysis,
    voronoi_neighbors,
)


def gap_model(pos=(0, 1), neg=(9, 10)):
    """Non-overlapping unit-mass uniforms."""
    return DensityModel(
        positive=PiecewiseUniform1D([(Fraction(pos[0]), Fraction(pos[1]), Fraction(1))]),
        negative=PiecewiseUniform1D([(Fraction(neg[0]), Fraction(neg[1]), Fraction(1))]),
        prior_positive=0.5,
    )


class TestPiecewiseUniform:
    def test_cdf_exact_fractions(self):
        d = PiecewiseUniform1D([(Fraction(0), Fraction(9), Fraction(1, 9))])
        assert d.cdf(Fraction(3)) == Fraction(1, 3)
        assert d.cdf(0) == 0 and d.cdf(100) == 1

    def test_density_lookup(self):
        d = PiecewiseUniform1D([(0.0, 0.5, 1.0), (0.5, 1.0, 1.0)])
        assert d.density_at(0.25) == 1.0
        assert d.density_at(2.0) == 0

    def test_bad_mass_rejected(self):
        with pytest.raises(ValueError):
            PiecewiseUniform1D([(0.0, 1.0, 0.5)])

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            PiecewiseUniform1D([(0.0, 2.0, 0.25), (1.0, 3.0, 0.25)])

    def test_sampling_within_support(self):
        d = PiecewiseUniform1D([(2.0, 3.0, 1.0)])
        x = d.sample(500, np.random.default_rng(0))
        assert x.shape == (500, 1)
        assert np.all((x >= 2.0) & (x < 3.0))


class TestGaussianMixture:
    def test_pdf_single_standard_normal(self):
        g = GaussianMixture2D([(1.0, [0.0, 0.0], [1.0, 1.0])])
        assert g.pdf([[0.0, 0.0]])[0] == pytest.approx(1 / (2 * np.pi))

    def test_pdf_integrates_to_one(self):
        g = example_mixture_model().positive
        xs = np.linspace(-8, 8, 401)
        X, Y = np.meshgrid(xs, xs)
        grid = np.column_stack([X.ravel(), Y.ravel()])
        dx = xs[1] - xs[0]
        assert g.pdf(grid).sum() * dx * dx == pytest.approx(1.0, abs=1e-3)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            GaussianMixture2D([(0.5, [0, 0], [1, 1])])

    def test_sample_shape(self):
        g = example_mixture_model().positive
        assert g.sample(100, np.random.default_rng(1)).shape == (100, 2)


class TestBoundary1D:
    def test_rates_at_pdf_intersection(self):
        # at the density crossover the positive side is fully captured
        tpr, tnr, g = gm_boundary_1d(example_uniform_model(), 3)
        assert tpr == pytest.approx(1 / 3)
        assert tnr == 1.0
        assert g == pytest.approx(math.sqrt(1 / 3))

    def test_optimum_is_past_the_intersection(self):
        b, g = best_boundary_1d(example_uniform_model())
        assert b == 5.0
        assert g == pytest.approx(math.sqrt(Fraction(5, 9) * Fraction(5, 7)), abs=1e-12)
        tpr, tnr, _ = gm_boundary_1d(example_uniform_model(), b)
        assert (tpr, tnr) == (pytest.approx(5 / 9), pytest.approx(5 / 7))

    def test_gap_plateau_midpoint(self):
        b, g = best_boundary_1d(gap_model())
        assert b == 5.0  # midpoint of the zero-density gap [1, 9]
        assert g == 1.0

    def test_symmetric_overlap_vertex(self):
        model = DensityModel(
            positive=PiecewiseUniform1D([(Fraction(0), Fraction(2), Fraction(1, 2))]),
            negative=PiecewiseUniform1D([(Fraction(1), Fraction(3), Fraction(1, 2))]),
            prior_positive=0.5,
        )
        b, g = best_boundary_1d(model)
        assert b == pytest.approx(1.5)
        assert g == pytest.approx(0.75)


class TestAsymptoticGm:
    def test_separable_prototypes_perfect(self):
        g, se = asymptotic_gm([[0.5], [9.5]], [1, 0], gap_model(), seed=0)
        assert g == 1.0 and se == 0.0

    def test_one_class_missing_is_zero(self):
        g, se = asymptotic_gm([[0.5], [0.6]], [1, 1], gap_model())
        assert g == 0.0

    def test_matches_exact_boundary_analysis(self):
        # prototypes at 2.5 and 7.5 induce the boundary 5.0, whose exact GM
        # is known; the MC estimate must land within 3 standard errors
        model = example_uniform_model()
        g, se = asymptotic_gm([[2.5], [7.5]], [1, 0], model,
                              sample_count=40_000, seed=3)
        exact = math.sqrt((5 / 9) * (5 / 7))
        assert se > 0
        assert abs(g - exact) < 3 * se

    def test_2d_matches_grid_quadrature(self):
        model = example_mixture_model()
        pts = np.array([[-1.0, 1.0], [2.0, -2.0], [0.0, 0.0], [-0.5, -1.0]])
        labels = np.array([1, 1, 0, 0])
        g, se = asymptotic_gm(pts, labels, model, sample_count=60_000, seed=5)

        xs = np.linspace(-8.0, 8.0, 801)
        X, Y = np.meshgrid(xs, xs)
        grid = np.column_stack([X.ravel(), Y.ravel()])
        d2 = ((grid[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        pred = labels[np.argmin(d2, axis=1)]
        cell = (xs[1] - xs[0]) ** 2
        tpr = model.positive.pdf(grid)[pred == 1].sum() * cell
        tnr = model.negative.pdf(grid)[pred == 0].sum() * cell
        exact = math.sqrt(tpr * tnr)
        assert abs(g - exact) < 0.01

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            asymptotic_gm([[0.0], [1.0]], [1, 0], gap_model(), sample_count=10)


class TestVoronoiNeighbors:
    def test_1d_line(self):
        pts = [[0.0], [1.0], [2.0]]
        assert voronoi_neighbors(pts, 0) == {1}
        assert voronoi_neighbors(pts, 1) == {0, 2}

    def test_two_points(self):
        assert voronoi_neighbors([[0.0, 0.0], [1.0, 0.0]], 0) == {1}

    def test_grid_center_has_four_facets(self):
        pts = [[x, y] for x in (0.0, 1.0, 2.0) for y in (0.0, 1.0, 2.0)]
        center = pts.index([1.0, 1.0])
        nbrs = voronoi_neighbors(pts, center, probe_count=40_000)
        expected = {pts.index(p) for p in ([0.0, 1.0], [2.0, 1.0], [1.0, 0.0], [1.0, 2.0])}
        assert nbrs == expected

    def test_single_point_rejected(self):
        with pytest.raises(ValueError):
            voronoi_neighbors([[0.0]], 0)


class TestLemmaCheck:
    def test_inclusion_never_violated(self):
        rng = np.random.default_rng(4)
        pts = rng.random((8, 2))
        for i in range(8):
            assert lemma_check(pts, i, probe_count=5000, seed=i).inclusion_violations == 0

    def test_middle_cell_splits_to_both_sides(self):
        rep = lemma_check([[0.0], [1.0], [2.0]], 1, probe_count=20_000)
        assert rep.inclusion_violations == 0
        assert rep.neighbors == frozenset({0, 2})
        assert rep.expansion_misses == 0
        assert rep.probes_in_cell > 0

    def test_two_point_survivor_absorbs_cell(self):
        rep = lemma_check([[0.0], [3.0]], 0, probe_count=5000)
        assert rep.neighbors == frozenset({1})
        assert rep.expansion_misses == 0


class TestRemovalAnalysis:
    def test_duplicate_removal_is_neutral(self):
        # the duplicate never wins a tie, so nothing flips
        pts = [[0.5], [0.5], [9.5]]
        res = removal_analysis(pts, [1, 1, 0], 1, gap_model())
        assert res.gain == 0.0 and res.loss == 0.0
        assert res.margin == 0.0
        assert not res.predicted_improvement

    def test_outlier_removal_predicted_beneficial(self):
        # a positive prototype stranded deep in the negative support carves
        # out a wrong-label island; removing it must raise the rate product
        model = example_uniform_model()
        res = removal_analysis([[2.5], [9.5], [7.5]], [1, 1, 0], 1, model,
                               sample_count=40_000, seed=2)
        assert res.predicted_improvement
        assert res.margin > 5 * res.margin_se
        assert res.loss > 0 and res.gain > 0
        # after removal the induced boundary is 5.0 with known exact rates
        assert res.tpr_after == pytest.approx(5 / 9, abs=0.02)
        assert res.tnr_after == pytest.approx(5 / 7, abs=0.02)

    def test_margin_consistent_with_rates(self):
        model = example_uniform_model()
        res = removal_analysis([[2.5], [9.5], [7.5]], [1, 1, 0], 1, model, seed=0)
        assert res.margin == pytest.approx(
            res.tpr_after * res.tnr_after - res.tpr_before * res.tnr_before
        )

    def test_class_elimination_rejected(self):
        with pytest.raises(ValueError):
            removal_analysis([[0.0], [5.0]], [1, 0], 0, gap_model())


class TestExhaustiveSearch:
    def test_best_at_least_full_set(self):
        pts, labels, model = nonmonotone_example()
        per_card, (best, best_gm) = exhaustive_search(
            pts[:8], labels[[0, 1, 2, 5, 6, 7, 8, 9]], model, sample_count=2000
        )
        full_gm = per_card[8][1]
        assert best_gm >= full_gm

    def test_two_point_separable_optimum(self):
        per_card, (best, best_gm) = exhaustive_search(
            [[0.5], [9.5]], [1, 0], gap_model(), sample_count=2000
        )
        assert best_gm == 1.0
        assert set(best.tolist()) == {0, 1}
        assert list(per_card) == [2]

    def test_size_guard(self):
        pts = np.random.default_rng(0).random((21, 2))
        labels = np.array([1] * 5 + [0] * 16)
        with pytest.raises(ValueError):
            exhaustive_search(pts, labels, example_mixture_model())

    def test_single_class_subsets_skipped(self):
        per_card, _ = exhaustive_search([[0.5], [0.6], [9.5]], [1, 1, 0],
                                        gap_model(), sample_count=2000)
        # every recorded subset must contain the lone negative
        for k, (subset, _) in per_card.items():
            assert 2 in subset


class TestNonmonotoneExample:
    def test_shape_and_determinism(self):
        pts, labels, model = nonmonotone_example()
        assert pts.shape == (15, 2)
        assert labels.sum() == 5
        pts2, _, _ = nonmonotone_example()
        assert np.array_equal(pts, pts2)


class TestBayesDemo:
    def test_bayes_threshold_shift(self):
        # with a 1/9 prior the prior-weighted rule refuses points that the
        # balanced rule accepts
        model = example_mixture_model()
        X = np.array([[-1.0, 1.0]])
        assert bayes_classify(model, X, balanced=True)[0] == 1
        assert bayes_classify(model, X, balanced=False)[0] == 0

    def test_balanced_bayes_beats_classical_on_gm(self):
        out = cb_bb_demo(test_size=9000, seed=0, include_re=False)
        assert set(out) == {"cb", "bb"}
        assert out["bb"] > out["cb"]
        assert 0.0 < out["cb"] < out["bb"] <= 1.0

    def test_deterministic(self):
        a = cb_bb_demo(test_size=2000, seed=3, include_re=False)
        b = cb_bb_demo(test_size=2000, seed=3, include_re=False)
        assert a == b


class TestModelFromConfig:
    def test_dict_round_trip(self):
        cfg = {
            "prior_positive": 0.5,
            "positive": {"type": "piecewise_uniform",
                         "segments": [[0.0, 9.0, 1 / 9]]},
            "negative": {"type": "piecewise_uniform",
                         "segments": [[3.0, 10.0, 1 / 7]]},
        }
        model = model_from_config(cfg)
        b, g = best_boundary_1d(model)
        assert b == pytest.approx(5.0)

    def test_yaml_file(self, tmp_path):
        path = tmp_path / "model.yaml"
        path.write_text(
            "prior_positive: 0.111\n"
            "positive:\n  type: gaussian_mixture\n"
            "  components: [[1.0, [2.0, 0.0], [1.0, 1.0]]]\n"
            "negative:\n  type: gaussian_mixture\n"
            "  components: [[1.0, [0.0, 0.0], [1.0, 1.0]]]\n"
        )
        model = model_from_config(str(path))
        assert model.prior_positive == 0.111
        assert bayes_classify(model, [[5.0, 0.0]], balanced=True)[0] == 1

    def test_unknown_type(self):
        with pytest.raises(ValueError):
            model_from_config({
                "prior_positive": 0.5,
                "positive": {"type": "cauchy"},
                "negative": {"type": "cauchy"},
            })
