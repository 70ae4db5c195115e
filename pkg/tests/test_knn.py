import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gmsel.knn import (
    ReferenceSet,
    classify_1nn,
    classify_knn,
    distance,
    loo_gm,
    pairwise_distances,
)

finite_vec = arrays(
    np.float64, 3,
    elements=st.floats(-100, 100, allow_nan=False, allow_infinity=False),
)


class TestDistance:
    def test_identity(self):
        assert distance([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_unit_interval(self):
        assert distance([0.0], [1.0]) == 1.0

    def test_nominal_overlap(self):
        mask = np.array([True])
        assert distance([0.0], [1.0], mask) == 1.0
        assert distance([2.0], [2.0], mask) == 0.0

    def test_mixed_quadrature(self):
        # one numeric difference of 1 plus one nominal mismatch
        mask = np.array([False, True])
        assert distance([0.0, 0.0], [1.0, 1.0], mask) == pytest.approx(np.sqrt(2))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            distance([0.0], [0.0, 1.0])

    @given(a=finite_vec, b=finite_vec)
    def test_symmetry(self, a, b):
        assert distance(a, b) == pytest.approx(distance(b, a))

    @given(a=finite_vec, b=finite_vec, c=finite_vec)
    @settings(max_examples=200)
    def test_triangle_inequality(self, a, b, c):
        assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


class TestClassify1NN:
    X = np.array([[0.0], [1.0]])
    y = np.array([1, 0])

    def test_nearest_wins(self):
        ref = ReferenceSet(np.array([0, 1]))
        assert classify_1nn(self.X, self.y, ref, [[0.2]])[0] == 1

    def test_tie_breaks_to_lowest_index(self):
        ref = ReferenceSet(np.array([0, 1]))
        assert classify_1nn(self.X, self.y, ref, [[0.5]])[0] == 1

    def test_single_negative_reference(self):
        ref = ReferenceSet(np.array([1]))
        assert classify_1nn(self.X, self.y, ref, [[0.0]])[0] == 0

    def test_empty_reference_set_rejected(self):
        with pytest.raises(ValueError):
            ReferenceSet(np.array([], dtype=int))

    def test_order_invariance_modulo_tie_rule(self):
        rng = np.random.default_rng(0)
        X = rng.random((20, 2))
        y = (rng.random(20) < 0.3).astype(int)
        q = rng.random((10, 2))
        a = classify_1nn(X, y, np.array([3, 7, 11, 15]), q)
        b = classify_1nn(X, y, np.array([15, 3, 11, 7]), q)
        assert np.array_equal(a, b)


class TestClassifyKNN:
    def test_k1_equals_1nn(self):
        rng = np.random.default_rng(1)
        X = rng.random((30, 3))
        y = (rng.random(30) < 0.4).astype(int)
        ref = np.arange(30)
        q = rng.random((15, 3))
        assert np.array_equal(
            classify_knn(X, y, ref, q, k=1), classify_1nn(X, y, ref, q)
        )

    def test_majority_of_three(self):
        X = np.array([[0.0], [0.1], [0.2], [5.0]])
        y = np.array([1, 1, 0, 0])
        assert classify_knn(X, y, np.arange(4), [[0.0]], k=3)[0] == 1

    def test_even_vote_tie_goes_positive(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([1, 0])
        assert classify_knn(X, y, np.arange(2), [[0.5]], k=2)[0] == 1

    def test_k_too_large(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([1, 0])
        with pytest.raises(ValueError):
            classify_knn(X, y, np.arange(2), [[0.5]], k=3)


class TestLooGm:
    def test_separated_clusters_full_retention(self):
        X = np.array([[0.0], [0.5], [10.0], [10.5]])
        y = np.array([1, 1, 0, 0])
        assert loo_gm(X, y, np.arange(4)) == 1.0

    def test_missing_positives_gives_zero(self):
        X = np.array([[0.0], [10.0], [11.0]])
        y = np.array([1, 0, 0])
        assert loo_gm(X, y, np.array([1, 2])) == 0.0

    def test_two_prototype_line(self):
        # + at 0,1,2 and - at 10,11,12; retaining {0, 10}.  Hand enumeration:
        # the four non-retained instances are classified correctly, but each
        # retained prototype is evaluated over retained-minus-itself and flips,
        # so TPR = TNR = 2/3 and GM = 2/3.
        X = np.array([[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]])
        y = np.array([1, 1, 1, 0, 0, 0])
        assert loo_gm(X, y, np.array([0, 3])) == pytest.approx(2 / 3)
        # retaining two prototypes per class removes the flip entirely
        assert loo_gm(X, y, np.array([0, 1, 3, 4])) == 1.0

    def test_self_excluded(self):
        # each instance's nearest other-retained neighbour is the other class
        X = np.array([[0.0], [0.1]])
        y = np.array([1, 0])
        assert loo_gm(X, y, np.arange(2)) == 0.0


class TestPairwise:
    def test_matches_scalar_distance(self):
        rng = np.random.default_rng(2)
        A = rng.random((5, 4))
        B = rng.random((6, 4))
        mask = np.array([False, True, False, True])
        D = pairwise_distances(A, B, mask)
        for i in range(5):
            for j in range(6):
                assert D[i, j] == pytest.approx(distance(A[i], B[j], mask))
