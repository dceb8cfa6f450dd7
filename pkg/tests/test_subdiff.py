import math

import numpy as np
import pytest

from tensorspectra import (
    DualExponents,
    SchattenParams,
    all_mode_spectra,
    check_membership,
    conjugate_value_tuple,
    dual_vector_maximizer,
    estimate_tensor_conjugate,
    holder_conjugate,
    inner,
    lp_norm,
    make_odeco,
    mixed_norm,
    nuclear_norm,
    random_odeco,
    random_symmetric_odeco,
    schatten_norm,
    schatten_subgradient,
    schatten_value_tuple,
    subgradient_inequality_test,
    svd,
    to_dense,
    tuple_membership,
    tuple_subgradient,
)
from tensorspectra.verify import grid_best_pairing

PARAM_GRID_3 = [
    SchattenParams(1, 1, 1 / 3),
    SchattenParams(2, 2, 1),
    SchattenParams(3, 2, 1),
    SchattenParams(2, 1, 1),
    SchattenParams(1, 2, 1 / 3),
]


def diag_tensor(shape, values):
    x = np.zeros(shape)
    for j, v in enumerate(values):
        x[(j,) * len(shape)] = v
    return x


def test_holder_conjugate():
    assert holder_conjugate(1.0) == math.inf
    assert holder_conjugate(2.0) == 2.0
    assert holder_conjugate(3.0) == 1.5
    assert holder_conjugate(1.5) == 3.0
    with pytest.raises(ValueError):
        holder_conjugate(0.5)
    duals = DualExponents.of(SchattenParams(1, 2, 1))
    assert duals.p_star == math.inf and duals.q_star == 2.0


class TestDualMaximizer:
    def test_euclidean_case(self):
        result = dual_vector_maximizer([2.0, 1.0], 2.0)
        assert np.allclose(result.vector, np.array([2.0, 1.0]) / math.sqrt(5.0))

    def test_l1_case(self):
        result = dual_vector_maximizer([2.0, 1.0], 1.0)
        assert np.array_equal(result.vector, [1.0, 1.0])
        assert not result.free_coordinates.any()
        result = dual_vector_maximizer([2.0, 0.0], 1.0)
        assert np.array_equal(result.vector, [1.0, 1.0])
        assert np.array_equal(result.free_coordinates, [False, True])

    def test_cubic_case(self):
        # (s_j / ||s||_3)^2 with ||s||_3 = 9^(1/3)
        result = dual_vector_maximizer([2.0, 1.0], 3.0)
        assert np.allclose(result.vector, np.array([4.0, 1.0]) / 9.0 ** (2.0 / 3.0))
        assert lp_norm(result.vector, 1.5) == pytest.approx(1.0, abs=1e-12)
        assert float(np.dot(result.vector, [2.0, 1.0])) == pytest.approx(
            9.0 ** (1.0 / 3.0), rel=1e-12
        )

    def test_zero_vector(self):
        result = dual_vector_maximizer([0.0, 0.0], 2.0)
        assert result.whole_ball
        assert np.array_equal(result.vector, [1.0, 0.0])

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            dual_vector_maximizer([1.0, -1.0], 2.0)

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
    @pytest.mark.parametrize("n", [2, 3])
    def test_against_grid_oracle(self, n, p):
        rng = np.random.default_rng(10 * n + int(2 * p))
        s = np.abs(rng.standard_normal(n))
        s /= np.linalg.norm(s)
        result = dual_vector_maximizer(s, p)
        pairing = float(np.dot(result.vector, s))
        oracle = grid_best_pairing(s, p)
        assert oracle - 1e-9 <= pairing <= oracle + 1e-3
        assert lp_norm(result.vector, holder_conjugate(p)) == pytest.approx(
            1.0, abs=1e-12
        )


class TestTupleCalculus:
    def test_value_zero_tuple(self):
        assert schatten_value_tuple(np.zeros((3, 2)), SchattenParams(2, 2, 1)) == 0.0

    def test_value_matches_tensor_norm(self):
        x = diag_tensor((2, 2, 2), [2.0, 1.0])
        value = schatten_value_tuple(all_mode_spectra(x), SchattenParams(2, 2, 1))
        assert value == pytest.approx(math.sqrt(15.0), abs=1e-12)
        assert value == pytest.approx(
            schatten_norm(x, SchattenParams(2, 2, 1)), abs=1e-12
        )

    def test_value_homogeneous(self):
        t = np.array([[2.0, 1.0], [1.5, 0.5], [1.0, 1.0]])
        params = SchattenParams(3, 2, 0.4)
        assert schatten_value_tuple(3.0 * t, params) == pytest.approx(
            3.0 * schatten_value_tuple(t, params), rel=1e-14
        )

    def test_subgradient_euclidean_example(self):
        # all rows (2, 1): v* = (2,1)/sqrt(5), omega = sqrt(5) * ones,
        # w* = ones/sqrt(3), rows of g = (2,1)/sqrt(15)
        t = np.tile([2.0, 1.0], (3, 1))
        result = tuple_subgradient(t, SchattenParams(2, 2, 1))
        expected_row = np.array([2.0, 1.0]) / math.sqrt(15.0)
        assert np.allclose(result.canonical, np.tile(expected_row, (3, 1)))
        assert not result.whole_ball

    def test_subgradient_nuclear_example(self):
        t = np.tile([2.0, 1.0], (3, 1))
        result = tuple_subgradient(t, SchattenParams(1, 1, 1 / 3))
        assert np.allclose(result.canonical, np.full((3, 2), 1.0 / 3.0))

    def test_subgradient_zero_tuple(self):
        result = tuple_subgradient(np.zeros((3, 2)), SchattenParams(2, 2, 1))
        assert result.whole_ball
        assert np.array_equal(result.canonical, np.zeros((3, 2)))

    def test_subgradient_zero_mode_forced_when_q_above_one(self):
        t = np.array([[2.0, 1.0], [0.0, 0.0], [1.0, 1.0]])
        result = tuple_subgradient(t, SchattenParams(2, 2, 1))
        assert result.mode_free[1]
        assert np.allclose(result.canonical[1], 0.0)

    @pytest.mark.parametrize("params", PARAM_GRID_3)
    def test_canonical_passes_membership(self, params):
        rng = np.random.default_rng(17)
        for _ in range(20):
            t = np.abs(rng.standard_normal((3, 3)))
            if rng.random() < 0.3:
                t[1] = 0.0
            result = tuple_subgradient(t, params)
            assert tuple_membership(t, result.canonical, params)

    def test_membership_rejects_doubled(self):
        t = np.tile([2.0, 1.0], (3, 1))
        params = SchattenParams(1, 1, 1 / 3)
        g = tuple_subgradient(t, params).canonical
        assert tuple_membership(t, g, params)
        assert not tuple_membership(t, 2.0 * g, params)

    def test_membership_at_zero_is_dual_ball(self):
        params = SchattenParams(2, 2, 1)
        t = np.zeros((3, 2))
        small = np.full((3, 2), 0.1)
        assert tuple_membership(t, small, params)
        big = np.full((3, 2), 10.0)
        assert not tuple_membership(t, big, params)

    def test_conjugate_value(self):
        params = SchattenParams(2, 2, 1)
        assert conjugate_value_tuple(np.zeros((3, 2)), params) == 0.0
        boundary = np.zeros((3, 2))
        boundary[0, 0] = params.lam
        assert conjugate_value_tuple(boundary, params) == 0.0
        assert conjugate_value_tuple(2.0 * boundary, params) == math.inf


class TestConstruction:
    def test_nuclear_diag_example(self):
        rep = make_odeco([2.0, 1.0], [np.eye(2)] * 3)
        g = schatten_subgradient(rep, SchattenParams(1, 1, 1 / 3))
        assert np.allclose(g, diag_tensor((2, 2, 2), [1.0, 1.0]), atol=1e-14)
        assert inner(g, to_dense(rep)) == pytest.approx(3.0, abs=1e-12)

    def test_euclidean_diag_example(self):
        rep = make_odeco([2.0, 1.0], [np.eye(2)] * 3)
        g = schatten_subgradient(rep, SchattenParams(2, 2, 1))
        tau = math.sqrt(3.0) * np.array([2.0, 1.0]) / math.sqrt(5.0)
        assert np.allclose(g, diag_tensor((2, 2, 2), tau), atol=1e-12)
        assert inner(g, to_dense(rep)) == pytest.approx(math.sqrt(15.0), rel=1e-12)

    def test_rank_one_weight(self):
        rep = random_odeco((3, 3, 3), 1, 3)
        for params in PARAM_GRID_3:
            g = schatten_subgradient(rep, params)
            spectra = all_mode_spectra(g)
            expected = params.lam * 3.0 ** (1.0 / params.q)
            assert spectra[0][0] == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("params", PARAM_GRID_3)
    def test_pairing_identity(self, params):
        rep = random_odeco((3, 3, 3), 2, 21)
        dense = to_dense(rep)
        g = schatten_subgradient(rep, params)
        assert inner(g, dense) == pytest.approx(
            schatten_norm(dense, params), rel=1e-10
        )


class TestMembership:
    @pytest.mark.parametrize("params", PARAM_GRID_3)
    def test_construction_accepted(self, params):
        rep = random_odeco((3, 3, 3), 2, 30)
        dense = to_dense(rep)
        g = schatten_subgradient(rep, params)
        certificate = check_membership(dense, g, params)
        assert certificate.accepted, certificate.notes

    def test_doubled_rejected_with_dual_value_two(self):
        rep = random_odeco((3, 3, 3), 3, 31)
        dense = to_dense(rep)
        params = SchattenParams(1, 1, 1 / 3)
        g = schatten_subgradient(rep, params)
        certificate = check_membership(dense, 2.0 * g, params)
        assert not certificate.accepted
        assert certificate.dual_norm_value == pytest.approx(2.0, rel=1e-10)

    def test_all_ones_diag_is_its_own_subgradient(self):
        x = diag_tensor((2, 2, 2), [1.0, 1.0])
        certificate = check_membership(x, x, SchattenParams(1, 1, 1 / 3))
        assert certificate.accepted

    def test_scaling_covariance(self):
        rep = random_odeco((3, 3, 3), 2, 32)
        dense = to_dense(rep)
        params = SchattenParams(2, 2, 1)
        g = schatten_subgradient(rep, params)
        for c in (0.25, 4.0):
            assert check_membership(c * dense, g, params).accepted
        assert not check_membership(dense, 0.5 * g, params).accepted

    def test_symmetric_odeco_point(self):
        rep = random_symmetric_odeco(3, 3, 2, 33)
        dense = to_dense(rep)
        for params in PARAM_GRID_3:
            g = schatten_subgradient(rep, params)
            assert check_membership(dense, g, params).accepted

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            check_membership(
                np.ones((2, 2)), np.ones((2, 3)), SchattenParams(1, 1, 0.5)
            )


class TestSamplingOracle:
    @pytest.mark.parametrize("params", PARAM_GRID_3)
    def test_construction_slack(self, params):
        rep = random_odeco((3, 3, 3), 2, 40)
        dense = to_dense(rep)
        g = schatten_subgradient(rep, params)
        slack = subgradient_inequality_test(dense, g, params, trials=2000, seed=0)
        assert slack >= -1e-9

    def test_zero_candidate_detected(self):
        rep = random_odeco((3, 3, 3), 2, 41)
        dense = to_dense(rep)
        params = SchattenParams(1, 1, 1 / 3)
        slack = subgradient_inequality_test(
            dense, np.zeros((3, 3, 3)), params, trials=100, seed=0
        )
        # y = 0 sits in the pool, where the slack equals -N(x)
        assert slack == pytest.approx(-nuclear_norm(dense), rel=1e-12)

    def test_zero_point_zero_candidate(self):
        params = SchattenParams(2, 2, 1)
        slack = subgradient_inequality_test(
            np.zeros((2, 2, 2)), np.zeros((2, 2, 2)), params, trials=200, seed=0
        )
        assert slack >= -1e-12


class TestMatrixReduction:
    def test_polar_factor(self):
        params = SchattenParams(1, 1, 0.5)
        for seed in range(5):
            rep = random_odeco((4, 4), 4, seed)
            g = schatten_subgradient(rep, params)
            decomposition = svd(to_dense(rep))
            assert np.max(np.abs(g - decomposition.u @ decomposition.vt)) <= 1e-10


class TestScalingConvention:
    """The raw-spectra norm and the rescaled-tuple view must agree.

    The spectra tuple scaled by 1/sqrt(D) paired with a tuple norm scaled by
    lam*sqrt(D) reproduces the tensor norm, and its conjugate indicator
    matches the dual-ball test used everywhere else.
    """

    @pytest.mark.parametrize("params", PARAM_GRID_3)
    def test_norm_correspondence(self, params):
        rep = random_odeco((3, 4, 3), 2, 5)
        dense = to_dense(rep)
        spectra = all_mode_spectra(dense)
        n = max(s.size for s in spectra)
        padded = np.vstack(
            [np.concatenate([s, np.zeros(n - s.size)]) for s in spectra]
        )
        scaled = SchattenParams(params.p, params.q, params.lam * math.sqrt(3.0))
        assert schatten_value_tuple(padded / math.sqrt(3.0), scaled) == pytest.approx(
            schatten_norm(dense, params), rel=1e-12, abs=1e-12
        )

    def test_conjugate_indicator_correspondence(self):
        params = SchattenParams(2, 2, 1)
        duals = DualExponents.of(params)
        rep = random_odeco((3, 3, 3), 3, 6)
        dense = to_dense(rep)
        ratio = mixed_norm(all_mode_spectra(dense), duals.p_star, duals.q_star) / (
            params.lam * 3
        )
        scaled = SchattenParams(2, 2, math.sqrt(3.0))
        for factor, expected in ((0.9, 0.0), (1.1, math.inf)):
            x = dense * (factor / ratio)
            tuple_form = np.vstack(all_mode_spectra(x)) / math.sqrt(3.0)
            assert conjugate_value_tuple(tuple_form, scaled) == expected

    @pytest.mark.parametrize("params", PARAM_GRID_3)
    def test_non_cubic_construction_accepted(self, params):
        rep = random_odeco((3, 4, 3), 2, 7)
        dense = to_dense(rep)
        g = schatten_subgradient(rep, params)
        assert check_membership(dense, g, params).accepted


class TestConjugateEstimate:
    def test_zero_input(self):
        params = SchattenParams(1, 1, 1 / 3)
        estimate = estimate_tensor_conjugate(
            np.zeros((3, 3, 3)), params, budget=100, seed=0
        )
        assert estimate.best_value == 0.0
        assert estimate.evaluations <= 100

    @pytest.mark.parametrize("params", PARAM_GRID_3[:2])
    def test_inside_dual_ball(self, params):
        rep = random_odeco((3, 3, 3), 3, 50)
        dense = to_dense(rep)
        duals = DualExponents.of(params)
        ratio = mixed_norm(all_mode_spectra(dense), duals.p_star, duals.q_star) / (
            params.lam * 3
        )
        estimate = estimate_tensor_conjugate(
            dense * (0.9 / ratio), params, budget=20_000, seed=0
        )
        assert estimate.best_value <= 1e-6
        assert estimate.evaluations == 20_000  # full budget spent when no certificate

    @pytest.mark.parametrize("params", PARAM_GRID_3)
    def test_outside_dual_ball(self, params):
        rep = random_odeco((3, 3, 3), 3, 51)
        dense = to_dense(rep)
        duals = DualExponents.of(params)
        ratio = mixed_norm(all_mode_spectra(dense), duals.p_star, duals.q_star) / (
            params.lam * 3
        )
        scaled = dense * (1.1 / ratio)
        estimate = estimate_tensor_conjugate(
            scaled, params, budget=100_000, seed=0, target=1e-3
        )
        assert estimate.best_value >= 1e-3
        assert estimate.evaluations <= 100_000
        # the reported value is actually attained by the returned maximizer
        attained = inner(scaled, estimate.maximizer) - schatten_norm(
            estimate.maximizer, params
        )
        assert attained == pytest.approx(estimate.best_value, rel=1e-9)
