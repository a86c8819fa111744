import math

import numpy as np
import pytest

from omnibell.qcore import Direction, build_ghz, ghz_noise_mixture
from omnibell.sphereint import (BASIS_NORM, PROJECTION_BOUND, ResponseFunction, basis_gram,
                                constant_response, inner_product_EE, lhv_correlation,
                                midpoint_grid, project_response, project_response_mc,
                                random_sign_of_dot, random_two_caps, sign_of_dot,
                                sphere_quadrature, two_caps, verify_lhv_bound)
from omnibell.tensorlab import CorrelationTensor, correlation_tensor

from oracles import TMAX_MIXTURE_F1, brute_force_pair_overlap

UP = Direction(0.0, 0.0)


class TestQuadrature:
    def test_degree_two_orthogonality(self):
        q = sphere_quadrature(2)
        c = q.cartesian
        for i in range(3):
            for k in range(3):
                expected = 4 * math.pi / 3 if i == k else 0.0
                assert q.integrate(c[:, i] * c[:, k]) == pytest.approx(expected, abs=1e-13)

    @pytest.mark.parametrize("degree", [0, 1, 2, 5, 8])
    def test_total_weight(self, degree):
        assert sphere_quadrature(degree).weights.sum() == pytest.approx(4 * math.pi, abs=1e-12)

    def test_odd_triple_product_vanishes(self):
        q = sphere_quadrature(2)
        c = q.cartesian
        assert q.integrate(c[:, 0] * c[:, 1] * c[:, 2]) == pytest.approx(0.0, abs=1e-13)

    @pytest.mark.parametrize("degree", [4, 6])
    def test_higher_degree_monomials(self, degree):
        # int z^d dOmega = 4 pi / (d + 1) for even d
        q = sphere_quadrature(degree)
        z = q.cartesian[:, 2]
        assert q.integrate(z**degree) == pytest.approx(4 * math.pi / (degree + 1), abs=1e-12)

    def test_node_counts(self):
        q = sphere_quadrature(3)
        assert len(q) == 2 * 4 and q.exact_degree == 3

    def test_rejects_negative_degree(self):
        with pytest.raises(ValueError):
            sphere_quadrature(-1)

    def test_midpoint_grid_weight(self):
        assert midpoint_grid(40, 80).weights.sum() == pytest.approx(4 * math.pi, abs=1e-12)

    def test_gram_is_identity(self):
        for q in (sphere_quadrature(2), sphere_quadrature(4)):
            assert np.max(np.abs(basis_gram(q) - np.eye(3))) < 1e-10


class TestInnerProductEE:
    def test_ghz2(self, ghz2_tensor):
        assert inner_product_EE(ghz2_tensor) == pytest.approx((4 * math.pi / 3) ** 2 * 3,
                                                               abs=1e-9)

    def test_zero(self):
        assert inner_product_EE(CorrelationTensor.zeros(3)) == 0.0

    def test_mixture_half_visibility(self, mixture_tensor):
        expected = (4 * math.pi / 3) ** 6 * 93 * 0.25 / 9
        assert inner_product_EE(mixture_tensor(0.5)) == pytest.approx(expected, abs=1e-7)

    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_identity_on_ghz(self, n):
        t = correlation_tensor(build_ghz(n, flip_last=n % 2 == 0))
        target = (4 * math.pi / 3) ** n * t.frobenius_sq()
        assert abs(inner_product_EE(t) - target) <= 1e-7 * (1 + t.frobenius_sq())

    def test_random_tensor_with_finer_rule(self):
        t = CorrelationTensor(np.random.default_rng(2).uniform(-1, 1, (3, 3, 3)))
        coarse = inner_product_EE(t)
        fine = inner_product_EE(t, sphere_quadrature(6))
        assert coarse == pytest.approx(fine, rel=1e-12)


class TestProjection:
    def test_sign_of_cos_theta_saturates(self):
        res = project_response(sign_of_dot([0, 0, 1]))
        assert PROJECTION_BOUND == pytest.approx(math.sqrt(3 * math.pi), abs=1e-15)
        assert res.norm == pytest.approx(PROJECTION_BOUND, abs=1e-3)
        assert res.beta == pytest.approx(0.0, abs=1e-9)

    def test_constant_has_no_projection(self):
        assert project_response(constant_response(1)).norm == pytest.approx(0.0, abs=1e-9)

    def test_sign_of_x(self):
        res = project_response(sign_of_dot([1, 0, 0]))
        assert res.norm == pytest.approx(PROJECTION_BOUND, abs=1e-3)
        assert res.beta == pytest.approx(math.pi / 2, abs=1e-9)
        assert res.gamma == pytest.approx(0.0, abs=1e-9)

    def test_angles_follow_axis(self):
        d = Direction(1.1, 4.0)
        res = project_response(sign_of_dot(d.vector))
        assert res.beta == pytest.approx(d.theta, abs=1e-3)
        assert res.gamma == pytest.approx(d.phi, abs=1e-3)

    def test_random_sign_of_dot_bound(self):
        rng = np.random.default_rng(0)
        grid = midpoint_grid()
        norms = [project_response(random_sign_of_dot(rng), grid).norm for _ in range(200)]
        assert max(norms) <= PROJECTION_BOUND + 1e-3

    def test_random_two_caps_bound(self):
        rng = np.random.default_rng(1)
        grid = midpoint_grid()
        norms = [project_response(random_two_caps(rng), grid).norm for _ in range(50)]
        assert max(norms) <= PROJECTION_BOUND + 1e-3
        assert min(norms) >= 0.0

    def test_hemisphere_cap_equals_sign_of_dot(self):
        # one cap of half-angle pi/2 and an empty second cap is the hemisphere response
        cap = two_caps([0, 0, 1], math.pi / 2, [1, 0, 0], 0.0)
        assert project_response(cap).norm == pytest.approx(PROJECTION_BOUND, abs=1e-3)

    def test_monte_carlo_within_three_standard_errors(self):
        resp = sign_of_dot([0.3, -0.5, 0.8])
        mc, se = project_response_mc(resp, seed=7)
        quad = np.array(project_response(resp).components)
        assert np.all(np.abs(mc - quad) <= 3 * se)

    def test_monte_carlo_is_seeded(self):
        resp = sign_of_dot([0, 1, 0])
        a, _ = project_response_mc(resp, samples=1000, seed=3)
        b, _ = project_response_mc(resp, samples=1000, seed=3)
        np.testing.assert_array_equal(a, b)


class TestResponseFunction:
    def test_rejects_non_binary_output(self):
        bad = ResponseFunction(lambda v: np.zeros(v.shape[:-1]))
        with pytest.raises(ValueError):
            bad.values(np.eye(3))

    def test_tie_goes_to_plus_one(self):
        assert sign_of_dot([0, 0, 1])(Direction(math.pi / 2, 0.0)) == 1

    def test_constant_rejects_other_values(self):
        with pytest.raises(ValueError):
            constant_response(0)

    def test_descriptor(self):
        assert sign_of_dot([0, 0, 2]).descriptor == {"kind": "sign_of_dot",
                                                     "axis": [0.0, 0.0, 1.0]}


class TestLhvCorrelation:
    def test_constant(self):
        rng = np.random.default_rng(0)
        dirs = [Direction(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
                for _ in range(4)]
        assert lhv_correlation([constant_response(1)] * 4, dirs) == 1

    def test_aligned(self):
        assert lhv_correlation([sign_of_dot([0, 0, 1])] * 2, [UP, UP]) == 1

    def test_mixed_sign(self):
        responses = [sign_of_dot([0, 0, 1]), sign_of_dot([0, 0, -1])]
        assert lhv_correlation(responses, [UP, UP]) == -1

    def test_count_mismatch(self):
        with pytest.raises(ValueError):
            lhv_correlation([constant_response()], [UP, UP])


class TestVerifyLhvBound:
    def test_ghz2_dual_path(self, ghz2_tensor):
        grid = midpoint_grid(60, 120)
        responses = [sign_of_dot([0, 0, 1])] * 2
        lhs, rhs = verify_lhv_bound(responses, ghz2_tensor, grid)
        brute = brute_force_pair_overlap(*responses, ghz2_tensor.values, grid)
        assert lhs == pytest.approx(brute, abs=1e-6)
        # each response moment is 2 pi along z, so lhs = (2 pi)^2 T_zz: the bound is tight
        assert lhs == pytest.approx(4 * math.pi**2, abs=1e-9)
        assert rhs == pytest.approx(4 * math.pi**2, abs=1e-9)
        assert lhs <= rhs + 1e-6

    def test_ghz2_dual_path_random_responses(self, ghz2_tensor):
        rng = np.random.default_rng(5)
        grid = midpoint_grid(60, 120)
        for _ in range(3):
            responses = [random_two_caps(rng), random_sign_of_dot(rng)]
            lhs, _ = verify_lhv_bound(responses, ghz2_tensor, grid, tmax=1.0)
            brute = brute_force_pair_overlap(*responses, ghz2_tensor.values, grid)
            assert lhs == pytest.approx(brute, abs=1e-6)

    def test_constant_responses(self, mixture_tensor):
        lhs, rhs = verify_lhv_bound([constant_response(1)] * 6, mixture_tensor(1.0),
                                    tmax=TMAX_MIXTURE_F1)
        assert lhs == pytest.approx(0.0, abs=1e-9)
        assert lhs <= rhs

    def test_random_tuples_against_mixture(self, mixture_tensor):
        t = mixture_tensor(1.0)
        rng = np.random.default_rng(11)
        grid = midpoint_grid()
        worst = -math.inf
        for _ in range(100):
            lhs, rhs = verify_lhv_bound([random_sign_of_dot(rng) for _ in range(6)], t, grid,
                                        tmax=TMAX_MIXTURE_F1)
            assert lhs <= rhs + 1e-6
            worst = max(worst, lhs - rhs)
        assert worst < 0

    def test_default_tmax_uses_optimizer(self, ghz2_tensor):
        _, rhs = verify_lhv_bound([constant_response()] * 2, ghz2_tensor)
        assert rhs == pytest.approx(4 * math.pi**2, abs=1e-6)

    def test_count_mismatch(self, ghz2_tensor):
        with pytest.raises(ValueError):
            verify_lhv_bound([constant_response()], ghz2_tensor)

    def test_basis_norm(self):
        assert BASIS_NORM**2 * 4 * math.pi / 3 == pytest.approx(1.0, abs=1e-15)


def test_mixture_state_is_valid_input():
    # sanity: the sphere identity also holds for a noisy six-qubit state
    t = correlation_tensor(ghz_noise_mixture(0.3))
    target = (4 * math.pi / 3) ** 6 * t.frobenius_sq()
    assert inner_product_EE(t) == pytest.approx(target, rel=1e-7)
