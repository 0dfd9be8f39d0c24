import math

import numpy as np
import pytest
from scipy.integrate import dblquad, quad
from scipy.special import gammainc, gammaincc
from scipy.stats import chi2

from qzonal.errors import DomainError
from qzonal.hypergeom import TruncationPolicy
from qzonal.mc import RngStream, sample_qnormal
from qzonal.qalg import QMatrix
from qzonal.wishart import (
    EigDensityParams,
    WishartParams,
    isotropic_params,
    joint_eig_logpdf,
    lambda_max_cdf,
    lambda_max_cdf_grid,
    lambda_max_pdf,
    lambda_max_pdf_grid,
    lambda_min_pdf,
    lambda_min_sf,
    prob_greater,
    prob_less,
    wishart_logpdf,
)

DEEP = TruncationPolicy(max_degree=170, layer_tol=1e-11, hard_fail_on_cap=True)


def gamma_logpdf(w, shape, rate):
    return shape * math.log(rate) + (shape - 1) * math.log(w) - rate * w - math.lgamma(shape)


def random_spd(rng, m):
    x = QMatrix(rng.normal(0.0, 1.0, size=(m, m, 4)))
    return x.H @ x + QMatrix.identity(m)


class TestParams:
    def test_isotropic(self):
        p = isotropic_params(2, 3, 2.0)
        assert p.m == 2 and p.n == 3
        assert p.sigma.entry(0, 0).w == 2.0

    def test_n_less_than_m_rejected(self):
        with pytest.raises(DomainError):
            isotropic_params(3, 2)

    def test_non_pd_sigma_rejected(self):
        with pytest.raises(DomainError):
            WishartParams(2, 3, QMatrix.diag([1.0, -1.0]))

    def test_eig_density_params(self):
        with pytest.raises(DomainError):
            EigDensityParams(2, 3, 0.0)


class TestWishartLogpdf:
    def test_m1_matches_gamma_density(self):
        # W = (1/4) chi^2_{4n} for sigma2 = 1: Gamma(2n, rate 2)
        for n in (1, 2, 4):
            p = isotropic_params(1, n, 1.0)
            for w in (0.3, 1.0, 2.5):
                got = wishart_logpdf(QMatrix.diag([w]), p)
                want = gamma_logpdf(w, 2 * n, 2.0)
                assert got == pytest.approx(want, rel=1e-10)

    def test_m1_normalization_by_quadrature(self):
        p = isotropic_params(1, 2, 1.0)
        total, _ = quad(lambda w: math.exp(wishart_logpdf(QMatrix.diag([w]), p)),
                        0, 40)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_scaling_change_of_variables(self):
        # the Hermitian quaternion matrix space has real dimension m(2m-1),
        # so densities satisfy logpdf(cW; c Sigma) + m(2m-1) log c = logpdf(W; Sigma)
        rng = np.random.default_rng(5)
        m, n = 2, 3
        w = random_spd(rng, m)
        sigma = random_spd(rng, m)
        p1 = WishartParams(m, n, sigma)
        for c in (0.5, 2.0, 3.7):
            p2 = WishartParams(m, n, sigma * c)
            lhs = wishart_logpdf(w * c, p2) + m * (2 * m - 1) * math.log(c)
            rhs = wishart_logpdf(w, p1)
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_rejects_non_pd(self):
        p = isotropic_params(2, 2, 1.0)
        with pytest.raises(DomainError):
            wishart_logpdf(QMatrix.diag([1.0, -0.5]), p)


class TestJointEigDensity:
    def test_m1_reduces_to_wishart_logpdf(self):
        p = EigDensityParams(1, 3, 1.5)
        q = isotropic_params(1, 3, 1.5)
        for lam in (0.4, 1.0, 3.3):
            assert joint_eig_logpdf([lam], p) == pytest.approx(
                wishart_logpdf(QMatrix.diag([lam]), q), rel=1e-12)

    @pytest.mark.parametrize("n", [2, 3])
    def test_m2_normalization(self, n):
        p = EigDensityParams(2, n, 1.0)

        def dens(l2, l1):
            if not l1 > l2 > 0:
                return 0.0
            return math.exp(joint_eig_logpdf([l1, l2], p))

        total, _ = dblquad(dens, 0, 60, 0, lambda l1: l1)
        assert total == pytest.approx(1.0, abs=1e-4)

    def test_printed_rate_fails_normalization(self):
        p = EigDensityParams(2, 2, 1.0)

        def dens(l2, l1):
            if not l1 > l2 > 0:
                return 0.0
            return math.exp(joint_eig_logpdf([l1, l2], p, printed_rate=True))

        total, _ = dblquad(dens, 0, 200, 0, lambda l1: l1)
        assert abs(total - 1.0) > 1.0

    def test_mc_goodness_of_fit(self):
        # chi-square test of binned sorted eigenvalue pairs against the density
        from qzonal.mc import wishart_extreme_eigenvalues

        m, n, count = 2, 2, 40_000
        p = EigDensityParams(m, n, 1.0)
        lmax, lmin = wishart_extreme_eigenvalues(
            isotropic_params(m, n, 1.0), count, RngStream(2024, 77))
        edges_max = [0.0, 2.0, 3.0, 4.0, 5.0, 7.0, np.inf]
        edges_min = [0.0, 0.3, 0.6, 1.0, 1.6, np.inf]
        observed = np.zeros((len(edges_max) - 1, len(edges_min) - 1))
        for i in range(len(edges_max) - 1):
            for j in range(len(edges_min) - 1):
                observed[i, j] = np.sum(
                    (lmax >= edges_max[i]) & (lmax < edges_max[i + 1])
                    & (lmin >= edges_min[j]) & (lmin < edges_min[j + 1]))

        def dens(l2, l1):
            if not l1 > l2 > 0:
                return 0.0
            return math.exp(joint_eig_logpdf([l1, l2], p))

        stat = 0.0
        dof = 0
        for i in range(len(edges_max) - 1):
            for j in range(len(edges_min) - 1):
                hi1 = min(edges_max[i + 1], 40.0)
                hi2 = min(edges_min[j + 1], 40.0)
                prob, _ = dblquad(dens, edges_max[i], hi1,
                                  edges_min[j], lambda l1, h=hi2: min(h, l1))
                expected = count * prob
                if expected < 5:
                    continue
                stat += (observed[i, j] - expected) ** 2 / expected
                dof += 1
        pvalue = chi2.sf(stat, dof - 1)
        assert pvalue > 0.01

    def test_input_validation(self):
        p = EigDensityParams(2, 2, 1.0)
        with pytest.raises(DomainError):
            joint_eig_logpdf([1.0, 2.0], p)  # ascending
        with pytest.raises(DomainError):
            joint_eig_logpdf([2.0, -1.0], p)


class TestProbLess:
    def test_m1_gamma_oracle(self):
        p = isotropic_params(1, 2, 1.0)
        for x in (0.5, 1.0, 2.0):
            res = prob_less(QMatrix.diag([x]), p, DEEP)
            assert res.value == pytest.approx(gammainc(4, 2 * x), rel=1e-9)

    def test_small_delta_vanishes(self):
        p = isotropic_params(2, 2, 1.0)
        res = prob_less(QMatrix.diag([1e-3, 1e-3]), p, DEEP)
        assert 0 <= res.value < 1e-9

    def test_general_sigma_matches_whitened_scalar(self):
        # for commuting Sigma and Delta the distribution depends on the
        # whitened spectrum only
        p_iso = isotropic_params(2, 3, 2.0)
        res_iso = prob_less(QMatrix.diag([3.0, 3.0]), p_iso, DEEP)
        p_gen = WishartParams(2, 3, QMatrix.diag([2.0, 2.0]))
        res_gen = prob_less(QMatrix.diag([3.0, 3.0]), p_gen, DEEP)
        assert res_gen.value == pytest.approx(res_iso.value, rel=1e-10)

    def test_non_pd_delta_rejected(self):
        p = isotropic_params(2, 2, 1.0)
        with pytest.raises(DomainError):
            prob_less(QMatrix.diag([1.0, -1.0]), p, DEEP)


class TestProbGreater:
    def test_small_delta_is_one(self):
        p = isotropic_params(2, 3, 1.0)
        assert prob_greater(QMatrix.diag([1e-12, 1e-12]), p) == pytest.approx(1.0, abs=1e-9)

    def test_m1_poisson_sum_oracle(self):
        p = isotropic_params(1, 2, 1.0)
        for x in (0.25, 1.0, 3.0):
            got = prob_greater(QMatrix.diag([x]), p)
            want = sum((2 * x) ** k / math.factorial(k) for k in range(4)) * math.exp(-2 * x)
            assert got == pytest.approx(want, rel=1e-12)
            assert got == pytest.approx(gammaincc(4, 2 * x), rel=1e-12)


class TestLambdaMax:
    def test_m1_chi2_oracle(self):
        for n in (1, 2, 4):
            p = isotropic_params(1, n, 1.0)
            for x in (0.25, 1.0, 3.0):
                res = lambda_max_cdf(x, p, DEEP)
                assert res.value == pytest.approx(gammainc(2 * n, 2 * x), rel=1e-9)

    def test_sigma2_scaling_equivariance(self):
        p1 = isotropic_params(2, 3, 1.0)
        p2 = isotropic_params(2, 3, 2.0)
        r1 = lambda_max_cdf(1.0, p1, DEEP)
        r2 = lambda_max_cdf(2.0, p2, DEEP)
        assert r1.value == pytest.approx(r2.value, rel=1e-10)

    def test_monotone_on_grid(self):
        p = isotropic_params(2, 3, 1.0)
        xs = np.linspace(0.5, 10.0, 20)
        values = [r.value for r in lambda_max_cdf_grid(xs, p, DEEP)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        assert all(-1e-9 <= v <= 1 + 1e-9 for v in values)

    def test_grid_matches_pointwise(self):
        p = isotropic_params(2, 3, 1.0)
        xs = [1.0, 3.0, 5.0]
        grid = lambda_max_cdf_grid(xs, p, DEEP)
        for x, res in zip(xs, grid):
            single = lambda_max_cdf(x, p, DEEP)
            assert res.value == pytest.approx(single.value, rel=1e-12)

    def test_m1_pdf_oracle(self):
        # density of (sigma2/4) chi^2_{4n}
        p = isotropic_params(1, 2, 1.0)
        for x in (0.5, 1.5, 3.0):
            got = lambda_max_pdf(x, p, DEEP)
            want = math.exp(gamma_logpdf(x, 4, 2.0))
            assert got == pytest.approx(want, rel=1e-8)

    def test_pdf_finite_difference(self):
        p = isotropic_params(2, 3, 1.0)
        x, h = 3.0, 1e-5
        fd = (lambda_max_cdf(x + h, p, DEEP).value
              - lambda_max_cdf(x - h, p, DEEP).value) / (2 * h)
        assert lambda_max_pdf(x, p, DEEP) == pytest.approx(fd, abs=1e-6)

    def test_pdf_integrates_to_cdf(self):
        p = isotropic_params(2, 3, 1.0)
        x0 = 4.0
        total, _ = quad(lambda x: lambda_max_pdf(x, p, DEEP), 0.05, x0, limit=200)
        assert total == pytest.approx(lambda_max_cdf(x0, p, DEEP).value, abs=1e-7)

    def test_pdf_grid_matches_pointwise(self):
        p = isotropic_params(2, 2, 1.0)
        xs = [1.0, 2.0, 4.0]
        grid = lambda_max_pdf_grid(xs, p, DEEP)
        for x, res in zip(xs, grid):
            assert res.value == pytest.approx(lambda_max_pdf(x, p, DEEP), rel=1e-11)

    def test_domain(self):
        p = isotropic_params(1, 1, 1.0)
        with pytest.raises(DomainError):
            lambda_max_cdf(0.0, p)


class TestLambdaMin:
    def test_at_zero_is_exactly_one(self):
        p = isotropic_params(2, 3, 1.0)
        assert lambda_min_sf(0.0, p) == 1.0

    def test_m1_oracle(self):
        for n in (1, 2, 4):
            for s2 in (1.0, 2.0):
                p = isotropic_params(1, n, s2)
                for x in (0.25, 1.0, 3.0):
                    got = lambda_min_sf(x, p)
                    assert got == pytest.approx(gammaincc(2 * n, 2 * x / s2), rel=1e-12)

    def test_monotone_nonincreasing(self):
        p = isotropic_params(2, 3, 1.0)
        xs = np.linspace(0.0, 4.0, 20)
        values = [lambda_min_sf(x, p) for x in xs]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
        assert all(-1e-9 <= v <= 1 + 1e-9 for v in values)

    def test_m1_pdf_oracle(self):
        p = isotropic_params(1, 2, 1.0)
        for x in (0.5, 1.5, 3.0):
            got = lambda_min_pdf(x, p)
            want = math.exp(gamma_logpdf(x, 4, 2.0))
            assert got == pytest.approx(want, rel=1e-12)

    def test_pdf_finite_difference(self):
        p = isotropic_params(2, 3, 1.0)
        x, h = 1.0, 1e-6
        fd = (lambda_min_sf(x - h, p) - lambda_min_sf(x + h, p)) / (2 * h)
        assert lambda_min_pdf(x, p) == pytest.approx(fd, rel=1e-4)

    def test_pdf_nonnegative_on_grid(self):
        p = isotropic_params(2, 3, 1.0)
        for x in np.linspace(0.05, 4.0, 15):
            assert lambda_min_pdf(float(x), p) >= 0.0

    def test_negative_x_rejected(self):
        p = isotropic_params(1, 1, 1.0)
        with pytest.raises(DomainError):
            lambda_min_sf(-0.5, p)


class TestScalarIntegralImages:
    def test_laplace_transform_identity_m1(self):
        a, k, z = 3, 2, 1.5
        left, _ = quad(lambda t: math.exp(-t * z) * t ** (a - 1 + k), 0, np.inf)
        from qzonal.partitions import gen_pochhammer
        right = float(gen_pochhammer(a, (k,))) * math.gamma(a) * z ** (-a - k)
        assert left == pytest.approx(right, rel=1e-8)

    def test_beta_integral_identity_m1(self):
        from qzonal.partitions import gen_pochhammer, qgamma
        a, k = 2.5, 3
        left, _ = quad(lambda t: t ** (a - 1 + k), 0, 1)
        right = (float(gen_pochhammer(a, (k,))) / float(gen_pochhammer(a + 1, (k,)))
                 * qgamma(1, a) * qgamma(1, 1) / qgamma(1, a + 1))
        assert left == pytest.approx(right, rel=1e-12)
        assert left == pytest.approx(1.0 / (a + k), rel=1e-12)
