import numpy as np
import pytest
from math import exp, log, pi, sqrt, tan

from heavytail_pdmp.potentials import make_power_law, make_subexp, make_custom
from heavytail_pdmp.rates import (CLT_FAILS, CLT_HOLDS, CauchyExplicitAlpha,
                                  ConstantAlpha, PowerAlpha,
                                  RocknerWang1DAlpha, SubExpLogAlpha,
                                  TabulatedAlpha, bound_curve, c1_c2,
                                  clt_check, compute_constants, kappa1,
                                  kappa2, lambert_asymptote, lambert_w,
                                  paper_example_constants, r0_constant,
                                  rate_table, strong_xi_curve, tau_exponent,
                                  xi_general, xi_strong)
from heavytail_pdmp.velocities import rademacher_product


class TestConstants:
    def test_kappa1(self):
        assert kappa1(0.3) == pytest.approx(sqrt(4.6), abs=1e-14)
        assert kappa1(0.0) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            kappa1(-0.1)

    def test_kappa2_bounded_branch(self):
        assert kappa2(make_power_law(1, 1.0), 2.0) == pytest.approx(1.0)
        assert kappa2(make_subexp(1.0, 0.5, 1.0), 2.0) == pytest.approx(0.5)

    def test_kappa2_unbounded_branch(self):
        pot = make_custom(dim=1,
                          eval_fn=lambda x: float(x @ x) / 2.0,
                          grad_fn=lambda x: np.asarray(x, dtype=float),
                          hessian_lower_bound=0.0,
                          laplacian_bound=(1.0, 0.0))
        assert kappa2(pot, 2.0) == pytest.approx(6.0)

    def test_kappa2_needs_a_branch(self):
        pot = make_custom(dim=1,
                          eval_fn=lambda x: float(x @ x) / 2.0,
                          grad_fn=lambda x: np.asarray(x, dtype=float),
                          hessian_lower_bound=0.0)
        with pytest.raises(ValueError):
            kappa2(pot, 2.0)

    def test_r0_worked_example(self):
        r0 = r0_constant(m2=1.0, m4=1.0, m22=1.0, k1=1.0, k2=1.0,
                         a_sum=1.0, lam_low=1.0, c_lambda=0.0)
        assert r0 == pytest.approx(3.0 + 2.0 * sqrt(2.0), abs=1e-12)

    def test_r0_zigzag_cauchy(self):
        # Rademacher d=1: m4 = 1/3 < m22 = 1, so the positive parts vanish
        k1 = sqrt(2.0 * 2.3)
        r0 = r0_constant(m2=1.0, m4=1.0 / 3.0, m22=1.0, k1=k1, k2=1.0,
                         a_sum=1.0, lam_low=1.0)
        assert r0 == pytest.approx((k1 + 1.0) + 1.0 + 2.0 * sqrt(2.0))

    def test_c1_c2_worked_example(self):
        c1, c2 = c1_c2(r0=1.0, m2=1.0, epsilon=0.0)
        assert c2 == pytest.approx(1.0 / (4.0 * (2.0 + sqrt(2.0))), abs=1e-14)
        assert c1 == pytest.approx(10.0 * (2.0 + sqrt(2.0)), abs=1e-10)

    def test_c1_c2_epsilon_validation(self):
        with pytest.raises(ValueError):
            c1_c2(1.0, 1.0, epsilon=1.0)  # sqrt(m2/2) is about 0.707

    def test_compute_constants_c2_prime(self):
        pot = make_power_law(1, 1.0)
        nu = rademacher_product(1)
        c = compute_constants(pot, nu, 1.0, "zigzag")
        assert c.c_p == pytest.approx(1.0)
        assert c.c2_prime == pytest.approx(c.c2 / c.c_p)
        assert c.kappa1 == pytest.approx(sqrt(2.0 * 2.25))

    def test_paper_example_constants(self):
        pe = paper_example_constants(c_u=0.3, lambda_ref=1.0)
        assert pe["r0"] == pytest.approx(1.0 + sqrt(1.15) + 1.0
                                         + 2.0 * sqrt(2.0))
        assert pe["c1"] == pytest.approx(2.0 + sqrt(2.0))
        assert pe["c2_prime"] == pytest.approx(2.103e-3, rel=1e-3)


class TestTau:
    def test_cauchy(self):
        assert tau_exponent(1, 1.0) == pytest.approx(4.0)

    def test_p12(self):
        assert tau_exponent(1, 12.0) == pytest.approx(54.0 / 114.0)

    def test_large_p_limit(self):
        assert tau_exponent(1, 1e6) < 1e-5


ALPHAS = [
    PowerAlpha(c=1.0, tau=4.0),
    PowerAlpha(c=2.0, tau=0.4737),
    SubExpLogAlpha(c=1.0, delta=0.5),
    SubExpLogAlpha(c=1.0, delta=0.3),
    CauchyExplicitAlpha(),
]


class TestAlphaFamilies:
    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_decreasing_on_log_grid(self, alpha):
        rs = np.logspace(-6, 0, 1000)
        vals = np.array([alpha(r) for r in rs])
        assert np.all(np.diff(vals) <= 0)

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_at_least_one_on_unit_interval(self, alpha):
        for r in np.logspace(-6, 0, 50):
            assert alpha(r) >= 1.0

    def test_power_closed_form(self):
        a = PowerAlpha(c=2.0, tau=3.0)
        assert a(0.5) == pytest.approx(2.0 * (1.0 + 8.0))

    def test_subexplog_closed_form(self):
        a = SubExpLogAlpha(c=1.0, delta=0.5)
        r = 0.1
        assert a(r) == pytest.approx((1.0 + log(1.0 + 10.0)) ** 4.0)

    def test_cauchy_explicit_at_r1(self):
        theta = 0.5 * (pi - 0.5)
        expected = (4.0 / pi ** 2) * tan(theta) / np.cos(theta) ** 2
        assert CauchyExplicitAlpha()(1.0) == pytest.approx(expected)

    def test_cauchy_asymptote(self):
        a = CauchyExplicitAlpha()
        ratios = [a(r) * pi ** 2 * r ** 3 / 32.0 for r in (1e-2, 1e-3, 1e-4)]
        assert ratios[0] > ratios[1] > ratios[2] > 1.0
        assert ratios[1] == pytest.approx(1.0, abs=0.01)

    def test_tabulated_interpolates_and_validates(self):
        rs = np.logspace(-3, 0, 20)
        vals = [PowerAlpha(c=1.0, tau=2.0)(r) for r in rs]
        tab = TabulatedAlpha(rs=tuple(rs), values=tuple(vals))
        assert tab(0.01) == pytest.approx(PowerAlpha(1.0, 2.0)(0.01), rel=0.05)
        with pytest.raises(ValueError):
            TabulatedAlpha(rs=(0.1, 0.2), values=(1.0, 2.0))  # increasing


class TestRocknerWang:
    def test_cauchy_radius_unnormalized_closed_form(self):
        alpha = RocknerWang1DAlpha(make_power_law(1, 1.0), normalized=False)
        for r in (0.5, 1.0, 2.0):
            expected = tan(0.5 * (pi - r / (1.0 + r)))
            assert alpha.radius(r) == pytest.approx(expected, rel=1e-8)

    def test_cauchy_radius_normalized_closed_form(self):
        alpha = RocknerWang1DAlpha(make_power_law(1, 1.0), normalized=True)
        r = 1.0
        # normalized tail 1 - (2/pi) arctan(R) equals r/(1+r)
        expected = tan(0.5 * pi * (1.0 - r / (1.0 + r)))
        assert alpha.radius(r) == pytest.approx(expected, rel=1e-8)

    def test_value_is_4r2_exp_osc(self):
        alpha = RocknerWang1DAlpha(make_power_law(1, 1.0), normalized=False)
        r = 1.0
        radius = alpha.radius(r)
        # oscillation of log(1+x^2) on [-R, R] is log(1+R^2)
        expected = 4.0 * radius ** 2 * (1.0 + radius ** 2) / pi ** 2
        assert alpha(r) == pytest.approx(expected, rel=1e-6)

    def test_non_integrable_rejected(self):
        flat = make_custom(dim=1,
                           eval_fn=lambda x: 0.0,
                           grad_fn=lambda x: np.zeros(1),
                           hessian_lower_bound=0.0,
                           grad_sup_bound=0.0)
        with pytest.raises(ValueError):
            RocknerWang1DAlpha(flat)


class TestXi:
    def test_t0_returns_c1(self):
        assert xi_strong(0.0, PowerAlpha(1.0, 4.0), 3.0, 0.1) == 3.0

    def test_constant_alpha_geometric(self):
        for t in (0.5, 2.0, 10.0):
            val = xi_strong(t, ConstantAlpha(1.0), 2.0, 0.3)
            assert val == pytest.approx(2.0 * exp(-0.3 * t), rel=1e-8)

    def test_bisection_certificate(self):
        alpha = PowerAlpha(1.0, 4.0)
        c1, c2p = 1.0, 1.0
        for t in (10.0, 1e4, 1e7):
            r_star = xi_strong(t, alpha, c1, c2p) / c1
            assert r_star < 1.0
            g = alpha(r_star) ** 2 * log(1.0 / r_star)
            assert abs(c2p * t - g) <= 1e-6 * c2p * t

    def test_general_reduces_to_strong(self):
        alpha = CauchyExplicitAlpha()
        c1, c2, c_p = 2.0, 0.05, 3.0
        rng = np.random.default_rng(0)
        for t in 10 ** rng.uniform(-1, 8, size=100):
            a = xi_general(t, alpha, ConstantAlpha(c_p), c1, c2)
            b = xi_strong(t, alpha, c1, c2 / c_p)
            assert a == pytest.approx(b, rel=1e-10)

    def test_nonincreasing_and_bounded(self):
        xi = strong_xi_curve(CauchyExplicitAlpha(), 5.0, 0.01)
        ts = np.logspace(-2, 10, 60)
        vals = [xi(t) for t in ts]
        assert all(v <= 5.0 + 1e-12 for v in vals)
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_saturation_flag(self):
        xi = strong_xi_curve(ConstantAlpha(1.0), 1.0, 1.0)
        val, saturated = xi.evaluate(1e4)
        assert saturated
        assert val == pytest.approx(1e-300)

    def test_power_tau4_scaling(self):
        # r* solves c2 t ~ r^(-2 tau) log(1/r), so xi ~ t^(-1/(2 tau))
        xi = strong_xi_curve(PowerAlpha(1.0, 4.0), 1.0, 1.0)
        ts = np.logspace(3, 6, 20)
        scaled = np.array([xi(t) * t ** 0.125 for t in ts])
        assert scaled.max() / scaled.min() < 3.0

    def test_stretched_exponential_rate_subexplog(self):
        # with r(t) = exp(-k t^(delta/(8-7delta))) the defining inequality
        # alpha1(r)^2 log(1/r) <= C t holds on a time grid
        for delta in (0.3, 0.5, 0.8):
            alpha = SubExpLogAlpha(c=1.0, delta=delta)
            expo = delta / (8.0 - 7.0 * delta)
            k = 0.05
            ts = np.logspace(0, 8, 40)
            ratios = []
            for t in ts:
                r = exp(-k * t ** expo)
                ratios.append(alpha(r) ** 2 * log(1.0 / r) / t)
            assert max(ratios) < np.inf
            # the ratio must stay bounded as t grows (no upward drift)
            assert ratios[-1] <= max(ratios[:10]) * 1.01


class TestLambert:
    def test_fixed_points(self):
        assert lambert_w(0.0) == 0.0
        assert lambert_w(np.e) == pytest.approx(1.0, abs=1e-12)
        assert lambert_w(10.0) == pytest.approx(1.7455280027, abs=1e-9)

    def test_residuals(self):
        for x in 10.0 ** np.arange(-8, 12):
            w = lambert_w(float(x))
            assert abs(w * exp(w) - x) <= 1e-12 * (1.0 + x)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            lambert_w(-0.5)

    def test_asymptote_diverges_at_zero(self):
        assert lambert_asymptote(0.0, 1.0, 1.0) == np.inf


class TestTableAndClt:
    def test_rate_table_strings(self):
        table = rate_table()
        assert table["pdmp"]["power"] == "1/(2*tau)"
        assert table["pdmp"]["subexp"] == "delta/(8-7*delta)"
        assert table["reversible_langevin"]["power"] == "1/tau"
        assert table["reversible_langevin"]["subexp"] == "delta/(4-3*delta)"

    def test_clt_power_threshold(self):
        holds = clt_check(PowerAlpha(1.0, tau_exponent(1, 12.0)))
        fails = clt_check(PowerAlpha(1.0, tau_exponent(1, 1.0)))
        assert holds.verdict == CLT_HOLDS
        assert fails.verdict == CLT_FAILS

    def test_clt_subexplog_always_holds(self):
        for delta in (0.3, 0.5, 0.8):
            assert clt_check(SubExpLogAlpha(1.0, delta)).verdict == CLT_HOLDS

    def test_clt_tabulated_numeric(self):
        rs = np.logspace(-8, 0, 200)
        vals = [PowerAlpha(1.0, 0.2)(r) for r in rs]
        verdict = clt_check(TabulatedAlpha(tuple(rs), tuple(vals)),
                            c1=1.0, c2_prime=1.0)
        assert verdict.verdict in (CLT_HOLDS, "inconclusive")


class TestBoundCurve:
    def test_zero_norms_give_zero(self):
        xi = strong_xi_curve(ConstantAlpha(1.0), 1.0, 1.0)
        assert np.all(bound_curve([0.0, 1.0, 2.0], xi, 0.0, 0.0) == 0.0)

    def test_scaling_and_monotonicity(self):
        xi = strong_xi_curve(CauchyExplicitAlpha(), 2.0, 0.01)
        ts = np.linspace(0.0, 100.0, 11)
        curve = bound_curve(ts, xi, 0.0628, 1.0)
        assert curve[0] == pytest.approx(2.0 * 1.0628)
        assert np.all(np.diff(curve) <= 1e-12)
