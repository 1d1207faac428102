import numpy as np
import pytest

from heavytail_pdmp.potentials import (BPS, ZIGZAG, check_assumptions,
                                       decompose, log_density_normalizer,
                                       make_custom, make_power_law,
                                       make_subexp, quantile_sampler_1d)


def numeric_grad(pot, x, h=1e-6):
    d = x.size
    out = np.empty(d)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        out[i] = (pot.value(x + e) - pot.value(x - e)) / (2 * h)
    return out


class TestPowerLaw:
    def test_value_matches_closed_form(self):
        pot = make_power_law(1, 1.0)
        x = np.array([2.0])
        assert pot.value(x) == pytest.approx(np.log(5.0))

    def test_grad_matches_numeric(self):
        pot = make_power_law(3, 2.5)
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.uniform(-10, 10, size=3)
            assert np.allclose(pot.grad(x), numeric_grad(pot, x), atol=1e-5)

    def test_grad_1d_agrees_with_grad(self):
        pot = make_power_law(1, 1.0)
        for x in (-3.0, -0.5, 0.0, 0.7, 12.0):
            assert pot.grad_1d(x) == pytest.approx(pot.grad(np.array([x]))[0])

    def test_hessian_lower_bound_d1(self):
        # radial second derivative minimized at r^2 = 3 with value -(d+p)/8
        pot = make_power_law(1, 1.0)
        assert pot.hessian_lower_bound == pytest.approx(2.0 / 8.0)

    def test_grad_sup_bound_attained(self):
        pot = make_power_law(1, 1.0)
        xs = np.linspace(-50, 50, 10001)
        grads = np.abs([pot.grad_1d(x) for x in xs])
        assert grads.max() <= pot.grad_sup_bound + 1e-12
        assert grads.max() == pytest.approx(pot.grad_sup_bound, rel=1e-4)

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            make_power_law(1, 0.0)
        with pytest.raises(ValueError):
            make_power_law(0, 1.0)


class TestSubExp:
    def test_c1_continuity_at_patch(self):
        pot = make_subexp(1.0, 0.5, 1.0)
        eps = 1e-9
        inner = pot.value(np.array([1.0 - eps]))
        outer = pot.value(np.array([1.0 + eps]))
        assert inner == pytest.approx(outer, abs=1e-6)
        gi = pot.grad_1d(1.0 - eps)
        go = pot.grad_1d(1.0 + eps)
        assert gi == pytest.approx(go, abs=1e-6)

    def test_grad_matches_numeric(self):
        pot = make_subexp(2.0, 0.3, 1.5)
        for x in (-4.0, -1.0, 0.2, 0.9, 3.0):
            num = (pot.value(np.array([x + 1e-6]))
                   - pot.value(np.array([x - 1e-6]))) / 2e-6
            assert pot.grad_1d(x) == pytest.approx(num, abs=1e-5)

    def test_grad_sup_bound(self):
        pot = make_subexp(1.0, 0.5, 1.0)
        # slope sigma*delta*M^(delta-1) at the patch boundary is the max
        assert pot.grad_sup_bound == pytest.approx(0.5)
        xs = np.linspace(-30, 30, 5001)
        assert max(abs(pot.grad_1d(x)) for x in xs) <= 0.5 + 1e-12

    def test_rejects_delta_out_of_range(self):
        for delta in (0.0, 1.0, 1.5, -0.1):
            with pytest.raises(ValueError):
                make_subexp(1.0, delta, 1.0)


class TestDecomposition:
    def test_fields_sum_to_grad(self):
        pot = make_power_law(3, 2.0)
        x = np.array([0.5, -1.0, 2.0])
        for kind in (ZIGZAG, BPS):
            dec = decompose(pot, kind)
            total = sum(dec.field(k, x) for k in range(dec.K))
            assert np.allclose(total, pot.grad(x))

    def test_zigzag_fields_are_axis_aligned(self):
        pot = make_power_law(2, 1.0)
        dec = decompose(pot, ZIGZAG)
        x = np.array([1.0, -2.0])
        f0 = dec.field(0, x)
        assert f0[1] == 0.0 and f0[0] == pot.grad(x)[0]


class TestAssumptions:
    def test_cauchy_passes(self):
        report = check_assumptions(make_power_law(1, 1.0))
        assert report.all_ok
        assert report.gradient_bounded

    def test_subexp_passes(self):
        report = check_assumptions(make_subexp(1.0, 0.5, 1.0))
        assert report.all_ok

    def test_wrong_bound_is_flagged(self):
        pot = make_custom(
            dim=1,
            eval_fn=lambda x: 0.5 * float(x @ x),
            grad_fn=lambda x: np.asarray(x, dtype=float),
            hessian_lower_bound=0.0,
            grad_sup_bound=0.5,  # wrong on purpose: the gradient is unbounded
        )
        report = check_assumptions(pot, box=10.0)
        assert any(v[0] == "grad_sup_bound" for v in report.violations)


class TestNormalizerAndQuantiles:
    def test_cauchy_normalizer_is_pi(self):
        assert log_density_normalizer(make_power_law(1, 1.0)) == \
            pytest.approx(np.pi, rel=1e-9)

    def test_cauchy_quantiles_exact(self):
        q = quantile_sampler_1d(make_power_law(1, 1.0))
        assert q(0.5) == pytest.approx(0.0, abs=1e-12)
        assert q(0.75) == pytest.approx(1.0, rel=1e-12)

    def test_numeric_quantiles_match_cdf(self):
        pot = make_subexp(1.0, 0.5, 1.0)
        q = quantile_sampler_1d(pot)
        assert float(q(0.5)) == pytest.approx(0.0, abs=1e-6)
        # push a uniform sample through and check symmetry of the law
        u = np.linspace(0.01, 0.99, 99)
        xs = np.asarray(q(u))
        assert np.allclose(xs + xs[::-1], 0.0, atol=1e-6)
        assert np.all(np.diff(xs) > 0)

    def test_custom_curvature_estimate(self):
        pot = make_custom(
            dim=1,
            eval_fn=lambda x: 0.5 * float(x @ x),
            grad_fn=lambda x: np.asarray(x, dtype=float),
            grad_sup_bound=None,
        )
        # convex potential: no negative curvature anywhere
        assert pot.hessian_lower_bound == pytest.approx(0.0, abs=1e-6)
