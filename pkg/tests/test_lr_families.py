import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evsc import DomainError
from evsc.exact_core import Experiment, exact_lr_uniform_vs_fair, standardize
from evsc.lr_families import (
    TABLE3_PVALUES,
    DensityAlternative,
    log_lr_x_exact,
    log_lr_x_third_order,
    lr_alpha,
    lr_alpha_closed_form,
    lr_f,
    lr_f_upper_bound,
    lr_normal_family,
    lr_uniform_closed_form,
    lr_x_approx,
    lr_x_bound,
    lr_x_exact,
    max_lr_for_pvalue,
    normal_density,
    point_alternative,
    uniform_density,
)
from evsc.special_fn import phi_cdf

from oracles import point_lr_direct

# n * |ln LR_x - third-order expansion| over |u| <= 3, |y| <= 10, p0 in {.2,.5,.8};
# measured maximum is about 1.35e4 and flat in n from 1e4 to 1e6
K_THIRD_ORDER = 15000.0


def grid_experiments(n, p0, u_values):
    sigma = math.sqrt(n * p0 * (1 - p0))
    seen = set()
    for u in u_values:
        k = round(p0 * n - u * sigma)
        if 0 <= k <= n and k not in seen:
            seen.add(k)
            yield Experiment(n, k)


class TestPointAlternatives:
    def test_identity_at_null(self):
        e = Experiment(100, 37)
        u = standardize(e).u
        assert lr_x_exact(e, 0.5, -u) == pytest.approx(1.0, abs=1e-12)

    def test_x_zero_near_peak(self):
        e = Experiment(10000, 4815)
        u = standardize(e).u
        assert lr_x_exact(e, 0.5, 0.0) == pytest.approx(math.exp(u * u / 2), rel=0.02)
        assert lr_x_exact(e, 0.5, 0.0) == pytest.approx(point_lr_direct(10000, 4815, 0.4815, 0.5), rel=1e-10)

    @pytest.mark.parametrize("p0", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("n", [100, 10**4])
    def test_log_bound_grid(self, p0, n):
        checked = 0
        for e in grid_experiments(n, p0, np.linspace(-3, 3, 25)):
            par = standardize(e, p0)
            assert abs(par.u) <= par.sigma_n
            for y in np.linspace(-10, 10, 81):
                x = y - par.u
                p = (e.k - x * par.sigma_n) / n
                if not 0 < p < 1:
                    continue
                bound = -0.5 * p0 * (1 - p0) * y * y + par.u * y
                assert log_lr_x_exact(e, p0, x) <= bound + 1e-12 * max(1, abs(bound))
                checked += 1
        assert checked > 1000

    @pytest.mark.parametrize("p0", [0.2, 0.5, 0.8])
    def test_bound_function(self, p0):
        e = Experiment(400, round(400 * p0) + 7)
        for x in (-3.0, -0.5, 0.0, 1.2, 4.0):
            assert lr_x_exact(e, p0, x) <= lr_x_bound(e, p0, x) * (1 + 1e-12)

    @pytest.mark.parametrize("p0", [0.2, 0.5, 0.8])
    def test_third_order_error_is_order_one_over_n(self, p0):
        worst = {}
        for n in (100, 10**4, 10**6):
            w = 0.0
            for e in grid_experiments(n, p0, np.linspace(-3, 3, 13)):
                par = standardize(e, p0)
                for y in np.linspace(-10, 10, 41):
                    x = y - par.u
                    if not 0 < (e.k - x * par.sigma_n) / n < 1:
                        continue
                    err = abs(log_lr_x_exact(e, p0, x) - log_lr_x_third_order(par, y))
                    assert err <= K_THIRD_ORDER / n
                    w = max(w, n * err)
            worst[n] = w
        # the scaled error settles rather than growing with n
        assert worst[10**6] == pytest.approx(worst[10**4], rel=0.2)

    def test_third_term_vanishes_at_half(self):
        par = standardize(Experiment(1000, 480))
        for y in (-2.0, 0.5, 3.0):
            assert log_lr_x_third_order(par, y) == par.u * y - 0.5 * y * y

    def test_approx_examples(self):
        assert lr_x_approx(1.3, 1.3) == 1.0
        assert lr_x_approx(1.960, 0) == pytest.approx(6.83, abs=0.02)
        assert lr_x_approx(3.291, 0) == pytest.approx(224.5, abs=0.5)

    @given(st.floats(-6, 6), st.floats(-20, 20))
    def test_argmax_at_zero(self, u, x):
        peak = lr_x_approx(u, 0.0)
        if x == 0:
            assert lr_x_approx(u, x) == peak
        else:
            # strict unless x^2/2 is lost to rounding next to u^2/2
            assert lr_x_approx(u, x) <= peak
            if 0.5 * x * x > 1e-15 * max(1.0, 0.5 * u * u):
                assert lr_x_approx(u, x) < peak

    def test_point_alternative_fields(self):
        par = standardize(Experiment(100, 40))
        alt = point_alternative(par, 40, 1.5)
        assert alt.y == par.u + 1.5
        assert alt.z == alt.y / par.sigma_n
        with pytest.raises(DomainError):
            point_alternative(par, 40, 9.0)


class TestMaxLR:
    @pytest.mark.parametrize("p,sided,u,lr", [
        (0.050, "one", 1.645, 3.9), (0.010, "one", 2.326, 15.0),
        (0.005, "one", 2.576, 27.6), (0.001, "one", 3.090, 118.5),
        (0.050, "two", 1.960, 6.8), (0.010, "two", 2.576, 27.6),
        (0.005, "two", 2.807, 51.4), (0.001, "two", 3.291, 224.5)])
    def test_table(self, p, sided, u, lr):
        res = max_lr_for_pvalue(p, sided)
        assert f"{res.u:.3f}" == f"{u:.3f}"
        assert f"{res.sup_lr:.1f}" == f"{lr:.1f}"

    def test_half(self):
        res = max_lr_for_pvalue(0.5, "one")
        assert res.u == 0 and res.sup_lr == 1

    def test_table_pvalues(self):
        assert TABLE3_PVALUES == (0.050, 0.010, 0.005, 0.001)

    def test_bad(self):
        with pytest.raises(DomainError):
            max_lr_for_pvalue(0.0)
        with pytest.raises(DomainError):
            max_lr_for_pvalue(0.1, "three")


class TestDensities:
    def test_masses(self):
        assert uniform_density().total_mass() == pytest.approx(1.0, abs=1e-8)
        assert uniform_density(0.4, 0.6).total_mass() == pytest.approx(1.0, abs=1e-8)
        assert normal_density(0.5, 0.01).total_mass() == pytest.approx(1.0, abs=1e-8)

    def test_bad_support(self):
        with pytest.raises(DomainError):
            DensityAlternative(lambda p: 1.0, (0.5, 0.2))

    def test_uniform_example(self):
        e = Experiment(100, 40)
        expected = 0.5 * math.sqrt(2 * math.pi / 100) * math.e**2
        assert lr_f(e, 0.5, uniform_density()) == pytest.approx(expected, rel=0.02)
        assert lr_uniform_closed_form(e, 0.5) == pytest.approx(expected, rel=1e-14)

    def test_exact_integrand_recovers_exact_lr(self):
        for n, k in ((100, 40), (1000, 460), (20, 6)):
            e = Experiment(n, k)
            got = lr_f(e, 0.5, uniform_density(), exact=True)
            assert got == pytest.approx(exact_lr_uniform_vs_fair(e), rel=1e-8)

    @pytest.mark.parametrize("n", [100, 1000, 10**4, 10**5])
    def test_uniform_near_exact(self, n):
        for u in np.linspace(-3, 3, 13):
            k = round(n / 2 - u * math.sqrt(n) / 2)
            e = Experiment(n, k)
            assert lr_f(e, 0.5, uniform_density()) == pytest.approx(exact_lr_uniform_vs_fair(e), rel=0.05)

    def test_certified_bound(self):
        # a density bounded by D has C = 2 c0 D; use a triangular bump
        dens = DensityAlternative(lambda p: max(0.0, 4 - 16 * abs(p - 0.5)), (0.25, 0.75),
                                  sup_bound_near_mle=2 * 0.5 * 4.0, features=(0.5,))
        for n, k in ((100, 40), (10**4, 4900), (10**4, 4815)):
            e = Experiment(n, k)
            assert lr_f(e, 0.5, dens) <= lr_f_upper_bound(e, 0.5, dens) * (1 + 1e-8)
        with pytest.raises(DomainError):
            lr_f_upper_bound(Experiment(10, 3), 0.5, uniform_density())


def _normal_case(n, p0, shift_sd, s_ratio):
    sigma_n = math.sqrt(n * p0 * (1 - p0))
    k = round(p0 * n - 1.5 * sigma_n)
    s = s_ratio * sigma_n / n
    return Experiment(n, k), k / n + shift_sd * sigma_n / n, s


# keep cases where the normal alternative sits well inside (0, 1),
# which is where the untruncated closed form applies
NORMAL_GRID = [
    (n, p0, sh, r)
    for n in (100, 1000, 10**4, 10**6) for p0 in (0.3, 0.5)
    for sh in (-2.0, 0.0, 1.5) for r in (0.5, 1.0, 4.0)
    if 0 < _normal_case(n, p0, sh, r)[1] - 8 * _normal_case(n, p0, sh, r)[2]
    and _normal_case(n, p0, sh, r)[1] + 8 * _normal_case(n, p0, sh, r)[2] < 1
]


class TestNormalFamily:
    def test_example_centered(self):
        e = Experiment(10**4, 4900)
        u = standardize(e).u
        closed = lr_normal_family(e, 0.5, 0.5 - 0.49, 0.01)
        assert closed == pytest.approx(50 / math.sqrt(10000 + 2500) * math.exp(u * u / 2), rel=1e-12)
        quad = lr_f(e, 0.5, normal_density(0.49, 0.01))
        assert quad == pytest.approx(closed, rel=0.01)

    def test_degenerate_limit(self):
        e = Experiment(10**4, 4900)
        u = standardize(e).u
        assert lr_normal_family(e, 0.5, 0.01, 1e-9) == pytest.approx(math.exp(u * u / 2), rel=1e-6)

    def test_wide_limit(self):
        e = Experiment(10**6, 499000)
        u = standardize(e).u
        s = 0.05  # n s = 5e4 >> sigma_n = 500
        approx = 0.5 / (s * 1000) * math.exp(u * u / 2)
        assert lr_normal_family(e, 0.5, 0.5 - 0.499, s) == pytest.approx(approx, rel=1e-3)

    @pytest.mark.parametrize("n,p0,shift_sd,s_ratio", NORMAL_GRID)
    def test_quadrature_grid(self, n, p0, shift_sd, s_ratio):
        e, mean, s = _normal_case(n, p0, shift_sd, s_ratio)
        quad = lr_f(e, p0, normal_density(mean, s))
        closed = lr_normal_family(e, p0, p0 - mean, s)
        assert quad == pytest.approx(closed, rel=0.01)


class TestAlpha:
    def test_zero(self):
        assert lr_alpha(Experiment(10**4, 5000), 0.5, 0.1) == pytest.approx(1.0, rel=1e-6)
        assert lr_alpha_closed_form(0.0) == 1.0

    def test_examples(self):
        target = phi_cdf(-1.645) / (1 - phi_cdf(-1.645))
        assert target == pytest.approx(0.0526, abs=1e-4)
        k_pos = 5000 - round(1.645 * 50)
        assert lr_alpha(Experiment(10**4, k_pos), 0.5, 0.1) == pytest.approx(target, rel=0.05)
        k_neg = 5000 + round(1.645 * 50)
        assert lr_alpha(Experiment(10**4, k_neg), 0.5, 0.1) == pytest.approx(1 / target, rel=0.05)

    @pytest.mark.parametrize("u", [-2.5, -1.0, 0.7, 1.645, 3.0])
    def test_large_n(self, u):
        n = 10**6
        k = round(n / 2 - u * math.sqrt(n) / 2)
        e = Experiment(n, k)
        expected = lr_alpha_closed_form(standardize(e).u)
        assert lr_alpha(e, 0.5, 0.1, exact=True) == pytest.approx(expected, rel=0.01)
        assert lr_alpha(e, 0.5, 0.1) == pytest.approx(expected, rel=0.01)

    def test_bad_alpha(self):
        with pytest.raises(DomainError):
            lr_alpha(Experiment(10, 3), 0.5, 0.6)


def test_extreme_deviation_saturates_instead_of_raising():
    e = Experiment(10**6, 0)
    assert lr_uniform_closed_form(e, 0.5) == math.inf
    assert lr_x_approx(standardize(e).u, 0.0) == math.inf
    assert lr_normal_family(e, 0.5, 0.5, 1e-4) == math.inf
    assert max_lr_for_pvalue(1e-300).sup_lr < math.inf
