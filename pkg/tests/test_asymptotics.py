import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from evsc import DomainError
from evsc.asymptotics import (
    ErrorEnvelope,
    Provenance,
    lr_approx,
    lr_envelope,
    lr_log_envelope,
    lr_pvalue_under_h1,
    p_approx,
    p_from_lr,
)
from evsc.exact_core import Experiment, exact_lr_uniform_vs_fair, log_lr_uniform_vs_fair, standardize
from evsc.special_fn import phi_cdf


def test_lr_approx_examples():
    import mpmath
    with mpmath.workdps(30):
        direct = float(mpmath.sqrt(mpmath.pi / 20000) * mpmath.exp(mpmath.mpf("3.70") ** 2 / 2))
    assert lr_approx(10000, 3.70) == pytest.approx(direct, rel=1e-13)
    assert round(lr_approx(10000, 3.70), 1) == 11.8
    assert lr_approx(2 * math.pi, 0) == pytest.approx(0.5, rel=1e-15)
    assert lr_approx(1e11, 4.97) == pytest.approx(0.916, abs=5e-3)
    with pytest.raises(DomainError):
        lr_approx(0, 1.0)


class TestEnvelope:
    @pytest.mark.parametrize("n,k", [(20, 6), (100, 50), (1000, 460)])
    def test_examples(self, n, k):
        e = Experiment(n, k)
        assert lr_envelope(n, standardize(e).u).contains(exact_lr_uniform_vs_fair(e))

    @pytest.mark.parametrize("n", [20, 100, 1000, 10000])
    def test_every_k_in_regime(self, n):
        # the theorem: zero violations over n <= 4k <= 3n
        lo_k, hi_k = -(-n // 4), (3 * n) // 4
        for k in range(lo_k, hi_k + 1):
            e = Experiment(n, k)
            env = lr_log_envelope(n, standardize(e).u)
            assert env.contains(log_lr_uniform_vs_fair(e)), (n, k)

    def test_outside_regime(self):
        with pytest.raises(DomainError):
            lr_envelope(100, 5.1)

    def test_center_width(self):
        env = lr_log_envelope(100, 0.0)
        # E2 is multiplied by u^2, so at u=0 only E1 in [0, 1/n] is left
        assert env.upper - env.lower == pytest.approx(math.log1p(0.01), rel=1e-12)

    def test_envelope_invariant(self):
        with pytest.raises(ValueError):
            ErrorEnvelope(1.0, 2.0, 1.5)


class TestPApprox:
    @pytest.mark.parametrize("u", [0.5, 1, 2, 3, 5, 8, -2, -5])
    def test_mills_contains(self, u):
        env = p_approx(u)
        assert env.provenance is Provenance.MILLS
        assert env.contains(2 * phi_cdf(-abs(u)))

    @pytest.mark.parametrize("u0,bound", [(2, 0.19), (3, 0.10), (5, 0.04)])
    def test_ladder(self, u0, bound):
        for u in [u0 + 0.05 * i for i in range(200)]:
            exact = 2 * phi_cdf(-u)
            assert abs(p_approx(u).value - exact) / exact < bound

    def test_singular(self):
        with pytest.raises(DomainError):
            p_approx(0.0)


class TestPFromLR:
    def test_examples(self):
        assert p_from_lr(1e6, 1.001) == pytest.approx(2.7e-4, rel=0.10)
        assert p_from_lr(1e4, 1.002) == pytest.approx(3.2e-3, rel=0.10)

    @pytest.mark.parametrize("n", [1e4, 1e6])
    def test_round_trip_grid(self, n):
        for i in range(51):
            u = 2.5 + 0.05 * i
            assert p_from_lr(n, lr_approx(n, u)) == pytest.approx(p_approx(u).value, rel=0.02)

    def test_precondition(self):
        with pytest.raises(DomainError):
            p_from_lr(1, 0.5)
        with pytest.raises(DomainError):
            p_from_lr(100, -1)


class TestLRPValue:
    def test_examples(self):
        res = lr_pvalue_under_h1(400, 1)
        assert res.r == pytest.approx(21 / 401, rel=1e-15)
        assert not res.accurate
        assert lr_pvalue_under_h1(400, 20).r == 1.0

    def test_ell_against_exact(self):
        res = lr_pvalue_under_h1(10000, 3.70)
        assert res.r == pytest.approx(371 / 10001, rel=1e-12)
        assert res.accurate
        exact = exact_lr_uniform_vs_fair(Experiment(10000, 4815))
        assert res.ell == pytest.approx(exact, rel=0.10)

    @given(st.integers(1, 10**8), st.floats(0, 1))
    def test_r_is_probability(self, n, frac):
        v = frac * math.sqrt(n)
        r = lr_pvalue_under_h1(n, v).r
        assert 1 / (n + 1) * (1 - 1e-12) <= r <= 1.0

    def test_impossible(self):
        with pytest.raises(DomainError):
            lr_pvalue_under_h1(100, 10.5)
