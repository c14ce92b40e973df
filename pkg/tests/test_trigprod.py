import math
import random

import numpy as np
import pytest

from halkron.numtheory import UnitFraction
from halkron.sequences import PerturbSpec
from halkron.trigprod import (
    TrigProductParams,
    a_exponent,
    f_iterate,
    g_at_xi,
    g_value,
    g_value_product,
    gelfond_certify,
    log_pi_product,
    log_pi_product_rational,
    pi_product,
    product_upper_bound_log,
    sharpness_identity,
    xi_fixed_point,
)

SQRT3_2 = math.sqrt(3.0) / 2.0


class TestPiProduct:
    def test_empty_product(self):
        p = TrigProductParams(0, (), UnitFraction(1, 8))
        assert pi_product(p) == 1.0

    def test_single_factor_one_third(self):
        # |cos(pi/3 + pi/2)| = sin(pi/3)
        val = math.exp(log_pi_product_rational(1, (1,), 1, 3))
        assert val == pytest.approx(SQRT3_2, abs=1e-15)

    def test_closed_form_power(self):
        # n = 1 at alpha = 1/3: each block contributes sqrt(3)/2
        for blocks in (1, 5, 40):
            gamma = PerturbSpec(1).gamma(blocks)
            val = log_pi_product_rational(blocks, gamma, 1, 3)
            assert val == pytest.approx(blocks * math.log(SQRT3_2), abs=1e-12)

    def test_bits_and_rational_agree(self):
        # dyadic alpha: both reductions are exact
        gamma = PerturbSpec(2).gamma(12)
        u = UnitFraction(0b1011_0110, 8)
        lb = log_pi_product(TrigProductParams(12, gamma, u))
        lr = log_pi_product_rational(12, gamma, 0b1011_0110, 256)
        if math.isinf(lb):
            assert math.isinf(lr)
        else:
            assert lb == pytest.approx(lr, abs=1e-12)

    def test_one_periodicity_in_alpha(self):
        # each factor only changes sign under alpha -> alpha + 1
        rng = random.Random(13)
        gamma = PerturbSpec(3, shift=1).gamma(24)
        for _ in range(50):
            q = rng.randint(3, 10_000)
            p = rng.randrange(q)
            a = log_pi_product_rational(24, gamma, p, q)
            # alpha + 1 == (p + q)/q: reduce phases of (p+q) mod q by hand
            m = (p + q) % q
            b = log_pi_product_rational(24, gamma, m, q)
            assert a == b

    def test_value_in_unit_interval(self):
        rng = random.Random(19)
        for _ in range(100):
            r = rng.randint(0, 60)
            gamma = PerturbSpec(rng.randint(1, 4)).gamma(r)
            u = UnitFraction(rng.getrandbits(128), 128)
            v = pi_product(TrigProductParams(r, gamma, u))
            assert 0.0 <= v <= 1.0

    def test_hard_zero(self):
        # alpha = 1/2: first factor is |cos(pi/2 + pi/2)| = 1... the
        # second (gamma_1 = 0 for n=2) is |cos(pi)| = 1; shift to hit
        # |sin(0)| at j=2: 2^2 * 1/2 = 2 = 0 mod 1 -> gamma_2 = 1 gives 0
        gamma = PerturbSpec(2).gamma(4)
        val = log_pi_product_rational(4, gamma, 1, 2)
        assert math.isinf(val) and val < 0


class TestAExponent:
    def test_a1_is_log4_3(self):
        # cot(pi/6) = sqrt(3), so a(1) = log_4 3
        assert a_exponent(1) == pytest.approx(math.log(3) / math.log(4), abs=1e-13)

    def test_a2_closed_form(self):
        # cot(pi/10) = sqrt(5 + 2 sqrt(5))
        expected = math.log(math.sqrt(5.0 + 2.0 * math.sqrt(5.0))) / math.log(4.0)
        assert a_exponent(2) == pytest.approx(expected, abs=1e-13)
        assert a_exponent(2) == pytest.approx(0.8109, abs=5e-5)

    def test_monotone_and_below_one(self):
        vals = [a_exponent(n) for n in range(1, 51)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1.0

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            a_exponent(0)


class TestXiAndIterate:
    def test_xi1(self):
        assert xi_fixed_point(1) == pytest.approx(SQRT3_2, abs=1e-15)

    def test_xi2_closed_form(self):
        # sin(2 pi / 5) = sqrt(10 + 2 sqrt(5)) / 4
        expected = math.sqrt(10.0 + 2.0 * math.sqrt(5.0)) / 4.0
        assert xi_fixed_point(2) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_fixed_point_property(self, n):
        xi = xi_fixed_point(n)
        assert abs(f_iterate(n, xi) - xi) < 1e-12

    def test_identity_iterate(self):
        assert f_iterate(0, 0.3) == 0.3

    def test_doubling_at_45_degrees(self):
        assert f_iterate(1, math.sqrt(2.0) / 2.0) == pytest.approx(1.0, abs=1e-15)

    def test_angle_doubling_semantics(self):
        rng = random.Random(3)
        for _ in range(100):
            theta = rng.random()
            x = abs(math.sin(math.pi * theta))
            want = abs(math.sin(2.0 * math.pi * theta))
            assert f_iterate(1, x) == pytest.approx(want, abs=1e-12)

    def test_rejects_outside_unit(self):
        with pytest.raises(ValueError):
            f_iterate(1, 1.5)


class TestGValue:
    def test_g1_at_xi(self):
        assert g_value(1, xi_fixed_point(1)) == pytest.approx(SQRT3_2, abs=1e-14)
        assert g_at_xi(1) == pytest.approx(SQRT3_2, abs=1e-14)

    def test_g2_at_xi_closed_form(self):
        expected = math.sqrt(5.0 + 2.0 * math.sqrt(5.0)) / 4.0
        assert g_at_xi(2) == pytest.approx(expected, abs=1e-14)
        assert g_value(2, xi_fixed_point(2)) == pytest.approx(expected, abs=1e-13)

    def test_zero(self):
        for n in (1, 2, 5):
            assert g_value(n, 0.0) == 0.0

    def test_limit_at_one(self):
        # closed form is 0/0 at x=1; the product-form limit is 1
        for n in (1, 2, 4):
            assert g_value(n, 1.0) == 1.0
            assert g_value_product(n, 1.0) == 1.0

    @pytest.mark.parametrize("n", [1, 2, 3, 6])
    def test_closed_matches_product_form(self, n):
        xs = np.linspace(0.0, 1.0, 10_001)
        a = g_value(n, xs)
        b = g_value_product(n, xs)
        assert np.max(np.abs(a - b)) < 1e-12

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_telescoping_identity(self, n):
        # f_0 prod sqrt(1-f_nu^2) = f_n / (2^n sqrt(1-x^2)) off the endpoint
        xs = np.linspace(0.0, 0.9999, 10_000)
        lhs = g_value_product(n, xs)
        fn = f_iterate(n, xs)
        rhs = fn / ((1 << n) * np.sqrt((1.0 - xs) * (1.0 + xs)))
        assert np.max(np.abs(lhs - rhs)) < 1e-10


class TestGelfond:
    @pytest.mark.parametrize("n", [1, 8])
    def test_certification_passes(self, n):
        cert = gelfond_certify(n, 100_000)
        assert cert.passed
        assert cert.max_violation <= 1e-12

    def test_equality_at_xi(self):
        for n in (1, 3):
            xi = xi_fixed_point(n)
            g_xi = g_at_xi(n)
            b1 = g_value(n, xi) - g_xi
            b2 = g_value(n, xi) * g_value(n, f_iterate(n, xi)) - g_xi * g_xi
            assert abs(min(b1, b2)) < 1e-12

    def test_grid_too_small(self):
        with pytest.raises(ValueError):
            gelfond_certify(1, 100)


class TestSharpness:
    def test_n1_l1(self):
        res = sharpness_identity(1, 1)
        assert res.lhs == pytest.approx(SQRT3_2, abs=1e-14)
        assert res.rhs == pytest.approx(SQRT3_2, abs=1e-14)

    def test_n2_l1_closed_form(self):
        expected = math.sqrt(5.0 + 2.0 * math.sqrt(5.0)) / 4.0
        res = sharpness_identity(2, 1)
        assert res.lhs == pytest.approx(expected, abs=1e-13)

    def test_n3_l20_log_identity(self):
        assert sharpness_identity(3, 20).log_diff < 1e-9


class TestUpperBoundChain:
    def test_bound_holds_on_random_sample(self):
        # the proof's final display: Pi <= (G_n(xi_n))^(d-1)
        rng = random.Random(101)
        checked = 0
        for _ in range(10_000):
            n = rng.randint(1, 4)
            ell = rng.randint(0, 3 * n)
            r = rng.randint(2 * n, 200)
            log_bound, d = product_upper_bound_log(n, ell, r)
            if d < 1:
                continue
            alpha = UnitFraction(rng.getrandbits(128), 128)
            gamma = PerturbSpec(n, shift=ell).gamma(r)
            lp = log_pi_product(TrigProductParams(r, gamma, alpha))
            checked += 1
            assert lp <= log_bound + 1e-9
        assert checked > 9000
