import math

import numpy as np
import pytest

from halkron.metric import (
    integral_pi,
    lambda_bracket,
    mu,
    phi_level,
    phi_levels,
    structural_checks,
)

GRID = 1 << 12  # enough for unit tests; acceptance uses 2^14


class TestPhiLevel:
    def test_level_zero_is_one(self):
        lv = phi_level(3, 0, GRID)
        assert (lv.grid == 1.0).all()
        assert lv.log_scale == 0.0

    def test_closed_form_level_one_n1(self):
        # folding the two branches by half-angle identities:
        # (sin(x pi/2) + cos(x pi/2)) / 2
        lv = phi_level(1, 1, 1 << 14)
        xs = lv.nodes
        expected = (np.sin(xs * np.pi / 2) + np.cos(xs * np.pi / 2)) / 2.0
        got = lv.values()
        assert np.max(np.abs(got - expected)) < 1e-9

    def test_half_point_value_n1(self):
        lv = phi_level(1, 1, GRID)
        assert lv.value_at(0.5) == pytest.approx(math.sqrt(2.0) / 2.0, abs=1e-12)

    def test_interior_positive(self):
        for n in (1, 2, 3):
            for j in (1, 2, 3):
                lv = phi_level(n, j, GRID)
                assert (lv.grid[1:-1] > 0.0).all()

    def test_symmetry(self):
        for n in (1, 2, 4):
            lv = phi_level(n, 3, GRID)
            assert np.max(np.abs(lv.grid - lv.grid[::-1])) < 1e-10

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            phi_level(1, 1, 100)
        with pytest.raises(ValueError):
            phi_level(1, -1, GRID)


class TestMu:
    def test_mu1_exact(self):
        assert mu(1) == pytest.approx(math.sqrt(2.0) / 2.0, abs=1e-13)

    def test_mu2_independent_sum(self):
        # four-term sum written out by hand
        expected = (2.0 / math.cos(math.pi / 8) + 2.0 / math.cos(3 * math.pi / 8)) / 16.0
        assert mu(2) == pytest.approx(expected, abs=1e-14)
        assert mu(2) == pytest.approx(0.4619397662556434, abs=1e-13)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_equals_first_level_at_half(self, n):
        assert mu(n) == pytest.approx(phi_level(n, 1, GRID).value_at(0.5), abs=1e-10)

    def test_upper_exponent_dominates_reference(self):
        ref_upper = {1: 0.40348, 2: 0.37516, 3: 0.34962, 4: 0.32672, 5: 0.30599}
        for n, up in ref_upper.items():
            assert 1.0 + math.log(mu(n)) / (n * math.log(2.0)) >= up


class TestLambdaBracket:
    def test_depth_zero_anchor(self):
        # M_0 = mu(1): upper exponent 1 + log2(sqrt(2)/2) = 1/2
        br = lambda_bracket(1, 0, GRID)
        assert br.exponent_upper == pytest.approx(0.5, abs=1e-9)

    def test_monotone_level_records(self):
        br = lambda_bracket(2, 10, GRID)
        for a, b in zip(br.levels, br.levels[1:]):
            assert b.ratio_max <= a.ratio_max + 1e-9
            assert b.ratio_min >= a.ratio_min - 1e-9
        assert br.lower <= br.upper

    def test_reference_bracket_n1(self):
        br = lambda_bracket(1, 12, 1 << 14)
        lo, hi = br.exponent_lower - 5e-4, br.exponent_upper + 5e-4
        assert lo <= 0.40337 and 0.40348 <= hi

    def test_scale_invariance_of_ratios(self):
        # ratios from normalized grids + log scales == ratios from the
        # denormalized level values
        levels = phi_levels(2, 5, GRID)
        a, b = levels[4], levels[5]
        q_norm = b.grid / a.grid * math.exp(b.log_scale - a.log_scale)
        q_plain = b.values() / a.values()
        assert np.max(np.abs(q_norm - q_plain)) < 1e-12 * np.max(q_plain)

    def test_grid_doubling_convergence(self):
        coarse = lambda_bracket(1, 8, 1 << 11).exponent_upper
        mid = lambda_bracket(1, 8, 1 << 12).exponent_upper
        fine = lambda_bracket(1, 8, 1 << 13).exponent_upper
        assert abs(fine - mid) < 5e-5
        assert abs(fine - mid) <= abs(mid - coarse) + 1e-12


class TestIntegralPi:
    def test_empty_product(self):
        res = integral_pi(1, 0)
        assert res.by_recurrence == 1.0 and res.by_direct == 1.0

    def test_two_over_pi_both_paths(self):
        res = integral_pi(1, 1, grid_size=1 << 14)
        assert res.by_recurrence == pytest.approx(2.0 / math.pi, abs=1e-8)
        assert res.by_direct == pytest.approx(2.0 / math.pi, abs=1e-8)

    def test_n2_l2_agreement(self):
        res = integral_pi(2, 2)
        assert res.disagreement < 1e-6

    @pytest.mark.parametrize("n,l", [(1, 12), (2, 5), (3, 4)])
    def test_dual_path_agreement(self, n, l):
        res = integral_pi(n, l)
        assert res.consistent

    def test_recurrence_guard(self):
        with pytest.raises(ValueError):
            integral_pi(4, 20)

    def test_direct_skipped_beyond_24(self):
        res = integral_pi(3, 10)  # nL = 30
        assert res.by_direct is None and res.consistent is None

    def test_middle_split_identity(self):
        # int Pi_{nL} == int Phi_{n,j} * Pi_{n(L-j)} for a middle j
        from halkron.metric import _pi_direct_quadrature
        from halkron.sequences import PerturbSpec
        import numpy as np

        n, l, j = 2, 3, 1
        lv = phi_level(n, j, 1 << 12)
        # quadrature of Phi_{n,j}(x) * Pi_{n(L-j),c}(x) on the level grid
        xs = lv.nodes
        gamma = PerturbSpec(n).gamma(n * (l - j))
        prod = np.ones_like(xs)
        for idx in range(n * (l - j)):
            t = (xs * float(2**idx)) % 1.0
            prod *= np.sin(np.pi * np.minimum(t, 1 - t)) if gamma[idx] else np.sin(np.pi * np.abs(0.5 - t))
        from scipy.integrate import simpson

        lhs = simpson(lv.values() * prod, dx=1.0 / lv.grid_size)
        rhs = _pi_direct_quadrature(n, l, 8)
        assert lhs == pytest.approx(rhs, abs=2e-7)


class TestStructuralChecks:
    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_all_pass(self, n):
        rep = structural_checks(n, GRID)
        assert rep.all_pass, rep.failures

    def test_reports_details(self):
        rep = structural_checks(1, GRID)
        assert rep.symmetry_max_dev < 1e-10
        assert rep.concavity_max_d2 <= 1e-8
        assert len(rep.integral_rows) == 10
        for ell, val, bound in rep.integral_rows:
            assert val <= bound + 1e-12
