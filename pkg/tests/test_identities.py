import numpy as np
import pytest

import oracles
from resolab.errors import DomainError, Inapplicable
from resolab.potential import Bump, SquareWell, StepPotential, reflect
from resolab import identities, jost, spectrum

SW2 = SquareWell(2.0)
FREE = SquareWell(0.0)


@pytest.fixture(scope="module")
def cf_zero_set():
    """Closed-form zero set of the c=2 well covering the disk |k| <= 30."""
    zs = spectrum.find_zeros(oracles.omega_cf_fdf(2.0), (-31, 31, -31, 31), tol=1e-10)
    return spectrum.restrict_to_disk(zs, 30.0)


class TestProductIdentity:
    def test_free_line_exact(self):
        rep = identities.check_product_identity(FREE, [1.0, 2.0, 3.0 - 1.0j])
        assert rep.passed
        assert rep.max_abs_residual <= 1e-10

    def test_square_well_point(self):
        # omega(1)omega(-1) - s(1)s(-1) = 4 cosh^2(1) - 4 sinh^2(1) = 4
        om = jost.omega_many(SW2, [1.0, -1.0])
        s = jost.s_many(SW2, [1.0, -1.0])
        assert abs(om[0] * om[1] - s[0] * s[1] - 4.0) <= 1e-10

    def test_grid_pass(self, zoo):
        grid = [complex(r, i) for r in np.linspace(0.5, 20, 10) for i in (-2.0, 0.0, 2.0)]
        for q in zoo[:6]:
            rep = identities.check_product_identity(q, grid)
            assert rep.passed, (q, rep.max_rel_residual)

    def test_adopted_sign_vs_alternative(self, capsys):
        ks = np.array([1.0, 2.0, 5.0], dtype=complex)
        om = jost.omega_many(SW2, np.concatenate([ks, -ks]))
        s = jost.s_many(SW2, np.concatenate([ks, -ks]))
        adopted = np.abs(om[:3] * om[3:] - s[:3] * s[3:] - 4 * ks**2)
        alternative = np.abs(s[:3] * s[3:] - (4 * ks**2 - om[:3] * om[3:]))
        # the alternative convention misses by exactly 2 s(k)s(-k)
        assert adopted.max() < 1e-8
        assert np.all(alternative >= 1.9 * np.abs(s[:3] * s[3:]))
        assert alternative.max() > 1.0
        print(
            "\nproduct identity sign convention: omega(k)omega(-k) - s(k)s(-k) = 4k^2 holds "
            f"(max residual {adopted.max():.2e}); the alternative convention "
            f"s(k)s(-k) = 4k^2 - omega(k)omega(-k) fails (min residual {alternative.min():.2e})"
        )

    def test_large_frequency_rejected(self):
        with pytest.raises(DomainError):
            identities.check_product_identity(SW2, [60.0])

    def test_residual_scales_with_solver_tolerance(self):
        grid = [1.0, 2.5, 4.0, 6.5]
        loose = identities.check_product_identity(Bump(1, 1, 6.0), grid, rtol=1e-6)
        tight = identities.check_product_identity(Bump(1, 1, 6.0), grid, rtol=1e-7)
        assert tight.max_rel_residual <= loose.max_rel_residual / 2.0


class TestReflection:
    def test_symmetric_trivial(self):
        rep = identities.check_reflection(SW2, [1.0, 2.0, 3.0])
        assert rep.passed
        assert rep.max_rel_residual <= 1e-10

    def test_asymmetric_fixtures(self, asym_zoo):
        grid = list(np.linspace(1.0, 10.0, 20))
        for q in asym_zoo:
            rep = identities.check_reflection(q, grid)
            assert rep.passed, (q, rep.max_rel_residual)

    def test_boundary_formula_detail(self):
        rep = identities.check_reflection(StepPotential(edges=(0.0, 0.5, 1.0), levels=(1.0, 3.0)), [2.0])
        assert rep.details["boundary_formula_rel_residual"] <= 1e-9
        assert rep.details["jost_swap_rel_residual"] <= 1e-8


class TestAsymptotics:
    def test_square_well_slope(self):
        rep = identities.check_asymptotics(SquareWell(1.0), np.linspace(-25, -8, 12))
        assert rep.passed
        assert rep.details["fitted_slope"] == pytest.approx(-3.0, abs=0.15)

    def test_positive_side_bound(self):
        rep = identities.check_asymptotics(SquareWell(1.0), np.linspace(-25, -8, 12))
        assert rep.details["positive_side_max_excess"] <= rep.details["positive_side_bound"]

    def test_missing_smoothness_inapplicable(self):
        q = StepPotential(edges=(0.0, 0.5, 1.0), levels=(1.0, 3.0))
        with pytest.raises(Inapplicable):
            identities.check_asymptotics(q, np.linspace(-20, -8, 8))

    def test_grid_domain(self):
        with pytest.raises(DomainError):
            identities.check_asymptotics(SquareWell(1.0), [-40.0, -20.0, -10.0])


class TestCountingTrend:
    def test_square_well_trend(self):
        zs = spectrum.find_omega_zeros(SW2, (-21, 21, -21, 21))
        rep = identities.verify_counting_trend(zs, [10.0, 15.0, 20.0])
        assert rep.passed
        ratios = rep.details["ratios"]
        assert 0.8 <= ratios[-1] <= 1.2

    def test_needs_three_radii(self, cf_zero_set):
        with pytest.raises(DomainError):
            identities.verify_counting_trend(cf_zero_set, [5.0, 10.0])


class TestReconstruction:
    def test_free_line_exact(self):
        zs = spectrum.find_zeros(jost.omega_evaluator(FREE), (-2, 2, -2, 2))
        rec = identities.hadamard_reconstruct(zs, [0.1, 0.3, 0.5])
        assert rec.s_exponent == 1
        assert rec.c_omega == pytest.approx(2j, abs=1e-12)
        ks = np.linspace(-3, 3, 25)
        assert np.max(np.abs(rec.omega_hat(ks) - 2j * ks)) <= 1e-12

    def test_well_reconstruction_vs_ode(self, cf_zero_set):
        # zeros from the closed form, comparison against the ODE route
        probes = np.linspace(4.0, 7.5, 12)
        rec = identities.hadamard_reconstruct(cf_zero_set, probes)
        ks = np.linspace(1.0, 5.0, 40)
        direct = jost.omega_many(SW2, ks)
        rel = np.abs(rec.omega_hat(ks) - direct) / np.abs(direct)
        assert rel.max() <= 0.1
        assert rec.truncation_radius == pytest.approx(30.0)

    def test_limit_samples_cauchy(self, cf_zero_set):
        rec = identities.hadamard_reconstruct(cf_zero_set, np.linspace(4.0, 7.5, 12))
        diffs = [
            abs(rec.limit_samples[i + 1][1] - rec.limit_samples[i][1])
            for i in range(len(rec.limit_samples) - 1)
        ]
        # approach to the limit: later gaps do not grow (modest slack for oscillation)
        assert diffs[-1] <= diffs[0] * 1.5

    def test_permutation_invariance(self, cf_zero_set, rng):
        probes = np.linspace(4.0, 7.5, 12)
        rec = identities.hadamard_reconstruct(cf_zero_set, probes)
        pts = list(cf_zero_set.points)
        rng.shuffle(pts)
        shuffled = spectrum.ZeroSet(
            pts, cf_zero_set.region, cf_zero_set.residual_bound, "omega", ""
        )
        rec2 = identities.hadamard_reconstruct(shuffled, probes)
        ks = np.linspace(1.0, 7.0, 20)
        assert np.max(np.abs(rec.omega_hat(ks) - rec2.omega_hat(ks))) <= 1e-12

    def test_probe_validation(self, cf_zero_set):
        with pytest.raises(DomainError):
            identities.hadamard_reconstruct(cf_zero_set, [1.0, 9.0])  # > R/4
        with pytest.raises(DomainError):
            identities.hadamard_reconstruct(cf_zero_set, [3.0, 2.0])  # not increasing

    def test_empty_set_rejected(self):
        empty = spectrum.ZeroSet([], (-1, 1, -1, 1), 0.0)
        with pytest.raises(DomainError):
            identities.hadamard_reconstruct(empty, [0.1, 0.2])


class TestHelperChecks:
    def test_wronskian_report(self):
        rep = identities.check_wronskian_constancy(SW2, [1.0, 2.0 - 1.0j])
        assert rep.passed

    def test_conjugation_report(self, asym_zoo):
        rep = identities.check_conjugation_symmetry(asym_zoo[0], [1.0 + 0.5j, 3.0 - 1.0j, 5.0])
        assert rep.passed

    def test_report_serialization(self):
        rep = identities.check_product_identity(SW2, [1.0, 2.0])
        d = rep.to_dict()
        assert set(d) >= {"name", "threshold", "max_rel_residual", "pass", "samples"}
        assert d["pass"] is True
