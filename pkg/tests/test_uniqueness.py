import numpy as np
import pytest
from scipy.optimize import brentq

import oracles
from resolab.errors import DomainError, Inapplicable, PoleError
from resolab.potential import (
    Bump,
    PotentialPair,
    SquareWell,
    StepPotential,
    pair_with_tail,
    reflect,
    splice,
)
from resolab import jost, spectrum, uniqueness

SW1 = SquareWell(1.0)
SW2 = SquareWell(2.0)
FREE = SquareWell(0.0)


def make_pairs():
    return [
        pair_with_tail(SW1, SquareWell(3.0), 0.5),
        pair_with_tail(SW1, SquareWell(-2.0), 0.5),
        pair_with_tail(StepPotential(edges=(0.0, 0.5, 1.0), levels=(1.0, 3.0)), SW2, 0.5),
        pair_with_tail(Bump(1, 1, 6.0), Bump(2, 1, 4.0), 0.5),
        pair_with_tail(SW2, StepPotential(edges=(0.0, 0.25, 0.625, 1.0), levels=(2.0, -1.0, 0.5)), 0.5),
    ]


class TestTau:
    def test_free_line(self):
        assert uniqueness.tau(FREE, 2.0) == pytest.approx(2j, abs=1e-12)

    def test_square_well_closed_form(self):
        assert uniqueness.tau(SW2, 1.0) == pytest.approx(oracles.tau_cf(2.0, 1.0), rel=1e-10)

    def test_pole_detection(self):
        # psi+(1/2, i t) is real for the deep well and changes sign
        well = SquareWell(-20.0)

        def mid(t):
            return jost.jost_plus(well, 1j * t, [0.5])[0].psi.real

        grid = np.linspace(0.2, 4.3, 200)
        vals = [mid(t) for t in grid]
        bracket = next(
            (grid[i], grid[i + 1])
            for i in range(len(grid) - 1)
            if vals[i] * vals[i + 1] < 0
        )
        t_pole = brentq(mid, *bracket, xtol=1e-13)
        with pytest.raises(PoleError):
            uniqueness.tau(well, 1j * t_pole)


class TestG1:
    def test_identical_pair_vanishes(self):
        pair = PotentialPair(SW2, SW2, 0.5)
        for k in (1.0, 2.0 + 0.5j, 4.0 - 1.0j):
            ev = uniqueness.g1(pair, k)
            for form in ev.populated():
                assert abs(form) <= 1e-10

    def test_four_forms_agree(self):
        pair = pair_with_tail(SW1, SquareWell(3.0), 0.5)
        ev = uniqueness.g1(pair, 2.0)
        forms = ev.populated()
        assert len(forms) == 4
        scale = max(abs(f) for f in forms)
        for a in forms:
            for b in forms:
                assert abs(a - b) <= 1e-7 * scale

    def test_forms_nonzero_for_different_tails(self):
        pair = pair_with_tail(SW1, SquareWell(3.0), 0.5)
        ev = uniqueness.g1(pair, 2.0)
        assert abs(ev.integral_form) > 1e-3

    def test_reduced_forms_for_other_prefix(self):
        pair = pair_with_tail(SW1, SquareWell(3.0), 0.25)
        ev = uniqueness.g1(pair, 1.5)
        assert ev.tau_form is None
        scale = max(abs(ev.integral_form), abs(ev.omega_form), abs(ev.s_form))
        assert abs(ev.integral_form - ev.omega_form) <= 1e-7 * scale
        assert abs(ev.integral_form - ev.s_form) <= 1e-7 * scale

    def test_vanishes_at_shared_wronskian_zeros(self):
        # a potential and its reflection share the Wronskian function, so
        # g1 = omega(k)[psi~+(0,k) - psi+(0,k)] vanishes at every shared zero
        q = StepPotential(edges=(0.0, 0.5, 1.0), levels=(1.0, 3.0))
        qr = reflect(q)
        zs = spectrum.find_omega_zeros(q, (-8.0, 8.0, -8.0, 0.5))
        assert zs.points
        for p in zs.points:
            om = jost.omega(q, p.k)
            om_r = jost.omega(qr, p.k)
            psi0 = jost.jost_plus(q, p.k, [0.0])[0].psi
            psi0_r = jost.jost_plus(qr, p.k, [0.0])[0].psi
            g1_at_zero = om * psi0_r - om_r * psi0
            scale = (1.0 + abs(psi0) + abs(psi0_r)) * (1.0 + abs(jost.omega_prime(q, p.k)))
            assert abs(g1_at_zero) <= 1e-8 * scale


class TestResonanceDistance:
    def test_identical_sets(self):
        zs = spectrum.find_omega_zeros(SW2, (-9, 9, -9, 9))
        assert uniqueness.resonance_distance(zs, zs, 8.0) == 0.0

    def test_different_wells_separate(self):
        zs_a = spectrum.find_omega_zeros(SW1, (-9, 9, -9, 9))
        zs_b = spectrum.find_omega_zeros(SquareWell(1.5), (-9, 9, -9, 9))
        assert uniqueness.resonance_distance(zs_a, zs_b, 8.0) > 0.01

    def test_reflection_invariant_sets_close(self):
        q = StepPotential(edges=(0.0, 0.5, 1.0), levels=(1.0, 3.0))
        zs_a = spectrum.find_omega_zeros(q, (-9, 9, -9, 9))
        zs_b = spectrum.find_omega_zeros(reflect(q), (-9, 9, -9, 9))
        assert uniqueness.resonance_distance(zs_a, zs_b, 8.0) <= 1e-7

    def test_coverage_validation(self):
        zs = spectrum.find_omega_zeros(SW2, (-6, 6, -6, 6))
        with pytest.raises(DomainError):
            uniqueness.resonance_distance(zs, zs, 10.0)


@pytest.fixture(scope="module")
def zs():
    return spectrum.find_omega_zeros(SW2, (-21, 21, -21, 21))


class TestSubsetDensity:
    def test_full_set_counts_match(self, zs):
        radii = [8.0, 12.0, 16.0, 20.0]
        est = uniqueness.subset_density(zs, lambda p: True, 0.75, 2, radii=radii)
        assert est.counts == [n for _, n in spectrum.counting_function(zs, radii)]
        assert est.threshold == pytest.approx(0.5)
        assert est.gamma_hat > est.threshold
        assert est.meets_threshold

    def test_full_density_near_one(self, zs):
        est = uniqueness.subset_density(zs, lambda p: True, 0.75, 2, radii=[10.0, 15.0, 20.0])
        assert 0.7 <= est.gamma_hat <= 1.2

    def test_thinning_halves_density(self, zs):
        sel = uniqueness.make_selector("every_second", zs)
        full = uniqueness.subset_density(zs, lambda p: True, 0.75, 2, radii=[10.0, 15.0, 20.0])
        half = uniqueness.subset_density(zs, sel, 0.75, 2, radii=[10.0, 15.0, 20.0])
        assert half.gamma_hat == pytest.approx(full.gamma_hat / 2.0, rel=0.35)

    def test_empty_selection(self, zs):
        est = uniqueness.subset_density(zs, lambda p: False, 0.9, 2, radii=[10.0, 15.0, 20.0])
        assert est.gamma_hat == 0.0
        assert not est.meets_threshold

    def test_theorem3_threshold(self, zs):
        est = uniqueness.subset_density(zs, lambda p: True, 0.3, 3, radii=[10.0, 15.0, 20.0])
        assert est.threshold == pytest.approx(0.4)

    def test_validation(self, zs):
        with pytest.raises(DomainError):
            uniqueness.subset_density(zs, lambda p: True, 1.5, 2)
        with pytest.raises(DomainError):
            uniqueness.subset_density(zs, lambda p: True, 0.5, 5)


class TestTheoremDemos:
    def test_statement1_separation(self):
        pair = pair_with_tail(SW1, SquareWell(1.2), 0.5)
        report = uniqueness.theorem_demo(pair, uniqueness.DemoConfig(theorem=1, radius=8.0))
        assert report["pass"]
        assert report["distances"]["resonance_distance"] > 1e-3
        assert "contrapositive" in report["header"]

    def test_statement4_identical_pair(self):
        q = splice(SW1, SW1, 0.5).with_smoothness(0, 0, 0.4)
        pair = PotentialPair(q, q, 0.5)
        report = uniqueness.theorem_demo(pair, uniqueness.DemoConfig(theorem=4, radius=8.0))
        assert report["pass"]
        assert report["conclusion"] == "uniqueness predicts q = q_tilde"
        assert report["distances"]["max_interior_difference"] == 0.0

    def test_statement2_density_gate(self):
        pair = pair_with_tail(SW1, SquareWell(2.5), 0.8)
        report = uniqueness.theorem_demo(pair, uniqueness.DemoConfig(theorem=2, radius=8.0))
        assert report["density"]["threshold"] == pytest.approx(0.4)
        assert report["density"]["meets_threshold"]
        assert report["pass"]

    def test_statement2_needs_late_prefix(self):
        pair = pair_with_tail(SW1, SquareWell(2.5), 0.5)
        with pytest.raises(Inapplicable):
            uniqueness.theorem_demo(pair, uniqueness.DemoConfig(theorem=2, radius=8.0))

    def test_statement1_needs_smoothness(self):
        q = splice(SW1, SW1, 0.5)  # splice drops the metadata
        pair = PotentialPair(q, splice(SW1, SquareWell(1.2), 0.5), 0.5)
        with pytest.raises(Inapplicable):
            uniqueness.theorem_demo(pair, uniqueness.DemoConfig(theorem=1, radius=8.0))

    def test_statement3_includes_signs(self):
        pair = pair_with_tail(SW2, SquareWell(3.0), 0.25)
        report = uniqueness.theorem_demo(pair, uniqueness.DemoConfig(theorem=3, radius=8.0))
        assert report["density"]["threshold"] == pytest.approx(0.5)
        assert "sign_sets" in report["data"]
        assert report["pass"]


class TestFourFormSweep:
    def test_pairs_at_random_frequencies(self, rng):
        pairs = make_pairs()
        for pair in pairs:
            ks = rng.uniform(0.7, 6.0, 2) + 1j * rng.uniform(-1.5, 1.5, 2)
            for k in ks:
                ev = uniqueness.g1(pair, complex(k))
                forms = ev.populated()
                scale = max(max(abs(f) for f in forms), 1e-10)
                spread = max(abs(a - b) for a in forms for b in forms)
                assert spread <= 1e-7 * scale, (pair, k, spread / scale)
