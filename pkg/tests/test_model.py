"""Unit and property tests for the closed-form waveguide model."""

import numpy as np
import pytest

import waveclock as wc
from waveclock.model import velocity_report, wavenumbers_natural

DELTA_GRID = np.linspace(-10.0, 10.0, 2001)


def params(delta):
    return wc.ModelParams.natural(delta)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            wc.ModelParams(mass=-1.0, energy=1.0, step=0.0, coupling=1.0)
        with pytest.raises(ValueError):
            wc.ModelParams(mass=1.0, energy=0.0, step=0.0, coupling=1.0)
        with pytest.raises(ValueError):
            wc.ModelParams(mass=1.0, energy=1.0, step=0.0, coupling=-2.0)

    def test_delta_recomputed(self):
        p = wc.ModelParams(mass=1.0, energy=2.0, step=0.5 + 0.25j,
                           coupling=3.0, hbar=1.0)
        assert p.delta == 2.0 + 3.0 - (0.5 + 0.25j)
        assert p.x0 == pytest.approx(np.sqrt(1.0 / 3.0))

    def test_natural_constructor_roundtrip(self):
        p = params(-3.0 + 0.5j)
        assert p.delta / p.hbar_j0 == pytest.approx(-3.0 + 0.5j)
        assert p.x0 == 1.0


class TestWavenumbers:
    def test_plus_branch_delta_5(self):
        kn = wc.wavenumbers(params(5.0))
        assert kn.k2 == pytest.approx(np.sqrt(5.0 + np.sqrt(24.0)))
        assert kn.k1 == pytest.approx(1.0 / np.sqrt(5.0 + np.sqrt(24.0)))
        assert kn.branch is wc.Branch.PLUS
        assert kn.k2.imag == 0.0

    def test_band_center_delta_0(self):
        kn = wc.wavenumbers(params(0.0))
        assert kn.k2 == pytest.approx(np.exp(1j * np.pi / 4))
        assert kn.k1 == pytest.approx(np.exp(-1j * np.pi / 4))
        assert abs(kn.k1) == pytest.approx(1.0)
        assert abs(kn.k2) == pytest.approx(1.0)

    def test_minus_branch_delta_m5(self):
        kn = wc.wavenumbers(params(-5.0))
        assert kn.k2 == pytest.approx(1j * np.sqrt(5.0 + np.sqrt(24.0)))
        assert kn.branch is wc.Branch.MINUS

    def test_k0(self):
        p = wc.ModelParams(mass=2.0, energy=3.0, step=0.0, coupling=1.0,
                           hbar=1.0)
        assert wc.wavenumbers(p).k0 == pytest.approx(np.sqrt(12.0))

    def test_product_identity_grid(self):
        for d in DELTA_GRID[::20]:
            p = params(d)
            kn = wc.wavenumbers(p)
            assert kn.k1 * kn.k2 == pytest.approx(1.0, rel=1e-12)

    def test_product_identity_complex(self):
        for d in (2.0 + 1.5j, -3.0 - 0.5j, 0.25j, 1.0 - 1.0j):
            kn = wc.wavenumbers(params(d))
            assert kn.k1 * kn.k2 == pytest.approx(1.0, rel=1e-12)

    def test_sign_conventions(self):
        k2 = wavenumbers_natural(DELTA_GRID)
        assert np.all(k2.real >= 0)
        assert np.all(k2.imag >= -1e-15)

    def test_monotonicity_and_continuity(self):
        k2 = wavenumbers_natural(DELTA_GRID)
        assert np.all(np.diff(k2.real) >= -1e-12)
        assert np.all(np.diff(k2.imag) <= 1e-12)
        # continuity: adjacent jumps bounded by the local grid scale
        assert np.max(np.abs(np.diff(k2))) < 0.1

    def test_conjugation_band(self):
        for d in np.linspace(-1.0, 1.0, 101):
            kn = wc.wavenumbers(params(d))
            assert kn.k1 == pytest.approx(np.conj(kn.k2), rel=1e-12)

    def test_degenerate_input_rejected(self):
        # k2 = 0 needs J0 = 0 with delta = 0; J0 = 0 already fails validation
        with pytest.raises(ValueError):
            wc.ModelParams(mass=1.0, energy=1.0, step=1.0, coupling=0.0,
                           hbar=1.0)


class TestWavefunctions:
    def test_step_boundary_values(self):
        for d in (5.0, 0.0, -5.0, 2.0 + 1.0j):
            p = params(d)
            kn = wc.wavenumbers(p)
            s = wc.wavefunctions(p, 0.0)
            assert s.psi_down == 0.0
            assert s.psi_up == pytest.approx(2 * kn.k0 / (kn.k0 + kn.k2))

    def test_full_transfer_at_quarter_beat(self):
        p = params(5.0)
        kn = wc.wavenumbers(p)
        x = float(np.pi / (2.0 * kn.k1.real))
        s = wc.wavefunctions(p, x)
        assert abs(s.psi_up) == pytest.approx(0.0, abs=1e-12)
        assert wc.relative_population(p, x) == pytest.approx(1.0)

    def test_evanescent_damping(self):
        p = params(-5.0)
        kn = wc.wavenumbers(p)
        x = 3.0 / abs(kn.k2)
        s0 = wc.wavefunctions(p, 0.0)
        s = wc.wavefunctions(p, x)
        k1 = abs(kn.k1)
        # densities carry e^{-6} overall, times cosh/sinh transfer factors
        expected_up = s0.density_up * np.exp(-6.0) * np.cosh(k1 * x) ** 2
        expected_dn = s0.density_up * np.exp(-6.0) * np.sinh(k1 * x) ** 2
        assert s.density_up == pytest.approx(expected_up, rel=1e-12)
        assert s.density_down == pytest.approx(expected_dn, rel=1e-12)

    def test_negative_x_rejected(self):
        with pytest.raises(ValueError):
            wc.wavefunctions(params(1.0), -0.5)

    def test_array_evaluation(self):
        p = params(2.0)
        xs = np.linspace(0.0, 10.0, 50)
        s = wc.wavefunctions(p, xs)
        assert s.psi_up.shape == xs.shape
        assert np.all(s.density >= 0)


class TestBoundaryMatch:
    def test_no_step_no_reflection(self):
        # J0 -> 0+ with V0 = 0 makes k2 -> k0 and r -> 0
        p = wc.ModelParams(mass=1.0, energy=1.0, step=0.0, coupling=1e-8,
                           hbar=1.0)
        bm = wc.boundary_match(p)
        assert abs(bm.r) < 1e-4
        assert bm.continuity_residual < 1e-12

    def test_full_reflection_evanescent(self):
        bm = wc.boundary_match(params(-5.0))
        assert abs(bm.r) == pytest.approx(1.0, rel=1e-12)
        assert bm.continuity_residual < 1e-12

    def test_r_one_third_when_k0_is_2k2(self):
        # delta = 5 fixes k2; choose E so that k0 = 2 k2
        k2 = np.sqrt(5.0 + np.sqrt(24.0))
        e = (2.0 * k2) ** 2 / 2.0
        p = wc.ModelParams.natural(5.0, energy=e)
        bm = wc.boundary_match(p)
        assert bm.r == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_unitarity_bound(self):
        for d in np.linspace(1.5, 10.0, 40):
            assert abs(wc.boundary_match(params(d)).r) < 1.0
        for d in np.linspace(-10.0, -1.0, 40):
            assert abs(wc.boundary_match(params(d)).r) == pytest.approx(1.0)


class TestRelativePopulation:
    def test_zero_at_step(self):
        for d in (3.0, -3.0, 1.0j):
            assert wc.relative_population(params(d), 0.0) == 0.0

    def test_eq10_closed_form(self):
        p = params(-10.0)
        kn = wc.wavenumbers(p)
        k1 = abs(kn.k1)
        x = 5.0 / k1
        got = wc.relative_population(p, x)
        ref = np.sinh(5.0) ** 2 / (np.cosh(5.0) ** 2 + np.sinh(5.0) ** 2)
        assert got == pytest.approx(ref, rel=1e-12)
        assert got == pytest.approx(0.4999546, abs=1e-7)
        assert abs(got - 0.5) < 1e-4

    def test_small_x_law(self):
        x = 1e-3
        for d in (5.0, -5.0, 0.0, 2.0 + 1.0j, -3.0 - 2.0j):
            p = params(d)
            kn = wc.wavenumbers(p)
            ratio = wc.relative_population(p, x) / (abs(kn.k1) * x) ** 2
            assert abs(ratio - 1.0) < 1e-4

    def test_bounds(self):
        xs = np.linspace(0.0, 10.0, 200)
        for d in (-5.0, -1.0, 0.0, 1.0, 5.0, 1.0 + 0.5j):
            pd = wc.relative_population(params(d), xs)
            assert np.all(pd >= 0.0) and np.all(pd <= 1.0)


class TestModalEnergies:
    def test_band_center(self):
        en = wc.modal_energies(params(0.0))
        # k1 = e^{-i pi/4}, k2 = e^{i pi/4}: purely imaginary energies
        assert en.e1 == pytest.approx(-0.5j, abs=1e-12)
        assert en.e2 == pytest.approx(0.5j, abs=1e-12)
        assert en.e1 == pytest.approx(np.conj(en.e2), abs=1e-12)

    def test_in_band_real_parts(self):
        # inside the band E1 and E2 are conjugate: Re(E1) = Re(E2) = delta/2
        for d in np.linspace(-0.99, 0.99, 21):
            en = wc.modal_energies(params(d))
            assert en.e1.real == pytest.approx(d / 2.0, abs=1e-12)
            assert en.e2.real == pytest.approx(d / 2.0, abs=1e-12)
            assert en.e1.imag == pytest.approx(-en.e2.imag, abs=1e-12)

    def test_classification_boundary(self):
        en = wc.modal_energies(params(1.0))
        assert abs(en.kinetic) < 1e-12
        assert wc.modal_energies(params(0.999)).classification \
            is wc.Classification.CLASSICALLY_FORBIDDEN
        assert wc.modal_energies(params(1.001)).classification \
            is wc.Classification.CLASSICALLY_ALLOWED

    def test_energy_identity_sweep(self):
        deltas = list(DELTA_GRID[::40]) + [2.0 + 1.0j, -4.0 + 0.5j, 0.5 - 2.0j]
        for d in deltas:
            p = params(d)
            en = wc.modal_energies(p)
            total = en.e1 + en.e2 - p.hbar_j0 + p.step
            assert total == pytest.approx(p.energy, rel=1e-10)
            assert en.kinetic == pytest.approx(p.delta - p.hbar_j0, rel=1e-10)


class TestVelocities:
    def test_plateau(self):
        for d in np.linspace(-1.0, 1.0, 41):
            assert wc.velocity_J(params(d)) == pytest.approx(1.0, rel=1e-12)

    def test_delta_5_value(self):
        v = wc.velocity_J(params(5.0))
        assert v == pytest.approx(np.sqrt(9.898979), rel=1e-6)
        assert v == pytest.approx(wc.velocity_J(params(-5.0)), rel=1e-12)

    def test_mirror_symmetry_grid(self):
        for d in DELTA_GRID[:1000:25]:
            assert wc.velocity_J(params(d)) == \
                pytest.approx(wc.velocity_J(params(-d)), rel=1e-12)

    def test_classical_limit(self):
        d = 50.0
        assert wc.velocity_J(params(d)) == \
            pytest.approx(np.sqrt(2.0 * d), rel=1e-2)

    def test_vs_vanishes_below_band(self):
        for d in (-1.0, -2.0, -7.5):
            assert wc.velocity_S(params(d), 0.0) == pytest.approx(0.0,
                                                                  abs=1e-14)

    def test_vs_at_band_center(self):
        assert wc.velocity_S(params(0.0), 0.0) == \
            pytest.approx(1.0 / np.sqrt(2.0), rel=1e-12)

    def test_vp_equals_vj_at_step(self):
        for d in (-5.0, -0.5, 0.0, 0.5, 5.0, 2.0 + 1.0j):
            p = params(d)
            assert wc.velocity_p(p, 0.0) == pytest.approx(wc.velocity_J(p),
                                                          rel=1e-12)

    def test_report(self):
        rep = velocity_report(params(5.0))
        assert rep.v_j > 0
        assert rep.v0 == pytest.approx(np.sqrt(2.0))
        assert rep.v_p_at_0 == pytest.approx(rep.v_j, rel=1e-12)

    def test_node_domain_error(self):
        p = params(5.0)
        kn = wc.wavenumbers(p)
        x = float(np.pi / (2.0 * kn.k1.real))
        with pytest.raises(wc.WavefunctionDomainError):
            wc.velocity_p(p, x)
        with pytest.raises(wc.WavefunctionDomainError):
            wc.velocity_S(p, x)

    def test_deep_tail_domain_error(self):
        with pytest.raises(wc.WavefunctionDomainError):
            wc.velocity_p(params(-5.0), 300.0)

    def test_eq12(self):
        assert wc.eq12_speed_ratio(0.0) == 1.0
        assert wc.eq12_speed_ratio(1.0) == pytest.approx(2.0 ** 0.25)
        assert wc.eq12_speed_ratio(-1.0) == wc.eq12_speed_ratio(1.0)
        with pytest.raises(ValueError):
            wc.eq12_speed_ratio(float("nan"))

    def test_buttiker_landauer(self):
        assert wc.buttiker_landauer_time(10.0, 2.0) == 5.0
        with pytest.raises(ValueError):
            wc.buttiker_landauer_time(-1.0, 2.0)


class TestResidualOracle:
    def test_exact_solution_grid(self):
        xs = np.linspace(0.0, 10.0, 100)
        for d in np.linspace(-5.0, 5.0, 41):
            assert np.max(wc.schrodinger_residual(params(d), xs)) < 1e-10

    def test_complex_step(self):
        p = wc.ModelParams(mass=1.0, energy=1.0, step=0.5j, coupling=1.0,
                           hbar=1.0)
        xs = np.linspace(0.0, 10.0, 100)
        assert np.max(wc.schrodinger_residual(p, xs)) < 1e-10

    def test_sensitivity_to_corruption(self):
        # re-evaluate the residual with a deliberately wrong k2
        p = params(3.0)
        kn = wc.wavenumbers(p)
        k2 = kn.k2 * 1.01
        k1 = kn.k1
        x = np.linspace(0.1, 5.0, 20)
        a = 2.0 * kn.k0 / (kn.k0 + k2)
        env = np.exp(1j * k2 * x)
        c, s = np.cos(k1 * x), np.sin(k1 * x)
        up = a * c * env
        dn = -1j * a * s * env
        dd_up = a * env * (-(k1 * k1 + k2 * k2) * c - 2j * k1 * k2 * s)
        res = np.abs(-0.5 * dd_up + p.step * up + (dn - up) - p.energy * up)
        res /= abs(p.energy) * (np.abs(up) + np.abs(dn))
        assert np.max(res) > 1e-6

    def test_si_units_consistency(self):
        # the same physics in SI units must satisfy the same identities
        m, j0 = 6.5e-36, 1e9
        hbar = 1.054571817e-34
        p = wc.ModelParams(mass=m, energy=3.0 * hbar * j0,
                           step=(0.5 + 0.25j) * hbar * j0, coupling=j0)
        kn = wc.wavenumbers(p)
        assert kn.k1 * kn.k2 == pytest.approx(m * j0 / hbar, rel=1e-12)
        xs = np.linspace(0.0, 10.0, 20) * p.x0
        assert np.max(wc.schrodinger_residual(p, xs)) < 1e-10
        assert wc.velocity_p(p, 0.0) == pytest.approx(wc.velocity_J(p),
                                                      rel=1e-12)
