"""Transport nonlinearity: oracle agreement, cancellations, weak form."""

import numpy as np
import pytest

from gsqg.nonlinear import (
    fault_injection,
    DEFAULT_DEALIAS,
    DealiasPolicy,
    ProbeFunction,
    cancellation_residuals,
    commutator_T_alpha,
    mollify,
    nonlinear_term,
    weak_form_identity_gap,
    weak_form_sides,
)
from gsqg.spectral import (
    SpectralField,
    fractional_laplacian,
    riesz_perp,
    sobolev_norm,
    to_physical,
    from_physical,
)

from oracles import direct_commutator, direct_transport, random_band_field

ALPHAS = [0.25, 0.5, 0.75, 1.0]


def rel_err(a: np.ndarray, b: np.ndarray) -> float:
    scale = np.linalg.norm(b.ravel())
    return float(np.linalg.norm((a - b).ravel()) / (scale if scale else 1.0))


class TestDealiasPolicy:
    def test_radius(self):
        p = DealiasPolicy()
        assert p.radius(96) == pytest.approx(32.0)
        assert p.max_axis_mode(64) == 21

    def test_tiny_grid_rejected(self):
        with pytest.raises(ValueError):
            DealiasPolicy(cutoff_fraction=0.1).radius(16)

    def test_mollify_idempotent_and_commuting(self):
        rng = np.random.default_rng(43)
        f = random_band_field(rng, 32, 15, 30)
        jf = mollify(f)
        assert np.array_equal(mollify(jf).coeffs, jf.coeffs)
        a = mollify(fractional_laplacian(f, 0.5))
        b = fractional_laplacian(mollify(f), 0.5)
        assert np.array_equal(a.coeffs, b.coeffs)


class TestTransportTerm:
    def test_single_mode_advects_nothing(self):
        for alpha in ALPHAS:
            f = SpectralField.from_modes(32, {(2, 1): 1.0 + 0.5j})
            n = nonlinear_term(f, alpha)
            assert np.max(np.abs(n.coeffs)) < 1e-14

    def test_matches_direct_convolution(self):
        rng = np.random.default_rng(47)
        M = 32
        for alpha in ALPHAS:
            for _ in range(8):
                f = random_band_field(rng, M, 5.0, 8, norm=1.0)
                n = nonlinear_term(f, alpha)
                oracle = direct_transport(f, alpha, DEFAULT_DEALIAS)
                assert rel_err(n.coeffs, oracle) < 1e-12

    def test_output_canonical_and_dealiased(self):
        rng = np.random.default_rng(53)
        f = random_band_field(rng, 32, 15, 40)
        n = nonlinear_term(f, 0.5)
        n.validate()
        mask = DEFAULT_DEALIAS.mask(32)
        assert not n.coeffs[~mask].any()

    def test_translation_equivariance(self):
        # advecting a shifted field equals shifting the advected field
        rng = np.random.default_rng(59)
        f = random_band_field(rng, 32, 9, 15, norm=1.0)
        shift = (5, 11)  # grid offsets, exact on the collocation lattice
        g = from_physical(np.roll(to_physical(f), shift, axis=(0, 1)))
        a = to_physical(nonlinear_term(g, 0.5))
        b = np.roll(to_physical(nonlinear_term(f, 0.5)), shift, axis=(0, 1))
        assert np.allclose(a, b, atol=1e-12)

    def test_alpha_validation(self):
        f = SpectralField.from_modes(16, {(1, 0): 1.0})
        with pytest.raises(ValueError):
            nonlinear_term(f, 0.0)


class TestCancellations:
    def test_residuals_at_machine_scale(self):
        rng = np.random.default_rng(61)
        for alpha in ALPHAS:
            for _ in range(6):
                f = random_band_field(rng, 64, 31.0, 32, norm=1.0)
                r_ham, r_l2 = cancellation_residuals(f, alpha)
                assert r_ham < 1e-10
                assert r_l2 < 1e-10

    def test_residuals_detect_broken_multiplier(self):
        # a corrupted velocity multiplier must break the Hamiltonian pairing
        # while leaving the L^2 one intact (velocity stays divergence free)
        rng = np.random.default_rng(67)
        f = random_band_field(rng, 64, 20.0, 32, norm=1.0)
        with fault_injection(0.05):
            r_ham, r_l2 = cancellation_residuals(f, 0.5)
        assert r_ham > 1e-6
        assert r_l2 < 1e-12


class TestCommutatorAndWeakForm:
    def test_commutator_matches_direct_convolution(self):
        rng = np.random.default_rng(71)
        M = 32
        for alpha in ALPHAS:
            h = random_band_field(rng, M, 6.0, 10, norm=1.0)
            phi_field = random_band_field(rng, M, 4.0, 6)
            phi = ProbeFunction(phi_field.coeffs + 0.0)
            t1, t2 = commutator_T_alpha(phi, h, alpha)
            o1, o2 = direct_commutator(phi.coeffs, h, alpha)
            assert rel_err(t1, o1) < 1e-12
            assert rel_err(t2, o2) < 1e-12

    def test_commutator_with_constant_phi_vanishes(self):
        rng = np.random.default_rng(73)
        h = random_band_field(rng, 32, 8.0, 10)
        phi = ProbeFunction.from_modes(32, {}, mean=2.5)
        t1, t2 = commutator_T_alpha(phi, h, 0.5)
        assert np.max(np.abs(t1)) == 0.0
        assert np.max(np.abs(t2)) == 0.0

    def test_commutator_retains_means(self):
        # generic inputs produce a nonzero mean component, kept in the output
        rng = np.random.default_rng(79)
        h = random_band_field(rng, 32, 6.0, 10, norm=1.0)
        phi = ProbeFunction(random_band_field(rng, 32, 4.0, 6).coeffs)
        t1, t2 = commutator_T_alpha(phi, h, 0.5)
        assert max(abs(t1[0, 0]), abs(t2[0, 0])) > 0.0

    def test_weak_form_identity(self):
        rng = np.random.default_rng(83)
        M = 64
        for alpha in ALPHAS:
            for _ in range(5):
                theta = random_band_field(rng, M, 6.0, 10, norm=1.0)
                phi = ProbeFunction(random_band_field(rng, M, 4.0, 6).coeffs)
                lhs, rhs = weak_form_sides(theta, phi, alpha)
                gap = weak_form_identity_gap(theta, phi, alpha)
                tol = 1e-8 * (1.0 + sobolev_norm(theta, -alpha) ** 2 * phi.c2_proxy())
                assert gap < tol
                # the identity should be a statement about nonzero numbers
                assert abs(lhs) > 1e-12 or abs(rhs) > 1e-12

    def test_weak_form_constant_phi(self):
        rng = np.random.default_rng(89)
        theta = random_band_field(rng, 32, 6.0, 10, norm=1.0)
        phi = ProbeFunction.from_modes(32, {}, mean=1.0)
        lhs, rhs = weak_form_sides(theta, phi, 0.5)
        assert lhs == pytest.approx(0.0, abs=1e-15)
        assert rhs == pytest.approx(0.0, abs=1e-15)

    def test_c2_proxy(self):
        phi = ProbeFunction.from_modes(32, {(3, 4): 0.5}, mean=1.0)
        # (1+0)^2*1 + 2*(1+5)^2*0.5 = 37
        assert phi.c2_proxy() == pytest.approx(37.0, rel=1e-13)
