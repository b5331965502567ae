"""Dealiased transport nonlinearity and its structural identities.

The advective term is the mollified N(theta) = J(Ju . grad J theta) with
J a sharp radial Fourier cutoff. J commutes with every radial multiplier
and with the perp-Riesz velocity map, which makes the Hamiltonian and L^2
cancellations exact identities of the discrete system, not approximations:
with v = Ju divergence free and the cubic grid products alias-free inside
the cutoff, both pairings reduce to quadratures of exact derivatives.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import (
    SpectralField,
    derivative,
    fractional_laplacian,
    inner_product_hs,
    riesz_perp,
    sobolev_norm,
    to_physical,
    wavenumbers,
)

__all__ = [
    "DealiasPolicy",
    "DEFAULT_DEALIAS",
    "mollify",
    "nonlinear_term",
    "cancellation_residuals",
    "ProbeFunction",
    "commutator_T_alpha",
    "weak_form_identity_gap",
    "weak_form_sides",
]


@lru_cache(maxsize=None)
def _radial_mask(M: int, radius: float) -> np.ndarray:
    w = wavenumbers(M)
    mask = (w.nsq <= radius * radius) & w.band
    mask.flags.writeable = False
    return mask


@dataclass(frozen=True)
class DealiasPolicy:
    """Sharp radial cutoff at radius cutoff_fraction * (M/2).

    The default 2/3 fraction keeps quadratic grid products alias-free on the
    retained modes (for power-of-two M the cubic quadratures below the cutoff
    are exact as well, since 3*floor(M/3) < M).
    """

    cutoff_fraction: float = 2.0 / 3.0

    def radius(self, M: int) -> float:
        r = self.cutoff_fraction * (M / 2.0)
        if r < 1.0:
            raise ValueError(f"dealias radius {r} < 1 leaves no active mode (M={M})")
        return r

    def mask(self, M: int) -> np.ndarray:
        return _radial_mask(M, self.radius(M))

    def max_axis_mode(self, M: int) -> int:
        # largest |n_i| the retained band can carry, used by the CFL bound
        return int(np.floor(self.radius(M)))


DEFAULT_DEALIAS = DealiasPolicy()

# Fault-injection hook: when nonzero, the advecting velocity is computed with
# a corrupted Riesz exponent. The velocity stays divergence free (the L^2
# cancellation survives) but the Hamiltonian pairing no longer closes, which
# is exactly the failure signature the self-test must be able to provoke.
_FAULT_ALPHA_SHIFT = 0.0


@contextmanager
def fault_injection(alpha_shift: float):
    """Temporarily corrupt the velocity multiplier (self-test use only)."""
    global _FAULT_ALPHA_SHIFT
    old, _FAULT_ALPHA_SHIFT = _FAULT_ALPHA_SHIFT, float(alpha_shift)
    try:
        yield
    finally:
        _FAULT_ALPHA_SHIFT = old


def mollify(f: SpectralField, policy: DealiasPolicy = DEFAULT_DEALIAS) -> SpectralField:
    """Apply the cutoff J."""
    return SpectralField(np.where(policy.mask(f.M), f.coeffs, 0.0), _trusted=True)


def _phys(coeffs: np.ndarray, M: int) -> np.ndarray:
    return np.fft.ifft2(coeffs).real * (M * M)


def _transport_with_speed(theta: SpectralField, alpha: float,
                          policy: DealiasPolicy) -> tuple[SpectralField, float]:
    """N(theta) together with the max advection speed (for CFL checks)."""
    M = theta.M
    w = wavenumbers(M)
    mask = policy.mask(M)
    tc = np.where(mask, theta.coeffs, 0.0)          # J theta
    inv = w.nsq_safe ** (-(alpha + _FAULT_ALPHA_SHIFT))
    v1 = _phys(tc * (-1j * w.n2 * inv), M)          # Ju, computed from J theta
    v2 = _phys(tc * (1j * w.n1 * inv), M)
    g1 = _phys(tc * (1j * w.n1), M)
    g2 = _phys(tc * (1j * w.n2), M)
    prod = v1 * g1 + v2 * g2
    umax = float(np.sqrt(np.max(v1 * v1 + v2 * v2)))
    nc = np.fft.fft2(prod) / (M * M)
    nc[~mask] = 0.0
    return SpectralField(nc), umax


def nonlinear_term(theta: SpectralField, alpha: float,
                   policy: DealiasPolicy = DEFAULT_DEALIAS) -> SpectralField:
    """Mollified advection term J(Ju . grad J theta), u = riesz_perp(theta)."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    field, _ = _transport_with_speed(theta, alpha, policy)
    return field


def cancellation_residuals(theta: SpectralField, alpha: float,
                           policy: DealiasPolicy = DEFAULT_DEALIAS) -> tuple[float, float]:
    """|<N(theta), theta>| in H^{-alpha} and in L^2; both vanish exactly.

    Nonzero values measure floating-point noise only and certify the
    conservative structure of the discretization.
    """
    n = nonlinear_term(theta, alpha, policy)
    return (abs(inner_product_hs(n, theta, -alpha)),
            abs(inner_product_hs(n, theta, 0.0)))


class ProbeFunction:
    """Smooth band-limited test function; unlike fields, may carry a mean.

    Stores full-layout coefficients (Nyquist zeroed, Hermitian) plus the
    C^2 proxy sum (1 + |n|)^2 |phi_hat(n)| used to normalize continuity
    estimates of the weak form.
    """

    __slots__ = ("M", "coeffs")

    def __init__(self, coeffs: np.ndarray):
        c = np.asarray(coeffs, dtype=np.complex128).copy()
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("coefficient array must be square")
        M = c.shape[0]
        w = wavenumbers(M)
        keep = w.band.copy()
        keep[0, 0] = True                            # mean is allowed here
        c[~keep] = 0.0
        c = 0.5 * (c + np.conj(c[np.ix_(w.rev, w.rev)]))
        c.flags.writeable = False
        self.M = M
        self.coeffs = c

    @classmethod
    def from_physical(cls, samples: np.ndarray) -> "ProbeFunction":
        g = np.asarray(samples)
        if np.iscomplexobj(g):
            raise ValueError("physical samples must be real")
        M = g.shape[0]
        return cls(np.fft.fft2(g) / (M * M))

    @classmethod
    def from_modes(cls, M: int, modes: dict, mean: float = 0.0) -> "ProbeFunction":
        base = SpectralField.from_modes(M, modes).copy_coeffs()
        base[0, 0] = mean
        return cls(base)

    def gradient(self) -> tuple[SpectralField, SpectralField]:
        w = wavenumbers(self.M)
        return (SpectralField(self.coeffs * (1j * w.n1), _trusted=True),
                SpectralField(self.coeffs * (1j * w.n2), _trusted=True))

    def c2_proxy(self) -> float:
        w = wavenumbers(self.M)
        r = np.sqrt(w.nsq.astype(np.float64))
        return float(np.sum((1.0 + r) ** 2 * np.abs(self.coeffs)))


def commutator_T_alpha(phi: ProbeFunction, h: SpectralField,
                       alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Components of [grad phi, (-Delta)^alpha] h as raw coefficient arrays.

    T_i = d_i phi * ((-Delta)^alpha h) - (-Delta)^alpha (d_i phi * h).
    Products are formed on the grid; they are exact whenever the inputs are
    band-limited tightly enough that no product content aliases, which is
    the regime the weak-form identity is stated in. The outputs may carry a
    nonzero mean per component, which is retained (hence arrays, not fields).
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if phi.M != h.M:
        raise ValueError(f"grid mismatch: {phi.M} vs {h.M}")
    M = h.M
    w = wavenumbers(M)
    lam = w.nsq_safe ** alpha
    lam = lam.copy()
    lam[0, 0] = 0.0                                  # (-Delta)^alpha kills means
    hp = _phys(h.coeffs, M)
    lam_h = _phys(h.coeffs * lam, M)
    out = []
    for n_ax in (w.n1, w.n2):
        dphi = _phys(phi.coeffs * (1j * n_ax), M)
        first = np.fft.fft2(dphi * lam_h) / (M * M)
        second = (np.fft.fft2(dphi * hp) / (M * M)) * lam
        out.append(first - second)
    return out[0], out[1]


def weak_form_sides(theta: SpectralField, phi: ProbeFunction,
                    alpha: float) -> tuple[float, float]:
    """Left and right sides of the commutator form of the weak advection term.

    LHS: integral of theta u . grad phi (grid quadrature).
    RHS: (1/2) < R_perp theta, T_alpha[phi] (-Delta)^{-alpha} theta > in L^2.
    Equal whenever the band-limits make every product exact.
    """
    if phi.M != theta.M:
        raise ValueError(f"grid mismatch: {phi.M} vs {theta.M}")
    M = theta.M
    u1, u2 = riesz_perp(theta, alpha)
    gp1, gp2 = phi.gradient()
    tp = to_physical(theta)
    lhs = float(np.mean(tp * (to_physical(u1) * to_physical(gp1)
                              + to_physical(u2) * to_physical(gp2))))
    h = fractional_laplacian(theta, -alpha)
    t1, t2 = commutator_T_alpha(phi, h, alpha)
    rhs = 0.5 * float((np.sum(u1.coeffs * np.conj(t1))
                       + np.sum(u2.coeffs * np.conj(t2))).real)
    return lhs, rhs


def weak_form_identity_gap(theta: SpectralField, phi: ProbeFunction,
                           alpha: float) -> float:
    """|LHS - RHS| of the weak-form identity; floating-point sized when exact."""
    lhs, rhs = weak_form_sides(theta, phi, alpha)
    return abs(lhs - rhs)
