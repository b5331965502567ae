"""Initial data recipes: explicit modes, radial bumps, random rough spectra.

All randomized recipes draw their modes in a canonical order that does not
depend on the grid size, so a fixed (parameters, seed) pair produces the
identical field on every grid large enough to hold it. Resolution studies
can therefore double M without changing the datum.
"""

from __future__ import annotations

import math

import numpy as np

from .nonlinear import DEFAULT_DEALIAS, DealiasPolicy
from .spectral import SpectralField, wavenumbers

__all__ = [
    "canonical_band_modes",
    "modes_datum",
    "rough_datum",
    "bump_profile_hat",
    "bump_datum",
    "counterexample_datum",
    "from_recipe",
]


def canonical_band_modes(kmax: int) -> list:
    """Lexicographically positive wavevectors with 0 < |n| <= kmax, in a
    fixed (n1 ascending, n2 ascending) order."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    out = []
    for a in range(0, kmax + 1):
        for b in range(-kmax, kmax + 1):
            if (a > 0 or b > 0) and a * a + b * b <= kmax * kmax:
                out.append((a, b))
    return out


def modes_datum(M: int, modes: dict) -> SpectralField:
    return SpectralField.from_modes(M, modes)


def rough_datum(M: int, kmax: int, exponent: float, amplitude: float,
                seed: int) -> SpectralField:
    """|theta_hat(n)| = amplitude |n|^{-exponent} with seeded uniform phases.

    Steep exponents give smooth-looking data; exponent near 1 + alpha gives
    a datum that is rough at the band edge yet L^{p_alpha}-bounded.
    """
    rng = np.random.default_rng(seed)
    mm = {}
    for (a, b) in canonical_band_modes(kmax):
        phase = rng.uniform(0.0, 2.0 * np.pi)
        mag = amplitude * float(a * a + b * b) ** (-0.5 * exponent)
        mm[(a, b)] = mag * complex(math.cos(phase), math.sin(phase))
    return SpectralField.from_modes(M, mm)


def bump_profile_hat(rho, sigma: float, amplitude: float):
    """Radial Fourier transform of the Mexican-hat bump

        psi(x) = amplitude (1 - |x|^2 / (2 sigma^2)) exp(-|x|^2 / (2 sigma^2)),
        psi_hat(rho) = amplitude pi sigma^4 rho^2 exp(-sigma^2 rho^2 / 2).

    Vanishes at rho = 0, so the bump has exactly zero mean.
    """
    rho = np.asarray(rho, dtype=np.float64)
    return amplitude * math.pi * sigma ** 4 * rho ** 2 * np.exp(-0.5 * (sigma * rho) ** 2)


def bump_datum(M: int, sigma: float = 0.5, amplitude: float = 1.0) -> SpectralField:
    """Radial zero-mean bump centered at the origin of the torus.

    The Gaussian envelope is numerically supported in a ball of radius
    about 6 sigma, which must stay inside the fundamental cell.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if 6.0 * sigma >= math.pi:
        raise ValueError(f"bump support 6*sigma={6 * sigma:.3f} wraps the torus")
    w = wavenumbers(M)
    rho = np.sqrt(w.nsq.astype(np.float64))
    c = (bump_profile_hat(rho, sigma, amplitude) / (2.0 * np.pi) ** 2).astype(np.complex128)
    c[~w.band] = 0.0
    # real even radial coefficients are Hermitian by construction
    return SpectralField(c, _trusted=True)


def counterexample_datum(M: int, alpha: float, gamma: float, nu: float,
                         sigma: float = 0.5, amplitude: float = 1.0,
                         policy: DealiasPolicy = DEFAULT_DEALIAS) -> SpectralField:
    """Self-similar family datum nu^{-(1+alpha)/gamma} Theta(x / nu^{1/gamma})
    sampled on the grid.

    The spectral envelope sits at |n| ~ nu^{-1/gamma} / sigma, so for small
    nu this is only realizable on huge grids; the resolution guard rejects
    parameters whose dissipation-norm weight leaks past the dealiasing
    radius.
    """
    if not 0.0 < nu:
        raise ValueError("nu must be positive")
    ell = nu ** (1.0 / gamma)
    if 6.0 * sigma * ell >= math.pi:
        raise ValueError(f"scaled support 6*sigma*nu^(1/gamma)={6 * sigma * ell:.3f} "
                         "wraps the torus")
    w = wavenumbers(M)
    rho = ell * np.sqrt(w.nsq.astype(np.float64))
    pref = nu ** ((1.0 - alpha) / gamma)
    c = (pref * bump_profile_hat(rho, sigma, amplitude) / (2.0 * np.pi) ** 2
         ).astype(np.complex128)
    c[~w.band] = 0.0
    field = SpectralField(c, _trusted=True)

    weight = w.nsq_safe ** (gamma - alpha) * np.abs(c) ** 2
    total = float(weight.sum())
    radius = policy.radius(M)
    beyond = float(weight[w.nsq > radius * radius].sum())
    if total == 0.0 or beyond > 1e-6 * total:
        raise ValueError(
            f"rescaled datum unresolved at M={M}, nu={nu:g}: "
            f"{beyond / max(total, 1e-300):.2e} of the H^(gamma-alpha) weight "
            "lies beyond the dealiasing radius")
    return field


def from_recipe(kind: str, parameters: dict, M: int, seed: int = 0) -> SpectralField:
    """Dispatch for the three config-file recipes: modes, bump, rough."""
    if kind == "modes":
        return modes_datum(M, parameters["modes"])
    if kind == "bump":
        return bump_datum(M, sigma=float(parameters.get("sigma", 0.5)),
                          amplitude=float(parameters.get("amplitude", 1.0)))
    if kind == "rough":
        return rough_datum(M, kmax=int(parameters["kmax"]),
                           exponent=float(parameters["exponent"]),
                           amplitude=float(parameters.get("amplitude", 1.0)),
                           seed=seed)
    raise ValueError(f"unknown initial-data kind {kind!r}")
