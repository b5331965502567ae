"""Spectral representation of zero-mean scalar fields on the 2-torus.

Conventions, fixed here and relied on everywhere else in the package:

* A real scalar field g on [0, 2*pi)^2 is stored through its Fourier
  coefficients g_hat, with g(x) = sum_n g_hat(n) exp(i n.x) over integer
  wavevectors n != 0.
* The torus carries the normalized measure dx/(2*pi)^2, so every L^p norm
  is a grid mean and Plancherel reads mean(|g|^2) = sum_n |g_hat(n)|^2.
* Coefficients live on the centered band |n_i| <= M/2 - 1 of an M x M array
  in numpy fft2 layout (g_hat = fft2(samples) / M^2). The Nyquist row and
  column are always zero, so the band is closed under n -> -n and the
  stored data of a real field is exactly Hermitian symmetric.
* Homogeneous Sobolev norms: ||g||_{H^s}^2 = sum_n |n|^{2s} |g_hat(n)|^2,
  with the sesquilinear pairing <g,h>_{H^s} = Re sum |n|^{2s} g_hat conj(h_hat).

Fields are immutable; operators are pure functions returning new fields.
Radial (even, real) multipliers and odd purely imaginary multipliers both
preserve Hermitian symmetry exactly in floating point, so operator outputs
skip re-symmetrization. Anything that enters through physical samples is
symmetrized explicitly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

__all__ = [
    "SpectralField",
    "wavenumbers",
    "from_physical",
    "to_physical",
    "fractional_laplacian",
    "derivative",
    "riesz_perp",
    "sobolev_norm",
    "inner_product_hs",
    "lp_norm",
    "project_low",
    "project_high",
    "change_grid",
    "SnapshotMeta",
    "save_snapshot",
    "load_snapshot",
]


class WavenumberTables(NamedTuple):
    n1: np.ndarray        # integer wavenumber along axis 0
    n2: np.ndarray        # integer wavenumber along axis 1
    nsq: np.ndarray       # |n|^2, integer
    nsq_safe: np.ndarray  # |n|^2 with 1 at the origin, for fractional powers
    band: np.ndarray      # True on |n_i| <= M/2 - 1 excluding the origin
    rev: np.ndarray       # index permutation realizing n -> -n on one axis
    lexpos: np.ndarray    # True on the lexicographically positive half band


@lru_cache(maxsize=None)
def wavenumbers(M: int) -> WavenumberTables:
    """Cached integer wavevector tables for an M x M grid."""
    if M < 4 or M % 2:
        raise ValueError(f"grid size must be even and >= 4, got {M}")
    k = np.fft.fftfreq(M, d=1.0 / M).astype(np.int64)
    n1 = np.repeat(k[:, None], M, axis=1)
    n2 = np.repeat(k[None, :], M, axis=0)
    nsq = n1 * n1 + n2 * n2
    nsq_safe = nsq.astype(np.float64)
    nsq_safe[0, 0] = 1.0
    band = (np.abs(n1) < M // 2) & (np.abs(n2) < M // 2)
    band[0, 0] = False
    rev = (-np.arange(M)) % M
    lexpos = band & ((n1 > 0) | ((n1 == 0) & (n2 > 0)))
    for a in (n1, n2, nsq, nsq_safe, band, rev, lexpos):
        a.flags.writeable = False
    return WavenumberTables(n1, n2, nsq, nsq_safe, band, rev, lexpos)


class SpectralField:
    """Zero-mean real scalar field on the torus, stored spectrally.

    Construction canonicalizes: the mean mode and everything outside the
    centered band are zeroed, and the coefficients are symmetrized to make
    Hermitian symmetry bitwise exact. Pass _trusted=True only for arrays
    already canonical (operator outputs), which are adopted without a copy.
    """

    __slots__ = ("M", "coeffs")

    def __init__(self, coeffs: np.ndarray, *, _trusted: bool = False):
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("coefficient array must be square")
        M = c.shape[0]
        w = wavenumbers(M)
        if not _trusted:
            c = c.copy()
            c[~w.band] = 0.0
            c = 0.5 * (c + np.conj(c[np.ix_(w.rev, w.rev)]))
        c.flags.writeable = False
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralField is immutable")

    @classmethod
    def zeros(cls, M: int) -> "SpectralField":
        wavenumbers(M)  # validates M
        return cls(np.zeros((M, M), dtype=np.complex128), _trusted=True)

    @classmethod
    def from_modes(cls, M: int, modes: dict) -> "SpectralField":
        """Build a field from half-spectrum data.

        `modes` maps lexicographically positive wavevectors (n1, n2), i.e.
        n1 > 0 or (n1 == 0 and n2 > 0), to complex amplitudes; conjugate
        modes are filled in automatically.
        """
        wavenumbers(M)  # validates M
        c = np.zeros((M, M), dtype=np.complex128)
        half = M // 2
        for (a, b), amp in modes.items():
            if not (a > 0 or (a == 0 and b > 0)):
                raise ValueError(f"mode {(a, b)} is not lexicographically positive")
            if abs(a) >= half or abs(b) >= half:
                raise ValueError(f"mode {(a, b)} outside the band of M={M}")
            c[a % M, b % M] = complex(amp)
            c[(-a) % M, (-b) % M] = np.conj(complex(amp))
        return cls(c, _trusted=True)

    def copy_coeffs(self) -> np.ndarray:
        return self.coeffs.copy()

    def validate(self) -> None:
        """Assert the representation invariants exactly."""
        w = wavenumbers(self.M)
        c = self.coeffs
        assert c[0, 0] == 0, "mean mode must vanish"
        assert not c[~w.band].any(), "coefficients outside the band must vanish"
        assert np.array_equal(c, np.conj(c[np.ix_(w.rev, w.rev)])), \
            "coefficients must be Hermitian symmetric"

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return SpectralField(self.coeffs + other.coeffs, _trusted=True)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return SpectralField(self.coeffs - other.coeffs, _trusted=True)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.coeffs * float(scalar), _trusted=True)

    __rmul__ = __mul__

    def __repr__(self):
        return f"SpectralField(M={self.M}, ||.||_L2={sobolev_norm(self, 0.0):.6g})"


def _check_same_grid(f: SpectralField, g: SpectralField) -> None:
    if f.M != g.M:
        raise ValueError(f"grid mismatch: {f.M} vs {g.M}")


def from_physical(samples: np.ndarray) -> SpectralField:
    """Transform real grid samples to a canonical spectral field.

    The grid mean and the Nyquist content are discarded (zero-mean band
    representation); the remaining coefficients are symmetrized exactly.
    """
    g = np.asarray(samples)
    if np.iscomplexobj(g):
        raise ValueError("physical samples must be real")
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("sample array must be square")
    M = g.shape[0]
    return SpectralField(np.fft.fft2(g) / (M * M))


def to_physical(f: SpectralField) -> np.ndarray:
    """Evaluate the field on its M x M collocation grid, x_j = 2*pi*j/M."""
    return np.fft.ifft2(f.coeffs).real * (f.M * f.M)


def fractional_laplacian(f: SpectralField, s: float) -> SpectralField:
    """(-Delta)^s f via the multiplier |n|^{2s}; any real s, mean stays zero."""
    w = wavenumbers(f.M)
    return SpectralField(f.coeffs * (w.nsq_safe ** s), _trusted=True)


def derivative(f: SpectralField, axis: int) -> SpectralField:
    """Partial derivative along axis 0 or 1, multiplier i*n_axis."""
    w = wavenumbers(f.M)
    n = w.n1 if axis == 0 else w.n2
    return SpectralField(f.coeffs * (1j * n), _trusted=True)


def riesz_perp(f: SpectralField, alpha: float) -> tuple[SpectralField, SpectralField]:
    """Velocity u = perp-gradient of (-Delta)^{-alpha} f.

    Component multipliers: u1_hat = -i n2 |n|^{-2 alpha} f_hat and
    u2_hat = +i n1 |n|^{-2 alpha} f_hat. The result is divergence free as an
    exact spectral identity. Requires 0 < alpha <= 1.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    w = wavenumbers(f.M)
    inv = w.nsq_safe ** (-alpha)
    u1 = SpectralField(f.coeffs * (-1j * w.n2 * inv), _trusted=True)
    u2 = SpectralField(f.coeffs * (1j * w.n1 * inv), _trusted=True)
    return u1, u2


def sobolev_norm(f: SpectralField, s: float) -> float:
    """Homogeneous Sobolev norm of order s (s = 0 gives the L^2 norm)."""
    w = wavenumbers(f.M)
    return float(np.sqrt(np.sum((w.nsq_safe ** s) * (f.coeffs.real ** 2 + f.coeffs.imag ** 2))))


def inner_product_hs(f: SpectralField, g: SpectralField, s: float = 0.0) -> float:
    """Homogeneous H^s inner product; s = 0 is the L^2 duality pairing."""
    _check_same_grid(f, g)
    w = wavenumbers(f.M)
    return float(np.sum((w.nsq_safe ** s) * (f.coeffs * np.conj(g.coeffs))).real)


def lp_norm(f: SpectralField, p: float) -> float:
    """L^p norm under the normalized measure; p = inf gives the sup norm."""
    if p != np.inf and p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    g = to_physical(f)
    if p == np.inf:
        return float(np.max(np.abs(g)))
    if p == 2.0:
        return float(np.sqrt(np.mean(g * g)))
    return float(np.mean(np.abs(g) ** p) ** (1.0 / p))


def project_low(f: SpectralField, N: float) -> SpectralField:
    """Keep modes with |n| <= N (closed inequality, Euclidean radius)."""
    w = wavenumbers(f.M)
    keep = w.nsq <= N * N
    return SpectralField(np.where(keep, f.coeffs, 0.0), _trusted=True)


def project_high(f: SpectralField, N: float) -> SpectralField:
    """Keep modes with |n| > N; exact complement of project_low."""
    w = wavenumbers(f.M)
    keep = w.nsq > N * N
    return SpectralField(np.where(keep, f.coeffs, 0.0), _trusted=True)


def change_grid(f: SpectralField, M_new: int) -> SpectralField:
    """Re-embed the spectrum on a different grid size.

    Enlarging is exact; shrinking drops modes outside the target band.
    """
    w = wavenumbers(f.M)
    wavenumbers(M_new)  # validates M_new
    half_new = M_new // 2
    keep = w.band & (np.abs(w.n1) < half_new) & (np.abs(w.n2) < half_new)
    c = np.zeros((M_new, M_new), dtype=np.complex128)
    c[w.n1[keep] % M_new, w.n2[keep] % M_new] = f.coeffs[keep]
    return SpectralField(c, _trusted=True)


# ---------------------------------------------------------------------------
# Snapshot files: half-spectrum records with a (M, alpha, gamma, nu, t) header.
# Binary layout, little endian: magic b"GSQ1", int32 M, int32 record count,
# four float64 (alpha, gamma, nu, t), then records (int32 n1, int32 n2,
# float64 re, float64 im) for lexicographically positive n with nonzero
# coefficient, in ascending (n1, n2) order. CSV mirror carries the same data.
# ---------------------------------------------------------------------------

_SNAP_MAGIC = b"GSQ1"
_SNAP_HEADER = struct.Struct("<4sii4d")
_SNAP_RECORD = np.dtype([("n1", "<i4"), ("n2", "<i4"), ("re", "<f8"), ("im", "<f8")])


@dataclass(frozen=True)
class SnapshotMeta:
    M: int
    alpha: float
    gamma: float
    nu: float
    t: float


def _half_spectrum_records(f: SpectralField) -> np.ndarray:
    w = wavenumbers(f.M)
    mask = w.lexpos & (f.coeffs != 0)
    n1 = w.n1[mask].astype(np.int32)
    n2 = w.n2[mask].astype(np.int32)
    c = f.coeffs[mask]
    order = np.lexsort((n2, n1))
    rec = np.empty(n1.size, dtype=_SNAP_RECORD)
    rec["n1"] = n1[order]
    rec["n2"] = n2[order]
    rec["re"] = c.real[order]
    rec["im"] = c.imag[order]
    return rec


def _field_from_records(M: int, rec: np.ndarray) -> SpectralField:
    c = np.zeros((M, M), dtype=np.complex128)
    a = rec["n1"].astype(np.int64)
    b = rec["n2"].astype(np.int64)
    vals = rec["re"] + 1j * rec["im"]
    c[a % M, b % M] = vals
    c[(-a) % M, (-b) % M] = np.conj(vals)
    return SpectralField(c)


def save_snapshot(path, f: SpectralField, meta: SnapshotMeta, fmt: str = "binary") -> None:
    """Write a spectral snapshot, binary by default, fmt="csv" for the mirror."""
    if meta.M != f.M:
        raise ValueError("metadata grid size disagrees with the field")
    rec = _half_spectrum_records(f)
    if fmt == "binary":
        with open(path, "wb") as fh:
            fh.write(_SNAP_HEADER.pack(_SNAP_MAGIC, f.M, rec.size,
                                       meta.alpha, meta.gamma, meta.nu, meta.t))
            fh.write(rec.tobytes())
    elif fmt == "csv":
        with open(path, "w", newline="") as fh:
            fh.write("M,alpha,gamma,nu,t\n")
            fh.write(f"{f.M},{meta.alpha!r},{meta.gamma!r},{meta.nu!r},{meta.t!r}\n")
            fh.write("n1,n2,re,im\n")
            for r in rec:
                fh.write(f"{int(r['n1'])},{int(r['n2'])},{float(r['re'])!r},{float(r['im'])!r}\n")
    else:
        raise ValueError(f"unknown snapshot format {fmt!r}")


def load_snapshot(path) -> tuple[SpectralField, SnapshotMeta]:
    """Read a snapshot in either format (auto-detected by magic bytes)."""
    with open(path, "rb") as fh:
        head = fh.read(_SNAP_HEADER.size)
        if head[:4] == _SNAP_MAGIC:
            magic, M, nrec, alpha, gamma, nu, t = _SNAP_HEADER.unpack(head)
            rec = np.frombuffer(fh.read(nrec * _SNAP_RECORD.itemsize), dtype=_SNAP_RECORD)
            if rec.size != nrec:
                raise ValueError("truncated snapshot file")
            return _field_from_records(M, rec), SnapshotMeta(M, alpha, gamma, nu, t)
    with open(path, "r", newline="") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 3 or lines[0] != "M,alpha,gamma,nu,t" or lines[2] != "n1,n2,re,im":
        raise ValueError(f"{path}: not a snapshot file")
    M_s, alpha_s, gamma_s, nu_s, t_s = lines[1].split(",")
    meta = SnapshotMeta(int(M_s), float(alpha_s), float(gamma_s), float(nu_s), float(t_s))
    rec = np.zeros(len(lines) - 3, dtype=_SNAP_RECORD)
    for i, line in enumerate(lines[3:]):
        a, b, re, im = line.split(",")
        rec[i] = (int(a), int(b), float(re), float(im))
    return _field_from_records(meta.M, rec), meta
