"""Time-series diagnostics: balance residuals, norms, and their CSV format.

A DiagnosticSeries is one row per sample time with a fixed column set; the
CSV file is exactly that table with a header row. Residual columns are
written by the integrator from stage-accumulated integrals (fourth order);
the recompute_* helpers rebuild them from the sampled columns alone by
composite trapezoid, which is what one can do with a loaded file and is
accurate to O(sample spacing^2).

Balance identities, with H = (1/2) ||theta||^2 in the pertinent space:
    res_ham(t) = H_{-alpha}(t) + nu * int_0^t ||theta||^2_{H^{gamma-alpha}}
                 - H_{-alpha}(0) - int_0^t <f, theta>_{H^{-alpha}}
    res_l2(t)  = same with L^2 energy, H^{gamma} dissipation, L^2 pairing.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

__all__ = [
    "COLUMNS",
    "DiagnosticSeries",
    "p_alpha",
    "trapezoid_cumulative",
    "recompute_balance_residuals",
    "lp_monotonicity_check",
    "decay_envelope",
    "cum_at",
]

COLUMNS = (
    "t",
    "h_minus_alpha",
    "l2",
    "h_gamma_minus_alpha",
    "h_gamma",
    "lp_alpha",
    "l1",
    "linf",
    "pair_ham",
    "pair_l2",
    "cum_diss_ham",
    "cum_diss_l2",
    "res_ham",
    "res_l2",
)


def p_alpha(alpha: float) -> float:
    """The critical Lebesgue exponent 2 / (1 + alpha)."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return 2.0 / (1.0 + alpha)


@dataclass
class DiagnosticSeries:
    t: np.ndarray
    h_minus_alpha: np.ndarray
    l2: np.ndarray
    h_gamma_minus_alpha: np.ndarray
    h_gamma: np.ndarray
    lp_alpha: np.ndarray
    l1: np.ndarray
    linf: np.ndarray
    pair_ham: np.ndarray
    pair_l2: np.ndarray
    cum_diss_ham: np.ndarray
    cum_diss_l2: np.ndarray
    res_ham: np.ndarray
    res_l2: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        for f in fields(self):
            a = np.asarray(getattr(self, f.name), dtype=np.float64)
            if a.shape != (n,):
                raise ValueError(f"column {f.name} has shape {a.shape}, expected ({n},)")
            setattr(self, f.name, a)

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        if name not in COLUMNS:
            raise KeyError(name)
        return getattr(self, name)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(COLUMNS) + "\n")
            for i in range(len(self)):
                fh.write(",".join(repr(float(self.column(c)[i])) for c in COLUMNS) + "\n")

    @classmethod
    def from_csv(cls, path) -> "DiagnosticSeries":
        with open(path, "r", newline="") as fh:
            lines = fh.read().splitlines()
        if not lines or tuple(lines[0].split(",")) != COLUMNS:
            raise ValueError(f"{path}: missing or wrong diagnostic header")
        data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]],
                        dtype=np.float64).reshape(len(lines) - 1, len(COLUMNS))
        return cls(**{c: data[:, i] for i, c in enumerate(COLUMNS)})


def trapezoid_cumulative(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Cumulative integral of samples y(t), composite trapezoid, starts at 0."""
    out = np.zeros_like(np.asarray(y, dtype=np.float64))
    if len(out) > 1:
        dt = np.diff(t)
        out[1:] = np.cumsum(0.5 * dt * (y[1:] + y[:-1]))
    return out


def recompute_balance_residuals(series: DiagnosticSeries,
                                nu: float) -> tuple[np.ndarray, np.ndarray]:
    """Rebuild both balance residuals from the sampled norm columns.

    Uses trapezoid sums throughout, including for the dissipation integrals,
    so the result is independent of the integrator-accumulated cum_* columns.
    """
    diss_ham = trapezoid_cumulative(series.t, series.h_gamma_minus_alpha ** 2)
    diss_l2 = trapezoid_cumulative(series.t, series.h_gamma ** 2)
    force_ham = trapezoid_cumulative(series.t, series.pair_ham)
    force_l2 = trapezoid_cumulative(series.t, series.pair_l2)
    res_ham = (0.5 * series.h_minus_alpha ** 2 + nu * diss_ham
               - 0.5 * series.h_minus_alpha[0] ** 2 - force_ham)
    res_l2 = (0.5 * series.l2 ** 2 + nu * diss_l2
              - 0.5 * series.l2[0] ** 2 - force_l2)
    return res_ham, res_l2


def lp_monotonicity_check(series: DiagnosticSeries, alpha: float,
                          forcing_lp: dict | None = None) -> dict:
    """Worst violation of ||theta(t)||_p <= ||theta(0)||_p + int_0^t ||f||_p.

    forcing_lp maps p to an array of ||f(t_k)||_{L^p} samples on the series
    grid (omit or pass None for unforced runs). Returns {p: max violation};
    nonpositive values mean the transport-diffusion bound held.
    """
    pa = p_alpha(alpha)
    observed = {1.0: series.l1, pa: series.lp_alpha, 2.0: series.l2, np.inf: series.linf}
    out = {}
    for p, col in observed.items():
        budget = np.zeros_like(col)
        if forcing_lp is not None and p in forcing_lp:
            budget = trapezoid_cumulative(series.t, np.asarray(forcing_lp[p]))
        out[p] = float(np.max(col - col[0] - budget))
    return out


def decay_envelope(series: DiagnosticSeries, nu: float, alpha: float, gamma: float,
                   delta: float) -> tuple[float, float]:
    """Late-time L^2 decay: fitted slope of log ||theta||^2 vs log t on
    [delta, T], and the envelope constant max (nu t)^{alpha/gamma} ||theta||^2."""
    sel = (series.t >= delta) & (series.l2 > 0)
    if np.count_nonzero(sel) < 2:
        raise ValueError("not enough samples past delta for a decay fit")
    slope = float(np.polyfit(np.log(series.t[sel]), np.log(series.l2[sel] ** 2), 1)[0])
    envelope = float(np.max((nu * series.t[sel]) ** (alpha / gamma) * series.l2[sel] ** 2))
    return slope, envelope


def cum_at(series: DiagnosticSeries, column: str, t: float) -> float:
    """Linear interpolation of a cumulative column at time t."""
    return float(np.interp(t, series.t, series.column(column)))
