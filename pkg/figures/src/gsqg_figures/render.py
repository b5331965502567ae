"""Figure rendering: pure functions from report/series/snapshot files.

Every render is deterministic: fixed fonts, fixed SVG hash salt, no
timestamps in the output metadata, so re-rendering the same inputs gives
byte-identical files.  All viscosity sweeps are drawn on log-log axes
because every claim they illustrate is a power law or a limit.
"""

from dataclasses import dataclass, field

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from gsqg_figures.loading import (FigureDataError, _need, load_report,
                                  load_series, load_snapshot, per_nu_table,
                                  series_column, sorted_numeric_keys)

KINDS = ("dissipation_vs_nu", "higher_order", "tails", "equivalence",
         "spectrum", "residuals")

# every rc that could smuggle environment into the output is pinned
_RC = {
    "svg.hashsalt": "gsqg-figures",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 10.0,
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "axes.unicode_minus": False,
    "path.simplify": False,
}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    out: str | None = None
    title: str | None = None
    labels: tuple = ()
    legend: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureDataError(
                f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise FigureDataError("at least one input file is required")
        if self.kind != "dissipation_vs_nu" and len(self.inputs) != 1:
            raise FigureDataError(
                f"kind {self.kind!r} takes exactly one input file")
        if self.labels and len(self.labels) != len(self.inputs):
            raise FigureDataError(
                f"{len(self.labels)} labels for {len(self.inputs)} inputs")


def _positive(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    return x[keep], y[keep]


def _report_label(report: dict, path, override: str | None) -> str:
    if override:
        return override
    fam = report.get("config", {}).get("family")
    from pathlib import Path
    stem = Path(path).stem
    return f"{stem} ({fam})" if fam else stem


def _draw_dissipation(ax, spec: FigureSpec) -> None:
    for i, path in enumerate(spec.inputs):
        report = load_report(path)
        rows = per_nu_table(report, ("nu", "D"), label=str(path))
        nus = [e["nu"] for e in rows]
        ds = [e["D"] for e in rows]
        label = _report_label(report, path,
                              spec.labels[i] if spec.labels else None)
        ax.loglog(nus, ds, marker="o", label=label)
    ax.set_xlabel("nu")
    ax.set_ylabel("D(nu)")


def _draw_higher_order(ax, spec: FigureSpec) -> None:
    report = load_report(spec.inputs[0])
    rows = per_nu_table(report, ("nu", "H"), label="report")
    nus = [e["nu"] for e in rows]
    for d in sorted_numeric_keys(rows[0]["H"]):
        hs = [_need(e["H"], d, f"per_nu entry for nu={e['nu']!r} H table")
              for e in rows]
        ax.loglog(*_positive(nus, hs), marker="s", label=f"delta = {d}")
    ax.set_xlabel("nu")
    ax.set_ylabel("H(nu, delta)")


def _draw_tails(ax, spec: FigureSpec) -> None:
    report = load_report(spec.inputs[0])
    phi = _need(report, "phi", "report")
    if not phi:
        raise FigureDataError("report: 'phi' table is empty")
    ns = sorted_numeric_keys(phi)
    vals = [phi[n] for n in ns]
    if any(v is None for v in vals):
        raise FigureDataError("report: 'phi' has null entries (aborted sweep)")
    ax.loglog([float(n) for n in ns], vals, marker="o", label="Phi(N)")
    ax.set_xlabel("N")
    ax.set_ylabel("Phi(N)")


def _draw_equivalence(ax, spec: FigureSpec) -> None:
    report = load_report(spec.inputs[0])
    rows = per_nu_table(report, ("nu", "D", "tails"), label="report")
    nus = [e["nu"] for e in rows]
    ax.loglog(*_positive(nus, [e["D"] for e in rows]),
              marker="o", label="D(nu)")
    for lam in sorted_numeric_keys(rows[0]["tails"]):
        ys = [_need(e["tails"], lam, f"per_nu entry for nu={e['nu']!r} tails")
              for e in rows]
        ax.loglog(*_positive(nus, ys), marker="^", linestyle="--",
                  label=f"tail, lambda = {lam}")
    ax.set_xlabel("nu")
    ax.set_ylabel("dissipation / tail")


def _draw_spectrum(ax, spec: FigureSpec) -> None:
    rec, meta = load_snapshot(spec.inputs[0])
    r = np.hypot(rec["n1"], rec["n2"])
    amp = np.hypot(rec["re"], rec["im"])
    x, y = _positive(r, amp)
    if x.size == 0:
        raise FigureDataError("snapshot contains no nonzero modes")
    ax.loglog(x, y, linestyle="none", marker=".", markersize=3,
              label=f"t = {meta['t']:g}, nu = {meta['nu']:g}")
    ax.set_xlabel("|n|")
    ax.set_ylabel("|theta_hat(n)|")


def _draw_residuals(ax, spec: FigureSpec) -> None:
    series = load_series(spec.inputs[0])
    t = series_column(series, "t")
    for name in ("res_ham", "res_l2"):
        y = np.abs(series_column(series, name))
        keep = y > 0
        ax.semilogy(t[keep], y[keep], marker=".", label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("|balance residual|")


_DRAW = {
    "dissipation_vs_nu": _draw_dissipation,
    "higher_order": _draw_higher_order,
    "tails": _draw_tails,
    "equivalence": _draw_equivalence,
    "spectrum": _draw_spectrum,
    "residuals": _draw_residuals,
}

_TITLES = {
    "dissipation_vs_nu": "Dissipation measure vs viscosity",
    "higher_order": "Viscosity-weighted higher order norm",
    "tails": "Equivalence table Phi(N)",
    "equivalence": "Dissipation against spectral tails",
    "spectrum": "Spectral snapshot",
    "residuals": "Balance residuals",
}


def render(spec: FigureSpec) -> Figure:
    """Build the figure; write it to spec.out when set.  Returns the figure."""
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6.4, 4.4))
        ax = fig.add_subplot()
        _DRAW[spec.kind](ax, spec)
        ax.set_title(spec.title or _TITLES[spec.kind])
        ax.grid(True, which="both", alpha=0.3)
        if spec.legend:
            ax.legend(loc="best")
        if spec.out is not None:
            save(fig, spec.out)
    return fig


def save(fig: Figure, out) -> None:
    from pathlib import Path
    suffix = Path(out).suffix.lower()
    if suffix == ".svg":
        meta = {"Date": None}
    elif suffix == ".pdf":
        meta = {"CreationDate": None}
    else:
        raise FigureDataError(
            f"unsupported output format {suffix!r}; use .svg or .pdf")
    with matplotlib.rc_context(_RC):
        fig.savefig(out, format=suffix[1:], metadata=meta,
                    bbox_inches="tight")
