"""Command line front end: single runs, sweeps, scenario presets,
self-test, and snapshot export.

Exit codes: 0 success, 2 config or usage error, 3 numerical abort
(blow-up or CFL violation), the latter with a machine readable abort
record on stdout and in <out>/abort.json.

All randomness is seeded from the config, never from the clock, so
re-running a command with identical inputs rewrites every output file
byte for byte; the single exception is the ISO-8601 "generated" stamp
in the report JSON header.  GSQG_THREADS caps the per-viscosity worker
pool used by sweep and scenario.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import tempfile
import time
from contextlib import nullcontext
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from .config import (ConfigError, RunSetup, load_run_setup,
                     load_sweep_config, parse_forcing, parse_parameters)
from .diagnostics import COLUMNS, trapezoid_cumulative
from .initial import from_recipe, rough_datum
from .nonlinear import (DEFAULT_DEALIAS, ProbeFunction, cancellation_residuals,
                        fault_injection, nonlinear_term)
from .nonlinear import weak_form_identity_gap
from .spectral import (SnapshotMeta, SpectralField, from_physical,
                       load_snapshot, project_high, project_low,
                       save_snapshot, sobolev_norm, to_physical)
from .stepping import (BlowupError, CflViolation, ExpProfile, ForcingSpec,
                       SimParams, ZERO_FORCING, dissipation_factor, run)
from .sweeps import (SCENARIO_NAMES, TailRecorder, counterexample_experiment,
                     run_scenario, run_sweep, write_report)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3


# ---------------------------------------------------------------------------
# run


_RUN_PRESETS = {
    # theta0 decays mode by mode as exp(-nu |n|^{2 gamma} t); selftest holds
    # the closed form against the integrator output
    "pure-dissipation": dict(
        alpha=0.5, gamma=1.0, nu=0.1, M=32, dt=0.05, T=1.0, advect=False,
        init=("modes", {"modes": {(1, 0): 0.4, (2, 1): 0.15 + 0.1j,
                                  (0, 3): 0.05j}})),
    # exact solution with analytically cancelled transport, see
    # manufactured_setup
    "manufactured-solution": dict(
        alpha=0.5, gamma=1.0, nu=0.1, M=64, dt=0.025, T=1.0, advect=True),
}


def manufactured_setup(alpha: float, gamma: float, nu: float, M: int,
                       amplitude: float = 0.1):
    """theta*(x, t) = a e^{-t} cos(x1) with the forcing that makes it exact.

    The velocity of a single (1,0) mode is parallel to its level lines, so
    u* . grad theta* = 0 for every alpha, and (-Delta)^gamma acts as the
    identity on |n| = 1.  That leaves f = a (nu - 1) e^{-t} cos(x1); the
    only discretization error in a run is the RK4 time quadrature.  The
    default a keeps the advective CFL bound clear of the dt grid used by
    the order study.
    """
    half = 0.5 * amplitude
    theta0 = SpectralField.from_modes(M, {(1, 0): half})
    forcing = ForcingSpec((((1, 0), ExpProfile(half * (nu - 1.0), rate=-1.0)),))

    def exact(t: float) -> np.ndarray:
        c = np.zeros((M, M), dtype=np.complex128)
        c[1, 0] = half * math.exp(-t)
        c[-1 % M, 0] = half * math.exp(-t)
        return c

    return theta0, forcing, exact


def manufactured_errors(M: int = 64, dt: float = 0.025, T: float = 1.0,
                        alpha: float = 0.5, gamma: float = 1.0,
                        nu: float = 0.1) -> tuple[float, float, float]:
    """(max L2 error vs exact, max |res_ham|, max |res_l2|) over samples."""
    theta0, forcing, exact = manufactured_setup(alpha, gamma, nu, M)
    errs = []

    def watch(st):
        d = st.field.coeffs - exact(st.t)
        errs.append(float(np.sqrt(np.sum(d.real ** 2 + d.imag ** 2))))

    params = SimParams(alpha=alpha, gamma=gamma, nu=nu, M=M, dt=dt, t_end=T)
    series = run(theta0, params, forcing, observers=(watch,))
    return (max(errs),
            float(np.max(np.abs(series.res_ham))),
            float(np.max(np.abs(series.res_l2))))


def _flags_given(args, names) -> list:
    return [n for n in names if getattr(args, n.lstrip("-").replace("-", "_")) not in (None, [])]


def _resolve_run(args) -> tuple[RunSetup, str | None]:
    physics = ("--alpha", "--gamma", "--nu", "--M", "--dt", "--T")
    datum = ("--init", "--params", "--seed", "--force")
    if args.config is not None:
        clash = _flags_given(args, physics + datum + ("--preset",))
        if clash:
            raise ConfigError(f"--config excludes {', '.join(clash)}")
        setup = load_run_setup(args.config)
        if args.no_advect:
            setup = dataclasses.replace(
                setup, params=dataclasses.replace(setup.params, advect=False))
        return setup, None
    if args.preset is not None:
        clash = _flags_given(args, ("--alpha", "--gamma") + datum)
        if clash:
            raise ConfigError(f"--preset fixes {', '.join(clash)}; "
                              "only --nu --M --dt --T may override")
        spec = dict(_RUN_PRESETS[args.preset])
        for key in ("nu", "dt", "T"):
            v = getattr(args, key)
            if v is not None:
                spec[key] = v
        if args.M is not None:
            spec["M"] = args.M
        kind, parameters = spec.get("init", ("modes", None))
        M = int(spec["M"])
        if args.preset == "manufactured-solution":
            kind, parameters = "modes", {"modes": {(1, 0): 0.05}}
        params = SimParams(alpha=spec["alpha"], gamma=spec["gamma"],
                           nu=spec["nu"], M=M, dt=spec["dt"],
                           t_end=spec["T"], advect=spec["advect"])
        return RunSetup(params=params, initial_kind=kind,
                        initial_parameters=parameters, seed=0,
                        forcing=ZERO_FORCING, out_dir=None,
                        stride=args.stride or 1), args.preset
    missing = [f for f in physics
               if getattr(args, f.lstrip("-")) is None]
    if missing:
        raise ConfigError(f"run needs --config, --preset, or all of "
                          f"{' '.join(physics)} (missing {', '.join(missing)})")
    kind = args.init or "rough"
    if args.params is not None:
        parameters = parse_parameters(kind, args.params)
    elif kind == "rough":
        parameters = {"kmax": 4, "exponent": 3.0, "amplitude": 0.1}
    else:
        parameters = parse_parameters(kind, None)
    try:
        params = SimParams(alpha=args.alpha, gamma=args.gamma, nu=args.nu,
                           M=args.M, dt=args.dt, t_end=args.T,
                           advect=not args.no_advect)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    forcing = parse_forcing("; ".join(args.force)) if args.force else ZERO_FORCING
    return RunSetup(params=params, initial_kind=kind,
                    initial_parameters=parameters, seed=args.seed or 0,
                    forcing=forcing, out_dir=None,
                    stride=args.stride or 1), None


def _abort_record(exc) -> dict:
    if isinstance(exc, BlowupError):
        return {"abort": "blowup", "t": exc.t, "amplitude": exc.amplitude,
                "message": str(exc)}
    return {"abort": "cfl", "t": exc.t, "dt": exc.dt, "dt_max": exc.dt_max,
            "message": str(exc)}


def _cmd_run(args) -> int:
    setup, preset = _resolve_run(args)
    out = Path(args.out or setup.out_dir or "gsqg_out")
    out.mkdir(parents=True, exist_ok=True)
    p = setup.params
    theta0 = from_recipe(setup.initial_kind, setup.initial_parameters,
                         p.M, setup.seed)
    forcing = setup.forcing
    exact = None
    if preset == "manufactured-solution":
        theta0, forcing, exact = manufactured_setup(p.alpha, p.gamma, p.nu, p.M)
    series_path = out / "series.csv"
    snap_path = out / "final.snap"

    if p.t_end == 0.0:
        # empty horizon still yields a well formed series file
        with open(series_path, "w") as fh:
            fh.write(",".join(COLUMNS) + "\n")
        save_snapshot(snap_path, theta0,
                      SnapshotMeta(p.M, p.alpha, p.gamma, p.nu, 0.0))
        print(f"wrote {series_path} (0 samples)")
        print(f"wrote {snap_path}")
        return EXIT_OK

    holder: dict = {}
    errs: list = []

    def watch(st):
        holder["state"] = st
        if exact is not None:
            d = st.field.coeffs - exact(st.t)
            errs.append(float(np.sqrt(np.sum(d.real ** 2 + d.imag ** 2))))

    try:
        series = run(theta0, p, forcing, sample_stride=setup.stride,
                     observers=(watch,))
    except (BlowupError, CflViolation) as exc:
        record = _abort_record(exc)
        with open(out / "abort.json", "w") as fh:
            json.dump(record, fh, sort_keys=True, indent=2)
            fh.write("\n")
        print(json.dumps(record, sort_keys=True))
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT

    series.to_csv(series_path)
    st = holder["state"]
    save_snapshot(snap_path, st.field,
                  SnapshotMeta(p.M, p.alpha, p.gamma, p.nu, st.t))
    print(f"wrote {series_path} ({len(series)} samples)")
    print(f"wrote {snap_path}")
    if preset == "manufactured-solution":
        print(f"max_error = {max(errs)!r}")
    elif preset == "pure-dissipation":
        expected = theta0.coeffs * dissipation_factor(p, dt=p.t_end)
        mask = np.abs(theta0.coeffs) > 0
        rel = float(np.max(np.abs(st.field.coeffs[mask] - expected[mask])
                           / np.abs(expected[mask])))
        print(f"max_mode_error = {rel!r}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep and scenario


def _print_checks(checks: dict) -> None:
    for key in sorted(checks):
        value = checks[key]
        if isinstance(value, dict) and "verdict" in value:
            print(f"  {key}: {value['verdict']}")
        else:
            print(f"  {key}: {json.dumps(value, sort_keys=True)}")


def _emit_report(report: dict, out_dir: str | None) -> None:
    if out_dir is not None:
        path = Path(out_dir) / "report.json"
        write_report(report, path)
        print(f"wrote {path}")
    else:
        json.dump(report, sys.stdout, sort_keys=True, indent=2)
        sys.stdout.write("\n")


def _cmd_sweep(args) -> int:
    cfg = load_sweep_config(args.config)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    if cfg.family == "self-similar":
        report = counterexample_experiment(cfg)
    else:
        report = run_sweep(cfg)
    for entry in report["per_nu"]:
        print(f"nu={entry['nu']:g}  M={entry['M']}  D={entry['D']:.6g}"
              + (f"  flags={entry['flags']}" if entry["flags"] else ""))
    if "checks" in report:
        _print_checks(report["checks"])
    _emit_report(report, cfg.out_dir)
    return EXIT_OK


def _cmd_scenario(args) -> int:
    if args.name not in SCENARIO_NAMES:
        raise ConfigError(f"unknown scenario {args.name!r}; "
                          f"choose from {', '.join(SCENARIO_NAMES)}")
    report = run_scenario(args.name, out_dir=args.out)
    print(f"scenario {args.name}: {len(report['per_nu'])} viscosities")
    _print_checks(report.get("checks", {}))
    if args.out is None:
        json.dump(report, sys.stdout, sort_keys=True, indent=2)
        sys.stdout.write("\n")
    else:
        print(f"wrote {Path(args.out) / 'report.json'}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest


def _ck_roundtrip():
    f = rough_datum(64, kmax=20, exponent=1.0, amplitude=1.0, seed=11)
    err = float(np.max(np.abs(from_physical(to_physical(f)).coeffs - f.coeffs)))
    return err <= 1e-12, f"max coeff error {err:.2e} (tol 1e-12)"


def _ck_plancherel():
    f = rough_datum(64, kmax=18, exponent=1.0, amplitude=1.0, seed=12)
    g = to_physical(f)
    rhs = float(np.sum(np.abs(f.coeffs) ** 2))
    err = abs(float(np.mean(g * g)) - rhs) / rhs
    return err <= 1e-12, f"grid mean vs mode sum {err:.2e} (tol 1e-12)"


def _ck_pythagoras():
    f = rough_datum(48, kmax=16, exponent=1.0, amplitude=1.0, seed=13)
    whole = sobolev_norm(f, -0.5) ** 2
    parts = (sobolev_norm(project_low(f, 7.5), -0.5) ** 2
             + sobolev_norm(project_high(f, 7.5), -0.5) ** 2)
    err = abs(whole - parts) / whole
    return err <= 1e-12, f"projection split {err:.2e} (tol 1e-12)"


_CANCEL_FIELD = dict(kmax=14, exponent=1.2, amplitude=1.0, seed=3)


def _ck_cancellation(index: int):
    worst = 0.0
    theta = rough_datum(48, **_CANCEL_FIELD)
    for alpha in (0.25, 0.5, 0.75, 1.0):
        worst = max(worst, cancellation_residuals(theta, alpha)[index])
    return worst <= 1e-10, f"worst residual {worst:.2e} (tol 1e-10)"


def _ck_weak_form():
    theta = rough_datum(32, kmax=8, exponent=1.0, amplitude=1.0, seed=5)
    phi = ProbeFunction(rough_datum(32, kmax=6, exponent=2.0, amplitude=1.0,
                                    seed=6).coeffs)
    worst = max(weak_form_identity_gap(theta, phi, alpha)
                for alpha in (0.25, 0.5, 0.75, 1.0))
    return worst <= 1e-8, f"worst relative gap {worst:.2e} (tol 1e-8)"


def _ck_dealias_band():
    theta = rough_datum(32, kmax=10, exponent=1.0, amplitude=1.0, seed=15)
    n = nonlinear_term(theta, 0.5)
    outside = float(np.max(np.abs(n.coeffs[~DEFAULT_DEALIAS.mask(32)])))
    return outside == 0.0, f"energy beyond cutoff {outside:.2e} (want exact 0)"


def _ck_pure_dissipation():
    modes = {(1, 0): 0.4, (2, 1): 0.15 + 0.1j, (0, 3): 0.05j}
    theta0 = SpectralField.from_modes(32, modes)
    mask = np.abs(theta0.coeffs) > 0
    worst = 0.0
    for gamma in (0.5, 1.0):
        for nu in (1e-1, 1e-3):
            p = SimParams(alpha=0.5, gamma=gamma, nu=nu, M=32, dt=0.125,
                          t_end=0.5, advect=False)
            holder = {}
            run(theta0, p, observers=(lambda st: holder.update(f=st.field),))
            expected = theta0.coeffs * dissipation_factor(p, dt=0.5)
            rel = float(np.max(np.abs(holder["f"].coeffs[mask] - expected[mask])
                               / np.abs(expected[mask])))
            worst = max(worst, rel)
    return worst <= 1e-10, f"worst mode error {worst:.2e} (tol 1e-10)"


def _ck_manufactured_order():
    coarse = manufactured_errors(M=32, dt=0.1, T=1.0)
    fine = manufactured_errors(M=32, dt=0.05, T=1.0)
    ratio = coarse[0] / fine[0]
    return 10.0 <= ratio <= 24.0, f"error ratio under dt halving {ratio:.1f} (want ~16)"


def _ck_balance_order():
    coarse = manufactured_errors(M=32, dt=0.1, T=1.0)
    fine = manufactured_errors(M=32, dt=0.05, T=1.0)
    ratio = coarse[1] / fine[1]
    return 10.0 <= ratio <= 24.0, f"residual ratio under dt halving {ratio:.1f} (want ~16)"


def _ck_trapezoid():
    rng = np.random.default_rng(7)
    t = np.linspace(0.0, 1.0, 11)
    y = rng.uniform(0.5, 1.5, 11)
    cum = trapezoid_cumulative(t, y)
    worst = max(abs(cum[k] - float(np.trapezoid(y[:k + 1], t[:k + 1])))
                for k in range(11))
    return worst <= 1e-14, f"prefix sum mismatch {worst:.2e} (tol 1e-14)"


def _ck_snapshot():
    f = rough_datum(32, kmax=10, exponent=1.5, amplitude=0.7, seed=9)
    meta = SnapshotMeta(32, 0.5, 1.0, 0.01, 0.25)
    with tempfile.TemporaryDirectory() as td:
        binary = Path(td) / "a.snap"
        mirror = Path(td) / "a.csv"
        save_snapshot(binary, f, meta)
        save_snapshot(mirror, f, meta, fmt="csv")
        g, mg = load_snapshot(binary)
        h, mh = load_snapshot(mirror)
        first = binary.read_bytes()
        save_snapshot(binary, f, meta)
        stable = binary.read_bytes() == first
    ok = (np.array_equal(g.coeffs, f.coeffs) and mg == meta
          and np.array_equal(h.coeffs, f.coeffs) and mh == meta and stable)
    return ok, "binary and csv mirrors roundtrip exactly" if ok else "roundtrip drifted"


def _ck_tail_recorder():
    c1, c2 = 0.3, 0.2j
    f = SpectralField.from_modes(32, {(1, 0): c1, (3, 2): c2})
    rec = TailRecorder(0.5, (2.0,), 32)
    rec(SimpleNamespace(field=f, t=0.0))
    expected = 2.0 * abs(c2) ** 2 * 13.0 ** -0.5  # only |n|^2 = 13 survives
    err = abs(rec.values[2.0][0] - expected) / expected
    return err <= 1e-12, f"two-mode closed form {err:.2e} (tol 1e-12)"


_SELFTEST = (
    ("fft roundtrip", _ck_roundtrip),
    ("plancherel identity", _ck_plancherel),
    ("projection pythagoras", _ck_pythagoras),
    ("hamiltonian cancellation", lambda: _ck_cancellation(0)),
    ("divergence cancellation", lambda: _ck_cancellation(1)),
    ("weak form identity", _ck_weak_form),
    ("dealias band limit", _ck_dealias_band),
    ("pure dissipation exactness", _ck_pure_dissipation),
    ("manufactured solution order", _ck_manufactured_order),
    ("balance residual order", _ck_balance_order),
    ("trapezoid prefix sums", _ck_trapezoid),
    ("snapshot roundtrip", _ck_snapshot),
    ("tail recorder closed form", _ck_tail_recorder),
)


def _cmd_selftest(args) -> int:
    shift = args.corrupt_multiplier
    ctx = fault_injection(shift) if shift else nullcontext()
    started = time.perf_counter()
    failed = 0
    with ctx:
        for name, fn in _SELFTEST:
            try:
                ok, detail = fn()
            except Exception as exc:  # a crashed check is a failed check
                ok, detail = False, f"raised {type(exc).__name__}: {exc}"
            print(f"{'ok  ' if ok else 'FAIL'} {name:<30} {detail}")
            failed += 0 if ok else 1
    elapsed = time.perf_counter() - started
    print(f"{len(_SELFTEST) - failed} passed, {failed} failed in {elapsed:.1f}s")
    return EXIT_OK if failed == 0 else 1


# ---------------------------------------------------------------------------
# export


def _cmd_export(args) -> int:
    try:
        f, meta = load_snapshot(args.src)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read snapshot {args.src}: {exc}") from exc
    fmt = args.to
    if fmt == "auto":
        fmt = "csv" if str(args.dst).endswith(".csv") else "binary"
    save_snapshot(args.dst, f, meta, fmt=fmt)
    print(f"wrote {args.dst} ({fmt}, M={meta.M}, t={meta.t:g})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsqg",
        description="Dissipative generalized SQG solver on the 2-torus.",
        epilog="GSQG_THREADS caps sweep parallelism; outputs are "
               "deterministic given the config.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a single trajectory")
    p_run.add_argument("--config", help="INI file with [problem]/[run] sections")
    p_run.add_argument("--preset", choices=sorted(_RUN_PRESETS))
    p_run.add_argument("--alpha", type=float)
    p_run.add_argument("--gamma", type=float)
    p_run.add_argument("--nu", type=float)
    p_run.add_argument("--M", type=int)
    p_run.add_argument("--dt", type=float)
    p_run.add_argument("--T", type=float)
    p_run.add_argument("--init", choices=("modes", "bump", "rough"))
    p_run.add_argument("--params", help="recipe parameters, config grammar")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--force", action="append", default=[],
                       metavar="ENTRY", help="forcing entry, repeatable")
    p_run.add_argument("--no-advect", action="store_true",
                       help="integrate the bare fractional heat flow")
    p_run.add_argument("--stride", type=int, help="sample every N steps")
    p_run.add_argument("--out", help="output directory (default gsqg_out)")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="viscosity sweep from a config file")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", help="override [output] dir")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_scen = sub.add_parser("scenario", help="run a bundled sweep preset")
    p_scen.add_argument("name", metavar="NAME",
                        help=f"one of: {', '.join(SCENARIO_NAMES)}")
    p_scen.add_argument("--out", help="output directory")
    p_scen.set_defaults(func=_cmd_scenario)

    p_self = sub.add_parser("selftest", help="run the oracle suites")
    p_self.add_argument("--corrupt-multiplier", type=float, default=0.0,
                        metavar="SHIFT",
                        help="fault injection: corrupt the velocity "
                             "multiplier exponent by SHIFT")
    p_self.set_defaults(func=_cmd_selftest)

    p_exp = sub.add_parser("export", help="convert a snapshot binary <-> csv")
    p_exp.add_argument("src")
    p_exp.add_argument("dst")
    p_exp.add_argument("--to", choices=("auto", "binary", "csv"),
                       default="auto")
    p_exp.set_defaults(func=_cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowupError, CflViolation) as exc:
        # aborts escaping a subcommand that has no output dir of its own
        print(json.dumps(_abort_record(exc), sort_keys=True))
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
