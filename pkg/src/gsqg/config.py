"""INI config files for single runs and viscosity sweeps.

Sections and keys (case sensitive, so M_cap and Ns read as written):

    [problem]  alpha, gamma
    [sweep]    nus, T, deltas, lambdas, Ns, M_cap            (sweep files)
    [run]      nu, M, dt, T, stride, advect                  (run files)
    [initial]  kind in {modes, bump, rough}, parameters, seed
    [forcing]  entries
    [output]   dir

Scalar lists are comma separated.  The two grammars whose items contain
spaces use semicolons between items:

    parameters = kmax=4, exponent=3.0, amplitude=0.15        (rough / bump)
    parameters = 1 0 0.5; 2 1 0.1+0.05j                       (modes triples)
    entries    = 1 0 constant 0.05; 2 1 sinusoid 0.1 omega=3.0 phase=0.5

Forcing profile kinds are constant, sinusoid (omega, phase) and ramp
(ramp_time); amplitudes accept complex literals like 0.1+0.05j.  Unknown
sections, unknown keys and malformed values all raise ConfigError, which
the command line maps to exit code 2.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .stepping import (ConstantProfile, ForcingSpec, RampProfile, SimParams,
                       SinusoidProfile, ZERO_FORCING)
from .sweeps import SweepConfig

__all__ = [
    "ConfigError",
    "RunSetup",
    "load_sweep_config",
    "load_run_setup",
    "parse_parameters",
    "parse_forcing",
]


class ConfigError(ValueError):
    """Raised for any malformed config file or inline parameter set."""


_KNOWN_KEYS = {
    "problem": {"alpha", "gamma"},
    "sweep": {"nus", "T", "deltas", "lambdas", "Ns", "M_cap", "family",
              "advect", "vanish_fraction", "dt_cap", "cfl_safety",
              "sample_target", "snapshot_times"},
    "run": {"nu", "M", "dt", "T", "stride", "advect"},
    "initial": {"kind", "parameters", "seed"},
    "forcing": {"entries"},
    "output": {"dir"},
}

_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _read_ini(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep M_cap, Ns, T case sensitive
    try:
        with open(path, "r") as fh:
            cp.read_file(fh, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc
    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
    return cp


def _require(cp, section: str, key: str) -> str:
    if not cp.has_option(section, key):
        raise ConfigError(f"missing required key {key!r} in [{section}]")
    return cp.get(section, key)


def _float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {text!r}") from None


def _int(text: str, where: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {text!r}") from None


def _bool(text: str, where: str) -> bool:
    try:
        return _BOOL_WORDS[text.strip().lower()]
    except KeyError:
        raise ConfigError(f"{where}: expected true/false, got {text!r}") from None


def _float_list(text: str, where: str) -> tuple:
    items = [s for s in (part.strip() for part in text.split(",")) if s]
    if not items:
        raise ConfigError(f"{where}: empty list")
    return tuple(_float(s, where) for s in items)


def _int_list(text: str, where: str) -> tuple:
    return tuple(_int(s, where) for part in text.split(",")
                 if (s := part.strip()))


def _items(text: str) -> list:
    """Split a semicolon/newline separated value into stripped items."""
    out = []
    for chunk in text.replace(";", "\n").splitlines():
        chunk = chunk.strip()
        if chunk:
            out.append(chunk)
    return out


def _complex(text: str, where: str) -> complex:
    try:
        return complex(text)
    except ValueError:
        raise ConfigError(f"{where}: expected a real or complex number, "
                          f"got {text!r}") from None


_PARAM_KEYS = {
    "bump": ({"sigma", "amplitude"}, set()),
    "rough": ({"kmax", "exponent", "amplitude"}, {"kmax", "exponent"}),
}


def parse_parameters(kind: str, text: str | None) -> dict:
    """The [initial] parameters value for the given recipe kind."""
    where = "[initial] parameters"
    if kind == "modes":
        if not text or not text.strip():
            raise ConfigError(f"{where}: modes recipe needs 'n1 n2 amplitude' items")
        modes = {}
        for item in _items(text):
            tokens = item.split()
            if len(tokens) != 3:
                raise ConfigError(f"{where}: expected 'n1 n2 amplitude', got {item!r}")
            n = (_int(tokens[0], where), _int(tokens[1], where))
            modes[n] = _complex(tokens[2], where)
        return {"modes": modes}
    if kind not in _PARAM_KEYS:
        raise ConfigError(f"[initial] kind must be modes, bump or rough, got {kind!r}")
    allowed, required = _PARAM_KEYS[kind]
    params: dict = {}
    if text and text.strip():
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in allowed:
                raise ConfigError(f"{where}: unknown entry {item!r} for kind {kind!r} "
                                  f"(allowed: {', '.join(sorted(allowed))})")
            params[key] = _float(value.strip(), where)
    missing = required - params.keys()
    if missing:
        raise ConfigError(f"{where}: kind {kind!r} needs {', '.join(sorted(missing))}")
    return params


_PROFILE_KEYS = {
    "constant": set(),
    "sinusoid": {"omega", "phase"},
    "ramp": {"ramp_time"},
}


def parse_forcing(text: str | None) -> ForcingSpec:
    """The [forcing] entries value; empty or missing means zero forcing."""
    where = "[forcing] entries"
    if not text or not text.strip():
        return ZERO_FORCING
    entries = []
    for item in _items(text):
        tokens = item.split()
        if len(tokens) < 4:
            raise ConfigError(f"{where}: expected 'n1 n2 kind amplitude ...', "
                              f"got {item!r}")
        n = (_int(tokens[0], where), _int(tokens[1], where))
        kind = tokens[2]
        if kind not in _PROFILE_KEYS:
            raise ConfigError(f"{where}: unknown profile kind {kind!r} "
                              f"(use constant, sinusoid or ramp)")
        amplitude = _complex(tokens[3], where)
        options = {}
        for tok in tokens[4:]:
            key, sep, value = tok.partition("=")
            if not sep or key not in _PROFILE_KEYS[kind]:
                raise ConfigError(f"{where}: unknown option {tok!r} for {kind!r}")
            options[key] = _float(value, where)
        if kind == "constant":
            prof = ConstantProfile(amplitude)
        elif kind == "sinusoid":
            prof = SinusoidProfile(amplitude, omega=options.get("omega", 1.0),
                                   phase=options.get("phase", 0.0))
        else:
            prof = RampProfile(amplitude, ramp_time=options.get("ramp_time", 1.0))
        entries.append((n, prof))
    try:
        return ForcingSpec(tuple(entries))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _initial_block(cp) -> tuple:
    kind = cp.get("initial", "kind", fallback="rough").strip()
    if kind not in ("modes", "bump", "rough"):
        raise ConfigError(f"[initial] kind must be modes, bump or rough, got {kind!r}")
    raw = cp.get("initial", "parameters", fallback=None)
    if raw is None and kind == "rough":
        parameters = {"kmax": 4, "exponent": 3.0}  # SweepConfig's default recipe
    else:
        parameters = parse_parameters(kind, raw)
    seed = _int(cp.get("initial", "seed", fallback="0"), "[initial] seed")
    return kind, parameters, seed


def load_sweep_config(path) -> SweepConfig:
    """Build a SweepConfig from an INI file; raises ConfigError."""
    cp = _read_ini(path)
    for section in ("problem", "sweep"):
        if not cp.has_section(section):
            raise ConfigError(f"missing section [{section}]")
    kind, parameters, seed = _initial_block(cp)
    kwargs = dict(
        alpha=_float(_require(cp, "problem", "alpha"), "[problem] alpha"),
        gamma=_float(_require(cp, "problem", "gamma"), "[problem] gamma"),
        nus=_float_list(_require(cp, "sweep", "nus"), "[sweep] nus"),
        T=_float(_require(cp, "sweep", "T"), "[sweep] T"),
        initial_kind=kind,
        initial_parameters=parameters,
        seed=seed,
        forcing=parse_forcing(cp.get("forcing", "entries", fallback=None)),
        out_dir=cp.get("output", "dir", fallback=None),
    )
    optional = {
        "deltas": ("deltas", _float_list),
        "lambdas": ("lambdas", _float_list),
        "Ns": ("Ns", _int_list),
        "M_cap": ("M_cap", _int),
        "family": ("family", lambda s, w: s.strip()),
        "advect": ("advect", _bool),
        "vanish_fraction": ("vanish_fraction", _float),
        "dt_cap": ("dt_cap", _float),
        "cfl_safety": ("cfl_safety", _float),
        "sample_target": ("sample_target", _int),
        "snapshot_times": ("snapshot_times", _int),
    }
    for field_name, (key, conv) in optional.items():
        if cp.has_option("sweep", key):
            kwargs[field_name] = conv(cp.get("sweep", key), f"[sweep] {key}")
    try:
        return SweepConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class RunSetup:
    """Everything a single trajectory run needs, resolved from config."""

    params: SimParams
    initial_kind: str
    initial_parameters: dict
    seed: int
    forcing: ForcingSpec
    out_dir: str | None
    stride: int = 1


def load_run_setup(path) -> RunSetup:
    """Build a RunSetup from an INI file with a [run] section."""
    cp = _read_ini(path)
    for section in ("problem", "run"):
        if not cp.has_section(section):
            raise ConfigError(f"missing section [{section}]")
    kind, parameters, seed = _initial_block(cp)
    try:
        params = SimParams(
            alpha=_float(_require(cp, "problem", "alpha"), "[problem] alpha"),
            gamma=_float(_require(cp, "problem", "gamma"), "[problem] gamma"),
            nu=_float(_require(cp, "run", "nu"), "[run] nu"),
            M=_int(_require(cp, "run", "M"), "[run] M"),
            dt=_float(_require(cp, "run", "dt"), "[run] dt"),
            t_end=_float(_require(cp, "run", "T"), "[run] T"),
            advect=_bool(cp.get("run", "advect", fallback="true"), "[run] advect"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    stride = _int(cp.get("run", "stride", fallback="1"), "[run] stride")
    if stride < 1:
        raise ConfigError("[run] stride must be >= 1")
    return RunSetup(
        params=params,
        initial_kind=kind,
        initial_parameters=parameters,
        seed=seed,
        forcing=parse_forcing(cp.get("forcing", "entries", fallback=None)),
        out_dir=cp.get("output", "dir", fallback=None),
        stride=stride,
    )
