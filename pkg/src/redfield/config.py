"""Scenario files: flat ``key = value`` text with ``#`` comments and dotted keys.

All rates are fractions of omega, so omega itself is fixed to 1 and times
are in units of 1/omega.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bath import (
    BathParameters,
    beta_from_ratio,
    load_correlation_csv,
    params_from_correlations,
    validate,
)
from .diagnostics import ALIVE_TOL, PSD_TOL, RISE_TOL
from .entanglement import FamilyParams, XState, make_family_state
from .errors import ConfigError
from .qubit import big_omega, davies_average

OMEGA = 1.0
DEFAULT_T_MAX = 200.0
SAMPLES_PER_OSCILLATION = 40

_BATH_KEYS = {
    "a", "b", "alpha", "gamma", "w", "w_over_gamma", "beta", "omega_tilde",
    "correlations", "coupling",
}
_FAMILY_KEYS = {"mu", "nu", "u", "v"}
_EXPLICIT_KEYS = {"rho11", "rho22", "rho33", "rho44", "rho14_re", "rho14_im", "rho23_re", "rho23_im"}
_KNOWN = (
    {"mode"}
    | {f"bath.{k}" for k in _BATH_KEYS}
    | {f"initial.{k}" for k in _FAMILY_KEYS | _EXPLICIT_KEYS}
    | {"grid.t_max", "grid.n_samples"}
    | {"tol.psd", "tol.rise", "tol.alive"}
    | {"divisibility.tau_max", "divisibility.n_samples"}
)


def parse_text(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _float(entries: dict, key: str, default=None) -> float | None:
    if key not in entries:
        return default
    try:
        return float(entries[key])
    except ValueError:
        raise ConfigError(f"{key}: not a number: {entries[key]!r}") from None


@dataclass
class Scenario:
    mode: str
    params: BathParameters  # as configured, before any Davies averaging
    initial: XState | None
    family: FamilyParams | None
    t_max: float
    n_samples: int
    tolerances: dict[str, float]
    tau_max: float
    n_taus: int
    base_dir: Path = field(default_factory=Path.cwd)

    @property
    def effective_params(self) -> BathParameters:
        return davies_average(self.params) if self.mode == "davies" else self.params

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_samples)

    def taus(self) -> np.ndarray:
        if self.n_taus <= 0:
            return np.zeros(0)
        return np.linspace(self.tau_max / self.n_taus, self.tau_max, self.n_taus)

    def resolved_entries(self) -> list[tuple[str, str]]:
        """Every resolved value as config lines; feeding them back reproduces the run."""
        p = self.params
        out = [("mode", self.mode)]
        for name in ("a", "b", "alpha", "gamma", "w", "beta", "omega_tilde"):
            out.append((f"bath.{name}", fmt(getattr(p, name))))
        if self.family is not None:
            for name in ("mu", "nu", "u", "v"):
                out.append((f"initial.{name}", fmt(getattr(self.family, name))))
        elif self.initial is not None:
            x = self.initial
            out += [
                ("initial.rho11", fmt(x.rho11)), ("initial.rho22", fmt(x.rho22)),
                ("initial.rho33", fmt(x.rho33)), ("initial.rho44", fmt(x.rho44)),
                ("initial.rho14_re", fmt(complex(x.rho14).real)), ("initial.rho14_im", fmt(complex(x.rho14).imag)),
                ("initial.rho23_re", fmt(complex(x.rho23).real)), ("initial.rho23_im", fmt(complex(x.rho23).imag)),
            ]
        out += [("grid.t_max", fmt(self.t_max)), ("grid.n_samples", str(self.n_samples))]
        out += [(f"tol.{k}", fmt(v)) for k, v in sorted(self.tolerances.items())]
        out += [("divisibility.tau_max", fmt(self.tau_max)), ("divisibility.n_samples", str(self.n_taus))]
        return out


def fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _resolve_bath(entries: dict, base_dir: Path) -> BathParameters:
    beta = _float(entries, "bath.beta")
    if "bath.correlations" in entries:
        for key in ("bath.a", "bath.b", "bath.alpha", "bath.gamma", "bath.w", "bath.w_over_gamma"):
            if key in entries:
                raise ConfigError(f"{key} cannot be combined with bath.correlations")
        if beta is None:
            raise ConfigError("bath.beta is required with bath.correlations")
        path = Path(entries["bath.correlations"])
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"correlation file not found: {path}")
        samples = load_correlation_csv(path, coupling=_float(entries, "bath.coupling", 1.0))
        return params_from_correlations(samples, OMEGA, beta)

    if "bath.coupling" in entries:
        raise ConfigError("bath.coupling only applies with bath.correlations")
    missing = [k for k in ("bath.a", "bath.b", "bath.alpha", "bath.gamma") if k not in entries]
    if missing:
        raise ConfigError(f"missing bath rates: {', '.join(missing)}")
    a, b, alpha, gamma = (_float(entries, f"bath.{k}") for k in ("a", "b", "alpha", "gamma"))
    w = _float(entries, "bath.w")
    ratio = _float(entries, "bath.w_over_gamma")
    if w is not None and ratio is not None:
        raise ConfigError("give at most one of bath.w and bath.w_over_gamma")
    if ratio is not None:
        w = ratio * gamma
        if beta is None:
            if not 0.0 <= ratio <= 1.0:
                raise ConfigError(f"bath.w_over_gamma must lie in [0, 1] (KMS), got {ratio}")
            beta = beta_from_ratio(ratio, OMEGA)
    elif w is not None:
        if beta is None:
            if gamma <= 0.0:
                raise ConfigError("bath.beta is required when gamma = 0")
            r = w / gamma
            if not 0.0 <= r <= 1.0:
                raise ConfigError(f"w/gamma = {r} outside [0, 1] violates the KMS relation")
            beta = beta_from_ratio(r, OMEGA)
    elif beta is not None:
        return validate(BathParameters.from_temperature(
            OMEGA, a, b, alpha, gamma, beta, omega_tilde=_float(entries, "bath.omega_tilde")
        ))
    else:
        raise ConfigError("bath needs one of bath.w, bath.w_over_gamma or bath.beta")
    params = BathParameters(
        omega=OMEGA, a=a, b=b, alpha=alpha, gamma=gamma, w=w, beta=beta,
        omega_tilde=_float(entries, "bath.omega_tilde"),
    )
    return validate(params)


def _resolve_initial(entries: dict) -> tuple[XState | None, FamilyParams | None]:
    fam = {k for k in _FAMILY_KEYS if f"initial.{k}" in entries}
    exp = {k for k in _EXPLICIT_KEYS if f"initial.{k}" in entries}
    if fam and exp:
        raise ConfigError("initial state: use either family keys (mu, nu, u, v) or explicit rho entries")
    if fam:
        if fam != _FAMILY_KEYS:
            raise ConfigError(f"initial state: missing family keys {sorted(_FAMILY_KEYS - fam)}")
        fp = FamilyParams(*(_float(entries, f"initial.{k}") for k in ("mu", "nu", "u", "v")))
        return make_family_state(fp), fp
    if exp:
        diag = ("rho11", "rho22", "rho33", "rho44")
        if not set(diag) <= exp:
            raise ConfigError("initial state: all four diagonal entries rho11..rho44 are required")
        g = lambda k: _float(entries, f"initial.{k}", 0.0)  # noqa: E731
        x = XState(
            g("rho11"), g("rho22"), g("rho33"), g("rho44"),
            complex(g("rho14_re"), g("rho14_im")), complex(g("rho23_re"), g("rho23_im")),
        )
        if abs(x.trace - 1.0) > 1e-12:
            raise ConfigError(f"initial state: trace is {x.trace}, expected 1")
        return x, None
    return None, None


def default_samples(params: BathParameters, t_max: float) -> int:
    step = math.pi / big_omega(params) / SAMPLES_PER_OSCILLATION
    return int(math.ceil(t_max / step)) + 1


def scenario_from_entries(entries: dict, base_dir: Path | None = None) -> Scenario:
    base_dir = Path.cwd() if base_dir is None else Path(base_dir)
    unknown = sorted(k for k in entries if k not in _KNOWN and not k.startswith("sweep."))
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    mode = entries.get("mode", "redfield")
    if mode not in ("redfield", "davies"):
        raise ConfigError(f"mode must be 'redfield' or 'davies', got {mode!r}")

    params = _resolve_bath(entries, base_dir)
    initial, family = _resolve_initial(entries)

    t_max = _float(entries, "grid.t_max", DEFAULT_T_MAX)
    if not t_max > 0:
        raise ConfigError(f"grid.t_max must be positive, got {t_max}")
    effective = davies_average(params) if mode == "davies" else params
    n = _float(entries, "grid.n_samples")
    n_samples = default_samples(effective, t_max) if n is None else int(n)
    if n is not None and (n != int(n) or n_samples < 2):
        raise ConfigError(f"grid.n_samples must be an integer >= 2, got {entries['grid.n_samples']}")

    tolerances = {
        "psd": _float(entries, "tol.psd", PSD_TOL),
        "rise": _float(entries, "tol.rise", RISE_TOL),
        "alive": _float(entries, "tol.alive", ALIVE_TOL),
    }
    tau_max = _float(entries, "divisibility.tau_max", t_max)
    n_taus = int(_float(entries, "divisibility.n_samples", n_samples - 1))
    return Scenario(
        mode=mode, params=params, initial=initial, family=family, t_max=t_max,
        n_samples=n_samples, tolerances=tolerances, tau_max=tau_max, n_taus=n_taus,
        base_dir=base_dir,
    )


def load_entries(path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_text(text)


def load_scenario(path) -> Scenario:
    return scenario_from_entries(load_entries(path), base_dir=Path(path).parent)


def sweep_axes(entries: dict) -> list[tuple[str, np.ndarray]]:
    """Sweep axes sorted by key; each ``sweep.<key> = start, stop, n`` is a linspace."""
    axes = []
    for key in sorted(k for k in entries if k.startswith("sweep.")):
        target = key[len("sweep."):]
        if target not in _KNOWN or target == "mode":
            raise ConfigError(f"{key}: cannot sweep over {target!r}")
        parts = [s.strip() for s in entries[key].split(",")]
        if len(parts) != 3:
            raise ConfigError(f"{key}: expected 'start, stop, n', got {entries[key]!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"{key}: expected 'start, stop, n', got {entries[key]!r}") from None
        if count < 0:
            raise ConfigError(f"{key}: point count must be nonnegative")
        axes.append((target, np.linspace(start, stop, count)))
    return axes


def sweep_points(entries: dict) -> list[dict[str, float]]:
    axes = sweep_axes(entries)
    if not axes:
        return []
    names = [name for name, _ in axes]
    return [dict(zip(names, combo)) for combo in itertools.product(*(vals for _, vals in axes))]


def tool_version() -> str:
    return __version__
