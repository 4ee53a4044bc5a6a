"""Bath parameters of the single-qubit Redfield generator.

Rates enter the Bloch-vector generator as

    a, alpha, gamma   dissipative rates (nonnegative)
    b, w              off-diagonal / inhomogeneous rates
    omega_tilde       Lamb-shifted half gap

and are linked to the 3x3 Kossakowski matrix with only the (1,2) block and
the (3,3) entry nonzero.  A thermal bath additionally ties ``w/gamma`` to
``tanh(beta * omega)``.
"""
from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BathParameterError,
    KMSViolationError,
    NonnegativityError,
    StrongCouplingError,
    TruncationError,
)
from .numerics import hermitian_eig

KMS_TOL = 1e-10
DECAY_TOL = 1e-8
CSV_COLUMNS = ("s", "re_g11", "im_g11", "re_g22", "im_g22", "re_g33", "im_g33")


@dataclass(frozen=True)
class BathParameters:
    """Physical parameter set of the qubit generator.

    All rates and ``omega`` share one frequency unit; ``beta`` is in the
    inverse unit and may be ``math.inf``.  ``omega_tilde`` defaults to
    ``omega`` (Lamb shift absorbed).
    """

    omega: float
    a: float
    b: float
    alpha: float
    gamma: float
    w: float
    beta: float
    omega_tilde: float | None = None

    def __post_init__(self):
        if self.omega_tilde is None:
            object.__setattr__(self, "omega_tilde", self.omega)
        for name in ("omega", "a", "b", "alpha", "gamma", "w", "beta", "omega_tilde"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_kms_ratio(cls, omega, a, b, alpha, gamma, w_over_gamma, omega_tilde=None):
        """Build from ``w/gamma``; beta follows from inverting the KMS relation."""
        if not 0.0 <= w_over_gamma <= 1.0:
            raise KMSViolationError(f"w/gamma must lie in [0, 1], got {w_over_gamma}")
        return cls(
            omega=omega,
            a=a,
            b=b,
            alpha=alpha,
            gamma=gamma,
            w=w_over_gamma * gamma,
            beta=beta_from_ratio(w_over_gamma, omega),
            omega_tilde=omega_tilde,
        )

    @classmethod
    def from_temperature(cls, omega, a, b, alpha, gamma, beta, omega_tilde=None):
        """Build from beta; w is fixed by ``w = gamma * tanh(beta * omega)``."""
        return cls(
            omega=omega,
            a=a,
            b=b,
            alpha=alpha,
            gamma=gamma,
            w=gamma * kms_ratio(beta, omega),
            beta=beta,
            omega_tilde=omega_tilde,
        )

    def scaled(self, factor: float) -> "BathParameters":
        """All rates and frequencies multiplied by ``factor``; beta divided by it."""
        return dataclasses.replace(
            self,
            omega=self.omega * factor,
            omega_tilde=self.omega_tilde * factor,
            a=self.a * factor,
            b=self.b * factor,
            alpha=self.alpha * factor,
            gamma=self.gamma * factor,
            w=self.w * factor,
            beta=self.beta / factor,
        )

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def kms_ratio(beta: float, omega: float) -> float:
    """(1 - e^{-2 beta omega}) / (1 + e^{-2 beta omega}), i.e. tanh(beta omega)."""
    if math.isinf(beta):
        return 1.0 if omega > 0 else 0.0
    return math.tanh(beta * omega)


def beta_from_ratio(w_over_gamma: float, omega: float) -> float:
    if w_over_gamma >= 1.0:
        return math.inf
    if omega == 0.0:
        if w_over_gamma != 0.0:
            raise KMSViolationError("with omega = 0 the KMS relation forces w = 0")
        return 0.0
    return math.atanh(w_over_gamma) / omega


def omega_squared(params: BathParameters) -> float:
    p = params
    return 4.0 * p.omega_tilde**2 - 4.0 * p.b**2 - (p.a - p.alpha) ** 2


def validate(params: BathParameters) -> BathParameters:
    """Return ``params`` unchanged if it is a physically admissible set, else raise."""
    p = params
    values = (p.omega, p.omega_tilde, p.a, p.b, p.alpha, p.gamma, p.w, p.beta)
    if any(math.isnan(x) for x in values):
        raise BathParameterError("parameters contain NaN")
    for name in ("a", "alpha", "gamma"):
        if getattr(p, name) < 0.0:
            raise NonnegativityError(f"rate {name} = {getattr(p, name)} is negative")
    if p.omega < 0.0:
        raise NonnegativityError(f"omega = {p.omega} is negative; inverted gaps are not supported")
    if p.beta < 0.0:
        raise NonnegativityError(f"inverse temperature beta = {p.beta} is negative")

    expected = kms_ratio(p.beta, p.omega)
    # absolute slack on the rate scale, so gamma far below the other rates
    # (and the rounding it carries) does not trip the check
    rate_scale = max(p.a, p.alpha, p.gamma, abs(p.b))
    if p.gamma > 0.0:
        if abs(p.w - expected * p.gamma) > KMS_TOL * rate_scale:
            raise KMSViolationError(
                f"KMS relation violated: w/gamma = {p.w / p.gamma:.12g} "
                f"but tanh(beta*omega) = {expected:.12g}"
            )
    elif abs(p.w) > KMS_TOL * max(p.omega, 1.0):
        raise KMSViolationError(f"gamma = 0 requires w = 0 (KMS), got w = {p.w}")

    if not omega_squared(p) > 0.0:
        raise StrongCouplingError(
            f"Omega^2 = 4*omega_tilde^2 - 4*b^2 - (a-alpha)^2 = {omega_squared(p):.6g} is not positive"
        )
    return params


def kossakowski_from_params(params: BathParameters) -> np.ndarray:
    p = params
    c = np.zeros((3, 3), dtype=complex)
    c[0, 0] = (p.alpha + p.gamma - p.a) / 2.0
    c[1, 1] = (p.a + p.gamma - p.alpha) / 2.0
    c[2, 2] = (p.a + p.alpha - p.gamma) / 2.0
    c[0, 1] = complex(-p.b, -p.w / 2.0)
    c[1, 0] = c[0, 1].conjugate()
    return c


def check_kossakowski(c, tol: float = 1e-14) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.shape != (3, 3):
        raise BathParameterError(f"Kossakowski matrix must be 3x3, got {c.shape}")
    scale = max(np.max(np.abs(c)), 1e-300)
    if np.max(np.abs(c - c.conj().T)) > tol * scale:
        raise BathParameterError("Kossakowski matrix is not Hermitian")
    for i, j in ((0, 2), (1, 2), (2, 0), (2, 1)):
        if abs(c[i, j]) > tol * scale:
            raise BathParameterError(f"Kossakowski entry ({i + 1},{j + 1}) must vanish")
    return c


def params_from_kossakowski(c, omega_tilde: float, beta: float, omega: float | None = None) -> BathParameters:
    """Read the generator rates off a Kossakowski matrix and validate them.

    ``omega`` (bare half gap, used by the KMS check) defaults to ``omega_tilde``.
    """
    c = check_kossakowski(c)
    params = BathParameters(
        omega=omega_tilde if omega is None else omega,
        omega_tilde=omega_tilde,
        a=(c[1, 1] + c[2, 2]).real,
        b=-c[0, 1].real,
        alpha=(c[0, 0] + c[2, 2]).real,
        gamma=(c[0, 0] + c[1, 1]).real,
        w=-2.0 * c[0, 1].imag,
        beta=beta,
    )
    return validate(params)


def kossakowski_min_eigenvalue(c) -> float:
    """Smallest eigenvalue of a block-sparse Kossakowski matrix.

    Redfield generators typically give a negative value here; a nonnegative
    one means the semigroup is completely positive.
    """
    c = check_kossakowski(c)
    block = hermitian_eig(c[:2, :2]).values
    return float(min(block[0], c[2, 2].real))


@dataclass(frozen=True)
class CorrelationSamples:
    """Bath two-point functions G_ii(s) on a uniform grid starting at s = 0."""

    s: np.ndarray
    g11: np.ndarray
    g22: np.ndarray
    g33: np.ndarray
    coupling: float = 1.0

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        arrays = [np.asarray(getattr(self, k), dtype=complex) for k in ("g11", "g22", "g33")]
        if s.ndim != 1 or s.size < 3:
            raise BathParameterError("correlation grid needs at least 3 points")
        if any(g.shape != s.shape for g in arrays):
            raise BathParameterError("correlation samples must match the grid length")
        if s[0] != 0.0:
            raise BathParameterError("correlation grid must start at s = 0")
        steps = np.diff(s)
        if np.any(steps <= 0):
            raise BathParameterError("correlation grid must be strictly increasing")
        if np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
            raise BathParameterError("correlation grid must be uniformly spaced")
        object.__setattr__(self, "s", s)
        for k, g in zip(("g11", "g22", "g33"), arrays):
            object.__setattr__(self, k, g)

    @property
    def step(self) -> float:
        return float(self.s[1] - self.s[0])


def load_correlation_csv(path, coupling: float = 1.0) -> CorrelationSamples:
    """Read ``s, re_g11, im_g11, re_g22, im_g22, re_g33, im_g33`` (header required)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if tuple(header) != CSV_COLUMNS:
            raise BathParameterError(f"{path}: expected header {', '.join(CSV_COLUMNS)}, got {header}")
        rows = [[float(x) for x in row] for row in reader if row and any(x.strip() for x in row)]
    data = np.array(rows, dtype=float).reshape(-1, len(CSV_COLUMNS))
    return CorrelationSamples(
        s=data[:, 0],
        g11=data[:, 1] + 1j * data[:, 2],
        g22=data[:, 3] + 1j * data[:, 4],
        g33=data[:, 5] + 1j * data[:, 6],
        coupling=coupling,
    )


def _trapezoid(f: np.ndarray, h: float):
    return h * (np.sum(f) - 0.5 * (f[0] + f[-1]))


def kossakowski_from_correlations(samples: CorrelationSamples, omega: float):
    """Kossakowski matrix and Lamb shift from sampled bath correlations.

    Negative-time values come from G(-s) = conj(G(s)), which folds every
    integral over the real line onto [0, s_max].  Returns ``(C, delta_omega)``;
    the renormalized frequency is ``omega + coupling**2 / 2 * delta_omega``.
    """
    peak = max(np.max(np.abs(g)) for g in (samples.g11, samples.g22, samples.g33))
    tail = max(abs(g[-1]) for g in (samples.g11, samples.g22, samples.g33))
    if peak > 0.0 and tail > DECAY_TOL * peak:
        raise TruncationError(
            f"correlations have not decayed at s = {samples.s[-1]}: |G| = {tail:.3e} "
            f"> {DECAY_TOL:g} * max|G|"
        )

    h = samples.step
    lam2 = samples.coupling**2
    cos2 = np.cos(2.0 * omega * samples.s)
    sin2 = np.sin(2.0 * omega * samples.s)
    g11, g22, g33 = samples.g11, samples.g22, samples.g33

    c = np.zeros((3, 3), dtype=complex)
    c[0, 0] = 2.0 * lam2 * _trapezoid(cos2 * g11.real, h)
    c[1, 1] = 2.0 * lam2 * _trapezoid(cos2 * g22.real, h)
    c[2, 2] = 2.0 * lam2 * _trapezoid(g33.real, h)
    c[0, 1] = lam2 * _trapezoid(sin2 * (g22 - g11.conj()), h)
    c[1, 0] = c[0, 1].conjugate()
    delta_omega = float(2.0 * _trapezoid(sin2 * (g11.real + g22.real), h))
    return c, delta_omega


def renormalized_frequency(omega: float, delta_omega: float, coupling: float) -> float:
    return omega + 0.5 * coupling**2 * delta_omega


def params_from_correlations(samples: CorrelationSamples, omega: float, beta: float) -> BathParameters:
    c, delta = kossakowski_from_correlations(samples, omega)
    return params_from_kossakowski(
        c,
        omega_tilde=renormalized_frequency(omega, delta, samples.coupling),
        beta=beta,
        omega=omega,
    )
