"""Two-qubit X-states evolving under ``id (x) gamma_t``.

The first tensor factor is the inert ancilla, the second the qubit coupled to
the bath.  Basis ordering is |00>, |01>, |10>, |11> with sigma_z|0> = |0>.
Only the six independent X-state entries are ever manipulated, so X-shape
closure holds by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import BathParameters
from .errors import FamilyConstraintError, PositivityError, WrongRegimeError
from .numerics import PSD_REJECT, hermitian_eig, kron, partial_trace, relative_entropy
from .qubit import BlochState, propagator_at

PHYSICAL_TOL = 1e-12
FULL_SUPPORT = 1e-12

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class XState:
    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex = 0j
    rho23: complex = 0j

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho22 + self.rho33 + self.rho44

    @property
    def physical(self) -> bool:
        m1, m2, dmin = positivity_minors(self)
        return min(m1, m2, dmin) >= -PHYSICAL_TOL

    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = self.rho11, self.rho22, self.rho33, self.rho44
        m[0, 3] = self.rho14
        m[3, 0] = complex(self.rho14).conjugate()
        m[1, 2] = self.rho23
        m[2, 1] = complex(self.rho23).conjugate()
        return m

    @classmethod
    def from_matrix(cls, m, tol: float = 1e-12) -> "XState":
        m = np.asarray(m, dtype=complex)
        mask = np.ones((4, 4), dtype=bool)
        for i, j in ((0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)):
            mask[i, j] = False
        if np.max(np.abs(m[mask])) > tol:
            raise ValueError("matrix is not X-shaped")
        d = np.real(np.diag(m))
        return cls(float(d[0]), float(d[1]), float(d[2]), float(d[3]), complex(m[0, 3]), complex(m[1, 2]))


@dataclass(frozen=True)
class FanoCoefficients:
    """Pauli-basis coefficients R_ij of an X-state (ancilla index first)."""

    r03: float
    r30: float
    r12: float
    r21: float
    r11: float
    r22: float
    r33: float


@dataclass(frozen=True)
class FamilyParams:
    mu: float
    nu: float
    u: float
    v: float


def to_fano(x: XState) -> FanoCoefficients:
    r14, r23 = complex(x.rho14), complex(x.rho23)
    return FanoCoefficients(
        r03=x.rho11 - x.rho22 + x.rho33 - x.rho44,
        r30=x.rho11 + x.rho22 - x.rho33 - x.rho44,
        r12=2.0 * (r23.imag - r14.imag),
        r21=-2.0 * (r14.imag + r23.imag),
        r11=2.0 * (r14.real + r23.real),
        r22=2.0 * (r23.real - r14.real),
        r33=x.rho11 + x.rho44 - x.rho22 - x.rho33,
    )


def from_fano(f: FanoCoefficients) -> XState:
    return XState(
        rho11=0.25 * (1.0 + f.r03 + f.r30 + f.r33),
        rho22=0.25 * (1.0 - f.r03 + f.r30 - f.r33),
        rho33=0.25 * (1.0 + f.r03 - f.r30 - f.r33),
        rho44=0.25 * (1.0 - f.r03 - f.r30 + f.r33),
        rho14=0.25 * complex(f.r11 - f.r22, -(f.r12 + f.r21)),
        rho23=0.25 * complex(f.r11 + f.r22, f.r12 - f.r21),
    )


def check_family(p: FamilyParams) -> FamilyParams:
    rest = 1.0 - 2.0 * p.mu - p.nu
    checks = (
        (p.mu >= 0.0, f"mu >= 0 (mu = {p.mu})"),
        (p.nu >= 0.0, f"nu >= 0 (nu = {p.nu})"),
        (0.0 <= 2.0 * p.mu + p.nu <= 1.0, f"0 <= 2*mu + nu <= 1 (2*mu + nu = {2 * p.mu + p.nu})"),
        (p.u * p.u <= p.mu * p.mu, f"u^2 <= mu^2 (u = {p.u}, mu = {p.mu})"),
        (p.v * p.v <= p.nu * rest, f"v^2 <= nu*(1 - 2*mu - nu) (v^2 = {p.v * p.v}, bound = {p.nu * rest})"),
    )
    for ok, text in checks:
        if not ok:
            raise FamilyConstraintError(f"family constraint violated: {text}")
    return p


def make_family_state(p: FamilyParams) -> XState:
    check_family(p)
    return XState(
        rho11=p.mu,
        rho22=p.nu,
        rho33=1.0 - 2.0 * p.mu - p.nu,
        rho44=p.mu,
        rho14=complex(p.u, 0.0),
        rho23=complex(0.0, p.v),
    )


BELL_PLUS = XState(0.5, 0.0, 0.0, 0.5, 0.5 + 0j, 0j)


def evolve(x: XState, params: BathParameters, t: float) -> XState:
    """Apply ``id (x) gamma_t`` to an X-state using the closed-form propagator."""
    if t == 0:
        return x
    f = to_fano(x)
    m = propagator_at(params, t)
    lam, eg = m.lambda_t, m.exp_gamma
    m11, m12, m21, m22 = m.m11, m.m12, m.m21, m.m22

    s_plus = f.r03 + f.r33
    s_minus = f.r03 - f.r33
    rho11 = 0.25 * ((1.0 + lam) * (1.0 + f.r30) + eg * s_plus)
    rho22 = 0.25 * ((1.0 - lam) * (1.0 + f.r30) - eg * s_plus)
    rho33 = 0.25 * ((1.0 + lam) * (1.0 - f.r30) + eg * s_minus)
    rho44 = 0.25 * ((1.0 - lam) * (1.0 - f.r30) - eg * s_minus)

    rho14 = 0.25 * complex(
        m11 * f.r11 + m12 * f.r12 - m21 * f.r21 - m22 * f.r22,
        -(m21 * f.r11 + m22 * f.r12 + m11 * f.r21 + m12 * f.r22),
    )
    rho23 = 0.25 * complex(
        m11 * f.r11 + m12 * f.r12 + m21 * f.r21 + m22 * f.r22,
        m21 * f.r11 + m22 * f.r12 - m11 * f.r21 - m12 * f.r22,
    )
    return XState(rho11, rho22, rho33, rho44, rho14, rho23)


def reduced_system_state(x: XState, params: BathParameters, t: float) -> BlochState:
    """Bloch vector of the bath-coupled qubit; only its z component survives."""
    r03 = to_fano(x).r03
    m = propagator_at(params, t)
    return BlochState(0.0, 0.0, m.lambda_t + m.exp_gamma * r03)


def reduced_ancilla_state(x: XState) -> BlochState:
    return BlochState(0.0, 0.0, to_fano(x).r30)


def apply_local_bloch_map(rho4, transfer) -> np.ndarray:
    """Apply a qubit map, given as its 4x4 matrix on ``(1, r1, r2, r3)``, to the second factor.

    Works on arbitrary two-qubit operators by transporting all sixteen Pauli
    coefficients, so it does not assume X-shape.
    """
    rho4 = np.asarray(rho4, dtype=complex)
    transfer = np.asarray(transfer)
    basis = [[kron(PAULI[i], PAULI[j]) for j in range(4)] for i in range(4)]
    coeff = np.array([[np.trace(rho4 @ basis[i][j]) for j in range(4)] for i in range(4)])
    # the affine row mixes in the identity component of each ancilla slice
    moved = coeff @ transfer.T
    out = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            out += moved[i, j] * basis[i][j]
    return out / 4.0


def positivity_minors(x: XState) -> tuple[float, float, float]:
    """(rho11*rho44 - |rho14|^2, rho22*rho33 - |rho23|^2, smallest diagonal entry)."""
    m1 = x.rho11 * x.rho44 - abs(x.rho14) ** 2
    m2 = x.rho22 * x.rho33 - abs(x.rho23) ** 2
    return m1, m2, min(x.rho11, x.rho22, x.rho33, x.rho44)


def _concurrence_branches(x: XState) -> tuple[float, float]:
    return (
        abs(x.rho23) - math.sqrt(max(x.rho11 * x.rho44, 0.0)),
        abs(x.rho14) - math.sqrt(max(x.rho22 * x.rho33, 0.0)),
    )


def concurrence(x: XState) -> float:
    if not x.physical:
        raise PositivityError(f"concurrence undefined for non-positive state (minors {positivity_minors(x)})")
    b23, b14 = _concurrence_branches(x)
    return 2.0 * max(0.0, b23, b14)


def concurrence_slope_zero_T(params: BathParameters, p: FamilyParams) -> float:
    """First-order time coefficient of |rho23(t)| - sqrt(rho11(t) rho44(t)).

    Requires a zero-temperature bath (w = gamma).  Negative ``v`` is handled
    through the concurrence-preserving map (u, v) -> (-u, -v).
    """
    if params.gamma > 0.0 and abs(params.w - params.gamma) > 1e-10 * params.gamma:
        raise WrongRegimeError(f"zero-temperature bath required (w = gamma), got w/gamma = {params.w / params.gamma}")
    if params.gamma == 0.0 and params.w != 0.0:
        raise WrongRegimeError("zero-temperature bath required (w = gamma)")
    if p.v == 0.0:
        raise ValueError("slope of |rho23| is undefined at v = 0")
    u, v = (p.u, p.v) if p.v > 0 else (-p.u, -p.v)
    return params.gamma * (3.0 * p.mu + p.nu - 1.0) - ((params.a + params.alpha) * v + 2.0 * params.b * u)


def _entropy_from_values(vals: np.ndarray) -> float:
    vals = vals[vals > 0.0]
    return float(-np.sum(vals * np.log(vals)))


def mutual_information(rho4) -> float:
    """Quantum mutual information between the two qubits, in nats.

    With full support the entropy-sum identity is used; otherwise the
    relative entropy to the product of marginals, which handles zero
    eigenvalues through the log floor.
    """
    rho4 = np.asarray(rho4, dtype=complex)
    vals = hermitian_eig(rho4).values
    if vals[0] < PSD_REJECT:
        raise PositivityError(f"state has eigenvalue {vals[0]:.3e}")
    rho_a = partial_trace(rho4, "second")
    rho_s = partial_trace(rho4, "first")
    if vals[0] > FULL_SUPPORT:
        s_a = _entropy_from_values(hermitian_eig(rho_a).values)
        s_s = _entropy_from_values(hermitian_eig(rho_s).values)
        mi = s_a + s_s - _entropy_from_values(vals)
    else:
        mi = relative_entropy(rho4, kron(rho_a, rho_s))
    return max(mi, 0.0)


def mutual_information_relative(rho4) -> float:
    """Defining formula S(rho || rho_A (x) rho_S), kept for cross-checks."""
    rho4 = np.asarray(rho4, dtype=complex)
    return relative_entropy(rho4, kron(partial_trace(rho4, "second"), partial_trace(rho4, "first")))
