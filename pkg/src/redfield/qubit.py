"""Single-qubit Redfield dynamics in the Bloch representation.

The state is the 4-vector ``(1, r1, r2, r3)`` and obeys
``d/dt |r> = -2 L |r>`` with the real 4x4 generator ``L`` built from
:class:`~redfield.bath.BathParameters`.  The finite-time map is known in
closed form, so nothing here integrates an ODE.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .bath import BathParameters, omega_squared, validate
from .errors import NoEquilibriumError, StrongCouplingError
from .numerics import hermitian_eig

PHYSICAL_TOL = 1e-12
GAMMA_ZERO = 1e-12


@dataclass(frozen=True)
class BlochState:
    r1: float
    r2: float
    r3: float

    @property
    def norm_squared(self) -> float:
        return self.r1**2 + self.r2**2 + self.r3**2

    @property
    def det(self) -> float:
        """Determinant of the 2x2 density matrix, (1 - |r|^2) / 4."""
        return 0.25 * (1.0 - self.norm_squared)

    @property
    def physical(self) -> bool:
        return self.norm_squared <= 1.0 + PHYSICAL_TOL

    def vector4(self) -> np.ndarray:
        return np.array([1.0, self.r1, self.r2, self.r3])

    def density_matrix(self) -> np.ndarray:
        return 0.5 * np.array(
            [[1.0 + self.r3, self.r1 - 1j * self.r2], [self.r1 + 1j * self.r2, 1.0 - self.r3]]
        )

    @classmethod
    def from_vector4(cls, vec) -> "BlochState":
        return cls(float(vec[1]), float(vec[2]), float(vec[3]))

    @classmethod
    def from_density_matrix(cls, rho) -> "BlochState":
        rho = np.asarray(rho)
        return cls(2.0 * rho[1, 0].real, 2.0 * rho[1, 0].imag, (rho[0, 0] - rho[1, 1]).real)


@dataclass(frozen=True)
class GeneratorMatrix:
    matrix: np.ndarray
    params: BathParameters


@dataclass(frozen=True)
class PropagatorMatrices:
    """Coefficients of the Bloch map at one time (or an array of times).

    ``r1, r2`` mix through the 2x2 block ``m``; ``r3`` relaxes as
    ``exp_gamma * r3 + lambda_t``.
    """

    m11: float
    m12: float
    m21: float
    m22: float
    lambda_t: float
    exp_gamma: float

    def as_matrix(self) -> np.ndarray:
        """The 4x4 affine map acting on ``(1, r1, r2, r3)``; scalar times only."""
        return np.array(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, self.m11, self.m12, 0.0],
                [0.0, self.m21, self.m22, 0.0],
                [self.lambda_t, 0.0, 0.0, self.exp_gamma],
            ]
        )


def build_generator(params: BathParameters) -> GeneratorMatrix:
    p = validate(params)
    mat = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, p.a, p.b + p.omega_tilde, 0.0],
            [0.0, p.b - p.omega_tilde, p.alpha, 0.0],
            [p.w, 0.0, 0.0, p.gamma],
        ]
    )
    return GeneratorMatrix(matrix=mat, params=p)


def big_omega(params: BathParameters) -> float:
    """Oscillation frequency of the transverse Bloch components."""
    sq = omega_squared(params)
    if not sq > 0.0:
        raise StrongCouplingError(f"Omega^2 = {sq:.6g} is not positive")
    return math.sqrt(sq)


def relaxation_offset(params: BathParameters, t):
    """Lambda(t) = -(w/gamma)(1 - exp(-2 gamma t)), with its gamma -> 0 limit -2 w t."""
    p = params
    if p.gamma <= GAMMA_ZERO * p.omega:
        return -2.0 * p.w * np.asarray(t, dtype=float)
    return (p.w / p.gamma) * np.expm1(-2.0 * p.gamma * np.asarray(t, dtype=float))


def propagator_at(params: BathParameters, t) -> PropagatorMatrices:
    """Closed-form coefficients of exp(-2 t L).

    ``t`` may be a scalar or a numpy array; negative times give the inverse
    map, which finite-difference checks rely on.
    """
    p = params
    om = big_omega(p)
    t_arr = np.asarray(t, dtype=float)
    decay = np.exp(-(p.a + p.alpha) * t_arr)
    sin = np.sin(om * t_arr)
    cos = np.cos(om * t_arr)
    skew = (p.a - p.alpha) / om

    fields = dict(
        m11=decay * (cos - skew * sin),
        m22=decay * (cos + skew * sin),
        m12=-2.0 * decay * (p.b + p.omega_tilde) / om * sin,
        m21=-2.0 * decay * (p.b - p.omega_tilde) / om * sin,
        lambda_t=relaxation_offset(p, t_arr),
        exp_gamma=np.exp(-2.0 * p.gamma * t_arr),
    )
    if t_arr.ndim == 0:
        fields = {k: float(v) for k, v in fields.items()}
    return PropagatorMatrices(**fields)


def propagate(params: BathParameters, state: BlochState, t: float) -> BlochState:
    m = propagator_at(params, t)
    return BlochState(
        m.m11 * state.r1 + m.m12 * state.r2,
        m.m21 * state.r1 + m.m22 * state.r2,
        m.exp_gamma * state.r3 + m.lambda_t,
    )


def det_rate_at_zero(params: BathParameters, state: BlochState) -> float:
    """d/dt Det[rho(t)] at t = 0 for the initial Bloch vector ``state``.

    Equals ``a r1^2 + alpha r2^2 + 2 b r1 r2 + r3 (w + gamma r3)``; a negative
    value on a pure state means the evolved matrix immediately acquires a
    negative eigenvalue.
    """
    p = params
    r1, r2, r3 = state.r1, state.r2, state.r3
    return p.a * r1 * r1 + p.alpha * r2 * r2 + 2.0 * p.b * r1 * r2 + r3 * (p.w + p.gamma * r3)


def positivity_witness(params: BathParameters) -> BlochState | None:
    """Equatorial pure state whose determinant starts decreasing, if any.

    The transverse part of the rate is the quadratic form of
    ``[[a, b], [b, alpha]]``; it is indefinite exactly when ``b^2 > a*alpha``,
    and then the eigenvector of the negative eigenvalue is returned.
    """
    p = params
    if p.b * p.b <= p.a * p.alpha:
        return None
    spec = hermitian_eig(np.array([[p.a, p.b], [p.b, p.alpha]], dtype=complex))
    vec = spec.vectors[:, 0]
    # eigenvector of a real symmetric matrix, up to a global phase
    vec = vec * np.exp(-1j * np.angle(vec[np.argmax(np.abs(vec))]))
    r1, r2 = vec.real
    norm = math.hypot(r1, r2)
    return BlochState(r1 / norm, r2 / norm, 0.0)


def davies_average(params: BathParameters) -> BathParameters:
    """Generator rates after averaging the dissipator over the free rotation."""
    mean = 0.5 * (params.a + params.alpha)
    return dataclasses.replace(params, a=mean, alpha=mean, b=0.0)


def gibbs_state(params: BathParameters) -> BlochState:
    if params.gamma == 0.0:
        raise NoEquilibriumError("gamma = 0: the longitudinal component never relaxes")
    return BlochState(0.0, 0.0, -params.w / params.gamma)


def thermal_density_matrix(omega: float, beta: float) -> np.ndarray:
    """exp(-beta H) / Z for H = omega * sigma_z."""
    if math.isinf(beta):
        return np.diag([0.0, 1.0]).astype(complex)
    # shift energies so the larger weight is exp(0)
    x = -2.0 * beta * abs(omega)
    lo, hi = (1.0, math.exp(x)) if omega < 0 else (math.exp(x), 1.0)
    z = lo + hi
    return np.diag([lo / z, hi / z]).astype(complex)
