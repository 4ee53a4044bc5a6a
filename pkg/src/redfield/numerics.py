"""Dense linear algebra for the fixed sizes used throughout (2x2 and 4x4).

Everything here works on plain numpy arrays.  The eigensolver is a cyclic
complex Jacobi iteration and the exponential is scaling-and-squaring over a
truncated Taylor series, so both can be checked against closed forms at
these sizes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError, SymmetryError

HERMITIAN_TOL = 1e-13
JACOBI_TOL = 1e-14
LOG_FLOOR = 1e-300
PSD_REJECT = -1e-10

_ALLOWED_DIMS = (2, 4)
_TAYLOR_DEGREE = 16
_MAX_SWEEPS = 50


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order and the matching orthonormal eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def _square(m, name: str = "matrix", dims=_ALLOWED_DIMS) -> np.ndarray:
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in dims:
        raise ValueError(f"{name} must be square with dimension in {dims}, got shape {arr.shape}")
    return arr


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    arr = np.asarray(m)
    scale = np.max(np.abs(arr)) if arr.size else 0.0
    return bool(np.max(np.abs(arr - arr.conj().T)) <= tol * scale)


def hermitian_eig(m, tol: float = JACOBI_TOL) -> Spectrum:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation first removes the phase of the pivot element and then
    applies a real plane rotation, so the accumulated transform stays unitary.
    Iteration stops once the off-diagonal Frobenius norm falls below
    ``tol * ||m||_F``.
    """
    a = _square(m).astype(complex)
    if not is_hermitian(a):
        raise SymmetryError(
            f"matrix is not Hermitian: max|M - M^H| = {np.max(np.abs(a - a.conj().T)):.3e}"
        )
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    offdiag = ~np.eye(n, dtype=bool)
    threshold = tol * np.linalg.norm(a)

    for _ in range(_MAX_SWEEPS):
        off = np.linalg.norm(a[offdiag])
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= threshold * 1e-3 or mag == 0.0:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                j = np.eye(n, dtype=complex)
                j[p, p] = c
                j[p, q] = s
                j[q, p] = -s * phase.conjugate()
                j[q, q] = c * phase.conjugate()
                a = j.conj().T @ a @ j
                v = v @ j
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    return Spectrum(values=values[order].copy(), vectors=v[:, order].copy())


def eigvalsh(m) -> np.ndarray:
    return hermitian_eig(m).values


def matrix_exp(a) -> np.ndarray:
    """exp(a) by scaling-and-squaring with a degree-16 Taylor polynomial.

    The matrix is scaled by 2**-s so that its 1-norm is at most 1/2, where the
    truncated series is accurate to well below machine precision.  A stack of
    shape ``(..., n, n)`` is handled in one pass, each matrix with its own s.
    """
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"matrix_exp needs square matrices, got shape {a.shape}")
    n = a.shape[-1]
    if n == 0:
        return a.astype(float)
    norm1 = np.max(np.sum(np.abs(a), axis=-2), axis=-1)
    with np.errstate(divide="ignore"):
        s = np.where(norm1 > 0.5, np.ceil(np.log2(norm1 / 0.5)), 0.0).astype(int)
    scaled = a / np.exp2(s)[..., None, None]

    ident = np.eye(n, dtype=a.dtype if np.iscomplexobj(a) else float)
    result = np.broadcast_to(ident, a.shape).copy()
    for k in range(_TAYLOR_DEGREE, 0, -1):
        result = ident + (scaled @ result) / k
    for step in range(int(np.max(s))):
        todo = s > step
        if todo.ndim == 0:
            result = result @ result
        else:
            result[todo] = result[todo] @ result[todo]
    return result


def kron(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices; row index is ``2*i_a + i_b``."""
    return np.kron(_square(a, "a", (2,)), _square(b, "b", (2,)))


def partial_trace(rho, subsystem: str) -> np.ndarray:
    """Trace out ``"first"`` or ``"second"`` factor of a two-qubit operator."""
    r = _square(rho, "rho", (4,)).reshape(2, 2, 2, 2)
    if subsystem == "first":
        return np.einsum("ijik->jk", r)
    if subsystem == "second":
        return np.einsum("ijkj->ik", r)
    raise ValueError(f"subsystem must be 'first' or 'second', got {subsystem!r}")


def matrix_log_psd(m, floor: float = LOG_FLOOR) -> np.ndarray:
    """Logarithm of a positive semidefinite matrix, eigenvalues clamped at ``floor``."""
    if floor <= 0:
        raise ValueError("floor must be positive")
    spec = hermitian_eig(m)
    if spec.values[0] < PSD_REJECT:
        raise NotPSDError(f"matrix has eigenvalue {spec.values[0]:.3e} < {PSD_REJECT:g}")
    logs = np.log(np.maximum(spec.values, floor))
    return (spec.vectors * logs) @ spec.vectors.conj().T


def von_neumann_entropy(m) -> float:
    """Entropy in nats with the convention 0 log 0 = 0."""
    vals = hermitian_eig(m).values
    if vals[0] < PSD_REJECT:
        raise NotPSDError(f"matrix has eigenvalue {vals[0]:.3e} < {PSD_REJECT:g}")
    vals = vals[vals > 0.0]
    return float(-np.sum(vals * np.log(vals)))


def relative_entropy(rho, sigma, floor: float = LOG_FLOOR) -> float:
    """Tr rho (log rho - log sigma), in nats."""
    diff = matrix_log_psd(rho, floor) - matrix_log_psd(sigma, floor)
    return float(np.real(np.trace(np.asarray(rho) @ diff)))
