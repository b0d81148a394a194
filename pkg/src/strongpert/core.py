"""Dense complex linear algebra and Bessel functions.

Nothing here knows about the physics; the other modules build on these
primitives. Matrices are plain ``numpy`` arrays of dtype complex128.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NotHermitianError, NumericalError

HERMITIAN_TOL = 1e-12
DEGENERACY_RTOL = 1e-9
MAX_BESSEL_ORDER = 10_000


def as_state(psi, dim=None, normalized=True, tol=1e-10):
    """Validate and return ``psi`` as a complex vector.

    When ``normalized`` is set the Euclidean norm must be 1 within ``tol``.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.ndim != 1 or psi.size == 0:
        raise ValueError(f"state must be a non-empty 1-D vector, got shape {psi.shape}")
    if dim is not None and psi.shape[0] != dim:
        raise ValueError(f"state has dimension {psi.shape[0]}, expected {dim}")
    if normalized:
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > tol:
            raise ValueError(f"state is not normalised (norm = {norm!r})")
    return psi


def hermiticity_error(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m, name="matrix", tol=HERMITIAN_TOL):
    """Return ``m`` as a complex square array, raising if it is not Hermitian."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise NotHermitianError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    err = hermiticity_error(m)
    # relative slack for matrices with large entries
    scale = max(1.0, float(np.max(np.abs(m))))
    if err > tol * scale:
        raise NotHermitianError(f"{name} is not Hermitian: max|M - M^dagger| = {err:.3e}")
    return m


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and column-orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.conj().T

    def degenerate_pairs(self, rtol=DEGENERACY_RTOL):
        """Indices i such that levels i and i+1 are degenerate."""
        return degenerate_pairs(self.eigenvalues, rtol)

    @property
    def is_degenerate(self):
        return bool(self.degenerate_pairs())


def degenerate_pairs(eigenvalues, rtol=DEGENERACY_RTOL):
    w = np.sort(np.asarray(eigenvalues, dtype=float))
    if w.size < 2:
        return []
    span = w[-1] - w[0]
    gaps = np.diff(w)
    return [int(i) for i in np.nonzero(gaps < rtol * (span + 1.0))[0]]


def hermitian_eigendecompose(m, name="matrix"):
    """Eigendecomposition of a Hermitian matrix.

    Degenerate spectra are returned as-is; callers that need a
    non-degenerate spectrum check :meth:`EigenSystem.degenerate_pairs`.
    """
    m = check_hermitian(m, name)
    try:
        w, q = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition of {name} did not converge: {exc}") from exc
    return EigenSystem(w, q)


def expi_action(h, dt, psi, hbar=1.0):
    """exp(-(i/hbar) H dt) psi, evaluated exactly through the eigenbasis of H."""
    if not np.isfinite(dt):
        raise ValueError(f"time step must be finite, got {dt!r}")
    es = hermitian_eigendecompose(h, "H")
    psi = np.asarray(psi, dtype=np.complex128)
    q = es.eigenvectors
    return q @ (np.exp(-1j * es.eigenvalues * (dt / hbar)) * (q.conj().T @ psi))


def expi_matrix(h, dt, hbar=1.0):
    """The full unitary exp(-(i/hbar) H dt)."""
    es = hermitian_eigendecompose(h, "H")
    q = es.eigenvectors
    return (q * np.exp(-1j * es.eigenvalues * (dt / hbar))) @ q.conj().T


def bessel_j_table(max_order, z):
    """Array ``[J_0(z), ..., J_max_order(z)]`` for integer orders.

    Computed by Miller's downward recurrence normalised with
    J_0 + 2 * sum_k J_2k = 1, which is stable for every order and argument.
    """
    max_order = int(max_order)
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    if max_order > MAX_BESSEL_ORDER:
        raise ValueError(f"|order| <= {MAX_BESSEL_ORDER} required, got {max_order}")
    z = float(z)
    if not np.isfinite(z):
        raise ValueError(f"argument must be finite, got {z!r}")
    if z == 0.0:
        out = np.zeros(max_order + 1)
        out[0] = 1.0
        return out
    vals = _kernels.bessel_table(max_order, abs(z))
    if z < 0:
        vals = vals * (-1.0) ** np.arange(max_order + 1)
    return vals


def bessel_j(order, z):
    """First-kind Bessel function J_order(z) for integer order."""
    order = int(order)
    n = abs(order)
    val = float(bessel_j_table(n, z)[n])
    if order < 0 and n % 2:
        val = -val
    return val


def bessel_j_symmetric(max_order, z):
    """``J_m(z)`` for ``m = -max_order .. max_order`` as one array."""
    pos = bessel_j_table(max_order, z)
    m = np.arange(1, max_order + 1)
    neg = (pos[1:] * (-1.0) ** m)[::-1]
    return np.concatenate([neg, pos])
