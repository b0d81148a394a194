"""Reference propagation of i hbar d/dt psi = (H0 + V) psi.

Shares nothing with the adiabatic/series modules beyond the dense linear
algebra in :mod:`strongpert.core`, so it can be used to validate them.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .adiabatic import validate_grid
from .core import as_state, check_hermitian, hermiticity_error
from .errors import NotHermitianError, NumericalError

# bytes of stacked eigenvectors processed per chunk
_CHUNK_BYTES = 64 * 2**20


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    step_used: float
    estimated_error: np.ndarray = None

    def probabilities(self):
        return np.abs(self.states) ** 2


def _sample_midpoints(grid, substeps):
    h = np.diff(grid) / substeps
    frac = (np.arange(substeps) + 0.5)[None, :]
    mids = grid[:-1, None] + frac * h[:, None]
    dts = np.repeat(h, substeps)
    return mids.ravel(), dts


def _propagate(h_of_t, psi0, grid, substeps, hbar):
    mids, dts = _sample_midpoints(grid, substeps)
    d = psi0.shape[0]
    nsteps = mids.size
    record = np.zeros(nsteps, dtype=bool)
    record[substeps - 1 :: substeps] = True
    chunk = max(substeps, (_CHUNK_BYTES // (16 * d * d)) // substeps * substeps)
    states = [psi0]
    psi = psi0
    for start in range(0, nsteps, chunk):
        stop = min(nsteps, start + chunk)
        hs = np.empty((stop - start, d, d), dtype=np.complex128)
        for s in range(start, stop):
            h = np.asarray(h_of_t(mids[s]), dtype=np.complex128)
            if hermiticity_error(h) > 1e-12 * max(1.0, float(np.max(np.abs(h)))):
                raise NotHermitianError(f"H(t={mids[s]:.6g}) is not Hermitian")
            hs[s - start] = h
        try:
            w, q = np.linalg.eigh(hs)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigendecomposition failed near t={mids[start]:.6g}") from exc
        psi, rec = _kernels.step_sequence(w, q, dts[start:stop], psi, hbar, record[start:stop])
        states.extend(rec)
    return np.array(states)


def evolve_exact(h_of_t, psi0, grid, substeps=1, hbar=1.0, estimate_error=True):
    """Midpoint exponential stepping on ``grid`` with ``substeps`` per interval.

    psi_{k+1} = exp(-(i/hbar) H(t_k + dt/2) dt) psi_k is second-order
    accurate and exactly norm-preserving. ``estimated_error`` holds
    ||psi(substeps) - psi(2 substeps)|| at each grid time.
    """
    grid = validate_grid(grid)
    if int(substeps) < 1:
        raise ValueError("substeps must be >= 1")
    substeps = int(substeps)
    psi0 = as_state(psi0)
    check_hermitian(h_of_t(grid[0]), f"H(t={grid[0]:.6g})")
    states = _propagate(h_of_t, psi0, grid, substeps, hbar)
    err = None
    if estimate_error:
        fine = _propagate(h_of_t, psi0, grid, 2 * substeps, hbar)
        err = np.linalg.norm(states - fine, axis=1)
    step = float(np.max(np.diff(grid)) / substeps)
    return Trajectory(grid, states, step, err)


def rabi_closed_form(e1, e2, v12, t, hbar=1.0):
    """Exact propagator exp(-(i/hbar) H t) of H = [[e1, v12], [conj(v12), e2]].

    Writes H = ((e1+e2)/2) I + d . sigma and uses
    exp(-i a d.sigma) = cos(a|d|) I - i sin(a|d|) (d/|d|) . sigma.
    """
    v12 = complex(v12)
    mean = 0.5 * (e1 + e2)
    dx, dy, dz = v12.real, -v12.imag, 0.5 * (e1 - e2)
    dn = np.sqrt(dx * dx + dy * dy + dz * dz)
    a = dn * t / hbar
    overall = np.exp(-1j * mean * t / hbar)
    if dn == 0.0:
        return overall * np.eye(2, dtype=np.complex128)
    nx, ny, nz = dx / dn, dy / dn, dz / dn
    c, s = np.cos(a), np.sin(a)
    u = np.array(
        [[c - 1j * s * nz, -1j * s * (nx - 1j * ny)], [-1j * s * (nx + 1j * ny), c + 1j * s * nz]],
        dtype=np.complex128,
    )
    return overall * u
