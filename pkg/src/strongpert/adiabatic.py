"""Adiabatic leading order: track the eigenbasis of V(t) and build U(t, t0).

The propagator generated by the dominant perturbation alone is

    U(t, t0) = sum_n exp(i gamma_n) exp(-i/hbar int v_n) |n;t><n;t0|

and, with the level shifts <n;t|H0|n;t> resummed into it, picks up the extra
factor exp(-i/hbar int <n;t'|H0|n;t'> dt').
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import check_hermitian, degenerate_pairs, hermitian_eigendecompose
from .errors import DegeneracyError, LevelMatchingError

CONTINUITY_MIN = 0.9
AMBIGUITY_TOL = 1e-6


def validate_grid(grid, min_points=2):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < min_points:
        raise ValueError(f"time grid needs at least {min_points} points")
    if not np.all(np.isfinite(grid)):
        raise ValueError("time grid contains non-finite values")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return grid


def _match_levels(prev, new, t):
    """Permutation of the columns of ``new`` following the columns of ``prev``."""
    overlaps = prev.conj().T @ new
    mag = np.abs(overlaps)
    d = mag.shape[0]
    perm = np.argmax(mag, axis=1)
    if d > 1:
        top2 = np.sort(mag, axis=1)[:, -2:]
        ambiguous = np.nonzero(top2[:, 1] - top2[:, 0] < AMBIGUITY_TOL)[0]
        if ambiguous.size:
            raise LevelMatchingError(
                f"level {int(ambiguous[0])} matches two eigenvectors equally well at t={t:.6g}; "
                "refine the time grid",
                time=t,
            )
    if np.unique(perm).size != d:
        raise LevelMatchingError(
            f"levels cannot be matched one-to-one at t={t:.6g}; refine the time grid", time=t
        )
    best = mag[np.arange(d), perm]
    if np.any(best < CONTINUITY_MIN):
        n = int(np.argmin(best))
        raise LevelMatchingError(
            f"level {n} lost continuity at t={t:.6g} (overlap {best[n]:.3f} < {CONTINUITY_MIN}); "
            "refine the time grid",
            time=t,
        )
    return perm, overlaps[np.arange(d), perm]


@dataclass(frozen=True)
class SpectralPath:
    """Tracked eigensystem of V(t) on a time grid with accumulated phases.

    Arrays are indexed ``[k, n]`` (grid point, level); ``eigenvectors[k]``
    holds |n;t_k> as columns and ``h0_frame[k]`` the matrix <m;t_k|H0|n;t_k>.
    All phases are in radians and vanish at the first grid point.
    """

    grid: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    gamma: np.ndarray
    dyn_phase: np.ndarray
    shift_phase: np.ndarray
    h0_frame: np.ndarray
    hbar: float = 1.0

    @property
    def dim(self):
        return self.eigenvalues.shape[1]

    @property
    def level_shifts(self):
        """<n;t_k|H0|n;t_k> for every grid point and level."""
        return np.real(np.einsum("kaa->ka", self.h0_frame))

    def phases(self, resummed=False):
        """Per-level factor multiplying |n;t><n;t0| in U(t, t0)."""
        arg = self.gamma - self.dyn_phase
        if resummed:
            arg = arg - self.shift_phase
        return np.exp(1j * arg)

    def propagator(self, k, resummed=False):
        q = self.eigenvectors[k]
        q0 = self.eigenvectors[0]
        return (q * self.phases(resummed)[k]) @ q0.conj().T

    # The methods below form the interface the series module works against.

    def frame_coords(self, psi):
        """Coefficients <n;t0|psi>."""
        return self.eigenvectors[0].conj().T @ np.asarray(psi, dtype=np.complex128)

    def to_lab(self, x, resummed=False, indices=None):
        """U(t_k, t0) applied to frame coordinates ``x[k]`` for each k."""
        idx = np.arange(self.grid.size) if indices is None else np.asarray(indices)
        ph = self.phases(resummed)[idx]
        return np.einsum("kab,kb->ka", self.eigenvectors[idx], ph * x)

    def kernel_matrices(self, resummed=False, offdiag=False):
        """U^dagger H0 U in the t0 frame at every grid point, shape (N, d, d)."""
        ph = self.phases(resummed)
        mats = ph.conj()[:, :, None] * self.h0_frame * ph[:, None, :]
        if offdiag:
            d = self.dim
            mats = mats.copy()
            mats[:, np.arange(d), np.arange(d)] = 0.0
        return mats

    def apply_kernel(self, x, resummed=False, offdiag=False):
        """``K_k x[k]`` for all grid points, K = U^dagger H0 U in the t0 frame."""
        return _kernels.phased_kernel_apply(self.h0_frame, self.phases(resummed), x, offdiag)

    def validity_ratio(self):
        return validity_ratio(self)


def track_spectral_path(v_of_t, h0_of_t, grid, hbar=1.0, *, transport=True, initial_phases=None):
    """Follow the eigenbasis of ``v_of_t`` along ``grid``.

    Levels are matched between neighbouring grid points by maximal overlap.
    With ``transport`` (default) each eigenvector is rephased so that its
    overlap with its predecessor is real and positive. Without it the raw
    eigensolver phases are kept and the geometric phase accumulator
    compensates, which yields the same propagator.

    ``initial_phases`` multiplies the eigenvectors at t0, allowing the gauge
    freedom of the initial frame to be exercised.

    Raises
    ------
    DegeneracyError
        If V(t) has a degenerate spectrum at a grid point.
    LevelMatchingError
        If levels cannot be followed unambiguously between grid points.
    """
    grid = validate_grid(grid)
    nt = grid.size
    evals = evecs = None
    h0f = None
    gamma = None
    for k, t in enumerate(grid):
        es = hermitian_eigendecompose(v_of_t(t), f"V(t={t:.6g})")
        if degenerate_pairs(es.eigenvalues):
            raise DegeneracyError(f"perturbation spectrum is degenerate at t={t:.6g}", time=float(t))
        h0 = check_hermitian(h0_of_t(t), f"H0(t={t:.6g})")
        if evals is None:
            d = es.dim
            if h0.shape[0] != d:
                raise ValueError(f"H0 has dimension {h0.shape[0]} but V has {d}")
            evals = np.empty((nt, d))
            evecs = np.empty((nt, d, d), dtype=np.complex128)
            h0f = np.empty((nt, d, d), dtype=np.complex128)
            gamma = np.zeros((nt, d))
            q = es.eigenvectors.copy()
            if initial_phases is not None:
                q = q * np.asarray(initial_phases, dtype=np.complex128)[None, :]
            w = es.eigenvalues
        else:
            perm, ov = _match_levels(evecs[k - 1], es.eigenvectors, t)
            q = es.eigenvectors[:, perm]
            w = es.eigenvalues[perm]
            if transport:
                unit = ov / np.abs(ov)
                q = q * unit.conj()[None, :]
                ov = np.abs(ov)
            # gamma_n = int <n|i d/dt|n> dt  ->  increment -arg<n;t_k|n;t_k+1>
            gamma[k] = gamma[k - 1] - np.angle(ov)
        evals[k] = w
        evecs[k] = q
        h0f[k] = q.conj().T @ h0 @ q
    dyn = _kernels.np_cumtrapz(evals, grid) / hbar
    shifts = np.real(np.einsum("kaa->ka", h0f))
    shift_phase = _kernels.np_cumtrapz(shifts, grid) / hbar
    return SpectralPath(grid, evals, evecs, gamma, dyn, shift_phase, h0f, float(hbar))


def adiabatic_propagator(path, t_index, resummed=False):
    """U(t_k, t0) in the original basis; ``resummed`` includes the level-shift phases."""
    if not 0 <= t_index < path.grid.size:
        raise IndexError(f"t_index {t_index} outside grid of {path.grid.size} points")
    return path.propagator(t_index, resummed)


def validity_ratio(path):
    """Leading-order validity diagnostic at each grid point.

    max_n |<n;t|H0|n;t>| divided by min_n max(|v_n|, gap_n / 2), where gap_n
    is the distance from v_n to its nearest neighbouring level. Small values
    mean the unperturbed part is weak compared with the perturbation.
    """
    w = path.eigenvalues
    shifts = np.abs(path.level_shifts)
    if w.shape[1] == 1:
        scale = np.abs(w[:, 0])
    else:
        ws = np.sort(w, axis=1)
        gaps = np.diff(ws, axis=1)
        left = np.concatenate([np.full((ws.shape[0], 1), np.inf), gaps], axis=1)
        right = np.concatenate([gaps, np.full((ws.shape[0], 1), np.inf)], axis=1)
        nearest = np.minimum(left, right)
        scale = np.min(np.maximum(np.abs(ws), 0.5 * nearest), axis=1)
    with np.errstate(divide="ignore"):
        return np.max(shifts, axis=1) / scale
